#include "congibbs/gamefile.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace congibbs {

namespace {

struct Token {
  enum class Kind { Ident, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    current_ = Token{Token::Kind::End, "", line_};
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    current_.line = line_;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_'))
        ++pos_;
      current_.kind = Token::Kind::Ident;
      current_.text = text_.substr(start, pos_ - start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '.'))
        ++pos_;
      current_.kind = Token::Kind::Number;
      current_.text = text_.substr(start, pos_ - start);
    } else {
      current_.kind = Token::Kind::Symbol;
      current_.text = std::string(1, c);
      ++pos_;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  Token current_;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("game file line " + std::to_string(line) + ": " + what);
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  CongestionGame parse() {
    expect_ident("players");
    expect_symbol("=");
    num_players_ = take_int("player count");
    if (num_players_ < 1) fail(last_line_, "player count must be positive");

    while (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "resource")
      parse_resource();
    if (resources_.empty()) fail(lex_.peek().line, "expected at least one resource");

    expect_ident("structure");
    expect_symbol("=");
    CongestionGame game = parse_structure();
    if (lex_.peek().kind != Token::Kind::End)
      fail(lex_.peek().line, "unexpected trailing content '" + lex_.peek().text + "'");
    return game;
  }

 private:
  void parse_resource() {
    expect_ident("resource");
    const Token name = take(Token::Kind::Ident, "resource name");
    if (name_to_index_.count(name.text)) fail(name.line, "duplicate resource '" + name.text + "'");
    expect_ident("costs");
    expect_symbol("=");
    expect_symbol("[");
    std::vector<Rational> values;
    for (;;) {
      values.push_back(take_rational());
      if (try_symbol(",")) continue;
      expect_symbol("]");
      break;
    }
    if (static_cast<int>(values.size()) != num_players_)
      fail(name.line, "resource '" + name.text + "' needs exactly " +
                          std::to_string(num_players_) + " cost values");
    int capacity = num_players_;
    if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "capacity") {
      lex_.take();
      expect_symbol("=");
      if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "none") {
        lex_.take();
      } else {
        capacity = take_int("capacity");
        if (capacity < 0 || capacity > num_players_)
          fail(last_line_, "capacity must be between 0 and the player count");
      }
    }
    name_to_index_[name.text] = static_cast<int>(resources_.size());
    try {
      resources_.emplace_back(name.text, std::move(values), capacity);
    } catch (const std::invalid_argument& e) {
      fail(name.line, e.what());
    }
  }

  CongestionGame parse_structure() {
    const Token kind = take(Token::Kind::Ident, "structure kind");
    try {
      if (kind.text == "ep") {
        expect_symbol("{");
        auto root = parse_ep_expr();
        expect_symbol("}");
        return CongestionGame::ep(num_players_, std::move(resources_), std::move(root));
      }
      if (kind.text == "kuniform") {
        expect_ident("k");
        expect_symbol("=");
        expect_symbol("[");
        std::vector<int> demands;
        for (;;) {
          demands.push_back(take_int("demand"));
          if (try_symbol(",")) continue;
          expect_symbol("]");
          break;
        }
        if (static_cast<int>(demands.size()) != num_players_)
          fail(kind.line, "kuniform needs one demand per player");
        return CongestionGame::k_uniform(std::move(resources_), std::move(demands));
      }
      if (kind.text == "explicit") {
        expect_symbol("{");
        std::map<int, std::vector<std::vector<int>>> menus;
        while (!try_symbol("}")) {
          expect_ident("player");
          const int player = take_int("player index");
          if (player < 0 || player >= num_players_) fail(last_line_, "player index out of range");
          if (menus.count(player)) fail(last_line_, "duplicate player block");
          expect_symbol("=");
          expect_symbol("[");
          std::vector<std::vector<int>> menu;
          for (;;) {
            expect_symbol("[");
            std::vector<int> strat;
            for (;;) {
              strat.push_back(take_resource_ref());
              if (try_symbol(",")) continue;
              expect_symbol("]");
              break;
            }
            menu.push_back(std::move(strat));
            if (try_symbol(",")) continue;
            expect_symbol("]");
            break;
          }
          menus[player] = std::move(menu);
        }
        if (static_cast<int>(menus.size()) != num_players_)
          fail(lex_.peek().line, "explicit structure must cover every player");
        std::vector<std::vector<std::vector<int>>> strategies;
        strategies.reserve(menus.size());
        for (auto& [player, menu] : menus) strategies.push_back(std::move(menu));
        return CongestionGame::explicit_strategies(num_players_, std::move(resources_),
                                                   std::move(strategies));
      }
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      if (what.rfind("game file line", 0) == 0) throw;
      fail(kind.line, what);
    }
    fail(kind.line, "unknown structure '" + kind.text + "'");
  }

  std::unique_ptr<EPNode> parse_ep_expr() {
    const Token head = take(Token::Kind::Ident, "network expression");
    if (head.text == "arc") {
      expect_symbol("(");
      const int e = take_resource_ref();
      expect_symbol(")");
      return EPNode::make_arc(e);
    }
    if (head.text == "par") {
      expect_symbol("(");
      auto left = parse_ep_expr();
      expect_symbol(",");
      auto right = parse_ep_expr();
      expect_symbol(")");
      return EPNode::make_parallel(std::move(left), std::move(right));
    }
    if (head.text == "ext") {
      expect_symbol("(");
      const int e = take_resource_ref();
      expect_symbol(",");
      auto sub = parse_ep_expr();
      expect_symbol(")");
      return EPNode::make_extension(e, std::move(sub));
    }
    fail(head.line, "expected arc(...), par(...) or ext(...)");
  }

  int take_resource_ref() {
    const Token name = take(Token::Kind::Ident, "resource name");
    const auto it = name_to_index_.find(name.text);
    if (it == name_to_index_.end()) fail(name.line, "unknown resource '" + name.text + "'");
    return it->second;
  }

  Token take(Token::Kind kind, const std::string& what) {
    const Token t = lex_.take();
    if (t.kind != kind) fail(t.line, "expected " + what + ", got '" + t.text + "'");
    last_line_ = t.line;
    return t;
  }

  void expect_ident(const std::string& word) {
    const Token t = take(Token::Kind::Ident, "'" + word + "'");
    if (t.text != word) fail(t.line, "expected '" + word + "', got '" + t.text + "'");
  }

  void expect_symbol(const std::string& sym) {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::Symbol || t.text != sym)
      fail(t.line, "expected '" + sym + "', got '" + t.text + "'");
    last_line_ = t.line;
  }

  bool try_symbol(const std::string& sym) {
    if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == sym) {
      lex_.take();
      return true;
    }
    return false;
  }

  int take_int(const std::string& what) {
    const Token t = take(Token::Kind::Number, what);
    for (char c : t.text)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        fail(t.line, what + " must be an integer");
    if (t.text.size() > 9) fail(t.line, what + " is too large");
    return std::stoi(t.text);
  }

  Rational take_rational() {
    const Token t = take(Token::Kind::Number, "cost value");
    std::string text = t.text;
    if (try_symbol("/")) {
      const Token den = take(Token::Kind::Number, "denominator");
      text += "/" + den.text;
    }
    try {
      return parse_rational(text);
    } catch (const std::invalid_argument&) {
      fail(t.line, "bad cost value '" + text + "'");
    }
  }

  Lexer lex_;
  int num_players_ = 0;
  int last_line_ = 1;
  std::vector<CostFunction> resources_;
  std::map<std::string, int> name_to_index_;
};

}  // namespace

CongestionGame parse_game(const std::string& text) { return Parser(text).parse(); }

CongestionGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open game file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str());
}

}  // namespace congibbs
