#include "congibbs/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <thread>

#include "CLI11.hpp"
#include "congibbs/cap_uniform.hpp"
#include "congibbs/dynamics.hpp"
#include "congibbs/gamefile.hpp"
#include "congibbs/gibbs_ep.hpp"
#include "congibbs/matroid.hpp"
#include "congibbs/numeric.hpp"
#include "congibbs/verify.hpp"

namespace congibbs::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw std::invalid_argument("bad integer list entry: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::string resource_field(const CongestionGame& g, int player, std::int64_t strategy) {
  std::string s;
  g.visit_strategy(player, strategy, [&](int e) {
    if (!s.empty()) s += ';';
    s += g.resource(e).name();
  });
  return s;
}

using Meta = std::vector<std::pair<std::string, std::string>>;

void write_meta(std::ostream& os, const Meta& meta) {
  for (const auto& [key, value] : meta) os << "# " << key << " = " << value << '\n';
}

void write_profile_rows(std::ostream& os, const CongestionGame& g,
                        const std::vector<StrategyProfile>& samples) {
  os << "sample,player,strategy,resources\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (int p = 0; p < g.num_players(); ++p) {
      const std::int64_t strat = samples[i].choice[static_cast<std::size_t>(p)];
      os << i << ',' << p << ',' << strat << ',' << resource_field(g, p, strat) << '\n';
    }
  }
}

// Runs fn(0..count-1), optionally striped over worker threads. Results must
// be stored by index so the output is identical for any thread count.
void run_indexed(std::int64_t count, int threads,
                 const std::function<void(std::int64_t)>& fn) {
  if (threads <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::int64_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw std::invalid_argument("cannot open output file: " + path);
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

StrategyProfile start_profile(const CongestionGame& g) {
  switch (g.kind()) {
    case StructureKind::ExtensionParallel:
      return min_potential_profile(g);
    case StructureKind::KUniform:
      return greedy_cap_start(g);
    case StructureKind::Explicit:
      break;
  }
  StrategyProfile s;
  s.choice.assign(static_cast<std::size_t>(g.num_players()), 0);
  for (std::int64_t tries = 0; tries < 1'000'000; ++tries) {
    if (is_feasible(g, s)) return s;
    int pos = g.num_players() - 1;
    while (pos >= 0) {
      auto& c = s.choice[static_cast<std::size_t>(pos)];
      if (++c < g.num_strategies(pos)) break;
      c = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  throw std::runtime_error("game has no feasible profile");
}

struct SampleOpts {
  std::string game;
  double temperature = 1.0;
  double eps = 0.01;
  std::int64_t n = 1000;
  std::uint64_t seed = 12345;
  int threads = 1;
  double mix_constant = 4.0;
  std::string mode = "exact";
  std::string out_path;
};

CapMode parse_mode(const std::string& mode) {
  if (mode == "exact") return CapMode::Exact;
  if (mode == "mckay") return CapMode::McKay;
  throw std::invalid_argument("mode must be exact or mckay");
}

int cmd_sample_gibbs(const SampleOpts& o, std::ostream& fallback) {
  const CongestionGame g = load_game(o.game);
  std::vector<StrategyProfile> samples(static_cast<std::size_t>(o.n));

  Meta meta{{"command", "sample-gibbs"},
            {"game", o.game},
            {"temperature", fmt(o.temperature)},
            {"eps", fmt(o.eps)},
            {"samples", std::to_string(o.n)},
            {"seed", std::to_string(o.seed)},
            {"mix_constant", fmt(o.mix_constant)}};

  if (g.kind() == StructureKind::ExtensionParallel) {
    const std::uint64_t steps = base_exchange_budget(g.num_players(), o.eps, o.mix_constant);
    meta.emplace_back("chain_steps_per_sample", std::to_string(steps));
    run_indexed(o.n, o.threads, [&](std::int64_t i) {
      Rng rng(child_seed(o.seed, static_cast<std::uint64_t>(i)));
      samples[static_cast<std::size_t>(i)] =
          sample_gibbs_ep(g, o.temperature, o.eps, o.mix_constant, rng);
    });
  } else if (g.kind() == StructureKind::KUniform) {
    const CapMode mode = parse_mode(o.mode);
    int total_demand = 0;
    for (int k : g.demands()) total_demand += k;
    const std::uint64_t steps = base_exchange_budget(total_demand, o.eps, o.mix_constant);
    meta.emplace_back("mode", o.mode);
    meta.emplace_back("chain_steps_per_sample", std::to_string(steps));
    run_indexed(o.n, o.threads, [&](std::int64_t i) {
      Rng rng(child_seed(o.seed, static_cast<std::uint64_t>(i)));
      samples[static_cast<std::size_t>(i)] =
          sample_gibbs_cap(g, o.temperature, mode, o.eps, o.mix_constant, rng);
    });
  } else {
    throw std::invalid_argument(
        "no direct sampler for explicit strategy structures; use run-dynamics");
  }

  OutputTarget target(o.out_path, fallback);
  write_meta(target.stream(), meta);
  write_profile_rows(target.stream(), g, samples);
  return 0;
}

int cmd_sample_pne(const SampleOpts& o, std::ostream& fallback) {
  const CongestionGame g = load_game(o.game);
  if (g.kind() != StructureKind::ExtensionParallel) {
    throw std::invalid_argument("equilibrium sampler needs a series-parallel game");
  }

  std::vector<StrategyProfile> samples(static_cast<std::size_t>(o.n));
  std::vector<int> attempts(static_cast<std::size_t>(o.n), 0);
  run_indexed(o.n, o.threads, [&](std::int64_t i) {
    Rng rng(child_seed(o.seed, static_cast<std::uint64_t>(i)));
    PneStats stats;
    samples[static_cast<std::size_t>(i)] =
        sample_uniform_pne(g, o.eps, o.mix_constant, rng, &stats);
    attempts[static_cast<std::size_t>(i)] = stats.attempts;
  });

  std::int64_t attempts_total = 0;
  for (int a : attempts) attempts_total += a;
  const std::uint64_t steps_per_attempt =
      base_exchange_budget(g.num_players(), o.eps / 2.0, o.mix_constant);

  Meta meta{{"command", "sample-pne"},
            {"game", o.game},
            {"eps", fmt(o.eps)},
            {"temperature", std::to_string(pne_temperature(g, o.eps))},
            {"samples", std::to_string(o.n)},
            {"seed", std::to_string(o.seed)},
            {"mix_constant", fmt(o.mix_constant)},
            {"chain_steps_per_attempt", std::to_string(steps_per_attempt)},
            {"attempts_total", std::to_string(attempts_total)}};

  OutputTarget target(o.out_path, fallback);
  write_meta(target.stream(), meta);
  write_profile_rows(target.stream(), g, samples);
  return 0;
}

struct DynamicsOpts {
  std::string game;
  std::string kind = "logit";
  double temperature = 1.0;
  std::uint64_t steps = 1000;
  std::uint64_t record_every = 0;
  std::uint64_t seed = 12345;
  std::string out_path;
};

int cmd_run_dynamics(const DynamicsOpts& o, std::ostream& fallback) {
  const CongestionGame g = load_game(o.game);
  ChainKind kind;
  if (o.kind == "logit") {
    kind = ChainKind::Logit;
  } else if (o.kind == "relaxed") {
    kind = ChainKind::RelaxedLogit;
  } else {
    throw std::invalid_argument("kind must be logit or relaxed");
  }

  ChainConfig config;
  config.temperature = o.temperature;
  config.steps = o.steps;
  config.seed = o.seed;
  config.record_every = o.record_every;

  const ChainTrace trace = run_chain(g, start_profile(g), kind, config);
  const std::vector<StrategyProfile> rows =
      o.record_every == 0 ? std::vector<StrategyProfile>{trace.final_profile} : trace.records;

  Meta meta{{"command", "run-dynamics"}, {"game", o.game},
            {"kind", o.kind},           {"temperature", fmt(o.temperature)},
            {"steps", std::to_string(o.steps)},
            {"record_every", std::to_string(o.record_every)},
            {"seed", std::to_string(o.seed)}};

  OutputTarget target(o.out_path, fallback);
  write_meta(target.stream(), meta);
  write_profile_rows(target.stream(), g, rows);
  return 0;
}

struct VerifyOpts {
  std::string game;
  double temperature = 1.0;
  std::string out_path;
};

int cmd_verify(const VerifyOpts& o, std::ostream& fallback) {
  const CongestionGame g = load_game(o.game);

  struct Line {
    std::string check;
    double value = 0.0;
    double bound = 0.0;
    bool ok = false;
  };
  std::vector<Line> lines;

  const auto violation = check_exact_potential(g);
  lines.push_back({"exact_potential_violations", violation ? 1.0 : 0.0, 0.0, !violation});

  const ExactDistribution gibbs = exact_gibbs(g, o.temperature);
  KahanSum mass;
  for (double p : gibbs.probability) mass.add(p);
  lines.push_back(
      {"gibbs_normalization", std::abs(mass.value() - 1.0), 1e-12,
       std::abs(mass.value() - 1.0) <= 1e-12});

  const bool kernels_enumerable = gibbs.support.size() <= 2000;
  if (kernels_enumerable) {
    const auto logit = chain_kernel(g, ChainKind::Logit, o.temperature);
    const KernelReport lr = check_kernel(logit, gibbs.probability);
    lines.push_back({"logit_row_sums", lr.max_row_sum_error, 1e-12,
                     lr.max_row_sum_error <= 1e-12});
    lines.push_back({"logit_reversibility", lr.max_reversibility_error, 1e-10,
                     lr.max_reversibility_error <= 1e-10});
    lines.push_back({"logit_stationarity", lr.max_stationarity_error, 1e-10,
                     lr.max_stationarity_error <= 1e-10});

    if (g.symmetric()) {
      const auto relaxed = chain_kernel(g, ChainKind::RelaxedLogit, o.temperature);
      const KernelReport rr = check_kernel(relaxed, gibbs.probability);
      lines.push_back({"relaxed_row_sums", rr.max_row_sum_error, 1e-12,
                       rr.max_row_sum_error <= 1e-12});
      lines.push_back({"relaxed_reversibility", rr.max_reversibility_error, 1e-10,
                       rr.max_reversibility_error <= 1e-10});
      lines.push_back({"relaxed_stationarity", rr.max_stationarity_error, 1e-10,
                       rr.max_stationarity_error <= 1e-10});
    }
  }

  if (g.kind() == StructureKind::ExtensionParallel) {
    const auto q = static_cast<int>(g.paths().size());
    PolymatroidBaseSet box{std::vector<int>(static_cast<std::size_t>(q), g.num_players()),
                           g.num_players()};
    const auto load_profiles = box.enumerate();
    const auto witness = check_m_convex(
        load_profiles, [&](std::span<const int> alpha) { return ep_potential(g, alpha); });
    lines.push_back({"potential_m_convex_violations", witness ? 1.0 : 0.0, 0.0, !witness});

    const std::vector<double> composed =
        exact_stage_distribution_ep(g, o.temperature, 1.0, gibbs.support);
    const double tv = total_variation(composed, gibbs.probability);
    lines.push_back({"stage_composition_tv", tv, 1e-10, tv <= 1e-10});
  }

  if (g.kind() == StructureKind::KUniform) {
    const std::vector<double> composed =
        exact_stage_distribution_cap(g, o.temperature, CapMode::Exact, gibbs.support);
    const double tv = total_variation(composed, gibbs.probability);
    lines.push_back({"stage_composition_tv", tv, 1e-10, tv <= 1e-10});
  }

  OutputTarget target(o.out_path, fallback);
  std::ostream& os = target.stream();
  write_meta(os, {{"command", "verify"},
                  {"game", o.game},
                  {"temperature", fmt(o.temperature)}});
  os << "check,instance,value,bound,status\n";
  bool all_ok = true;
  for (const auto& line : lines) {
    os << line.check << ',' << o.game << ',' << fmt(line.value) << ',' << fmt(line.bound) << ','
       << (line.ok ? "pass" : "fail") << '\n';
    all_ok = all_ok && line.ok;
  }
  return all_ok ? 0 : 2;
}

struct MixingOpts {
  std::string game;
  std::string kind = "logit";
  double temperature = 1.0;
  double eps = 0.25;
  std::string out_path;
};

int cmd_mixing(const MixingOpts& o, std::ostream& fallback) {
  const CongestionGame g = load_game(o.game);
  ChainKind kind;
  if (o.kind == "logit") {
    kind = ChainKind::Logit;
  } else if (o.kind == "relaxed") {
    kind = ChainKind::RelaxedLogit;
  } else {
    throw std::invalid_argument("kind must be logit or relaxed");
  }

  const ExactDistribution gibbs = exact_gibbs(g, o.temperature);
  const auto kernel = chain_kernel(g, kind, o.temperature);
  const MixingResult res = worst_mixing_time(kernel, gibbs.probability, o.eps);

  OutputTarget target(o.out_path, fallback);
  std::ostream& os = target.stream();
  write_meta(os, {{"command", "mixing"},
                  {"game", o.game},
                  {"kind", o.kind},
                  {"temperature", fmt(o.temperature)},
                  {"eps", fmt(o.eps)}});
  os << "states," << gibbs.support.size() << '\n';
  os << "worst_mixing_time," << res.time << '\n';
  os << "tv_at_time," << fmt(res.tv_at_time) << '\n';
  os << "tv_before," << fmt(res.tv_before) << '\n';

  if (kind == ChainKind::RelaxedLogit) {
    double phi_max = 0.0;
    for (const auto& s : gibbs.support) {
      phi_max = std::max(phi_max,
                         potential_from_loads_dbl(g, resource_loads(g, s).counts));
    }
    if (o.temperature * phi_max > 0.0) {
      const double budget = relaxed_mixing_budget(g.num_players(), g.num_strategies(0),
                                                  o.temperature, phi_max, o.eps);
      os << "relaxed_budget," << fmt(budget) << '\n';
    }
  }
  return 0;
}

struct DegreeOpts {
  std::string k_list;
  std::string alpha_list;
  std::string out_path;
};

int cmd_count_bipartite(const DegreeOpts& o, std::ostream& fallback) {
  const DegreeSequence seq{parse_int_list(o.k_list), parse_int_list(o.alpha_list)};
  const BigInt count = count_bipartite(seq);
  OutputTarget target(o.out_path, fallback);
  target.stream() << count.str() << '\n';
  return 0;
}

int cmd_mckay(const DegreeOpts& o, std::ostream& fallback) {
  const DegreeSequence seq{parse_int_list(o.k_list), parse_int_list(o.alpha_list)};
  const double log_estimate = log_mckay_estimate(seq);
  OutputTarget target(o.out_path, fallback);
  target.stream() << "log_estimate," << fmt(log_estimate) << '\n';
  target.stream() << "estimate," << fmt(std::exp(log_estimate)) << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gibbs samplers and exact checks for congestion games"};
  app.require_subcommand(1);

  SampleOpts sg;
  auto* sub_sg = app.add_subcommand("sample-gibbs", "approximate Gibbs samples as CSV");
  sub_sg->add_option("--game", sg.game, "game file")->required();
  sub_sg->add_option("--T", sg.temperature, "temperature");
  sub_sg->add_option("--eps", sg.eps, "total-variation tolerance")
      ->check(CLI::Range(1e-9, 0.999999));
  sub_sg->add_option("--n", sg.n, "number of samples")->check(CLI::PositiveNumber);
  sub_sg->add_option("--seed", sg.seed, "random seed");
  sub_sg->add_option("--threads", sg.threads, "worker threads")->check(CLI::PositiveNumber);
  sub_sg->add_option("--mix-constant", sg.mix_constant, "chain budget constant")
      ->check(CLI::PositiveNumber);
  sub_sg->add_option("--mode", sg.mode, "load weights: exact or mckay")
      ->check(CLI::IsMember({"exact", "mckay"}));
  sub_sg->add_option("--out", sg.out_path, "output file (default stdout)");

  SampleOpts sp;
  sp.eps = 0.05;
  auto* sub_sp = app.add_subcommand("sample-pne", "near-uniform pure equilibria as CSV");
  sub_sp->add_option("--game", sp.game, "game file")->required();
  sub_sp->add_option("--eps", sp.eps, "total-variation tolerance")
      ->check(CLI::Range(1e-9, 0.999999));
  sub_sp->add_option("--n", sp.n, "number of samples")->check(CLI::PositiveNumber);
  sub_sp->add_option("--seed", sp.seed, "random seed");
  sub_sp->add_option("--threads", sp.threads, "worker threads")->check(CLI::PositiveNumber);
  sub_sp->add_option("--mix-constant", sp.mix_constant, "chain budget constant")
      ->check(CLI::PositiveNumber);
  sub_sp->add_option("--out", sp.out_path, "output file (default stdout)");

  DynamicsOpts dy;
  auto* sub_dy = app.add_subcommand("run-dynamics", "run the logit or relaxed chain");
  sub_dy->add_option("--game", dy.game, "game file")->required();
  sub_dy->add_option("--kind", dy.kind, "logit or relaxed")
      ->check(CLI::IsMember({"logit", "relaxed"}));
  sub_dy->add_option("--T", dy.temperature, "temperature");
  sub_dy->add_option("--steps", dy.steps, "chain steps");
  sub_dy->add_option("--record-every", dy.record_every, "record period (0: final only)");
  sub_dy->add_option("--seed", dy.seed, "random seed");
  sub_dy->add_option("--out", dy.out_path, "output file (default stdout)");

  VerifyOpts vf;
  auto* sub_vf = app.add_subcommand("verify", "exact structural checks");
  sub_vf->add_option("--game", vf.game, "game file")->required();
  sub_vf->add_option("--T", vf.temperature, "temperature");
  sub_vf->add_option("--out", vf.out_path, "output file (default stdout)");

  MixingOpts mx;
  auto* sub_mx = app.add_subcommand("mixing", "exact worst-start mixing time");
  sub_mx->add_option("--game", mx.game, "game file")->required();
  sub_mx->add_option("--kind", mx.kind, "logit or relaxed")
      ->check(CLI::IsMember({"logit", "relaxed"}));
  sub_mx->add_option("--T", mx.temperature, "temperature");
  sub_mx->add_option("--eps", mx.eps, "mixing tolerance")->check(CLI::Range(1e-9, 0.999999));
  sub_mx->add_option("--out", mx.out_path, "output file (default stdout)");

  DegreeOpts cb;
  auto* sub_cb = app.add_subcommand("count-bipartite", "exact degree-sequence graph count");
  sub_cb->add_option("--k", cb.k_list, "row degrees, comma separated")->required();
  sub_cb->add_option("--alpha", cb.alpha_list, "column degrees, comma separated")->required();
  sub_cb->add_option("--out", cb.out_path, "output file (default stdout)");

  DegreeOpts mk;
  auto* sub_mk = app.add_subcommand("mckay", "pairing-model estimate of the graph count");
  sub_mk->add_option("--k", mk.k_list, "row degrees, comma separated")->required();
  sub_mk->add_option("--alpha", mk.alpha_list, "column degrees, comma separated")->required();
  sub_mk->add_option("--out", mk.out_path, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sub_sg) return cmd_sample_gibbs(sg, out);
    if (*sub_sp) return cmd_sample_pne(sp, out);
    if (*sub_dy) return cmd_run_dynamics(dy, out);
    if (*sub_vf) return cmd_verify(vf, out);
    if (*sub_mx) return cmd_mixing(mx, out);
    if (*sub_cb) return cmd_count_bipartite(cb, out);
    if (*sub_mk) return cmd_mckay(mk, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "error: no subcommand selected\n";
  return 1;
}

}  // namespace congibbs::cli
