#pragma once

#include <string>

#include "congibbs/game.hpp"

namespace congibbs {

// Line-oriented game description:
//
//   # comment
//   players = 2
//   resource a costs = [0, 6] capacity = none
//   resource b costs = [0, 6]
//   structure = ep { par(arc(a), arc(b)) }
//
// Alternative structures:
//   structure = kuniform k = [1, 1]
//   structure = explicit { player 0 = [[a], [b]] player 1 = [[a], [b]] }
//
// The players line comes first, then the resources, then the structure.
// Player and path indices are 0-based; capacity "none" means the player
// count. Parse errors carry the offending line number.
CongestionGame parse_game(const std::string& text);
CongestionGame load_game(const std::string& path);

}  // namespace congibbs
