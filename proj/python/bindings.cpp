#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <vector>

#include "congibbs/cap_uniform.hpp"
#include "congibbs/cli.hpp"
#include "congibbs/dynamics.hpp"
#include "congibbs/gamefile.hpp"
#include "congibbs/gibbs_ep.hpp"
#include "congibbs/verify.hpp"

namespace py = pybind11;

namespace {

using namespace congibbs;

StrategyProfile to_profile(const std::vector<std::int64_t>& choices) {
  StrategyProfile s;
  s.choice = choices;
  return s;
}

std::string kind_name(StructureKind kind) {
  switch (kind) {
    case StructureKind::ExtensionParallel:
      return "ep";
    case StructureKind::KUniform:
      return "kuniform";
    case StructureKind::Explicit:
      return "explicit";
  }
  return "unknown";
}

std::vector<std::vector<std::int64_t>> sample_profiles(const CongestionGame& g,
                                                       double temperature, double eps,
                                                       std::int64_t n, std::uint64_t seed,
                                                       double mix_constant,
                                                       const std::string& mode) {
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
    StrategyProfile s;
    if (g.kind() == StructureKind::ExtensionParallel) {
      s = sample_gibbs_ep(g, temperature, eps, mix_constant, rng);
    } else if (g.kind() == StructureKind::KUniform) {
      const CapMode m = mode == "mckay" ? CapMode::McKay : CapMode::Exact;
      s = sample_gibbs_cap(g, temperature, m, eps, mix_constant, rng);
    } else {
      throw std::invalid_argument("no direct sampler for explicit strategy structures");
    }
    out.push_back(s.choice);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gibbs samplers for congestion games";

  py::class_<CongestionGame>(m, "Game")
      .def_property_readonly("num_players", &CongestionGame::num_players)
      .def_property_readonly("num_resources", &CongestionGame::num_resources)
      .def_property_readonly("kind", [](const CongestionGame& g) { return kind_name(g.kind()); })
      .def_property_readonly("symmetric", &CongestionGame::symmetric)
      .def("num_strategies", &CongestionGame::num_strategies, py::arg("player"))
      .def("strategy_resources", &CongestionGame::strategy_resources, py::arg("player"),
           py::arg("strategy"))
      .def("resource_name",
           [](const CongestionGame& g, int e) { return g.resource(e).name(); },
           py::arg("resource"));

  m.def("parse_game", &parse_game, py::arg("text"));
  m.def("load_game", &load_game, py::arg("path"));

  m.def(
      "potential",
      [](const CongestionGame& g, const std::vector<std::int64_t>& choices) {
        return rosenthal_potential(g, to_profile(choices)).to_double();
      },
      py::arg("game"), py::arg("choices"));
  m.def(
      "player_cost",
      [](const CongestionGame& g, const std::vector<std::int64_t>& choices, int player) {
        return player_cost(g, to_profile(choices), player).to_double();
      },
      py::arg("game"), py::arg("choices"), py::arg("player"));
  m.def(
      "is_nash",
      [](const CongestionGame& g, const std::vector<std::int64_t>& choices) {
        return is_nash(g, to_profile(choices));
      },
      py::arg("game"), py::arg("choices"));

  m.def("sample_gibbs", &sample_profiles, py::arg("game"), py::arg("temperature"),
        py::arg("eps") = 0.01, py::arg("n") = 1, py::arg("seed") = 12345,
        py::arg("mix_constant") = 4.0, py::arg("mode") = "exact");

  m.def(
      "sample_pne",
      [](const CongestionGame& g, double eps, std::int64_t n, std::uint64_t seed,
         double mix_constant) {
        std::vector<std::vector<std::int64_t>> out;
        out.reserve(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
          Rng rng(child_seed(seed, static_cast<std::uint64_t>(i)));
          out.push_back(sample_uniform_pne(g, eps, mix_constant, rng).choice);
        }
        return out;
      },
      py::arg("game"), py::arg("eps") = 0.05, py::arg("n") = 1, py::arg("seed") = 12345,
      py::arg("mix_constant") = 4.0);

  m.def(
      "run_dynamics",
      [](const CongestionGame& g, const std::string& kind, double temperature,
         std::uint64_t steps, std::uint64_t seed,
         const std::vector<std::int64_t>& start) {
        ChainConfig config;
        config.temperature = temperature;
        config.steps = steps;
        config.seed = seed;
        const ChainKind k = kind == "relaxed" ? ChainKind::RelaxedLogit : ChainKind::Logit;
        return run_chain(g, to_profile(start), k, config).final_profile.choice;
      },
      py::arg("game"), py::arg("kind"), py::arg("temperature"), py::arg("steps"),
      py::arg("seed"), py::arg("start"));

  m.def(
      "exact_gibbs",
      [](const CongestionGame& g, double temperature) {
        const ExactDistribution dist = exact_gibbs(g, temperature);
        std::vector<std::vector<std::int64_t>> support;
        support.reserve(dist.support.size());
        for (const auto& s : dist.support) support.push_back(s.choice);
        return py::make_tuple(support, dist.probability);
      },
      py::arg("game"), py::arg("temperature"));

  m.def(
      "total_variation",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        return total_variation(p, q);
      },
      py::arg("p"), py::arg("q"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = congibbs::cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
