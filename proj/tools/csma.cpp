// csma: throughput analysis of CSMA networks from a contention-graph document.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "csma/cli.hpp"

int main(int argc, char** argv) {
  using csma::cli::RunConfig;
  CLI::App app{"Throughput analysis of idealized CSMA networks"};
  app.require_subcommand(1);
  RunConfig cfg;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"boe", "maximum-independent-set throughput estimate"},
      {"exact", "product-form stationary distribution and link throughputs"},
      {"sim", "event-driven simulation"},
      {"staged", "expanded multi-stage Markov chain"},
      {"baseline", "inclusion-exclusion fixed-point approximation"},
      {"compare", "all methods side by side"},
      {"islands", "distances between maximum independent sets"},
      {"calibrate", "search per-link c for a target throughput"},
  };
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("-g,--graph", cfg.graph_path, "graph document (JSON)")->required();
    sc->add_option("--format", cfg.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
    sc->add_option("--c", cfg.c, "uniform countdown overhead (overrides the document)");
    sc->add_option("--seed", cfg.seed, "simulation seed");
    sc->add_option("--events", cfg.events, "simulated events (e.g. 1e6)");
    sc->add_option("--time", cfg.time, "simulated time horizon instead of an event budget");
    sc->add_option("--warmup", cfg.warmup, "events discarded before statistics");
    sc->add_option("--cd", cfg.cd, "countdown law: exp:M | uni:A,B | det:V | erlang:K,M | mix:W*SPEC|...");
    sc->add_option("--tx", cfg.tx, "transmission law (same grammar)");
    sc->add_flag("--reverse-check", cfg.reverse_check, "replay the run in reverse time and compare traces");
    sc->add_flag("--residuals", cfg.residuals, "record residual times and report KS statistics");
    sc->add_option("--threshold", cfg.threshold, "starvation threshold");
    sc->add_option("--preset", cfg.preset, "single-link rate preset (802.11b-UDP, 802.11a-UDP, 802.11b-TCP)");
    sc->add_option("--bar", cfg.bar, "island flag distance");
    sc->add_option("--stages-cd", cfg.stages_cd, "countdown stage count");
    sc->add_option("--stages-tx", cfg.stages_tx, "transmission stage count");
    sc->add_option("--mix-cd", cfg.mix_cd, "countdown stage law, e.g. 1:0.5,3:0.5");
    sc->add_option("--mix-tx", cfg.mix_tx, "transmission stage law");
    sc->add_option("--tol", cfg.tol, "fixed-point tolerance");
    sc->add_option("--damping", cfg.damping, "fixed-point damping in (0, 1]");
    sc->add_option("--max-iter", cfg.max_iter, "iteration budget");
    sc->add_option("--c-floor", cfg.c_floor, "smallest allowed c when calibrating");
    sc->add_option("--target", cfg.target, "target throughput: one value or one per link, comma separated");
    sc->callback([&cfg, name = std::string(s.name)] { cfg.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : csma::cli::kInputError;
  }

  std::ifstream in(cfg.graph_path);
  if (!in) {
    std::cerr << "error: cannot read " << cfg.graph_path << '\n';
    return csma::cli::kInputError;
  }
  std::stringstream text;
  text << in.rdbuf();
  return csma::cli::run(cfg, text.str(), std::cout, std::cerr);
}
