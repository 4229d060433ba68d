#include "csma/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "csma/analysis.hpp"
#include "csma/baseline_ie.hpp"
#include "csma/boe.hpp"
#include "csma/contention_graph.hpp"
#include "csma/error.hpp"
#include "csma/exact_chain.hpp"
#include "csma/sim_checks.hpp"
#include "csma/staged_chain.hpp"
#include "csma/telegraph_sim.hpp"

namespace csma::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kConvention =
    "detailed balance P(right) = P(left) / c_i, right = left plus transmitting link i";

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) { return std::isfinite(v) ? std::strtod(fmt12(v).c_str(), nullptr) : v; }

void round_numbers(json& j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& v : j) round_numbers(v);
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
};

struct Result {
  json doc;
  Table table;
  int status = kOk;
};

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorCode::invalid_parameter, what); }

json config_json(const RunConfig& c) {
  auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
  json j;
  j["subcommand"] = c.subcommand;
  j["graph"] = c.graph_path;
  j["format"] = c.format;
  j["c"] = opt(c.c);
  j["preset"] = opt(c.preset);
  j["threshold"] = c.threshold;
  j["bar"] = c.bar;
  j["cd"] = opt(c.cd);
  j["tx"] = opt(c.tx);
  j["events"] = c.events;
  j["time"] = opt(c.time);
  j["seed"] = c.seed;
  j["warmup"] = opt(c.warmup);
  j["reverse_check"] = c.reverse_check;
  j["residuals"] = c.residuals;
  j["stages_cd"] = opt(c.stages_cd);
  j["stages_tx"] = opt(c.stages_tx);
  j["mix_cd"] = opt(c.mix_cd);
  j["mix_tx"] = opt(c.mix_tx);
  j["tol"] = c.tol;
  j["damping"] = c.damping;
  j["max_iter"] = c.max_iter;
  j["c_floor"] = opt(c.c_floor);
  j["target"] = opt(c.target);
  return j;
}

json per_link(const ContentionGraph& g, const Eigen::VectorXd& v) {
  json j = json::object();
  for (std::size_t i = 0; i < g.size(); ++i) j[g.label(i)] = v[static_cast<Eigen::Index>(i)];
  return j;
}

json state_list(const std::vector<SystemState>& states) {
  json j = json::array();
  for (const auto& s : states) j.push_back(s.to_string());
  return j;
}

void check_sums_to_one(double total, const char* what) {
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::solver_failure, std::string(what) + " sum to " + fmt12(total) + ", not 1");
  }
}

struct Context {
  const RunConfig& cfg;
  GraphDocument doc;
  std::ostream& err;

  const ContentionGraph& g() const { return doc.graph; }

  /// Command-line c wins over the document's c.
  std::optional<AccessParams> params() const {
    if (cfg.c) {
      if (doc.c) err << "warning: --c overrides the c given in the graph document\n";
      return AccessParams::uniform(g().size(), *cfg.c);
    }
    if (doc.c) return AccessParams(Eigen::Map<const Eigen::VectorXd>(doc.c->data(), static_cast<Eigen::Index>(doc.c->size())));
    return std::nullopt;
  }

  AccessParams require_params() const {
    auto p = params();
    if (!p) input_error("this subcommand needs c (--c or a \"c\" field in the graph document)");
    return *p;
  }
};

Result cmd_boe(const Context& ctx) {
  const auto& g = ctx.g();
  const auto res = boe_compute(g);
  Result r;
  r.doc["link_throughput"] = per_link(g, res.throughput);
  r.doc["mis_count"] = res.mis.size();
  r.doc["mis"] = state_list(res.mis);
  r.doc["starved"] = starvation_report(res.throughput, g, ctx.cfg.threshold);
  r.table.header = {"link", "throughput"};
  std::optional<Eigen::VectorXd> bps;
  if (ctx.cfg.preset) {
    const auto preset = find_preset(*ctx.cfg.preset);
    if (!preset) input_error("unknown preset '" + *ctx.cfg.preset + "'");
    bps = to_bps(res.throughput, *preset);
    r.doc["preset"] = {{"name", preset->name}, {"single_link_bps", preset->single_link_bps}};
    r.doc["link_bps"] = per_link(g, *bps);
    r.table.header.push_back("bps");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    std::vector<json> row{g.label(i), res.throughput[k]};
    if (bps) row.push_back((*bps)[k]);
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

Result cmd_exact(const Context& ctx) {
  const auto& g = ctx.g();
  const auto params = ctx.require_params();
  const auto dist = stationary_distribution(g, params);
  check_sums_to_one(dist.probabilities().sum(), "state probabilities");
  const auto x = link_throughputs(dist, g);
  const auto mrf = mrf_check(dist, g, 1e-12);
  Result r;
  r.doc["effective_c"] = per_link(g, params.c());
  r.doc["convention"] = kConvention;
  r.doc["normalizer"] = dist.normalizer();
  json probs = json::object();
  r.table.header = {"state", "probability"};
  for (std::size_t k = 0; k < dist.states().size(); ++k) {
    const double p = dist.probabilities()[static_cast<Eigen::Index>(k)];
    probs[dist.states()[k].to_string()] = p;
    r.table.rows.push_back({dist.states()[k].to_string(), p});
  }
  r.doc["state_probability"] = probs;
  r.doc["link_throughput"] = per_link(g, x);
  r.doc["mrf"] = {{"holds", mrf.holds}, {"max_violation", mrf.max_violation}};
  return r;
}

std::uint64_t event_budget(double events) {
  if (!(events >= 1.0) || !std::isfinite(events) || events > 1e15) input_error("--events must be in [1, 1e15]");
  return static_cast<std::uint64_t>(std::llround(events));
}

Result cmd_sim(const Context& ctx) {
  const auto& g = ctx.g();
  const auto& cfg = ctx.cfg;
  std::optional<DurationDistribution> cd;
  if (cfg.cd) {
    cd = DurationDistribution::parse(*cfg.cd);
  } else {
    const auto p = ctx.require_params();
    if (!p.is_uniform()) input_error("heterogeneous c needs an explicit --cd law");
    cd = DurationDistribution::exponential(p[0]);
  }
  const auto tx = cfg.tx ? DurationDistribution::parse(*cfg.tx) : DurationDistribution::exponential(1.0);

  SimConfig sc;
  sc.stop = cfg.time ? StopCondition::time(*cfg.time) : StopCondition::events(event_budget(cfg.events));
  sc.seed = cfg.seed;
  sc.warmup_events = cfg.warmup;
  sc.record_residuals = cfg.residuals;
  sc.record_trace = cfg.reverse_check;
  sc.record_draws = cfg.reverse_check;
  const auto run = simulate_forward(g, *cd, tx, sc);
  const auto& st = run.stats;

  const double c = cd->mean() / tx.mean();
  const auto exact = stationary_distribution(g, AccessParams::uniform(g.size(), c));

  Result r;
  r.doc["countdown"] = cd->to_string();
  r.doc["transmission"] = tx.to_string();
  r.doc["effective_c"] = c;
  r.doc["events"] = st.event_count;
  r.doc["measured_time"] = st.total_time;
  r.doc["end_time"] = to_time(run.end.time);
  r.doc["tie_count"] = st.tie_count;
  json occ = json::object();
  double total = 0.0;
  r.table.header = {"state", "occupancy", "product_form"};
  for (const auto& s : exact.states()) {
    const double f = st.occupancy_fraction(s);
    total += f;
    occ[s.to_string()] = f;
    r.table.rows.push_back({s.to_string(), f, exact.probability(s)});
  }
  if (st.total_time > 0.0) check_sums_to_one(total, "occupancy fractions");
  r.doc["occupancy"] = occ;
  r.doc["link_throughput"] = per_link(g, st.link_throughputs(g.size()));
  r.doc["product_form_link_throughput"] = per_link(g, link_throughputs(exact, g));
  json counts = json::array();
  for (const auto& [pair, n] : st.transition_counts) {
    counts.push_back({{"from", pair.first.to_string()}, {"to", pair.second.to_string()}, {"count", n}});
  }
  r.doc["transition_counts"] = counts;
  const auto rates = empirical_rates(st);
  json rj = json::array();
  for (const auto& [pair, p] : rates.rates) {
    rj.push_back({{"from", pair.first.to_string()}, {"to", pair.second.to_string()}, {"rate", p}});
  }
  r.doc["transition_rates"] = rj;
  for (const auto& pair : rates.omitted) {
    ctx.err << "warning: no occupancy of " << pair.first.to_string() << ", rate to " << pair.second.to_string()
            << " omitted\n";
  }
  r.doc["max_pair_imbalance"] = reversibility_check(st).max_pair_imbalance;

  if (cfg.residuals) {
    const auto rep = residual_invariance_check(st, *cd, tx);
    r.doc["residuals"] = {{"sufficient", rep.sufficient},
                          {"ks_countdown", rep.ks_countdown},
                          {"ks_transmission", rep.ks_transmission},
                          {"ks_countdown_unfreeze", rep.ks_countdown_unfreeze},
                          {"countdown_samples", rep.countdown_samples},
                          {"transmission_samples", rep.transmission_samples},
                          {"unfreeze_samples", rep.unfreeze_samples}};
  }
  if (cfg.reverse_check) {
    const auto back = simulate_reverse(g, run.end, reversed(run.draws));
    r.doc["reverse_identity"] = {{"pass", back.trace == run.trace}, {"changes", run.trace->changes.size()}};
  }
  return r;
}

StageLaw parse_stage_law(const std::string& text) {
  StageLaw law;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) input_error("stage law entries must be STAGES:PROB, got '" + item + "'");
    try {
      std::size_t used = 0;
      const int k = std::stoi(item.substr(0, colon), &used);
      const double p = std::stod(item.substr(colon + 1));
      if (!law.emplace(k, p).second) input_error("stage count " + std::to_string(k) + " listed twice");
    } catch (const std::logic_error&) {
      input_error("cannot parse stage law entry '" + item + "'");
    }
  }
  return law;
}

StageLaw stage_law(const std::optional<std::string>& mix, const std::optional<int>& fixed, const char* what) {
  if (mix && fixed) input_error(std::string("give either --stages-") + what + " or --mix-" + what + ", not both");
  if (mix) return parse_stage_law(*mix);
  return {{fixed.value_or(1), 1.0}};
}

Result cmd_staged(const Context& ctx) {
  const auto& g = ctx.g();
  const auto& cfg = ctx.cfg;
  const auto params = ctx.require_params();
  if (!params.is_uniform()) input_error("staged chain supports uniform c only");
  StagedChainSpec spec{stage_law(cfg.mix_cd, cfg.stages_cd, "cd"), stage_law(cfg.mix_tx, cfg.stages_tx, "tx"), 1.0, 1.0};
  spec.validate();
  // Mean transmission 1, mean countdown c.
  spec.transmit_stage_mean = 1.0 / spec.mean_transmit_stages();
  spec.countdown_stage_mean = params[0] / spec.mean_countdown_stages();

  const auto sol = staged_stationary(g, spec);
  check_sums_to_one(sol.probabilities.sum(), "expanded state probabilities");
  const auto exact = stationary_distribution(g, params);
  double dev = 0.0;
  json marginal = json::object();
  for (std::size_t k = 0; k < sol.marginal.states().size(); ++k) {
    const auto& s = sol.marginal.states()[k];
    const double p = sol.marginal.probabilities()[static_cast<Eigen::Index>(k)];
    marginal[s.to_string()] = p;
    dev = std::max(dev, std::abs(p - exact.probability(s)));
  }
  const bool varied = spec.countdown_stages.size() > 1 || spec.transmit_stages.size() > 1;
  Result r;
  r.doc["countdown_stage_mean"] = spec.countdown_stage_mean;
  r.doc["transmit_stage_mean"] = spec.transmit_stage_mean;
  r.doc["expanded_states"] = sol.states.size();
  r.doc["solver"] = sol.used_power_iteration ? "power-iteration" : "sparse-lu";
  r.doc["solve_residual"] = sol.residual;
  json expanded = json::object();
  r.table.header = {"expanded_state", "probability"};
  for (std::size_t k = 0; k < sol.states.size(); ++k) {
    const auto name = format_staged_state(sol.states[k], varied);
    const double p = sol.probabilities[static_cast<Eigen::Index>(k)];
    expanded[name] = p;
    r.table.rows.push_back({name, p});
  }
  r.doc["expanded_probability"] = expanded;
  r.doc["marginal"] = marginal;
  r.doc["max_deviation_from_product_form"] = dev;
  return r;
}

Result cmd_baseline(const Context& ctx) {
  const auto& g = ctx.g();
  const auto params = ctx.require_params();
  if (!params.is_uniform()) input_error("baseline supports uniform c only");
  const IEProblem problem{g, params[0], ctx.cfg.damping, ctx.cfg.tol, ctx.cfg.max_iter};
  const auto sol = solve_fixed_point(problem);
  Result r;
  r.doc["link_throughput"] = per_link(g, sol.x);
  r.doc["iterations"] = sol.iterations;
  r.doc["converged"] = sol.converged;
  r.doc["residual"] = sol.residual;
  r.table.header = {"link", "throughput"};
  for (std::size_t i = 0; i < g.size(); ++i) r.table.rows.push_back({g.label(i), sol.x[static_cast<Eigen::Index>(i)]});
  if (!sol.converged) {
    ctx.err << "fixed-point iteration did not converge (residual " << fmt12(sol.residual) << ")\n";
    r.status = kNotConverged;
  }
  return r;
}

Result cmd_compare(const Context& ctx) {
  const auto& g = ctx.g();
  const auto& cfg = ctx.cfg;
  CompareConfig cc;
  cc.events = event_budget(cfg.events);
  cc.seed = cfg.seed;
  cc.warmup_events = cfg.warmup;
  if (cfg.cd) cc.countdown = DurationDistribution::parse(*cfg.cd);
  if (cfg.tx) cc.transmission = DurationDistribution::parse(*cfg.tx);
  const auto rep = compare_methods(g, ctx.require_params(), cc);

  Result r;
  r.doc["effective_c"] = per_link(g, rep.params.c());
  auto col = [&](const MethodColumn& m) {
    json j;
    j["link_throughput"] = m.throughput ? per_link(g, *m.throughput) : json(nullptr);
    j["max_deviation_from_exact"] = m.deviation ? json(*m.deviation) : json(nullptr);
    if (!m.present()) j["error"] = m.error;
    return j;
  };
  r.doc["boe"] = col(rep.boe);
  r.doc["exact"] = col(rep.exact);
  r.doc["simulation"] = col(rep.simulation);
  r.doc["simulation"]["countdown"] = rep.countdown;
  r.doc["simulation"]["transmission"] = rep.transmission;
  r.doc["simulation"]["tie_count"] = rep.sim_tie_count;
  r.doc["baseline"] = col(rep.baseline);
  r.doc["baseline"]["converged"] = rep.baseline_converged;
  r.doc["baseline"]["iterations"] = rep.baseline_iterations;

  r.table.header = {"link", "boe", "exact", "simulation", "baseline"};
  auto cell = [](const MethodColumn& m, std::size_t i) -> json {
    return m.throughput ? json((*m.throughput)[static_cast<Eigen::Index>(i)]) : json(nullptr);
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    r.table.rows.push_back({g.label(i), cell(rep.boe, i), cell(rep.exact, i), cell(rep.simulation, i),
                            cell(rep.baseline, i)});
  }
  if (rep.baseline.present() && !rep.baseline_converged) r.status = kNotConverged;
  return r;
}

Result cmd_islands(const Context& ctx) {
  const auto rep = island_report(ctx.g(), ctx.cfg.bar);
  Result r;
  r.doc["mis"] = state_list(rep.mis);
  json m = json::array();
  for (Eigen::Index a = 0; a < rep.distance.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < rep.distance.cols(); ++b) row.push_back(rep.distance(a, b));
    m.push_back(row);
  }
  r.doc["distance"] = m;
  r.doc["max_min_distance"] = rep.max_min_distance;
  r.doc["bar"] = rep.bar;
  r.doc["flagged"] = rep.flagged;
  r.table.header = {"mis"};
  for (const auto& s : rep.mis) r.table.header.push_back(s.to_string());
  for (std::size_t a = 0; a < rep.mis.size(); ++a) {
    std::vector<json> row{rep.mis[a].to_string()};
    for (std::size_t b = 0; b < rep.mis.size(); ++b) {
      row.push_back(rep.distance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    }
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

Result cmd_calibrate(const Context& ctx) {
  const auto& g = ctx.g();
  const auto& cfg = ctx.cfg;
  if (!cfg.c_floor) input_error("calibrate needs --c-floor");
  if (!cfg.target) input_error("calibrate needs --target (one value, or one per link)");
  std::vector<double> values;
  {
    std::stringstream in(*cfg.target);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        values.push_back(std::stod(item));
      } catch (const std::logic_error&) {
        input_error("cannot parse target value '" + item + "'");
      }
    }
  }
  Eigen::VectorXd target(static_cast<Eigen::Index>(g.size()));
  if (values.size() == 1) {
    target.setConstant(values[0]);
  } else if (values.size() == g.size()) {
    target = Eigen::Map<Eigen::VectorXd>(values.data(), target.size());
  } else {
    input_error("--target needs one value or one per link");
  }
  const auto res = calibrate_c(g, target, *cfg.c_floor, cfg.max_iter);
  Result r;
  r.doc["c"] = per_link(g, res.params.c());
  r.doc["target"] = per_link(g, target);
  r.doc["achieved"] = per_link(g, res.achieved);
  r.doc["residual"] = res.residual;
  r.doc["converged"] = res.converged;
  r.doc["iterations"] = res.iterations;
  r.table.header = {"link", "c", "target", "achieved"};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    r.table.rows.push_back({g.label(i), res.params.c()[k], target[k], res.achieved[k]});
  }
  if (!res.converged) {
    ctx.err << "calibration did not converge within " << cfg.max_iter << " iterations\n";
    r.status = kNotConverged;
  }
  return r;
}

std::string cell_text(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt12(v.get<double>());
  return v.dump();
}

void emit(const Result& r, const json& config, const std::string& format, std::ostream& out) {
  if (format == "json") {
    json doc;
    doc["config"] = config;
    for (auto it = r.doc.begin(); it != r.doc.end(); ++it) doc[it.key()] = it.value();
    round_numbers(doc);
    out << doc.dump(2) << '\n';
    return;
  }
  json cfg = config;
  round_numbers(cfg);
  if (format == "csv") {
    out << "# config: " << cfg.dump() << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const bool quote = cells[k].find_first_of(",\"") != std::string::npos;
        std::string c = cells[k];
        if (quote) {
          std::string q = "\"";
          for (char ch : c) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          c = q + "\"";
        }
        out << (k ? "," : "") << c;
      }
      out << '\n';
    };
    line(r.table.header);
    for (const auto& row : r.table.rows) {
      std::vector<std::string> cells;
      for (const auto& v : row) cells.push_back(cell_text(v));
      line(cells);
    }
    return;
  }
  // Aligned text table.
  std::vector<std::vector<std::string>> grid{r.table.header};
  for (const auto& row : r.table.rows) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(cell_text(v));
    grid.push_back(std::move(cells));
  }
  std::vector<std::size_t> width(r.table.header.size(), 0);
  for (const auto& row : grid) {
    for (std::size_t k = 0; k < row.size() && k < width.size(); ++k) width[k] = std::max(width[k], row[k].size());
  }
  out << "config: " << cfg.dump() << '\n';
  for (const auto& row : grid) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << (k ? "  " : "") << std::left << std::setw(static_cast<int>(width[k])) << row[k];
    }
    out << '\n';
  }
  // Scalars that do not fit the table.
  for (auto it = r.doc.begin(); it != r.doc.end(); ++it) {
    if (it.value().is_primitive()) {
      out << it.key() << ": " << cell_text(it.value()) << '\n';
    } else if (it.value().is_object()) {
      for (auto sub = it.value().begin(); sub != it.value().end(); ++sub) {
        if (sub.value().is_primitive()) out << it.key() << '.' << sub.key() << ": " << cell_text(sub.value()) << '\n';
      }
    }
  }
}

}  // namespace

int run(const RunConfig& config, std::string_view graph_document, std::ostream& out, std::ostream& err) {
  try {
    if (config.format != "json" && config.format != "csv" && config.format != "table") {
      input_error("--format must be json, csv or table");
    }
    const Context ctx{config, parse_graph_document(graph_document), err};
    Result r;
    const auto& sub = config.subcommand;
    if (sub == "boe") r = cmd_boe(ctx);
    else if (sub == "exact") r = cmd_exact(ctx);
    else if (sub == "sim") r = cmd_sim(ctx);
    else if (sub == "staged") r = cmd_staged(ctx);
    else if (sub == "baseline") r = cmd_baseline(ctx);
    else if (sub == "compare") r = cmd_compare(ctx);
    else if (sub == "islands") r = cmd_islands(ctx);
    else if (sub == "calibrate") r = cmd_calibrate(ctx);
    else input_error("unknown subcommand '" + sub + "'");
    emit(r, config_json(config), config.format, out);
    return r.status;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::solver_failure ? kNotConverged : kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace csma::cli
