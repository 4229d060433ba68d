#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "csma/cli.hpp"
#include "helpers.hpp"

using csma::cli::RunConfig;
using json = nlohmann::json;

namespace {

struct Outcome {
  int status;
  std::string out, err;
};

Outcome invoke(RunConfig cfg, const std::string& doc) {
  std::ostringstream out, err;
  const int status = csma::cli::run(cfg, doc, out, err);
  return {status, out.str(), err.str()};
}

RunConfig config(const char* sub) {
  RunConfig c;
  c.subcommand = sub;
  c.graph_path = "g1.json";
  return c;
}

const std::string kG1 = oracle::read_file(std::string(TEST_DATA_DIR) + "/g1.json");

}  // namespace

TEST_CASE("boe document") {
  const auto r = invoke(config("boe"), kG1);
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  CHECK(j["link_throughput"] == json::parse(R"({"1":1.0,"2":0.0,"3":0.5,"4":0.5})"));
  CHECK(j["mis_count"] == 2);
  CHECK(j["config"]["subcommand"] == "boe");
  CHECK(j["starved"] == json::array({"2"}));
}

TEST_CASE("exact document") {
  auto cfg = config("exact");
  cfg.c = 0.186;
  const auto r = invoke(cfg, kG1);
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  const auto w = oracle::g1_closed_form(0.186);
  CHECK(j["state_probability"]["0000"].get<double>() == doctest::Approx(w.idle).epsilon(1e-11));
  CHECK(j["state_probability"]["1010"].get<double>() == doctest::Approx(w.pair).epsilon(1e-11));
  CHECK(j["link_throughput"]["1"].get<double>() == doctest::Approx(w.x1).epsilon(1e-11));
  CHECK(j["convention"].get<std::string>().find("P(left) / c_i") != std::string::npos);
  CHECK(j["mrf"]["holds"] == true);
}

TEST_CASE("c precedence and missing c") {
  const std::string with_c = R"({"links":["1","2"],"edges":[["1","2"]],"c":2})";
  auto cfg = config("exact");
  auto r = invoke(cfg, with_c);
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["effective_c"]["1"] == 2.0);
  CHECK(r.err.empty());
  cfg.c = 0.5;
  r = invoke(cfg, with_c);
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["effective_c"]["1"] == 0.5);
  CHECK(r.err.find("warning") != std::string::npos);

  r = invoke(config("exact"), kG1);
  CHECK(r.status == 1);
  CHECK(r.out.empty());
}

TEST_CASE("input errors exit with 1") {
  CHECK(invoke(config("boe"), "{not json").status == 1);
  CHECK(invoke(config("boe"), R"({"links":["1"],"edges":[["1","1"]]})").status == 1);
  CHECK(invoke(config("nope"), kG1).status == 1);
  auto bad_format = config("boe");
  bad_format.format = "xml";
  CHECK(invoke(bad_format, kG1).status == 1);
  auto bad_law = config("sim");
  bad_law.cd = "gauss:1";
  CHECK(invoke(bad_law, kG1).status == 1);
}

TEST_CASE("non-convergence exits with 2 and still reports") {
  auto cfg = config("baseline");
  cfg.c = 0.186;
  cfg.max_iter = 2;
  const auto r = invoke(cfg, kG1);
  CHECK(r.status == 2);
  CHECK(json::parse(r.out)["converged"] == false);
}

TEST_CASE("simulation output is byte-identical for a fixed seed") {
  auto cfg = config("sim");
  cfg.cd = "uni:0,0.372";
  cfg.tx = "det:1";
  cfg.events = 20000;
  cfg.seed = 7;
  cfg.reverse_check = true;
  cfg.residuals = true;
  const auto a = invoke(cfg, kG1);
  const auto b = invoke(cfg, kG1);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  CHECK(j["reverse_identity"]["pass"] == true);
  CHECK(j["config"]["seed"] == 7);
  double total = 0.0;
  for (const auto& [k, v] : j["occupancy"].items()) total += v.get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("every subcommand and format produces one document") {
  for (const char* sub : {"boe", "exact", "sim", "staged", "baseline", "compare", "islands", "calibrate"}) {
    for (const char* fmt : {"json", "csv", "table"}) {
      CAPTURE(sub);
      CAPTURE(fmt);
      auto cfg = config(sub);
      cfg.format = fmt;
      cfg.c = 0.186;
      cfg.events = 5000;
      cfg.c_floor = 0.012;
      cfg.target = "0.3333";
      cfg.stages_cd = 2;
      cfg.preset = "802.11b-UDP";
      const auto r = invoke(cfg, kG1);
      CHECK(r.status == 0);
      CHECK_FALSE(r.out.empty());
      if (std::string(fmt) == "json") {
        CHECK(json::parse(r.out).contains("config"));
      } else {
        CHECK(r.out.find("config") != std::string::npos);
      }
    }
  }
}

TEST_CASE("staged mixture via stage laws") {
  auto cfg = config("staged");
  cfg.c = 0.186;
  cfg.mix_cd = "1:0.5,3:0.5";
  const auto r = invoke(cfg, kG1);
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  CHECK(j["max_deviation_from_product_form"].get<double>() < 1e-10);
  cfg.stages_cd = 2;
  CHECK(invoke(cfg, kG1).status == 1);
  cfg.stages_cd.reset();
  cfg.mix_cd = "1:0.5,3:0.4";
  CHECK(invoke(cfg, kG1).status == 1);
}
