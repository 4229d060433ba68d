#pragma once

// Command-line surface: one subcommand per invocation, one result document
// per run. Exit status 0 success, 1 input error, 2 numerical non-convergence.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace csma::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNotConverged = 2 };

struct RunConfig {
  std::string subcommand;  // boe exact sim staged baseline compare islands calibrate
  std::string graph_path;
  std::string format = "json";  // json csv table

  std::optional<double> c;
  std::optional<std::string> preset;
  double threshold = 0.05;
  int bar = 4;

  // sim / compare
  std::optional<std::string> cd;
  std::optional<std::string> tx;
  double events = 1e6;
  std::optional<double> time;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> warmup;
  bool reverse_check = false;
  bool residuals = false;

  // staged
  std::optional<int> stages_cd;
  std::optional<int> stages_tx;
  std::optional<std::string> mix_cd;
  std::optional<std::string> mix_tx;

  // baseline
  double tol = 1e-10;
  double damping = 0.5;
  long max_iter = 100'000;

  // calibrate
  std::optional<double> c_floor;
  std::optional<std::string> target;
};

/// Runs one subcommand on the given graph document text.
int run(const RunConfig& config, std::string_view graph_document, std::ostream& out, std::ostream& err);

}  // namespace csma::cli
