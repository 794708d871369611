#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace brq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalid = 2;

/// Resolved flags of one invocation. Every field is validated before any
/// computation, so an invalid configuration writes no output file.
struct ExperimentConfig {
  std::string command;
  int dim = 1;
  std::size_t n = 0;       ///< 0: per-command default
  double length = 0.0;     ///< 0: per-command default
  double alpha = 1.0;
  std::string mu;   ///< lo:hi, or a single value; empty: per-command default
  int mu_steps = 2;          ///< geometric nodes per octave
  std::string function = "gaussian";
  std::string symbol = "quotient";
  double p = 2.0;
  double q = 2.0;
  double s = 0.5;
  double delta = 1.0;
  double sigma = 0.5;
  double width = 1.0;
  double cutoff = 6.0;
  bool mean_zero = false;
  bool dc_zero = false;
  double fit_lo = 8.0;
  bool rate = false;
  std::string suite = "all";
  std::string out;
  std::uint64_t seed = 1;
  bool dump_config = false;
};

/// JSON echo of the resolved configuration.
std::string dump(const ExperimentConfig& config);

/// Parses the mu flag: "lo:hi" gives a geometric grid with per_octave nodes,
/// a single number gives a one-point grid.
std::vector<double> parse_mu(const std::string& text, int per_octave);

/// Runs one subcommand. Exit 0 on success, 1 on a failed check or I/O
/// error, 2 on invalid input (usage text goes to err).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace brq::cli
