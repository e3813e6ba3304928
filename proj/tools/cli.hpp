#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kmx/classify.hpp"

namespace kmx::cli {

/// Flat key=value run configuration ('#' starts a comment).
struct RunConfig {
  std::string algebra;        ///< "sl(n)"
  std::string k_family;       ///< family address, e.g. "diag:sl(3):2,1:xi=0.7"
  std::string r_matrix;       ///< e.g. "yang:sl(3)"
  int spectral_samples = 50;
  unsigned seed = 12345;
  double tolerance = kDefaultTol;
  int order = 3;
  std::string output_dir = ".";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Resolves a family address; throws Error with a message for bad addresses.
KMatrix resolve_family(const std::string& address);
RMatrix resolve_rmatrix(const std::string& address);

/// Seeded spectral points on the annulus 0.3 <= |u| <= 3 off the real axis.
class SpectralSampler {
 public:
  explicit SpectralSampler(unsigned seed) : rng_(seed) {}
  Complex next();
  std::pair<Complex, Complex> next_pair();  ///< keeps u +/- v away from poles

 private:
  std::mt19937_64 rng_;
};

/// Command drivers; each returns the process exit code (0 pass, 1 check
/// failure, 2 unresolvable input) and writes report files on exit 0/1 only.
int cmd_verify(const RunConfig& cfg);
int cmd_classify(const RunConfig& cfg);
int cmd_solve(const RunConfig& cfg);
int cmd_crossing(const RunConfig& cfg);
int cmd_report(const std::string& json_path);

int run(int argc, char** argv);

}  // namespace kmx::cli
