#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svlab/model.hpp"

namespace svlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0;
  double bound = 0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  int threads = 1;
  // simulation scale knobs (defaults sized for a thorough desk-scale run)
  std::int64_t n_paths = 3000;
  double t_end_factor = 30.0;  // t_end = factor / a
  double dt_factor = 1e-3;     // dt = factor / a
  std::string out_dir;         // when set, writes result CSVs there
};

// Runs the analytic-vs-simulation verification suite appropriate for the
// spec's family class and prints nothing; the caller renders the table.
std::vector<CheckResult> run_verification(const ModelSpec& spec, const VerifyOptions& opt);

}  // namespace svlab
