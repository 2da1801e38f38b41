// Shared aliases, error taxonomy, and the execution-mode switch used by the
// parallel drivers. Errors split into two families that the CLI maps onto
// distinct exit codes: DataError (bad/ill-conditioned input) and
// ConvergenceError (a solver failed to meet its tolerance).
#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

using cxd = std::complex<double>;
using cvec = std::vector<cxd>;
using rvec = std::vector<double>;

inline constexpr double pi = std::numbers::pi_v<double>;
inline constexpr cxd I{0.0, 1.0};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Serial keeps a single-thread reference path alive for testing and for the
// mode-comparison benchmark; OpenMP is the default for the hot loops.
enum class Exec { Serial, OpenMP };

void set_max_threads(int n);  // 0 = leave runtime default

}  // namespace dnls
