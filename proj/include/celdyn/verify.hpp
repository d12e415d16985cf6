#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "celdyn/params.hpp"

namespace celdyn {

enum class VerifyLevel { fast, full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::fast;
  DriftVariant drift = DriftVariant::corrected;
  int random_draws = 10000;
  std::uint64_t seed = 20240611;
  double ode_dt = 1e-4;
  int fock_cutoff = 12;
  double fock_dt = 1e-4;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      ///< measured worst case
  double tolerance = 0.0;  ///< pass threshold
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  /// One `check=... status=... value=... tolerance=...` line per check plus a
  /// trailing summary line.
  void print(std::ostream& os) const;
};

/// Random parameter point covering theta > 0, chi != 1 and the
/// complex-radicand regime (small Omega with gamma < Gamma).
SystemParams random_params(std::mt19937_64& rng);

/// Largest |a - b| / max(|a|, |b|, floor) over the pair.
double relative_error(double a, double b, double floor = 1e-12);

VerifyReport run_verify(const VerifyOptions& opts);

}  // namespace celdyn
