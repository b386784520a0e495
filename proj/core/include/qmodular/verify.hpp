#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmodular/diffops.hpp"
#include "qmodular/series.hpp"

namespace qmod {

struct VerificationReport {
  std::string check_id;
  std::vector<Point> points;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;  ///< residual < tolerance
  std::map<std::string, std::string> metadata;
};

/// Step sizes eps_j = 2^{-j} 1e-2, j = 0..8.
std::vector<double> jump_epsilons();

struct JumpMeasure {
  cplx jump;                 ///< extrapolated f(p + i eps) - f(p - i eps)
  cplx average;              ///< extrapolated (f(p + i eps) + f(p - i eps)) / 2
  cplx continuity_defect;    ///< average - f(p) when f is defined at p, else 0
  bool value_at_point = false;
  double extrapolation_error = 0.0;  ///< change between the 3- and 4-point extrapolants
  std::vector<cplx> jump_sequence;
};

/// Richardson (Neville) extrapolation to eps = 0 on the last four members of
/// the eps sequence. Throws DomainError unless p lies within 1e-9 of E_D.
JumpMeasure jump_measure(const Field& f, const Params& params, const Point& p);

/// Polynomial extrapolation of samples (x_i, y_i) to x = 0.
cplx neville_at_zero(std::span<const double> x, std::span<const cplx> y);

struct ToleranceEntry {
  std::string_view check;  ///< check_id or a prefix ending in '.'
  double tolerance;
  std::string_view error_model;
};
/// The single table of tolerances used by every suite.
std::span<const ToleranceEntry> tolerance_table();
/// Longest matching entry; throws DomainError if none matches.
const ToleranceEntry& tolerance_for(std::string_view check_id);

struct SuiteOptions {
  TruncationPolicy policy{};
  unsigned workers = 0;  ///< 0: hardware concurrency
};

std::span<const std::string_view> suite_names();

/// Runs the fixed check list of a suite at points drawn from `seed`.
/// Output is ordered by check_id and does not depend on `workers`.
std::vector<VerificationReport> suite_run(std::string_view name, const Params& params, std::uint64_t seed,
                                          const SuiteOptions& options = {});

/// Uniform doubles from a fixed generator, independent of the standard
/// library's distribution implementations.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed);
  double uniform(double lo, double hi);
  i64 integer(i64 lo, i64 hi);  ///< inclusive

 private:
  std::mt19937_64 engine_;
};

}  // namespace qmod
