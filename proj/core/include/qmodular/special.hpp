#pragma once

#include "qmodular/common.hpp"

namespace qmod {

enum class BranchPolicy {
  reject,         ///< throw DomainError on the cut
  negative_real,  ///< Log(x) = log|x| + i pi for x < 0
};

struct LogRatio {
  cplx value;
  bool on_branch_cut = false;
};

/// Principal Log((z - alpha_minus) / (z - alpha_plus)); the cut is the real
/// segment between the roots.
LogRatio log_ratio(cplx z, double alpha_minus, double alpha_plus,
                   BranchPolicy policy = BranchPolicy::reject);

/// Principal Log of the ratio, for points known to be off the real axis.
inline cplx log_ratio_unchecked(cplx z, double alpha_minus, double alpha_plus) noexcept {
  return std::log((z - alpha_minus) / (z - alpha_plus));
}

/// B(n + 1/2, 1/2) = pi * prod_{j=1..n} (j - 1/2) / j.
double beta_complete_half(int n);

/// Incomplete beta B(x; n + 1/2, 1/2). `one_minus_x` carries 1 - x without
/// cancellation when the caller has it.
double beta_inc_half(double x, int n);
double beta_inc_half(double x, double one_minus_x, int n);

/// Independent quadrature of int_0^x t^{p-1} (1-t)^{q-1} dt.
/// Throws ConvergenceError when the error estimate exceeds tol.
double beta_inc_oracle(double x, double p, double q, double tol = 1e-13);

}  // namespace qmod
