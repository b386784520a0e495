#pragma once

#include <utility>
#include <vector>

#include "qmodular/qforms.hpp"

namespace qmod {

/// Cut-off for the kernel: triples (a,b,c) with
/// 2 pi y (|Q(tau,1)|^2/v^2 + Q_tau^2) <= ln(1/target_tol) + margin.
/// With doubling_check the bound is also doubled (|Q| up to sqrt 2 times
/// larger) and est_error is the change.
struct ThetaPolicy {
  double target_tol = 1e-12;
  double margin = 5.0;
  bool doubling_check = true;
};

struct ThetaValue {
  cplx value{};
  double est_error = 0.0;
  std::pair<i64, i64> d_range{0, 0};
  i64 forms_used = 0;
};

/// y^{k+1} sum_d sum_{Q in Q_d} |Q_tau| Q(tau,1)^k e^{-4 pi |Q(tau,1)|^2 y / v^2} e^{-2 pi i d z}
/// over all integer triples. k must be even and non-negative.
ThetaValue eval_theta_kernel(int k, const Point& tau, const Point& z, const ThetaPolicy& policy = {});

/// Only the triples of discriminant d.
ThetaValue eval_theta_slice(int k, i64 d, const Point& tau, const Point& z, const ThetaPolicy& policy = {});

/// Same slice for d = D > 0 non-square, built from the form enumerator
/// instead of the triple box.
cplx theta_slice_direct(const Params& params, const Point& tau, const Point& z, const ThetaPolicy& policy = {});

struct ThetaTauCheck {
  cplx lhs;  ///< theta(g tau, z)
  cplx rhs;  ///< (c tau + d)^{-2k} theta(tau, z)
  double residual;  ///< relative
};
ThetaTauCheck theta_tau_modularity(int k, const Point& tau, const Point& z, const GLMatrix& g,
                                   const ThetaPolicy& policy = {});

/// Kronecker-Shimura symbol (c/d) for odd d, with (0/1) = (0/-1) = 1.
int kronecker_symbol(i64 c, i64 d);

struct ThetaZCheck {
  /// theta(tau, g z) / (multiplier theta(tau, z)) at z, projected to |.| = 1.
  cplx fitted_constant;
  /// Largest relative |theta(tau, g w) - c M(w) theta(tau, w)| over w = z
  /// and two nearby points, with the constant c fitted at z.
  double residual;
  /// | |ratio at z| - 1 |.
  double modulus_defect;
};
/// Weight 1/2 - k transformation in z for g in Gamma_0(4):
/// multiplier (c/d) eps_d^{2 kappa} (c z + d)^kappa, kappa = 1/2 - k,
/// eps_d = 1 or i as d = 1 or 3 mod 4.
ThetaZCheck theta_z_modularity_residual(int k, const Point& tau, const Point& z, const GLMatrix& g,
                                        const ThetaPolicy& policy = {});

/// c_d(tau, y) = int_0^1 theta(tau, x + iy) e^{2 pi i d x} dx by the
/// trapezoid rule on `nodes` points (exact for |d| < nodes / 2 up to the
/// kernel truncation).
std::vector<std::pair<i64, cplx>> theta_fourier_coefficients(int k, const Point& tau, double y,
                                                             const std::vector<i64>& ds, int nodes = 64,
                                                             const ThetaPolicy& policy = {});

}  // namespace qmod
