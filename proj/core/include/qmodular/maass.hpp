#pragma once

#include <utility>
#include <vector>

#include "qmodular/series.hpp"

namespace qmod {

struct PsiOptions {
  /// Add the part of the limit constant carried by the forms with
  /// |a| beyond the cutoff. Each class b = b0 mod 2|a| contributes, up to
  /// exponentially small terms, its share of c_inf.
  bool cusp_tail = true;
};

/// Psi_{-k,D}(tau) = 1/2 sum Q(tau,1)^k beta(D v^2/|Q(tau,1)|^2; k + 1/2, 1/2).
/// Throws DomainError within 1e-6 of E_D, where the series diverges.
SeriesValue eval_Psi(const Params& params, const Point& p, const TruncationPolicy& policy = {},
                     const PsiOptions& options = {});

/// Vertical integration path from a point up to i infinity, broken at every
/// crossing with E_D, truncated at v_max.
struct QuadraturePath {
  Point base;
  std::vector<std::pair<double, double>> segments;
  double v_max;
  int node_budget;
};
/// v_max = max(sqrt(D)/2, v) + 12 ln(10) / (2 pi).
QuadraturePath make_path(const Params& params, const Point& p);

enum class EichlerIntegrand {
  /// Lambda itself along the vertical ray (continuous across E_D).
  vertical,
  /// The holomorphic continuation Lambda_C of Lambda from the component C
  /// of the base point: sum eps_C(Q)/Q^{k+1} with the signs frozen at C.
  component,
};

struct EichlerOptions {
  double panel_length = 0.25;  ///< initial Gauss-Legendre panel length
  bool adaptive = true;        ///< bisect panels until the two estimates agree
  double quad_tol = 1e-11;     ///< absolute tolerance per unit length
  int max_depth = 10;
  EichlerIntegrand integrand = EichlerIntegrand::vertical;
};

struct EichlerPair {
  SeriesValue hol;     ///< holomorphic Eichler integral
  SeriesValue nonhol;  ///< non-holomorphic Eichler integral
  QuadraturePath path;
  double quad_error = 0.0;
  i64 lambda_evaluations = 0;
};

/// Both Eichler integrals of Lambda along the vertical ray above p, sharing
/// the Lambda evaluations:
///   E(tau)  = -(2 pi i)^{2k+1}/(2k)! int_tau^{i inf} Lambda(w) (tau - w)^{2k} dw,
///   L*(tau) = (2i)^{-2k-1} int_{i inf}^{-conj tau} conj(Lambda(-conj w)) (w + tau)^{2k} dw,
/// normalised so that D^{2k+1} E = Lambda and xi_{-2k} L* = Lambda.
EichlerPair eichler_integrals(const Params& params, const Point& p, const TruncationPolicy& policy = {},
                              const EichlerOptions& options = {});
SeriesValue eichler_hol(const Params& params, const Point& p, const TruncationPolicy& policy = {},
                        const EichlerOptions& options = {});
SeriesValue eichler_nonhol(const Params& params, const Point& p, const TruncationPolicy& policy = {},
                           const EichlerOptions& options = {});

/// b0 in [0, 2a) with b0^2 = D mod 4a.
i64 residue_count(i64 D, i64 a);

struct CInfinity {
  double value;
  double error_bound;
  i64 terms;
};
/// Limit of Psi at i infinity, by summing the congruence counts up to a
/// cutoff chosen from a crude tail bound. Results are memoised per (D, k, tol).
CInfinity c_infinity(const Params& params, double tol = 1e-10);

/// B(k + 1/2, 1/2) sum_{a Q_tau < 0} Q(tau,1)^k, the polynomial by which Psi
/// differs from the Eichler-integral split on a component below a geodesic.
cplx local_polynomial(const Params& params, const Point& p);

struct SplitReport {
  cplx psi_value;
  double c_inf;
  cplx eichler_hol;
  cplx eichler_nonhol;
  /// |Psi - (c_inf - D^{k+1/2} (2k)!/(4 pi)^{2k+1} E + D^{k+1/2} L*)| with the
  /// vertical-path integrals of Lambda.
  double residual;
  double est_error;
  /// Same identity with the component continuation Lambda_C and the local
  /// polynomial added.
  cplx component_hol;
  cplx component_nonhol;
  cplx local_poly;
  double component_residual;
};
SplitReport split_residual(const Params& params, const Point& p, const TruncationPolicy& policy = {},
                           const EichlerOptions& options = {});

/// Limit of d/dtaubar Psi(p + i eps) - d/dtaubar Psi(p - i eps) for p on E_D:
/// i D^{k+1/2} v^{2k} sum_{Q_p=0} sgn(Q)/Q(conj p, 1)^{k+1}.
cplx psi_dbar_jump_prediction(const Params& params, const Point& p, double tol = 1e-9);

}  // namespace qmod
