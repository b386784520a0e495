#pragma once

#include <functional>

#include "qmodular/qforms.hpp"

namespace qmod {

/// A complex-valued function of tau, possibly non-holomorphic.
using Field = std::function<cplx(cplx)>;

struct DiffSpec {
  double step = 1e-4;
  int order = 1;
  /// Radius of the Cauchy circle; 0 picks v/2.
  double contour_radius = 0.0;
  /// When set, every stencil point must lie in the component of the
  /// evaluation point, otherwise DomainError.
  const Params* guard = nullptr;
};

struct Wirtinger {
  cplx d_tau;
  cplx d_taubar;
};

/// d/dtau = (d_u - i d_v)/2 and d/dtaubar = (d_u + i d_v)/2 by central differences.
Wirtinger wirtinger(const Field& f, const Point& p, const DiffSpec& spec = {});

/// xi_kappa f = 2i v^kappa conj(d f / d taubar).
cplx xi_apply(const Field& f, double kappa, const Point& p, const DiffSpec& spec = {});

/// Delta_kappa f = -v^2 (f_uu + f_vv) + i kappa v (f_u + i f_v).
cplx laplacian(const Field& f, double kappa, const Point& p, const DiffSpec& spec = {});
double laplacian_residual(const Field& f, double kappa, const Point& p, const DiffSpec& spec = {});

/// R_kappa f = 2i df/dtau + kappa f / v.
cplx raise(const Field& f, double kappa, const Point& p, const DiffSpec& spec = {});

/// n-th complex derivative of a holomorphic f by the trapezoid rule on a
/// circle with 64 (n + 1) nodes.
cplx cauchy_deriv(const Field& f, const Point& p, int order, const DiffSpec& spec = {});

/// D^n f = (2 pi i)^{-n} f^{(n)}.
cplx bol_apply(const Field& f, const Point& p, int order, const DiffSpec& spec = {});

struct BolTermCheck {
  cplx lhs;         ///< D^{2n-1}[Log((tau - a-)/(tau - a+)) Q(tau,1)^{n-1}]
  cplx rhs;         ///< +i (2 pi)^{1-2n} (n-1)!^2 D^{n-1/2} / Q(tau,1)^n
  double residual;  ///< |lhs - rhs| / |rhs|
  cplx rhs_reciprocal;      ///< -i (2 pi)^{2n-1} (n-1)!^2 D^{n-1/2} / Q(tau,1)^n
  double reciprocal_residual;  ///< |lhs - rhs_reciprocal| / |rhs_reciprocal|
};
BolTermCheck bol_term_check(const Params& params, const QForm& q, int n, const Point& p,
                            const DiffSpec& spec = {});

/// Residual of (-4 pi)^2 D^2 f = R_1 R_{-1} f, the case l = 3 of Bol's
/// identity, with both sides by finite differences. Relative to the left side.
double bol_identity_residual(const Field& f, const Point& p, const DiffSpec& spec = {});

/// |Delta_kappa f + xi_{2-kappa}(xi_kappa f)| by nested differences.
double xi_factorization_residual(const Field& f, double kappa, const Point& p, const DiffSpec& spec = {});

}  // namespace qmod
