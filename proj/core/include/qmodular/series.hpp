#pragma once

#include <memory>
#include <vector>

#include "qmodular/qforms.hpp"

namespace qmod {

/// How an infinite sum over Q_D is cut off.
///
/// Forms with 0 < |a| <= bound_a are used. Each class b = b0 mod 2|a| is
/// summed explicitly over the translates within `window` units of the
/// evaluation point; the remainder of the class is added as an integral over
/// continuous translates (`class_tails`). With `doubling_check` the sum is
/// taken to 2 bound_a and est_error = |S(2A) - S(A)|.
struct TruncationPolicy {
  i64 bound_a = 64;
  bool doubling_check = true;
  double target_tol = 1e-8;
  double window_factor = 0.0;  ///< 0: automatic
  bool class_tails = true;
};

struct SeriesValue {
  cplx value{};
  cplx coarse_value{};  ///< S(A) when doubling, else equal to value
  double est_error = 0.0;
  i64 terms_used = 0;
  bool converged = true;
  bool near_exceptional = false;
};

/// Summand of a series over Q_D: term(Q, x) is the contribution of Q with
/// every evaluation point translated by the real shift x.
using TermFn = cplx (*)(const void* ctx, const QForm& q, double shift);

class FormSummer {
 public:
  FormSummer(const Params& params, const TruncationPolicy& policy);

  [[nodiscard]] const Params& params() const noexcept { return params_; }
  [[nodiscard]] const TruncationPolicy& policy() const noexcept { return policy_; }

  /// Sum centred at u with vertical scale v_scale. Only a > 0 when
  /// `positive_only`.
  template <class Term>
  SeriesValue sum(double u, double v_scale, bool positive_only, const Term& term) const {
    return sum_impl(u, v_scale, positive_only, &term,
                    [](const void* ctx, const QForm& q, double x) {
                      return (*static_cast<const Term*>(ctx))(q, x);
                    });
  }

  /// Explicit finite index set used for termwise identities: the forms with
  /// |a| <= bound_a inside the window around u.
  [[nodiscard]] std::vector<QForm> index_set(double u, double v_scale) const;

  [[nodiscard]] double window(double v_scale) const noexcept;

 private:
  SeriesValue sum_impl(double u, double v_scale, bool positive_only, const void* ctx, TermFn fn) const;

  Params params_;
  TruncationPolicy policy_;
  std::shared_ptr<const ResidueTable> table_;
};

/// Evaluators for the positive-weight series attached to Q_D.
class SeriesEngine {
 public:
  explicit SeriesEngine(const Params& params, const TruncationPolicy& policy = {});

  [[nodiscard]] const Params& params() const noexcept { return summer_.params(); }
  [[nodiscard]] const FormSummer& summer() const noexcept { return summer_; }

  /// sum 1/Q(tau,1)^kappa, kappa > 1.
  [[nodiscard]] SeriesValue f(int kappa, const Point& tau) const;
  /// sum Log((tau - a-)/(tau - a+)) / Q(tau,1)^{k+1}.
  [[nodiscard]] SeriesValue psi(const Point& tau) const;
  /// sum over a > 0 of 1/Q(tau,1)^{k+1}.
  [[nodiscard]] SeriesValue phi(const Point& tau) const;
  /// sum Log((w - a-)/(w - a+)) / Q(tau,1)^{k+1}, w in the lower half plane.
  [[nodiscard]] SeriesValue rho(const Point& tau, const Point& w) const;
  /// 2i sum arctan(Q_w / sqrt D) / Q(tau,1)^{k+1}.
  [[nodiscard]] SeriesValue lambda(const Point& tau, const Point& w) const;
  /// Same function through logarithms: Log_Q(w) - Log_Q(conj w) - pi i sgn(a).
  [[nodiscard]] SeriesValue lambda_log_form(const Point& tau, const Point& w) const;
  /// psi - rho + 2 pi i phi + lambda, summed termwise.
  [[nodiscard]] SeriesValue Omega(const Point& tau, const Point& w) const;
  /// psi(tau) - sum Log_Q(z) / Q(tau,1)^{k+1}, z in the upper half plane.
  [[nodiscard]] SeriesValue omega(const Point& tau, const Point& z) const;
  /// sum sgn(Q_tau) / Q(tau,1)^{k+1}. On E_D this is the two-sided average.
  [[nodiscard]] SeriesValue Lambda(const Point& tau) const;

 private:
  void require_upper(const Point& p, const char* what) const;
  void require_lower(const Point& p, const char* what) const;
  FormSummer summer_;
};

/// Residuals of the S-inversion identities, evaluated termwise over one
/// finite index set (each Q paired with Q o S^{-1} at -1/tau).
struct InversionCheck {
  cplx lhs;
  cplx rhs;
  double residual;
  i64 terms;
  std::vector<QForm> correction_forms;
};

/// tau^{-2k-2} psi(-1/tau) - psi(tau) against
/// sum log|a+/a-|/Q^{k+1} - 2 pi i sum_{a<0<c} 1/Q^{k+1}.
InversionCheck psi_inversion_check(const Params& params, const Point& tau, const TruncationPolicy& policy = {});
/// tau^{-2k-2} phi(-1/tau) - phi(tau) against 2 sum_{a<0<c} 1/Q^{k+1}.
InversionCheck phi_inversion_check(const Params& params, const Point& tau, const TruncationPolicy& policy = {});
/// Termwise: Log_Q(tau) - Log_Q(conj tau) + pi i sgn(a)
/// = Log((Q_tau/sqrt D - i)/(Q_tau/sqrt D + i)) + pi i sgn(Q_tau). Returns the
/// largest termwise discrepancy over the index set.
double lambda_log_identity_residual(const Params& params, const Point& tau, const TruncationPolicy& policy = {});

/// Limit Lambda(p + i eps) - Lambda(p - i eps): 2 sum_{Q_p = 0} sgn(Q)/Q(p,1)^{k+1}.
cplx lambda_jump_prediction(const Params& params, const Point& p, double tol = 1e-9);

}  // namespace qmod
