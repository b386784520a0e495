#pragma once

#include <compare>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "qmodular/common.hpp"

namespace qmod {

/// Integral binary quadratic form Q(x,y) = a x^2 + b x y + c y^2.
struct QForm {
  i64 a = 0;
  i64 b = 0;
  i64 c = 0;

  [[nodiscard]] constexpr i64 discriminant() const noexcept { return b * b - 4 * a * c; }
  [[nodiscard]] constexpr int sign() const noexcept { return qmod::sgn(a); }
  [[nodiscard]] constexpr QForm operator-() const noexcept { return {-a, -b, -c}; }
  friend constexpr bool operator==(const QForm&, const QForm&) = default;
};

/// Enumeration order: (|a|, a, b, c) ascending.
struct FormOrder {
  bool operator()(const QForm& x, const QForm& y) const noexcept;
};

/// Discriminant and weight parameter. Throws DomainError unless D > 0 is a
/// non-square discriminant (D = 0,1 mod 4) and k >= 2 is even.
class Params {
 public:
  Params(i64 D, int k);

  [[nodiscard]] i64 D() const noexcept { return D_; }
  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] double sqrt_d() const noexcept { return sqrt_d_; }

 private:
  i64 D_;
  int k_;
  double sqrt_d_;
};

bool is_perfect_square(i64 n) noexcept;

enum class HalfPlane { upper, lower };

/// A point u + iv with v != 0; the half plane is the sign of v.
class Point {
 public:
  static Point upper(double u, double v);
  static Point lower(double u, double v);
  static Point from(cplx z);

  [[nodiscard]] double u() const noexcept { return u_; }
  [[nodiscard]] double v() const noexcept { return v_; }
  [[nodiscard]] cplx z() const noexcept { return {u_, v_}; }
  [[nodiscard]] HalfPlane half() const noexcept {
    return v_ > 0 ? HalfPlane::upper : HalfPlane::lower;
  }
  [[nodiscard]] Point conj() const noexcept { return Point(u_, -v_); }
  [[nodiscard]] Point shifted(double du, double dv = 0.0) const { return from({u_ + du, v_ + dv}); }

 private:
  Point(double u, double v) noexcept : u_(u), v_(v) {}
  double u_;
  double v_;
};

/// Integer matrix [[a,b],[c,d]] of determinant one.
class GLMatrix {
 public:
  static GLMatrix make(i64 a, i64 b, i64 c, i64 d);
  static GLMatrix identity() { return make(1, 0, 0, 1); }
  static GLMatrix T() { return make(1, 1, 0, 1); }
  static GLMatrix S() { return make(0, -1, 1, 0); }

  [[nodiscard]] i64 a() const noexcept { return a_; }
  [[nodiscard]] i64 b() const noexcept { return b_; }
  [[nodiscard]] i64 c() const noexcept { return c_; }
  [[nodiscard]] i64 d() const noexcept { return d_; }

  [[nodiscard]] GLMatrix inverse() const noexcept { return {d_, -b_, -c_, a_}; }
  [[nodiscard]] GLMatrix operator*(const GLMatrix& o) const noexcept;
  /// Moebius action (a z + b) / (c z + d).
  [[nodiscard]] cplx apply(cplx z) const noexcept;
  [[nodiscard]] Point apply(const Point& p) const;
  /// Automorphy factor c z + d.
  [[nodiscard]] cplx j(cplx z) const noexcept { return double(c_) * z + double(d_); }
  friend bool operator==(const GLMatrix&, const GLMatrix&) = default;

 private:
  GLMatrix(i64 a, i64 b, i64 c, i64 d) noexcept : a_(a), b_(b), c_(c), d_(d) {}
  i64 a_, b_, c_, d_;
};

/// (Q o g)(x, y) = Q(a x + b y, c x + d y).
QForm act(const QForm& q, const GLMatrix& g) noexcept;

struct Roots {
  double alpha_minus;
  double alpha_plus;
};
/// alpha^{+-} = (-b +- sqrt(D)) / (2a). Throws DomainError for a = 0.
Roots roots(const QForm& q);

/// Q(z, 1).
inline cplx q_value(const QForm& q, cplx z) noexcept {
  return (double(q.a) * z + double(q.b)) * z + double(q.c);
}
/// Q_tau = (a|tau|^2 + b u + c) / v. Throws DomainError for v = 0.
double q_tau(const QForm& q, cplx z);
inline cplx q_value(const QForm& q, const Point& p) noexcept { return q_value(q, p.z()); }
inline double q_tau(const QForm& q, const Point& p) { return q_tau(q, p.z()); }

/// Half circle S_Q = {Q_tau = 0}.
struct Geodesic {
  QForm form;
  double center;
  double radius;
  bool counterclockwise;
};
Geodesic geodesic(const QForm& q, const Params& params);

/// Horizontal window used when enumerating forms. The default covers every
/// geodesic meeting the strip |u| <= 1/2 above height 0.
struct UWindow {
  double u_center = 0.0;
  double u_halfwidth = 0.5;
};

/// Counts the admissible b modulo 2|a|: the b0 in [0, 2|a|) with b0^2 = D mod 4|a|.
class ResidueTable {
 public:
  ResidueTable(i64 D, i64 max_abs_a);
  [[nodiscard]] i64 max_abs_a() const noexcept { return max_abs_a_; }
  /// Residues b0 in [0, 2|a|) for |a| = abs_a.
  [[nodiscard]] std::span<const i64> residues(i64 abs_a) const;

 private:
  i64 max_abs_a_;
  std::vector<std::size_t> offsets_;
  std::vector<i64> values_;
};

/// All Q in Q_D with 0 < |a| <= bound_a whose geodesic meets the window,
/// ordered by (|a|, a, b).
std::vector<QForm> enumerate_forms(const Params& params, i64 bound_a, const UWindow& window = {});

/// Every form with a < 0 < c (a finite set).
std::vector<QForm> forms_a_neg_c_pos(const Params& params);

/// A height at which the vertical line through u meets one or more geodesics.
struct Crossing {
  double height;
  std::vector<QForm> forms;
};
/// Crossing heights in (v_lo, v_hi) ordered ascending.
std::vector<Crossing> crossing_heights(const Params& params, double u, double v_lo,
                                       double v_hi = std::numeric_limits<double>::infinity());

/// Forms with |Q_p| < tol (p on E_D within tol).
std::vector<QForm> forms_vanishing_at(const Params& params, const Point& p, double tol = 1e-9);

using Rational = boost::rational<i64>;
/// Point u + iv with u rational and v^2 rational.
struct RationalPoint {
  Rational u;
  Rational v2;
};
/// Exact membership in E_D: forms with a(u^2 + v^2) + b u + c = 0.
std::vector<QForm> forms_vanishing_at_exact(const Params& params, const RationalPoint& p);

/// Signs of Q_p for the a > 0 forms whose geodesic rises above v_floor and
/// meets |u - u_center| <= u_halfwidth. Equal signatures over a common
/// window identify the same connected component of the complement of E_D
/// within that window.
struct SignatureWindow {
  double u_center = 0.0;
  double u_halfwidth = 1.0;
  double v_floor = 0.05;
};
struct ComponentSignature {
  std::vector<std::pair<QForm, int>> entries;
  [[nodiscard]] std::uint64_t hash() const noexcept;
  friend bool operator==(const ComponentSignature&, const ComponentSignature&) = default;
};
ComponentSignature component_signature(const Params& params, const Point& p,
                                       const SignatureWindow& window, double tol = 1e-9);
/// Both points must lie above v_floor of the shared window.
bool same_component(const Params& params, const Point& p1, const Point& p2);

}  // namespace qmod
