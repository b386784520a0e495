#include "qmodular/qforms.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace qmod {

bool FormOrder::operator()(const QForm& x, const QForm& y) const noexcept {
  return std::make_tuple(std::abs(x.a), x.a, x.b, x.c) < std::make_tuple(std::abs(y.a), y.a, y.b, y.c);
}

bool is_perfect_square(i64 n) noexcept {
  if (n < 0) return false;
  auto r = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(n))));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n;
}

Params::Params(i64 D, int k) : D_(D), k_(k), sqrt_d_(std::sqrt(static_cast<double>(D))) {
  if (D <= 0) throw DomainError("discriminant must be positive");
  if (D % 4 != 0 && D % 4 != 1) throw DomainError("discriminant must be 0 or 1 mod 4");
  if (is_perfect_square(D)) throw DomainError("discriminant must not be a square");
  if (k < 2 || k % 2 != 0) throw DomainError("k must be even and at least 2");
}

Point Point::upper(double u, double v) {
  if (!(v > 0.0) || !std::isfinite(u) || !std::isfinite(v)) throw DomainError("upper point needs v > 0");
  return {u, v};
}

Point Point::lower(double u, double v) {
  if (!(v > 0.0) || !std::isfinite(u) || !std::isfinite(v)) throw DomainError("lower point needs v > 0");
  return {u, -v};
}

Point Point::from(cplx z) {
  if (z.imag() == 0.0 || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("point must lie off the real axis");
  return {z.real(), z.imag()};
}

GLMatrix GLMatrix::make(i64 a, i64 b, i64 c, i64 d) {
  if (a * d - b * c != 1) throw DomainError("matrix must have determinant 1");
  return {a, b, c, d};
}

GLMatrix GLMatrix::operator*(const GLMatrix& o) const noexcept {
  return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_};
}

cplx GLMatrix::apply(cplx z) const noexcept {
  return (double(a_) * z + double(b_)) / (double(c_) * z + double(d_));
}

Point GLMatrix::apply(const Point& p) const { return Point::from(apply(p.z())); }

QForm act(const QForm& q, const GLMatrix& g) noexcept {
  const i64 al = g.a(), be = g.b(), ga = g.c(), de = g.d();
  return {q.a * al * al + q.b * al * ga + q.c * ga * ga,
          2 * q.a * al * be + q.b * (al * de + be * ga) + 2 * q.c * ga * de,
          q.a * be * be + q.b * be * de + q.c * de * de};
}

Roots roots(const QForm& q) {
  if (q.a == 0) throw DomainError("form with a = 0 has no finite root pair");
  const double sd = std::sqrt(static_cast<double>(q.discriminant()));
  const double two_a = 2.0 * static_cast<double>(q.a);
  return {(-double(q.b) - sd) / two_a, (-double(q.b) + sd) / two_a};
}

double q_tau(const QForm& q, cplx z) {
  if (z.imag() == 0.0) throw DomainError("Q_tau needs a point off the real axis");
  return (double(q.a) * std::norm(z) + double(q.b) * z.real() + double(q.c)) / z.imag();
}

Geodesic geodesic(const QForm& q, const Params& params) {
  if (q.discriminant() != params.D()) throw DomainError("form discriminant does not match D");
  if (q.a == 0) throw DomainError("a = 0 gives a vertical line, not a half circle");
  const double a = static_cast<double>(q.a);
  return {q, -double(q.b) / (2.0 * a), params.sqrt_d() / (2.0 * std::abs(a)), q.a > 0};
}

ResidueTable::ResidueTable(i64 D, i64 max_abs_a) : max_abs_a_(max_abs_a) {
  if (max_abs_a < 1) throw DomainError("residue table needs max |a| >= 1");
  offsets_.reserve(static_cast<std::size_t>(max_abs_a) + 2);
  offsets_.push_back(0);
  offsets_.push_back(0);
  for (i64 a = 1; a <= max_abs_a; ++a) {
    const i64 m = 4 * a;
    const i64 target = ((D % m) + m) % m;
    for (i64 b0 = 0; b0 < 2 * a; ++b0) {
      if ((b0 * b0) % m == target) values_.push_back(b0);
    }
    offsets_.push_back(values_.size());
  }
}

std::span<const i64> ResidueTable::residues(i64 abs_a) const {
  if (abs_a < 1 || abs_a > max_abs_a_) throw DomainError("|a| outside residue table");
  const auto lo = offsets_[static_cast<std::size_t>(abs_a)];
  const auto hi = offsets_[static_cast<std::size_t>(abs_a) + 1];
  return {values_.data() + lo, hi - lo};
}

namespace {

i64 floor_div(i64 x, i64 m) noexcept {
  i64 q = x / m;
  if ((x % m != 0) && ((x < 0) != (m < 0))) --q;
  return q;
}

// b in [lo, hi] with b = b0 mod m, as the integer range [first, last] of the quotient.
std::pair<i64, i64> class_range(i64 b0, i64 m, double lo, double hi) noexcept {
  const i64 ilo = static_cast<i64>(std::ceil(lo));
  const i64 ihi = static_cast<i64>(std::floor(hi));
  return {floor_div(ilo - b0 + m - 1, m), floor_div(ihi - b0, m)};
}

}  // namespace

std::vector<QForm> enumerate_forms(const Params& params, i64 bound_a, const UWindow& window) {
  if (bound_a < 1) throw DomainError("bound_a must be >= 1");
  if (!(window.u_halfwidth >= 0.0)) throw DomainError("window half width must be non-negative");
  const ResidueTable table(params.D(), bound_a);
  const i64 D = params.D();
  std::vector<QForm> out;
  for (i64 abs_a = 1; abs_a <= bound_a; ++abs_a) {
    for (i64 a : {-abs_a, abs_a}) {
      // geodesic meets the window iff |b + 2 a u_c| < sqrt(D) + 2|a| halfwidth
      const double shift = -2.0 * double(a) * window.u_center;
      const double reach = params.sqrt_d() + 2.0 * double(abs_a) * window.u_halfwidth;
      std::vector<QForm> row;
      for (i64 b0 : table.residues(abs_a)) {
        const auto [q0, q1] = class_range(b0, 2 * abs_a, shift - reach, shift + reach);
        for (i64 t = q0; t <= q1; ++t) {
          const i64 b = b0 + 2 * abs_a * t;
          if (std::abs(double(b) - shift) > reach) continue;
          row.push_back({a, b, (b * b - D) / (4 * a)});
        }
      }
      std::sort(row.begin(), row.end(), FormOrder{});
      out.insert(out.end(), row.begin(), row.end());
    }
  }
  return out;
}

std::vector<QForm> forms_a_neg_c_pos(const Params& params) {
  // b^2 + 4|a| c = D with |a|, c >= 1
  const i64 D = params.D();
  std::vector<QForm> out;
  const auto bmax = static_cast<i64>(params.sqrt_d()) + 1;
  for (i64 b = -bmax; b <= bmax; ++b) {
    const i64 rest = D - b * b;
    if (rest <= 0 || rest % 4 != 0) continue;
    const i64 n = rest / 4;
    for (i64 m = 1; m <= n; ++m) {
      if (n % m == 0) out.push_back({-m, b, n / m});
    }
  }
  std::sort(out.begin(), out.end(), FormOrder{});
  return out;
}

std::vector<Crossing> crossing_heights(const Params& params, double u, double v_lo, double v_hi) {
  if (!(v_lo > 0.0) || !(v_hi > v_lo)) throw DomainError("crossing_heights needs 0 < v_lo < v_hi");
  const i64 D = params.D();
  const double sd = params.sqrt_d();
  const auto max_a = static_cast<i64>(std::floor(sd / (2.0 * v_lo)));
  std::vector<std::pair<double, QForm>> hits;
  for (i64 abs_a = 1; abs_a <= max_a; ++abs_a) {
    for (i64 a : {-abs_a, abs_a}) {
      // geodesic covers u iff |2 a u + b| < sqrt(D)
      const double centre = -2.0 * double(a) * u;
      for (auto b = static_cast<i64>(std::ceil(centre - sd)); double(b) <= centre + sd; ++b) {
        if ((b * b - D) % (4 * a) != 0) continue;
        const double s = 2.0 * double(a) * u + double(b);
        const double h2 = (double(D) - s * s) / (4.0 * double(a) * double(a));
        if (!(h2 > 0.0)) continue;
        const double h = std::sqrt(h2);
        if (h > v_lo && h < v_hi) hits.push_back({h, {a, b, (b * b - D) / (4 * a)}});
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) {
    return x.first < y.first || (x.first == y.first && FormOrder{}(x.second, y.second));
  });
  std::vector<Crossing> out;
  for (const auto& [h, q] : hits) {
    if (!out.empty() && std::abs(out.back().height - h) <= 1e-12 * h) {
      out.back().forms.push_back(q);
    } else {
      out.push_back({h, {q}});
    }
  }
  return out;
}

std::vector<QForm> forms_vanishing_at(const Params& params, const Point& p, double tol) {
  const double v = std::abs(p.v());
  const double u = p.u();
  const double sd = params.sqrt_d();
  const i64 D = params.D();
  // |Q_p| < tol forces the apex sqrt(D)/(2|a|) above v minus a margin
  const auto max_a = static_cast<i64>(std::floor((sd + tol * v) / (2.0 * v) + 1e-9));
  std::vector<QForm> out;
  for (i64 abs_a = 1; abs_a <= max_a; ++abs_a) {
    for (i64 a : {-abs_a, abs_a}) {
      const double centre = -2.0 * double(a) * u;
      const double reach = sd + tol * v + 1e-9;
      for (auto b = static_cast<i64>(std::ceil(centre - reach)); double(b) <= centre + reach; ++b) {
        if ((b * b - D) % (4 * a) != 0) continue;
        const QForm q{a, b, (b * b - D) / (4 * a)};
        if (std::abs(q_tau(q, cplx(u, v))) < tol) out.push_back(q);
      }
    }
  }
  std::sort(out.begin(), out.end(), FormOrder{});
  return out;
}

std::vector<QForm> forms_vanishing_at_exact(const Params& params, const RationalPoint& p) {
  if (p.v2 <= Rational(0)) throw DomainError("exact point needs v^2 > 0");
  const i64 D = params.D();
  std::vector<QForm> out;
  // 4 a^2 v^2 <= D
  for (i64 abs_a = 1; Rational(4 * abs_a * abs_a) * p.v2 <= Rational(D); ++abs_a) {
    for (i64 a : {-abs_a, abs_a}) {
      // (2 a u + b)^2 <= D
      const Rational centre = Rational(-2 * a) * p.u;
      const i64 lo = boost::rational_cast<i64>(centre) - static_cast<i64>(params.sqrt_d()) - 2;
      const i64 hi = boost::rational_cast<i64>(centre) + static_cast<i64>(params.sqrt_d()) + 2;
      for (i64 b = lo; b <= hi; ++b) {
        if ((b * b - D) % (4 * a) != 0) continue;
        const i64 c = (b * b - D) / (4 * a);
        if (Rational(a) * (p.u * p.u + p.v2) + Rational(b) * p.u + Rational(c) == Rational(0))
          out.push_back({a, b, c});
      }
    }
  }
  std::sort(out.begin(), out.end(), FormOrder{});
  return out;
}

std::uint64_t ComponentSignature::hash() const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](i64 x) {
    auto ux = static_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) {
      h ^= (ux >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [q, s] : entries) {
    mix(q.a);
    mix(q.b);
    mix(q.c);
    mix(s);
  }
  return h;
}

ComponentSignature component_signature(const Params& params, const Point& p, const SignatureWindow& window,
                                       double tol) {
  if (!(window.v_floor > 0.0) || !(window.u_halfwidth >= 0.0)) throw DomainError("bad signature window");
  const double sd = params.sqrt_d();
  const i64 D = params.D();
  const cplx z(p.u(), std::abs(p.v()));
  const auto max_a = static_cast<i64>(std::floor(sd / (2.0 * window.v_floor)));
  ComponentSignature sig;
  for (i64 a = 1; a <= max_a; ++a) {
    const double centre = -2.0 * double(a) * window.u_center;
    const double reach = sd + 2.0 * double(a) * window.u_halfwidth;
    for (auto b = static_cast<i64>(std::ceil(centre - reach)); double(b) <= centre + reach; ++b) {
      if ((b * b - D) % (4 * a) != 0) continue;
      const QForm q{a, b, (b * b - D) / (4 * a)};
      const double qt = q_tau(q, z);
      if (std::abs(qt) < tol) throw DomainError("point lies on E_D");
      sig.entries.emplace_back(q, sgn(qt));
    }
  }
  return sig;
}

bool same_component(const Params& params, const Point& p1, const Point& p2) {
  const SignatureWindow w{0.5 * (p1.u() + p2.u()), 0.5 * std::abs(p1.u() - p2.u()) + 1.0,
                          std::min({0.05, 0.5 * std::abs(p1.v()), 0.5 * std::abs(p2.v())})};
  return component_signature(params, p1, w) == component_signature(params, p2, w);
}

}  // namespace qmod
