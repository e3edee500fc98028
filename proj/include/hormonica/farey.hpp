#pragma once

/**
 * @file farey.hpp
 * @brief Exact Farey geometry: extended rationals, the modular group,
 *        lambda lengths of the Farey decoration, and disk rendering data.
 *
 * Everything combinatorial is decided in unbounded integers. Floating point
 * appears only in the disk coordinates returned for drawing.
 *
 * Conventions:
 * - An extended rational p/q is stored reduced with q >= 0, the sign on p,
 *   and infinity as exactly 1/0.
 * - The total order puts infinity above every finite value; finite values
 *   are ordered numerically. Read cyclically, it is the order of the points
 *   around the circle at infinity.
 * - Generation is the Stern-Brocot depth from the base edge {0/1, 1/0};
 *   negatives mirror positives.
 */

#include "integer.hpp"

#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hormonica {

class ExtendedRational {
 public:
  ExtendedRational() : p_(0), q_(1) {}

  ExtendedRational(Integer p, Integer q) : p_(std::move(p)), q_(std::move(q)) {
    if (p_ == 0 && q_ == 0) throw std::invalid_argument("0/0 is not an extended rational");
    if (q_ == 0) {
      p_ = 1;
      return;
    }
    if (q_ < 0) {
      p_ = -p_;
      q_ = -q_;
    }
    Integer g = gcd(p_, q_);
    p_ /= g;
    q_ /= g;
  }

  ExtendedRational(long long n) : ExtendedRational(Integer(n), Integer(1)) {}  // NOLINT

  static ExtendedRational infinity() { return {Integer(1), Integer(0)}; }

  const Integer& p() const { return p_; }
  const Integer& q() const { return q_; }
  bool is_infinity() const { return q_ == 0; }

  ExtendedRational operator-() const {
    return is_infinity() ? *this : ExtendedRational(Integer(-p_), q_);
  }

  // "p/q" with optional leading minus; bare integers are accepted as n/1.
  static ExtendedRational parse(std::string_view text) {
    auto slash = text.find('/');
    try {
      if (slash == std::string_view::npos) return {Integer(std::string(text)), Integer(1)};
      return {Integer(std::string(text.substr(0, slash))), Integer(std::string(text.substr(slash + 1)))};
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed extended rational: '" + std::string(text) + "'");
    }
  }

  std::string str() const { return p_.str() + "/" + q_.str(); }

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    return a.p_ == b.p_ && a.q_ == b.q_;
  }

  friend std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.is_infinity() || b.is_infinity()) return a.is_infinity() <=> b.is_infinity();
    Integer lhs = a.p_ * b.q_;
    Integer rhs = b.p_ * a.q_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Integer p_;
  Integer q_;
};

inline ExtendedRational reduce(const Integer& p, const Integer& q) { return {p, q}; }

// True when b lies strictly inside the boundary arc running from a to c in the
// direction of increasing total order (wrapping through infinity).
inline bool cyclically_between(const ExtendedRational& a, const ExtendedRational& b,
                               const ExtendedRational& c) {
  if (a < c) return a < b && b < c;
  return b > a || b < c;
}

// |ps - qr|. Rejects coincident points.
inline Integer lambda(const ExtendedRational& x, const ExtendedRational& y) {
  if (x == y) throw std::invalid_argument("lambda length of coincident centers " + x.str());
  return abs(Integer(x.p() * y.q() - x.q() * y.p()));
}

inline bool farey_neighbors(const ExtendedRational& x, const ExtendedRational& y) {
  return x != y && lambda(x, y) == 1;
}

// Stern-Brocot depth from {0/1, 1/0}: the sum of continued-fraction quotients.
inline Integer generation(const ExtendedRational& x) {
  if (x.is_infinity() || x.p() == 0) return 0;
  Integer a = abs(x.p()), b = x.q(), depth = 0;
  while (b != 0) {
    depth += a / b;
    a %= b;
    std::swap(a, b);
  }
  return depth;
}

// The child of the Farey edge {x, y}: the sign-aligned mediant (p+r)/(q+s) or
// (p-r)/(q-s) of higher generation. On the base edge both candidates are
// generation 1 and the sum (1/1) is returned.
inline ExtendedRational mediant(const ExtendedRational& x, const ExtendedRational& y) {
  if (!farey_neighbors(x, y))
    throw std::invalid_argument("mediant of non-neighbors " + x.str() + ", " + y.str());
  ExtendedRational sum(Integer(x.p() + y.p()), Integer(x.q() + y.q()));
  ExtendedRational diff(Integer(x.p() - y.p()), Integer(x.q() - y.q()));
  return generation(diff) > generation(sum) ? diff : sum;
}

// The two Farey neighbors from which x is born as a mediant (generation >= 1),
// returned in increasing total order.
inline std::pair<ExtendedRational, ExtendedRational> parents(const ExtendedRational& x) {
  if (generation(x) == 0) throw std::invalid_argument(x.str() + " has no parents");
  Integer p = abs(x.p()), q = x.q();
  // Left parent r/s solves p*s - q*r = 1 with 1 <= s <= q.
  Integer s = mod_floor(extended_gcd(p, q).x, q);
  if (s == 0) s = q;
  Integer r = (p * s - 1) / q;
  ExtendedRational left(r, s), right(Integer(p - r), Integer(q - s));
  if (x.p() < 0) {
    left = -left;
    right = -right;
    std::swap(left, right);
  }
  return {left, right};
}

// The lowest-generation Farey neighbor of x; ties go to the smaller point.
inline ExtendedRational oldest_neighbor(const ExtendedRational& x) {
  if (x.is_infinity()) return ExtendedRational(0);
  if (x.p() == 0) return ExtendedRational::infinity();
  auto [a, b] = parents(x);
  auto ga = generation(a), gb = generation(b);
  if (ga != gb) return ga < gb ? a : b;
  return a < b ? a : b;
}

/// An element of PSL(2,Z), stored with c > 0, or c == 0 and d > 0.
class MoebiusMap {
 public:
  MoebiusMap() : m_{1, 0, 0, 1} {}

  MoebiusMap(Integer a, Integer b, Integer c, Integer d)
      : m_{std::move(a), std::move(b), std::move(c), std::move(d)} {
    if (m_[0] * m_[3] - m_[1] * m_[2] != 1)
      throw std::invalid_argument("Moebius map must have determinant 1");
    if (m_[2] < 0 || (m_[2] == 0 && m_[3] < 0))
      for (auto& v : m_) v = -v;
  }

  const Integer& a() const { return m_[0]; }
  const Integer& b() const { return m_[1]; }
  const Integer& c() const { return m_[2]; }
  const Integer& d() const { return m_[3]; }

  MoebiusMap inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }

  ExtendedRational operator()(const ExtendedRational& x) const {
    return {Integer(m_[0] * x.p() + m_[1] * x.q()), Integer(m_[2] * x.p() + m_[3] * x.q())};
  }

  std::complex<double> operator()(std::complex<double> z) const {
    return (to_double(m_[0]) * z + to_double(m_[1])) / (to_double(m_[2]) * z + to_double(m_[3]));
  }

  friend MoebiusMap operator*(const MoebiusMap& l, const MoebiusMap& r) {
    return {l.m_[0] * r.m_[0] + l.m_[1] * r.m_[2], l.m_[0] * r.m_[1] + l.m_[1] * r.m_[3],
            l.m_[2] * r.m_[0] + l.m_[3] * r.m_[2], l.m_[2] * r.m_[1] + l.m_[3] * r.m_[3]};
  }

  friend bool operator==(const MoebiusMap&, const MoebiusMap&) = default;

  static MoebiusMap S() { return {0, -1, 1, 0}; }
  static MoebiusMap T() { return {1, 1, 0, 1}; }
  static MoebiusMap U() { return {1, 0, 1, 1}; }

 private:
  std::array<Integer, 4> m_;
};

inline ExtendedRational apply(const MoebiusMap& m, const ExtendedRational& x) { return m(x); }

// The modular map taking x to infinity and oldest_neighbor(x) to 0. It carries
// the Farey decoration to itself, so the horocycle at x lands on height 1.
inline MoebiusMap normalizing_map(const ExtendedRational& x) {
  ExtendedRational w = oldest_neighbor(x);
  const Integer &p = x.p(), &q = x.q(), &r = w.p(), &s = w.q();
  Integer det = p * s - q * r;
  if (det == 1) return {s, Integer(-r), Integer(-q), p};
  return {Integer(-s), r, Integer(-q), p};
}

/// Horocycle in the upper half-plane: Euclidean diameter for a finite
/// center, Euclidean height for the center at infinity.
struct Horocycle {
  ExtendedRational center;
  Rational size;

  Horocycle(ExtendedRational c, Rational s) : center(std::move(c)), size(std::move(s)) {
    if (size <= 0) throw std::invalid_argument("horocycle size must be positive");
  }
};

// Diameter 1/q^2 at p/q, height 1 at infinity.
inline Horocycle farey_horocycle(const ExtendedRational& x) {
  if (x.is_infinity()) return {x, Rational(1)};
  return {x, Rational(Integer(1), Integer(x.q() * x.q()))};
}

// Squared lambda length, exact.
inline Rational lambda_squared(const Horocycle& h, const Horocycle& k) {
  if (h.center == k.center) throw std::invalid_argument("lambda length of coincident centers");
  if (h.center.is_infinity()) return h.size / k.size;
  if (k.center.is_infinity()) return k.size / h.size;
  Rational x(h.center.p(), h.center.q()), y(k.center.p(), k.center.q());
  Rational dx = x - y;
  return dx * dx / (h.size * k.size);
}

inline double lambda_general(const Horocycle& h, const Horocycle& k) {
  return std::sqrt(to_double(lambda_squared(h, k)));
}

struct DiskPoint {
  double x = 0;
  double y = 0;

  double norm2() const { return x * x + y * y; }
  friend bool operator==(const DiskPoint&, const DiskPoint&) = default;
};

// z -> (z - i)/(z + i) on the boundary: ((p^2 - q^2), -2pq)/(p^2 + q^2).
inline DiskPoint cayley(const ExtendedRational& x) {
  double p = to_double(x.p()), q = to_double(x.q());
  if (!std::isfinite(p * p + q * q)) {
    // Huge numerators: fall back to the unit-circle angle of p/q.
    double t = 2.0 * std::atan2(q, p);
    return {std::cos(t), -std::sin(t)};
  }
  double n = p * p + q * q;
  return {(p * p - q * q) / n, -2.0 * p * q / n};
}

inline DiskPoint cayley(std::complex<double> z) {
  auto w = (z - std::complex<double>(0, 1)) / (z + std::complex<double>(0, 1));
  return {w.real(), w.imag()};
}

struct GeodesicArc {
  enum class Kind { diameter, arc };
  Kind kind = Kind::diameter;
  DiskPoint from;
  DiskPoint to;
  DiskPoint center;  // arcs only
  double radius = 0;  // arcs only
};

inline GeodesicArc geodesic_arc(const ExtendedRational& x, const ExtendedRational& y) {
  if (x == y) throw std::invalid_argument("geodesic with coincident endpoints");
  GeodesicArc g;
  g.from = cayley(x);
  g.to = cayley(y);
  double dot = g.from.x * g.to.x + g.from.y * g.to.y;
  if (dot + 1.0 <= 1e-9) {
    g.kind = GeodesicArc::Kind::diameter;
    return g;
  }
  g.kind = GeodesicArc::Kind::arc;
  g.center = {(g.from.x + g.to.x) / (1.0 + dot), (g.from.y + g.to.y) / (1.0 + dot)};
  g.radius = std::sqrt(std::max(0.0, g.center.norm2() - 1.0));
  return g;
}

struct DiskCircle {
  DiskPoint center;
  double radius = 0;
};

// Image of the Farey horocycle at p/q: tangent to the unit circle at
// cayley(p/q) with Euclidean radius 1/(1 + p^2 + q^2).
inline DiskCircle horocycle_circle(const ExtendedRational& x) {
  DiskPoint at = cayley(x);
  double p = to_double(x.p()), q = to_double(x.q());
  double rho = 1.0 / (1.0 + p * p + q * q);
  return {{(1.0 - rho) * at.x, (1.0 - rho) * at.y}, rho};
}

// (tail, head): from lower to higher generation; equal generations point
// toward the larger point in the total order.
inline std::pair<ExtendedRational, ExtendedRational> orient_edge(const ExtendedRational& x,
                                                                 const ExtendedRational& y) {
  if (x == y) throw std::invalid_argument("cannot orient a degenerate edge");
  Integer gx = generation(x), gy = generation(y);
  if (gx != gy) return gx < gy ? std::pair{x, y} : std::pair{y, x};
  return x < y ? std::pair{x, y} : std::pair{y, x};
}

}  // namespace hormonica
