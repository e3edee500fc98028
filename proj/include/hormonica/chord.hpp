#pragma once

/**
 * @file chord.hpp
 * @brief Triangular chords: which integer triples occur as the pairwise
 *        lambda lengths of three Farey-decorated points, with explicit
 *        realizations, plus Markoff triples.
 *
 * A triple (A, B, C) is a chord iff, for every ordering,
 *   1. gcd of any two entries divides the third, and
 *   2. if n = gcd(A, B, C) is even, some entry divided by n is even.
 *
 * Certificates list the points x1, x2, x3 so that lambda_i is the lambda
 * length of the edge opposite x_i.
 */

#include "farey.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hormonica {

struct ChordTriple {
  std::array<Integer, 3> lambdas;

  ChordTriple(Integer a, Integer b, Integer c) : lambdas{std::move(a), std::move(b), std::move(c)} {
    for (const auto& l : lambdas)
      if (l < 1) throw std::invalid_argument("chord entries must be positive, got " + l.str());
  }

  const Integer& operator[](std::size_t i) const { return lambdas[i]; }

  ChordTriple sorted() const {
    auto s = lambdas;
    std::sort(s.begin(), s.end());
    return {s[0], s[1], s[2]};
  }

  std::string str() const { return "(" + lambdas[0].str() + "," + lambdas[1].str() + "," + lambdas[2].str() + ")"; }

  friend bool operator==(const ChordTriple&, const ChordTriple&) = default;
  friend auto operator<=>(const ChordTriple&, const ChordTriple&) = default;
};

struct ChordCertificate {
  std::array<ExtendedRational, 3> vertices;
  std::array<Integer, 3> lambdas;  // lambdas[i] = lambda of the edge opposite vertices[i]
  // Parameters of the construction (unused by the brute-force search):
  // vertices are 0/1, A/r, B/s for the normalized ordering, F the product of
  // the prime powers of n that were processed.
  Integer r = 0;
  Integer s = 0;
  Integer factor = 1;
};

inline std::array<Integer, 3> opposite_lambdas(const std::array<ExtendedRational, 3>& v) {
  return {lambda(v[1], v[2]), lambda(v[0], v[2]), lambda(v[0], v[1])};
}

inline bool verify(const ChordCertificate& c, const ChordTriple& t) {
  const auto& v = c.vertices;
  if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) return false;
  return opposite_lambdas(v) == t.lambdas && c.lambdas == t.lambdas;
}

enum class ChordFailure { none, divisibility, parity };

struct ChordVerdict {
  bool chord = false;
  ChordFailure failure = ChordFailure::none;
  // For divisibility failures: gcd(lambdas[i], lambdas[j]) does not divide lambdas[k].
  std::array<std::size_t, 3> indices{0, 1, 2};
  Integer divisor = 0;
  std::string reason;
};

inline ChordVerdict check_chord(const ChordTriple& t) {
  ChordVerdict v;
  constexpr std::array<std::array<std::size_t, 3>, 3> orders{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
  for (auto [i, j, k] : orders) {
    Integer g = gcd(t[i], t[j]);
    if (t[k] % g != 0) {
      v.failure = ChordFailure::divisibility;
      v.indices = {i, j, k};
      v.divisor = g;
      v.reason = "Condition 1 fails: gcd(" + t[i].str() + "," + t[j].str() + ")=" + g.str() + " ∤ " + t[k].str();
      return v;
    }
  }
  // Under condition 1 every pairwise gcd equals the triple gcd.
  Integer n = gcd(t[0], t[1], t[2]);
  if (gcd(t[0], t[1]) != n || gcd(t[0], t[2]) != n || gcd(t[1], t[2]) != n)
    throw std::logic_error("pairwise gcds differ under condition 1 for " + t.str());
  if (n % 2 == 0) {
    bool some_even = std::any_of(t.lambdas.begin(), t.lambdas.end(), [&](const Integer& l) { return (l / n) % 2 == 0; });
    if (!some_even) {
      v.failure = ChordFailure::parity;
      v.divisor = n;
      v.reason = "Condition 2 fails: n=gcd=" + n.str() + " is even but every entry divided by n is odd";
      return v;
    }
  }
  v.chord = true;
  return v;
}

inline bool is_chord(const ChordTriple& t) { return check_chord(t).chord; }

namespace detail {

// Shift (r, s) along (t*F*a, t*F*b), which preserves a*s - b*r, until both are
// coprime to p. For an odd prime t <= 2 suffices; for p = 2 with a, b of the
// parities allowed by the parity condition, t <= 1 suffices.
inline bool make_coprime(const Integer& a, const Integer& b, Integer& r, Integer& s, const Integer& F,
                         const Integer& p) {
  for (int t = 0; t <= 2; ++t) {
    Integer rr = r + t * F * a, ss = s + t * F * b;
    if (rr % p != 0 && ss % p != 0) {
      r = std::move(rr);
      s = std::move(ss);
      return true;
    }
  }
  return false;
}

// Adjust a solution of a*s - b*r = c so that r and s are coprime to n, prime
// by prime with 2 first. Returns the final accumulated factor F (= |n|) or
// nullopt when some prime cannot be cleared.
inline std::optional<Integer> clear_primes(const Integer& a, const Integer& b, Integer& r, Integer& s,
                                           const Integer& n) {
  Integer F = 1;
  for (const auto& [p, e] : factorize(n)) {
    if (!make_coprime(a, b, r, s, F, p)) return std::nullopt;
    F *= pow(p, e);
  }
  return F;
}

}  // namespace detail

/**
 * Realizes a chord as three extended rationals following the constructive
 * proof of the characterization:
 *   - divide out n = gcd, leaving pairwise coprime a, b, c;
 *   - when n is even, reorder so the (unique) even entry is c;
 *   - solve a*s - b*r = c with the Bezout coefficient u in [1, b];
 *   - make r, s coprime to each prime power of n in turn using shifts
 *     (r, s) <- (t*F*a + r, t*F*b + s);
 *   - the vertices 0/1, A/r, B/s then have pairwise lambdas A, B, C.
 * Every certificate is verified exactly before it is returned.
 */
inline ChordCertificate realize_chord(const ChordTriple& t) {
  ChordVerdict verdict = check_chord(t);
  if (!verdict.chord) throw std::invalid_argument(t.str() + " is not a chord: " + verdict.reason);

  Integer n = gcd(t[0], t[1], t[2]);
  // order[k] = index into t for the normalized A, B, C.
  std::array<std::size_t, 3> order{0, 1, 2};
  if (n % 2 == 0) {
    auto even = std::find_if(order.begin(), order.end(), [&](std::size_t i) { return (t[i] / n) % 2 == 0; });
    std::iter_swap(even, order.begin() + 2);
  }
  const Integer &A = t[order[0]], &B = t[order[1]], &C = t[order[2]];
  Integer a = A / n, b = B / n, c = C / n;

  // a*u - b*v = 1 with 1 <= u <= b.
  ExtendedGcd eg = extended_gcd(a, b);
  Integer u = mod_floor(eg.x, b);
  if (u == 0) u = b;
  Integer v = (a * u - 1) / b;
  Integer s = c * u, r = c * v;

  auto F = detail::clear_primes(a, b, r, s, n);
  if (!F) throw std::logic_error("could not clear the primes of n for " + t.str());

  // The edge 0/1 -- A/r has lambda A, so it lies opposite B/s; and so on.
  std::array<ExtendedRational, 3> normalized{ExtendedRational(B, s), ExtendedRational(A, r), ExtendedRational(0)};
  ChordCertificate cert;
  for (std::size_t k = 0; k < 3; ++k) cert.vertices[order[k]] = normalized[k];
  cert.lambdas = opposite_lambdas(cert.vertices);
  cert.r = r;
  cert.s = s;
  cert.factor = *F;
  if (!verify(cert, t)) throw std::logic_error("realization of " + t.str() + " failed verification");
  return cert;
}

/**
 * Exhaustive search with x1 = 0/1. Since lambda(0/1, p/q) = |p|, the other
 * two points are +-lambda3/q2 and +-lambda2/q3; all reduced denominators up to
 * `denom_bound` are tried. Finding a witness is proof; not finding one is
 * only evidence.
 */
inline std::optional<ChordCertificate> brute_force_realize(const ChordTriple& t, std::int64_t denom_bound) {
  if (denom_bound < 1) throw std::invalid_argument("denominator bound must be >= 1");
  const std::int64_t l1 = to_int64(t[0]), l2 = to_int64(t[1]), l3 = to_int64(t[2]);
  auto reduced = [](std::int64_t num, std::int64_t den) { return std::gcd(num, den) == 1; };
  for (std::int64_t q2 = 0; q2 <= denom_bound; ++q2) {
    if (!reduced(l3, q2)) continue;
    for (std::int64_t q3 = 0; q3 <= denom_bound; ++q3) {
      if (!reduced(l2, q3)) continue;
      for (std::int64_t sign2 : {1, -1}) {
        for (std::int64_t sign3 : {1, -1}) {
          std::int64_t p2 = sign2 * l3, p3 = sign3 * l2;
          // lambda(p2/q2, p3/q3) as a 2x2 determinant.
          std::int64_t det = p2 * q3 - q2 * p3;
          if (det != l1 && det != -l1) continue;
          ChordCertificate cert;
          cert.vertices = {ExtendedRational(0), ExtendedRational(Integer(p2), Integer(q2)),
                           ExtendedRational(Integer(p3), Integer(q3))};
          cert.lambdas = opposite_lambdas(cert.vertices);
          if (verify(cert, t)) return cert;
        }
      }
    }
  }
  return std::nullopt;
}

/// x^2 + a^2 + b^2 = 3abx. Stored as the sorted multiset.
struct MarkoffTriple {
  std::array<Integer, 3> v;

  MarkoffTriple(Integer x, Integer a, Integer b) : v{std::move(x), std::move(a), std::move(b)} {
    if (v[0] < 1 || v[1] < 1 || v[2] < 1 || !satisfies(v))
      throw std::invalid_argument("not a Markoff triple: (" + v[0].str() + "," + v[1].str() + "," + v[2].str() + ")");
  }

  static bool satisfies(const std::array<Integer, 3>& t) {
    return t[0] * t[0] + t[1] * t[1] + t[2] * t[2] == 3 * t[0] * t[1] * t[2];
  }

  MarkoffTriple sorted() const {
    auto s = v;
    std::sort(s.begin(), s.end());
    return {s[0], s[1], s[2]};
  }

  std::string str() const { return "(" + v[0].str() + "," + v[1].str() + "," + v[2].str() + ")"; }

  friend bool operator==(const MarkoffTriple&, const MarkoffTriple&) = default;
  friend auto operator<=>(const MarkoffTriple&, const MarkoffTriple&) = default;
};

// Replace entry i by (sum of squares of the other two) / entry i.
inline std::array<MarkoffTriple, 3> markoff_children(const MarkoffTriple& m) {
  auto child = [&](std::size_t i) {
    auto t = m.v;
    const Integer &y = t[(i + 1) % 3], &z = t[(i + 2) % 3];
    Integer num = y * y + z * z;
    if (num % t[i] != 0) throw std::logic_error("inexact Markoff flip on " + m.str());
    t[i] = num / t[i];
    return MarkoffTriple(t[0], t[1], t[2]);
  };
  return {child(0), child(1), child(2)};
}

inline std::set<MarkoffTriple> markoff_tree(unsigned depth) {
  MarkoffTriple root(1, 1, 1);
  std::set<MarkoffTriple> seen{root};
  std::vector<MarkoffTriple> frontier{root};
  for (unsigned d = 0; d < depth; ++d) {
    std::vector<MarkoffTriple> next;
    for (const auto& m : frontier)
      for (auto& c : markoff_children(m))
        if (seen.insert(c.sorted()).second) next.push_back(c.sorted());
    frontier = std::move(next);
  }
  return seen;
}

struct BezoutWitness {
  Integer r;
  Integer s;
};

/**
 * r, s with a*s - b*r = 1 and gcd(n, r) = gcd(n, s) = 1. No witness exists
 * when n is even and a, b are both odd (then s - r is odd), which is
 * reported as an error.
 */
inline BezoutWitness bezout_witness(const Integer& a, const Integer& b, const Integer& n) {
  if (n == 0) throw std::invalid_argument("bezout_witness needs n != 0");
  if (gcd(a, b) != 1) throw std::invalid_argument("bezout_witness needs coprime a, b");
  if (n % 2 == 0 && a % 2 != 0 && b % 2 != 0)
    throw std::invalid_argument("no witness: n is even while a and b are both odd");
  ExtendedGcd eg = extended_gcd(a, b);
  Integer s = eg.x, r = -eg.y;
  if (!detail::clear_primes(a, b, r, s, n)) throw std::logic_error("prime clearing failed in bezout_witness");
  return {r, s};
}

}  // namespace hormonica
