#pragma once

/**
 * @file tessellation.hpp
 * @brief The Farey tessellation plus a finite record of flips.
 *
 * A TessellationPatch stores only how it differs from the Farey tessellation:
 * the Farey edges that have been flipped away and the non-Farey edges that
 * have been flipped in. Membership of an edge is then exact:
 *
 *   lambda(e) == 1  ->  e is a Farey edge; present unless removed
 *   lambda(e) >= 2  ->  present iff added
 *
 * The faces beside an edge {x, y} are found from a short candidate list. If
 * both other sides of a face are Farey edges, the third vertex is (X +- Y)/D
 * with X, Y the integer vectors of x, y and D = lambda(x, y); otherwise it is
 * a neighbor of x or y along an added edge. The region of non-Farey faces is
 * therefore implied by the diff sets and never stored separately.
 *
 * Lambda lengths are always recomputed from endpoints; the Ptolemy relation
 * is checked on every flip.
 */

#include "farey.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hormonica {

/// Unordered pair of distinct extended rationals, stored as lo < hi.
struct EdgeKey {
  ExtendedRational lo;
  ExtendedRational hi;

  EdgeKey(ExtendedRational a, ExtendedRational b) {
    if (a == b) throw std::invalid_argument("degenerate edge at " + a.str());
    if (b < a) std::swap(a, b);
    lo = std::move(a);
    hi = std::move(b);
  }

  Integer lambda() const { return hormonica::lambda(lo, hi); }
  bool is_farey() const { return lambda() == 1; }
  bool has_endpoint(const ExtendedRational& x) const { return lo == x || hi == x; }
  const ExtendedRational& other(const ExtendedRational& x) const { return lo == x ? hi : lo; }

  std::string str() const { return "{" + lo.str() + ", " + hi.str() + "}"; }

  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

/// Unordered triple of pairwise distinct extended rationals, stored sorted.
struct TriangleKey {
  std::array<ExtendedRational, 3> v;

  TriangleKey(ExtendedRational a, ExtendedRational b, ExtendedRational c) : v{a, b, c} {
    std::sort(v.begin(), v.end());
    if (v[0] == v[1] || v[1] == v[2]) throw std::invalid_argument("degenerate triangle");
  }

  std::array<EdgeKey, 3> edges() const {
    return {EdgeKey(v[1], v[2]), EdgeKey(v[0], v[2]), EdgeKey(v[0], v[1])};
  }

  std::string str() const { return "{" + v[0].str() + ", " + v[1].str() + ", " + v[2].str() + "}"; }

  friend bool operator==(const TriangleKey&, const TriangleKey&) = default;
  friend auto operator<=>(const TriangleKey&, const TriangleKey&) = default;
};

// Pairwise lambdas of a triangle, sorted ascending.
inline std::array<Integer, 3> chord_of(const TriangleKey& t) {
  std::array<Integer, 3> c{lambda(t.v[1], t.v[2]), lambda(t.v[0], t.v[2]), lambda(t.v[0], t.v[1])};
  std::sort(c.begin(), c.end());
  return c;
}

// Two edges cross when their endpoints interleave around the circle.
inline bool edges_cross(const EdgeKey& e, const EdgeKey& f) {
  if (e.has_endpoint(f.lo) || e.has_endpoint(f.hi)) return false;
  return cyclically_between(e.lo, f.lo, e.hi) != cyclically_between(e.lo, f.hi, e.hi);
}

/// The ideal quadrilateral around an edge, vertices in cyclic order
/// (e.lo, left, e.hi, right). Sides a..d run lo-left, left-hi, hi-right,
/// right-lo, so a is opposite c and b is opposite d.
struct Quad {
  std::array<ExtendedRational, 4> vertices;
  std::array<EdgeKey, 4> sides;
};

struct FlipRecord {
  EdgeKey removed;
  EdgeKey inserted;
  std::array<ExtendedRational, 4> quad;
  std::array<Integer, 4> sides;  // a, b, c, d
  Integer e;
  Integer f;
};

struct ViewportEdge {
  EdgeKey edge;
  Integer lambda;
  std::pair<ExtendedRational, ExtendedRational> orientation;  // (tail, head)
  GeodesicArc arc;
};

struct Crossing {
  EdgeKey edge;
  double position = 0;  // horocyclic arc length from the canonical origin
  Integer lambda;
};

class TessellationPatch {
 public:
  bool contains(const EdgeKey& e) const {
    return e.is_farey() ? !removed_.contains(e) : added_.contains(e);
  }

  bool is_face(const TriangleKey& t) const {
    auto es = t.edges();
    return std::all_of(es.begin(), es.end(), [&](const EdgeKey& e) { return contains(e); });
  }

  bool pristine() const { return removed_.empty() && added_.empty(); }

  const std::set<EdgeKey>& removed() const { return removed_; }
  const std::set<EdgeKey>& added() const { return added_; }
  const std::vector<FlipRecord>& history() const { return history_; }

  Quad adjacent_quad(const EdgeKey& e) const {
    if (!contains(e)) throw std::invalid_argument("edge " + e.str() + " is not in the tessellation");
    std::optional<ExtendedRational> left, right;
    for (const auto& z : third_vertex_candidates(e)) {
      if (z == e.lo || z == e.hi) continue;
      if (!contains(EdgeKey(e.lo, z)) || !contains(EdgeKey(e.hi, z))) continue;
      auto& slot = cyclically_between(e.lo, z, e.hi) ? left : right;
      if (slot && *slot != z)
        throw std::logic_error("two faces on one side of " + e.str() + ": not a tessellation");
      slot = z;
    }
    if (!left || !right) throw std::logic_error("edge " + e.str() + " lacks a neighboring face");
    return {{e.lo, *left, e.hi, *right},
            {EdgeKey(e.lo, *left), EdgeKey(*left, e.hi), EdgeKey(e.hi, *right), EdgeKey(*right, e.lo)}};
  }

  // The two faces of the tessellation containing e.
  std::array<TriangleKey, 2> faces_at(const EdgeKey& e) const {
    Quad q = adjacent_quad(e);
    return {TriangleKey(e.lo, e.hi, q.vertices[1]), TriangleKey(e.lo, e.hi, q.vertices[3])};
  }

  FlipRecord flip(const EdgeKey& e) {
    Quad q = adjacent_quad(e);
    EdgeKey f(q.vertices[1], q.vertices[3]);
    FlipRecord rec{e, f, q.vertices,
                   {q.sides[0].lambda(), q.sides[1].lambda(), q.sides[2].lambda(), q.sides[3].lambda()},
                   e.lambda(), f.lambda()};
    if (rec.e * rec.f != rec.sides[0] * rec.sides[2] + rec.sides[1] * rec.sides[3])
      throw std::logic_error("Ptolemy relation violated flipping " + e.str());
    erase_edge(e);
    insert_edge(f);
    history_.push_back(rec);
    return rec;
  }

  // Faces carrying at least one non-Farey edge: the tuned region.
  std::vector<TriangleKey> active_faces() const {
    std::set<TriangleKey> out;
    for (const auto& e : added_)
      for (auto& t : faces_at(e)) out.insert(t);
    return {out.begin(), out.end()};
  }

  friend bool operator==(const TessellationPatch& a, const TessellationPatch& b) {
    return a.removed_ == b.removed_ && a.added_ == b.added_;
  }

 private:
  std::vector<ExtendedRational> third_vertex_candidates(const EdgeKey& e) const {
    std::vector<ExtendedRational> out;
    const auto &x = e.lo, &y = e.hi;
    out.emplace_back(Integer(x.p() + y.p()), Integer(x.q() + y.q()));
    if (x.p() != y.p() || x.q() != y.q())
      out.emplace_back(Integer(x.p() - y.p()), Integer(x.q() - y.q()));
    for (const auto* end : {&x, &y}) {
      auto it = added_adjacency_.find(*end);
      if (it != added_adjacency_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
  }

  void erase_edge(const EdgeKey& e) {
    if (e.is_farey()) {
      removed_.insert(e);
      return;
    }
    added_.erase(e);
    for (const auto& [a, b] : {std::pair{e.lo, e.hi}, std::pair{e.hi, e.lo}}) {
      auto it = added_adjacency_.find(a);
      it->second.erase(b);
      if (it->second.empty()) added_adjacency_.erase(it);
    }
  }

  void insert_edge(const EdgeKey& e) {
    if (e.is_farey()) {
      removed_.erase(e);
      return;
    }
    added_.insert(e);
    added_adjacency_[e.lo].insert(e.hi);
    added_adjacency_[e.hi].insert(e.lo);
  }

  std::set<EdgeKey> removed_;
  std::set<EdgeKey> added_;
  std::map<ExtendedRational, std::set<ExtendedRational>> added_adjacency_;
  std::vector<FlipRecord> history_;
};

inline TessellationPatch new_patch() { return {}; }

inline Quad adjacent_quad(const TessellationPatch& t, const EdgeKey& e) { return t.adjacent_quad(e); }

struct FlipOutcome {
  TessellationPatch patch;
  EdgeKey inserted;
  FlipRecord record;
};

inline FlipOutcome flip(const TessellationPatch& t, const EdgeKey& e) {
  TessellationPatch next = t;
  FlipRecord rec = next.flip(e);
  return {std::move(next), rec.inserted, rec};
}

inline std::array<Integer, 3> triangle_chord(const TessellationPatch& t, const TriangleKey& tri) {
  if (!t.is_face(tri)) throw std::invalid_argument("triangle " + tri.str() + " is not a face");
  return chord_of(tri);
}

// Farey edges whose endpoints both have generation <= G, grown from the base
// edge by mediants.
inline std::vector<EdgeKey> farey_edges_up_to(unsigned G) {
  const ExtendedRational zero(0), inf = ExtendedRational::infinity();
  std::vector<EdgeKey> out{EdgeKey(zero, inf)};
  if (G == 0) return out;
  std::vector<std::pair<ExtendedRational, ExtendedRational>> frontier;
  for (long long sign : {1LL, -1LL}) {
    ExtendedRational m(sign);
    out.emplace_back(zero, m);
    out.emplace_back(m, inf);
    frontier.emplace_back(zero, m);
    frontier.emplace_back(m, inf);
  }
  for (unsigned g = 2; g <= G; ++g) {
    std::vector<std::pair<ExtendedRational, ExtendedRational>> next;
    for (const auto& [x, y] : frontier) {
      ExtendedRational m = mediant(x, y);
      out.emplace_back(x, m);
      out.emplace_back(m, y);
      next.emplace_back(x, m);
      next.emplace_back(m, y);
    }
    frontier = std::move(next);
  }
  return out;
}

inline std::vector<ViewportEdge> edges_in_viewport(const TessellationPatch& t, unsigned G) {
  std::set<EdgeKey> keys;
  for (auto& e : farey_edges_up_to(G))
    if (!t.removed().contains(e)) keys.insert(e);
  const Integer bound(G);
  for (const auto& e : t.added())
    if (generation(e.lo) <= bound && generation(e.hi) <= bound) keys.insert(e);
  std::vector<ViewportEdge> out;
  out.reserve(keys.size());
  for (const auto& e : keys) out.push_back({e, e.lambda(), orient_edge(e.lo, e.hi), geodesic_arc(e.lo, e.hi)});
  return out;
}

// Faces all of whose vertices have generation <= G.
inline std::vector<TriangleKey> faces_in_viewport(const TessellationPatch& t, unsigned G) {
  std::set<TriangleKey> out;
  const Integer bound(G);
  for (const auto& ve : edges_in_viewport(t, G))
    for (auto& f : t.faces_at(ve.edge)) {
      bool inside = std::all_of(f.v.begin(), f.v.end(), [&](const auto& x) { return generation(x) <= bound; });
      if (inside) out.insert(f);
    }
  return {out.begin(), out.end()};
}

namespace detail {

inline bool in_window(double pos, double window) { return pos >= -1e-12 && pos <= window + 1e-12; }

// Crossings of the height-1 line with a non-vertical edge whose feet sit at
// mu, mv in normalized coordinates. Tangency counts once.
inline void semicircle_crossings(const Rational& mu, const Rational& mv, const EdgeKey& e, const Integer& lam,
                                 double window, std::vector<Crossing>& out) {
  Rational width = mu > mv ? Rational(mu - mv) : Rational(mv - mu);
  if (width < 2) return;
  double mid = to_double(Rational((mu + mv) / 2));
  if (width == 2) {
    if (in_window(mid, window)) out.push_back({e, mid, lam});
    return;
  }
  double r = to_double(width) / 2.0;
  double half = std::sqrt(r * r - 1.0);
  for (double pos : {mid - half, mid + half})
    if (in_window(pos, window)) out.push_back({e, pos, lam});
}

inline Rational as_rational(const ExtendedRational& x) { return {x.p(), x.q()}; }

}  // namespace detail

/**
 * Crossings of the Farey horocycle at `center` with the edges of t, by arc
 * length in [0, window]. The normalizing modular map sends the center to
 * infinity (horocycle at height 1) and its oldest Farey neighbor to 0, so the
 * origin is the foot of the edge from the center to that neighbor. Edges at
 * the center become verticals; another edge {u, v} crosses iff its image
 * semicircle has radius >= 1.
 */
inline std::vector<Crossing> horocycle_crossings(const TessellationPatch& t, const ExtendedRational& center,
                                                 double window) {
  if (!(window > 0)) throw std::invalid_argument("arpeggio window must be positive");
  MoebiusMap to_inf = normalizing_map(center);
  MoebiusMap back = to_inf.inverse();
  std::vector<Crossing> out;
  auto last = static_cast<long long>(std::floor(window + 1e-12));
  for (long long k = 0; k <= last; ++k) {
    EdgeKey e(center, back(ExtendedRational(k)));
    if (t.contains(e)) out.push_back({e, static_cast<double>(k), Integer(1)});
  }
  for (const auto& e : t.added()) {
    Integer lam = e.lambda();
    if (e.has_endpoint(center)) {
      double pos = to_double(detail::as_rational(to_inf(e.other(center))));
      if (detail::in_window(pos, window)) out.push_back({e, pos, lam});
      continue;
    }
    detail::semicircle_crossings(detail::as_rational(to_inf(e.lo)), detail::as_rational(to_inf(e.hi)), e, lam,
                                 window, out);
  }
  std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
    return a.position != b.position ? a.position < b.position : a.edge < b.edge;
  });
  return out;
}

// The edges U^k(e*) = {0/1, 1/k}, k = 1..n, whose serial flips build the
// hyperfan at infinity.
inline std::vector<EdgeKey> hyperfan_flips(unsigned n) {
  std::vector<EdgeKey> out;
  MoebiusMap power;
  for (unsigned k = 1; k <= n; ++k) {
    power = power * MoebiusMap::U();
    out.emplace_back(power(ExtendedRational(0)), power(ExtendedRational::infinity()));
  }
  return out;
}

}  // namespace hormonica
