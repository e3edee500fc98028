#pragma once

/**
 * @file surface.hpp
 * @brief Finite-index torsion-free subgroups of the modular group, given by
 *        their coset tables, and the ideal triangulations of the punctured
 *        surfaces they uniformize.
 *
 * Conventions:
 * - Cosets are right cosets; S and T act on the right, so the composite
 *   "S then T" sends coset i to T[S[i]].
 * - Coset 0 is the identity coset. The coset of g labels the oriented Farey
 *   edge g(0 -> oo); precomposing with S reverses it.
 * - A triangle's slots are listed counterclockwise; slot k runs from corner
 *   k to corner k+1. The Farey triangle {0, oo, -1} has slots
 *   g(0 -> oo), g(oo -> -1), g(-1 -> 0), which carry the cosets of g, g(ST)^2
 *   and gST.
 */

#include "farey.hpp"
#include "tessellation.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hormonica {

using Permutation = std::vector<std::size_t>;

inline std::vector<std::vector<std::size_t>> cycles(const Permutation& perm) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    auto& cyc = out.emplace_back();
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      cyc.push_back(j);
    }
  }
  return out;
}

struct CosetTable {
  Permutation S;
  Permutation T;

  std::size_t index() const { return S.size(); }

  // i -> i.S.T
  Permutation ST() const {
    Permutation out(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) out[i] = T[S[i]];
    return out;
  }

  void validate() const {
    const std::size_t n = S.size();
    if (n == 0 || T.size() != n) throw std::invalid_argument("coset table: S and T must be non-empty and equal length");
    for (const auto* perm : {&S, &T}) {
      std::vector<bool> hit(n, false);
      for (auto x : *perm) {
        if (x >= n || hit[x]) throw std::invalid_argument("coset table: S and T must be permutations");
        hit[x] = true;
      }
    }
    Permutation st = ST();
    for (std::size_t i = 0; i < n; ++i) {
      if (S[S[i]] != i) throw std::invalid_argument("coset table: S^2 != 1");
      if (st[st[st[i]]] != i) throw std::invalid_argument("coset table: (ST)^3 != 1");
      if (S[i] == i) throw std::invalid_argument("coset table: S has a fixed point (torsion)");
      if (st[i] == i) throw std::invalid_argument("coset table: ST has a fixed point (torsion)");
    }
    std::vector<bool> reached(n, false);
    std::deque<std::size_t> queue{0};
    reached[0] = true;
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j : {S[i], T[i]})
        if (!reached[j]) {
          reached[j] = true;
          queue.push_back(j);
        }
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end())
      throw std::invalid_argument("coset table: action is not transitive");
  }
};

inline CosetTable make_coset_table(Permutation S, Permutation T) {
  CosetTable t{std::move(S), std::move(T)};
  t.validate();
  return t;
}

inline const std::vector<std::string>& builtin_group_names() {
  static const std::vector<std::string> names{"gamma2", "commutator", "gamma3"};
  return names;
}

// Right regular representations of PSL(2, Z/2), Z/6 and PSL(2, Z/3).
inline CosetTable builtin_group(std::string_view name) {
  if (name == "gamma2") return make_coset_table({1, 0, 4, 5, 2, 3}, {2, 3, 0, 1, 5, 4});
  if (name == "commutator") return make_coset_table({1, 0, 3, 2, 5, 4}, {2, 3, 4, 5, 1, 0});
  if (name == "gamma3")
    return make_coset_table({1, 0, 4, 6, 2, 9, 3, 8, 7, 5, 11, 10}, {2, 3, 5, 7, 8, 0, 9, 1, 10, 11, 4, 6});
  throw std::invalid_argument("unknown group '" + std::string(name) + "'");
}

struct SurfaceType {
  unsigned genus = 0;
  unsigned punctures = 0;

  std::size_t edges() const { return 6 * genus - 6 + 3 * punctures; }
  std::size_t triangles() const { return 4 * genus - 4 + 2 * punctures; }

  friend bool operator==(const SurfaceType&, const SurfaceType&) = default;
};

// Euler characteristic n/6 of the quotient gives g once s is known.
inline SurfaceType surface_from_counts(std::size_t index, std::size_t punctures) {
  if (index % 6 != 0) throw std::invalid_argument("index of a torsion-free subgroup must be divisible by 6");
  long long twice_genus = 2 - static_cast<long long>(punctures) + static_cast<long long>(index / 6);
  if (twice_genus < 0 || twice_genus % 2 != 0) throw std::invalid_argument("coset table gives a non-integral genus");
  SurfaceType st{static_cast<unsigned>(twice_genus / 2), static_cast<unsigned>(punctures)};
  if (2 * static_cast<long long>(st.genus) - 2 + st.punctures <= 0)
    throw std::invalid_argument("surface must have negative Euler characteristic");
  return st;
}

inline SurfaceType classify(const CosetTable& tbl) {
  tbl.validate();
  return surface_from_counts(tbl.index(), cycles(tbl.T).size());
}

struct Slot {
  std::size_t triangle = 0;
  unsigned index = 0;

  friend bool operator==(const Slot&, const Slot&) = default;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

inline unsigned next_slot(unsigned k, unsigned step = 1) { return (k + step) % 3; }

class QuotientTriangulation {
 public:
  QuotientTriangulation() = default;

  QuotientTriangulation(std::vector<Integer> lambdas, std::vector<std::array<std::size_t, 3>> edge_of)
      : lambdas_(std::move(lambdas)), edge_of_(std::move(edge_of)) {
    rebuild_slots();
  }

  std::size_t edge_count() const { return lambdas_.size(); }
  std::size_t triangle_count() const { return edge_of_.size(); }

  const Integer& lambda(std::size_t edge) const { return lambdas_.at(edge); }
  const std::vector<Integer>& lambdas() const { return lambdas_; }
  std::size_t edge_at(Slot s) const { return edge_of_.at(s.triangle)[s.index]; }
  const std::array<std::size_t, 3>& triangle(std::size_t t) const { return edge_of_.at(t); }
  const std::array<Slot, 2>& slots_of(std::size_t edge) const { return slots_.at(edge); }
  const std::vector<std::size_t>& history() const { return history_; }

  Slot across(Slot s) const {
    const auto& [first, second] = slots_of(edge_at(s));
    return s == first ? second : first;
  }

  bool self_folded(std::size_t edge) const {
    const auto& sl = slots_of(edge);
    return sl[0].triangle == sl[1].triangle;
  }

  std::array<Integer, 3> chord(std::size_t t) const {
    const auto& tri = triangle(t);
    std::array<Integer, 3> c{lambdas_[tri[0]], lambdas_[tri[1]], lambdas_[tri[2]]};
    std::sort(c.begin(), c.end());
    return c;
  }

  // Corners glued across slots, counted with union-find.
  std::size_t cusp_count() const {
    std::vector<std::size_t> parent(3 * triangle_count());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto corner = [](Slot s, unsigned step) { return 3 * s.triangle + next_slot(s.index, step); };
    for (std::size_t t = 0; t < triangle_count(); ++t)
      for (unsigned k = 0; k < 3; ++k) {
        Slot here{t, k}, there = across(here);
        parent[find(corner(here, 0))] = find(corner(there, 1));
        parent[find(corner(here, 1))] = find(corner(there, 0));
      }
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < parent.size(); ++i) roots.insert(find(i));
    return roots.size();
  }

  SurfaceType topology() const { return surface_from_counts(2 * edge_count(), cusp_count()); }

  /**
   * Flip edge E. With E at slots (t1, k1) < (t2, k2), t1 = (E, alpha, beta)
   * and t2 = (E, gamma, delta) counterclockwise; the quadrilateral has sides
   * alpha, beta, gamma, delta in order and the new diagonal F gets
   * (alpha*gamma + beta*delta) / E. Afterwards t1 = (F, beta, gamma) and
   * t2 = (F, delta, alpha), with F kept at k1 and k2. Returns lambda(F).
   */
  const Integer& flip(std::size_t edge) {
    if (edge >= edge_count()) throw std::invalid_argument("no edge with id " + std::to_string(edge));
    if (self_folded(edge))
      throw std::invalid_argument("edge " + std::to_string(edge) + " is self-folded and cannot be flipped");
    auto [s1, s2] = slots_of(edge);
    auto& t1 = edge_of_[s1.triangle];
    auto& t2 = edge_of_[s2.triangle];
    std::size_t alpha = t1[next_slot(s1.index)], beta = t1[next_slot(s1.index, 2)];
    std::size_t gamma = t2[next_slot(s2.index)], delta = t2[next_slot(s2.index, 2)];
    Integer num = lambdas_[alpha] * lambdas_[gamma] + lambdas_[beta] * lambdas_[delta];
    if (num % lambdas_[edge] != 0)
      throw std::logic_error("inexact Ptolemy division flipping edge " + std::to_string(edge));
    lambdas_[edge] = num / lambdas_[edge];
    t1[next_slot(s1.index)] = beta;
    t1[next_slot(s1.index, 2)] = gamma;
    t2[next_slot(s2.index)] = delta;
    t2[next_slot(s2.index, 2)] = alpha;
    rebuild_slots();
    history_.push_back(edge);
    return lambdas_[edge];
  }

  // Triangles as cyclic edge sequences, each rotated to start at its smallest
  // id, sorted. Together with the lambdas this determines the triangulation.
  std::vector<std::array<std::size_t, 3>> canonical_triangles() const {
    std::vector<std::array<std::size_t, 3>> out;
    for (const auto& tri : edge_of_) {
      auto m = std::min_element(tri.begin(), tri.end()) - tri.begin();
      out.push_back({tri[m], tri[(m + 1) % 3], tri[(m + 2) % 3]});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const QuotientTriangulation& a, const QuotientTriangulation& b) {
    return a.lambdas_ == b.lambdas_ && a.canonical_triangles() == b.canonical_triangles();
  }

 private:
  void rebuild_slots() {
    std::vector<std::vector<Slot>> found(lambdas_.size());
    for (std::size_t t = 0; t < edge_of_.size(); ++t)
      for (unsigned k = 0; k < 3; ++k) {
        std::size_t e = edge_of_[t][k];
        if (e >= lambdas_.size()) throw std::invalid_argument("triangle refers to unknown edge");
        found[e].push_back({t, k});
      }
    slots_.assign(lambdas_.size(), {});
    for (std::size_t e = 0; e < found.size(); ++e) {
      if (found[e].size() != 2) throw std::invalid_argument("every edge must bound exactly two triangle slots");
      slots_[e] = {found[e][0], found[e][1]};
    }
  }

  std::vector<Integer> lambdas_;
  std::vector<std::array<std::size_t, 3>> edge_of_;
  std::vector<std::array<Slot, 2>> slots_;
  std::vector<std::size_t> history_;
};

/// Where each coset sits in the quotient triangulation built from a table.
struct CosetLayout {
  std::vector<Slot> slot_of_coset;
  std::vector<std::size_t> edge_of_coset;
};

inline CosetLayout coset_layout(const CosetTable& tbl) {
  tbl.validate();
  const std::size_t n = tbl.index();
  Permutation st = tbl.ST();
  CosetLayout lay{std::vector<Slot>(n), std::vector<std::size_t>(n)};
  std::vector<bool> placed(n, false);
  std::size_t tri = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (placed[i]) continue;
    // Counterclockwise successor of coset c is c.(ST)^2.
    std::size_t c = i;
    for (unsigned k = 0; k < 3; ++k) {
      lay.slot_of_coset[c] = {tri, k};
      placed[c] = true;
      c = st[st[c]];
    }
    ++tri;
  }
  std::size_t edge = 0;
  std::vector<bool> named(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (named[i]) continue;
    lay.edge_of_coset[i] = lay.edge_of_coset[tbl.S[i]] = edge++;
    named[i] = named[tbl.S[i]] = true;
  }
  return lay;
}

// Oriented edges are cosets, edges are S-orbits, triangles are ST-orbits.
// Every lambda starts at 1.
inline QuotientTriangulation quotient_triangulation(const CosetTable& tbl) {
  CosetLayout lay = coset_layout(tbl);
  const std::size_t n = tbl.index();
  std::vector<std::array<std::size_t, 3>> tris(n / 3);
  for (std::size_t c = 0; c < n; ++c) tris[lay.slot_of_coset[c].triangle][lay.slot_of_coset[c].index] = lay.edge_of_coset[c];
  return {std::vector<Integer>(n / 2, Integer(1)), std::move(tris)};
}

inline QuotientTriangulation equivariant_flip(const QuotientTriangulation& q, std::size_t edge) {
  QuotientTriangulation next = q;
  next.flip(edge);
  return next;
}

struct ScriptError : std::invalid_argument {
  std::size_t step;
  ScriptError(std::size_t at, const std::string& what)
      : std::invalid_argument("step " + std::to_string(at) + ": " + what), step(at) {}
};

struct ScriptResult {
  QuotientTriangulation state;
  std::vector<Integer> trace;
};

// Apply `edges` `repeats` times; the trace lists each new lambda.
inline ScriptResult flip_script(const QuotientTriangulation& q, const std::vector<std::size_t>& edges,
                                unsigned repeats) {
  ScriptResult out{q, {}};
  std::size_t step = 0;
  for (unsigned r = 0; r < repeats; ++r)
    for (std::size_t e : edges) {
      try {
        out.trace.push_back(out.state.flip(e));
      } catch (const std::exception& ex) {
        throw ScriptError(step, ex.what());
      }
      ++step;
    }
  return out;
}

struct LiftedTriangle {
  std::array<ExtendedRational, 3> corners;  // counterclockwise, aligned with quotient slots
  std::size_t quotient_triangle = 0;

  EdgeKey side(unsigned k) const { return {corners[k], corners[next_slot(k)]}; }
};

struct LiftedEdge {
  EdgeKey edge;
  std::size_t quotient_edge = 0;
  Integer lambda;  // by endpoint determinant
};

/// A finite piece of the Gamma-invariant tessellation of the disk, each
/// triangle labelled by the quotient triangle it covers.
struct LiftedPatch {
  std::vector<LiftedTriangle> triangles;
  unsigned radius = 0;

  std::vector<LiftedEdge> edges(const QuotientTriangulation& q) const {
    std::map<EdgeKey, std::size_t> seen;
    for (const auto& lt : triangles)
      for (unsigned k = 0; k < 3; ++k) seen.emplace(lt.side(k), q.edge_at({lt.quotient_triangle, k}));
    std::vector<LiftedEdge> out;
    for (const auto& [e, id] : seen) out.push_back({e, id, e.lambda()});
    return out;
  }
};

namespace detail {

struct LiftCell {
  MoebiusMap g;  // g(0 -> oo) is the slot carrying coset `coset`
  std::size_t coset;
};

inline LiftedTriangle lift_triangle(const LiftCell& cell, const CosetLayout& lay) {
  Slot s = lay.slot_of_coset[cell.coset];
  LiftedTriangle lt;
  lt.quotient_triangle = s.triangle;
  lt.corners[s.index] = cell.g(ExtendedRational(0));
  lt.corners[next_slot(s.index)] = cell.g(ExtendedRational::infinity());
  lt.corners[next_slot(s.index, 2)] = cell.g(ExtendedRational(-1));
  return lt;
}

inline Integer det(const ExtendedRational& a, const ExtendedRational& b) { return a.p() * b.q() - a.q() * b.p(); }

// The vertex X across the lifted edge AB from C, with lambda(A, X) = ax and
// lambda(X, B) = xb. Primitive vectors satisfy det(A,B) X = det(X,B) A + det(A,X) B,
// and X sits on the arc of the boundary away from C.
inline ExtendedRational apex(const ExtendedRational& A, const ExtendedRational& B, const ExtendedRational& C,
                             const Integer& ax, const Integer& xb) {
  int sigma = (det(C, B) * det(A, C) > 0) ? 1 : -1;
  ExtendedRational X(Integer(xb * A.p() - sigma * ax * B.p()), Integer(xb * A.q() - sigma * ax * B.q()));
  if (lambda(A, X) != ax || lambda(X, B) != xb) throw std::logic_error("lifted apex does not match quotient lambdas");
  return X;
}

// Flip every lifted copy of `edge`. A copy whose neighbor lies outside the
// patch gets the missing apex from the lambda lengths instead.
inline void flip_lift(std::vector<LiftedTriangle>& tris, const QuotientTriangulation& before, std::size_t edge) {
  auto [s1, s2] = before.slots_of(edge);
  const auto& t1 = before.triangle(s1.triangle);
  const auto& t2 = before.triangle(s2.triangle);
  const Integer& alpha = before.lambda(t1[next_slot(s1.index)]);
  const Integer& beta = before.lambda(t1[next_slot(s1.index, 2)]);
  const Integer& gamma = before.lambda(t2[next_slot(s2.index)]);
  const Integer& delta = before.lambda(t2[next_slot(s2.index, 2)]);

  std::map<EdgeKey, std::size_t> partner;  // copy of edge -> index of its t2 triangle
  for (std::size_t i = 0; i < tris.size(); ++i)
    if (tris[i].quotient_triangle == s2.triangle) partner.emplace(tris[i].side(s2.index), i);
  std::set<std::size_t> matched;
  auto flip1 = [&](LiftedTriangle& L1, const ExtendedRational& R2) {
    ExtendedRational P = L1.corners[s1.index], R1 = L1.corners[next_slot(s1.index, 2)];
    L1.corners[s1.index] = R2;
    L1.corners[next_slot(s1.index)] = R1;
    L1.corners[next_slot(s1.index, 2)] = P;
  };
  auto flip2 = [&](LiftedTriangle& L2, const ExtendedRational& R1) {
    ExtendedRational Q = L2.corners[s2.index], R2 = L2.corners[next_slot(s2.index, 2)];
    L2.corners[s2.index] = R1;
    L2.corners[next_slot(s2.index)] = R2;
    L2.corners[next_slot(s2.index, 2)] = Q;
  };
  std::vector<std::pair<std::size_t, ExtendedRational>> pending1, pending2;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (tris[i].quotient_triangle != s1.triangle) continue;
    const LiftedTriangle& L1 = tris[i];
    const ExtendedRational &P = L1.corners[s1.index], &Q = L1.corners[next_slot(s1.index)];
    const ExtendedRational& R1 = L1.corners[next_slot(s1.index, 2)];
    auto it = partner.find(L1.side(s1.index));
    if (it == partner.end()) {
      pending1.emplace_back(i, apex(P, Q, R1, gamma, delta));
      continue;
    }
    const LiftedTriangle& L2 = tris[it->second];
    if (L2.corners[s2.index] != Q || L2.corners[next_slot(s2.index)] != P)
      throw std::logic_error("lifted gluing disagrees with the quotient");
    matched.insert(it->second);
    pending1.emplace_back(i, L2.corners[next_slot(s2.index, 2)]);
    pending2.emplace_back(it->second, R1);
  }
  for (const auto& [e, j] : partner) {
    if (matched.contains(j)) continue;
    const LiftedTriangle& L2 = tris[j];
    const ExtendedRational &Q = L2.corners[s2.index], &P = L2.corners[next_slot(s2.index)];
    pending2.emplace_back(j, apex(Q, P, L2.corners[next_slot(s2.index, 2)], alpha, beta));
  }
  for (const auto& [i, x] : pending1) flip1(tris[i], x);
  for (const auto& [j, x] : pending2) flip2(tris[j], x);
}

}  // namespace detail

/**
 * Lift the flip history of q into the disk. A Farey patch of combinatorial
 * radius depth + 2 around the triangle {-1, 0, oo} is labelled by cosets,
 * then every recorded flip is applied to all of its lifted copies. The patch
 * keeps its size: each lifted triangle follows its deck translate.
 */
inline LiftedPatch develop(const QuotientTriangulation& q, const CosetTable& tbl, unsigned depth) {
  if (depth < 1) throw std::invalid_argument("develop depth must be >= 1");
  constexpr unsigned collar = 2;
  CosetLayout lay = coset_layout(tbl);
  Permutation st = tbl.ST();
  MoebiusMap S = MoebiusMap::S(), ST = MoebiusMap::S() * MoebiusMap::T();

  LiftedPatch patch;
  patch.radius = depth;
  std::set<TriangleKey> seen;
  std::vector<detail::LiftCell> frontier{{MoebiusMap(), 0}};
  for (unsigned layer = 0; layer <= depth + collar && !frontier.empty(); ++layer) {
    std::vector<detail::LiftCell> next;
    for (const auto& cell : frontier) {
      LiftedTriangle lt = detail::lift_triangle(cell, lay);
      if (!seen.insert(TriangleKey(lt.corners[0], lt.corners[1], lt.corners[2])).second) continue;
      patch.triangles.push_back(lt);
      // The three oriented sides of this triangle, crossed via S.
      detail::LiftCell side = cell;
      for (unsigned k = 0; k < 3; ++k) {
        next.push_back({side.g * S, tbl.S[side.coset]});
        side = {side.g * ST * ST, st[st[side.coset]]};
      }
    }
    frontier = std::move(next);
  }

  QuotientTriangulation replay = quotient_triangulation(tbl);
  for (std::size_t e : q.history()) {
    detail::flip_lift(patch.triangles, replay, e);
    replay.flip(e);
  }
  if (!(replay == q)) throw std::invalid_argument("triangulation history does not replay from this coset table");
  return patch;
}

// Every lifted side's determinant lambda equals its quotient lambda, and
// lifted neighbors are glued as in the quotient.
inline bool lift_consistent(const LiftedPatch& patch, const QuotientTriangulation& q) {
  std::map<EdgeKey, std::vector<Slot>> sides;
  for (const auto& lt : patch.triangles)
    for (unsigned k = 0; k < 3; ++k) {
      EdgeKey e = lt.side(k);
      if (e.lambda() != q.lambda(q.edge_at({lt.quotient_triangle, k}))) return false;
      sides[e].push_back({lt.quotient_triangle, k});
    }
  for (const auto& [e, sl] : sides) {
    if (sl.size() > 2) return false;
    if (sl.size() == 2 && q.across(sl[0]) != sl[1]) return false;
  }
  return true;
}

}  // namespace hormonica
