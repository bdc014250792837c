#pragma once
// Vertex lattices of the Bruhat-Tits building of Sp(4) (and its unramified
// quadratic variant), with type classification, link enumeration and
// incidence.
//
// Vertex types are the literal index patterns on lattices:
//   type 0 : L = L^vee
//   type 1 : p L^vee c^2 L c^2 L^vee
//   type 2 : L = p L^vee
// Each vertex of the building has exactly one lattice representative, among
// all p-power rescalings, satisfying its pattern; classification therefore
// doubles as the canonical-representative test.
//
// Neighbor enumeration goes through residue-space subspace lifts: candidates
// are preimages of subfield-rational subspaces of L/pL and p^{-1}L/L, so
// completeness is finite linear algebra, not search.

#include "stratalab/dl.hpp"
#include "stratalab/lattice.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace stratalab {

struct VertexLattice {
  Lattice lat;
  int vtype = -1;
};

inline std::optional<int> classify_vertex(const Lattice& L) {
  Lattice D = L.dual();
  if (L == D) return 0;
  if (L == D.scaled(1)) return 2;
  Lattice pD = D.scaled(1);
  if (L.contains(pD) && D.contains(L) && colength(pD, L) == 2 && colength(L, D) == 2)
    return 1;
  return std::nullopt;
}

inline VertexLattice make_vertex(const Lattice& L) {
  auto t = classify_vertex(L);
  if (!t) throw std::invalid_argument("make_vertex: not a vertex lattice");
  return VertexLattice{L, *t};
}

// The building over the subring fixed by sigma^stab_twist: its vertex
// lattices have sigma^t-stable canonical bases and its residue geometry is
// rational over the subfield of F_{p^d} fixed by the t-fold Frobenius.
struct Building {
  const SympSpace* sp = nullptr;
  int stab_twist = 1;
  FqField F;

  Building(const SympSpace& s, int twist) : sp(&s), stab_twist(twist), F(*s.ctx) {}
};

namespace detail {

// candidate lattices pL_hi + <lifts of W> for every dim-k subfield subspace
// W of the residue module L_hi / p L_hi
template <typename Fn>
void window_candidates(const Building& bld, const Lattice& Lhi, Fn&& emit) {
  const RingCtx& R = *bld.sp->ctx;
  const Mat& B = Lhi.basis();
  int n = bld.sp->n;
  for (int k = 1; k <= 3; ++k) {
    enumerate_subspaces(bld.F, k, bld.stab_twist, [&](const FqSubspace& W) {
      Mat gens(R, n, n + k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gens(i, j) = B(i, j).mul_p(1);
      for (int c = 0; c < k; ++c)
        for (int i = 0; i < n; ++i) {
          RingElem s = RingElem::zero(R);
          for (int j = 0; j < n; ++j) {
            if (W.rows[c][j] == 0) continue;
            s += bld.F.lift(R, W.rows[c][j]) * B(i, j);
          }
          gens(i, n + c) = s;
        }
      emit(Lattice(*bld.sp, gens, Lhi.scale()));
    });
  }
}

}  // namespace detail

// all vertex lattices incident to v, bucketed by type
inline std::map<int, std::vector<VertexLattice>> all_neighbors(const Building& bld,
                                                               const VertexLattice& v) {
  if (!v.lat.is_galois_stable(bld.stab_twist))
    throw std::invalid_argument("neighbors: vertex not rational for this building");
  std::map<int, std::vector<VertexLattice>> out;
  std::set<std::string> seen;
  auto consider = [&](const Lattice& cand) {
    if (cand == v.lat) return;
    auto t = classify_vertex(cand);
    if (!t || *t == v.vtype) return;
    std::string key = cand.key();
    if (!seen.insert(key).second) return;
    out[*t].push_back(VertexLattice{cand, *t});
  };
  // sublattices of L and of p^{-1}L: both one-step windows of the link
  detail::window_candidates(bld, v.lat, consider);
  detail::window_candidates(bld, v.lat.scaled(-1), consider);
  for (auto& [t, vec] : out)
    std::sort(vec.begin(), vec.end(),
              [](const VertexLattice& a, const VertexLattice& b) {
                return a.lat.key() < b.lat.key();
              });
  return out;
}

inline std::vector<VertexLattice> neighbors(const Building& bld, const VertexLattice& v,
                                            int target) {
  if (target == v.vtype || target < 0 || target > 2)
    throw std::invalid_argument("neighbors: unsupported (vtype, target) combination");
  auto all = all_neighbors(bld, v);
  return all.count(target) ? all[target] : std::vector<VertexLattice>{};
}

// u, v incident iff after a p-power rescale one contains the other inside
// one alcove step: p v' c u c v'
inline bool incident(const VertexLattice& u, const VertexLattice& v) {
  if (u.vtype == v.vtype) return u.lat == v.lat;
  for (int k = -3; k <= 3; ++k) {
    Lattice vk = v.lat.scaled(k);
    bool up, down;
    try {
      up = vk.contains(u.lat) && u.lat.contains(vk.scaled(1));
      down = u.lat.contains(vk) && vk.contains(u.lat.scaled(1));
    } catch (const precision_error&) {
      continue;
    }
    if (up || down) return true;
  }
  return false;
}

struct BuildingGraph {
  std::vector<VertexLattice> nodes;                 // sorted by canonical key
  std::vector<std::pair<int, int>> edges;           // index pairs, i < j
  std::map<std::string, int> index;                 // canonical key -> node

  long long count_type(int t) const {
    long long c = 0;
    for (const auto& n : nodes)
      if (n.vtype == t) ++c;
    return c;
  }
};

// nodes reachable from base within `radius` incidence steps, deduplicated by
// canonical form; breadth first by default, depth first for the
// order-independence cross-check
inline BuildingGraph enumerate_ball(const Building& bld, const VertexLattice& base,
                                    int radius, bool depth_first = false) {
  if (radius > 2) throw std::invalid_argument("enumerate_ball: radius > 2");
  std::map<std::string, VertexLattice> found;
  std::map<std::string, int> dist;
  std::vector<std::string> frontier;
  std::string bk = base.lat.key();
  found.emplace(bk, base);
  dist[bk] = 0;
  frontier.push_back(bk);
  while (!frontier.empty()) {
    std::string cur;
    if (depth_first) {
      cur = frontier.back();
      frontier.pop_back();
    } else {
      cur = frontier.front();
      frontier.erase(frontier.begin());
    }
    int dcur = dist[cur];
    if (dcur >= radius) continue;
    auto nb = all_neighbors(bld, found.at(cur));
    for (auto& [t, vec] : nb)
      for (auto& w : vec) {
        std::string k = w.lat.key();
        if (!found.count(k)) {
          found.emplace(k, w);
          dist[k] = dcur + 1;
          frontier.push_back(k);
        }
      }
  }
  BuildingGraph g;
  for (auto& [k, v] : found) {
    g.index[k] = int(g.nodes.size());
    g.nodes.push_back(v);
  }
  for (size_t i = 0; i < g.nodes.size(); ++i)
    for (size_t j = i + 1; j < g.nodes.size(); ++j)
      if (incident(g.nodes[i], g.nodes[j])) g.edges.emplace_back(int(i), int(j));
  return g;
}

// validity of a type-{0,2} pair: L2 is the Pi-image of L0
inline bool pair_check(const VertexLattice& L0, const VertexLattice& L2,
                       const SemilinearOp& Pi) {
  if (L0.vtype != 0 || L2.vtype != 2)
    throw std::invalid_argument("pair_check: types must be (0, 2)");
  return apply_semilinear(Pi, L0.lat) == L2.lat;
}

// the standard block-antidiagonal Pi with Pi . sigma(Pi) = p
inline SemilinearOp standard_pi(const SympSpace& sp, int twist) {
  const RingCtx& R = *sp.ctx;
  int n = sp.n, h = n / 2;
  Mat m(R, n, n);
  for (int i = 0; i < h; ++i) {
    m(i, h + i) = RingElem::one(R);
    m(h + i, i) = RingElem::one(R).mul_p(1);
  }
  return SemilinearOp(sp, std::move(m), twist);
}

}  // namespace stratalab
