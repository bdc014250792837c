#pragma once
// Finite symplectic geometry over F_q: subspaces of F_q^4 in reduced row
// canonical form, the Deligne-Lusztig sets Y+- with their three-stratum
// decomposition, the explicit hypersurface, and component enumeration.

#include "stratalab/fq.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stratalab {

using FqVec = std::array<int, 4>;

// subspace of F_q^4, rows in reduced row echelon form
struct FqSubspace {
  int dim = 0;
  std::array<FqVec, 4> rows{};

  friend bool operator==(const FqSubspace& a, const FqSubspace& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i)
      if (a.rows[i] != b.rows[i]) return false;
    return true;
  }
  friend bool operator!=(const FqSubspace& a, const FqSubspace& b) { return !(a == b); }
  friend bool operator<(const FqSubspace& a, const FqSubspace& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    for (int i = 0; i < a.dim; ++i)
      if (a.rows[i] != b.rows[i]) return a.rows[i] < b.rows[i];
    return false;
  }

  std::string to_string() const {
    std::string s = "{";
    for (int i = 0; i < dim; ++i) {
      if (i) s += ";";
      for (int j = 0; j < 4; ++j) {
        if (j) s += ",";
        s += std::to_string(rows[i][j]);
      }
    }
    return s + "}";
  }
};

inline FqSubspace rref(const FqField& F, std::vector<FqVec> gens) {
  int nr = int(gens.size());
  int row = 0;
  for (int col = 0; col < 4 && row < nr; ++col) {
    int pivot = -1;
    for (int i = row; i < nr; ++i)
      if (gens[i][col] != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    std::swap(gens[row], gens[pivot]);
    int inv = F.inv(gens[row][col]);
    for (int j = 0; j < 4; ++j) gens[row][j] = F.mul(gens[row][j], inv);
    for (int i = 0; i < nr; ++i) {
      if (i == row || gens[i][col] == 0) continue;
      int c = gens[i][col];
      for (int j = 0; j < 4; ++j)
        gens[i][j] = F.sub(gens[i][j], F.mul(c, gens[row][j]));
    }
    ++row;
  }
  FqSubspace out;
  out.dim = row;
  for (int i = 0; i < row; ++i) out.rows[i] = gens[i];
  return out;
}

struct FqSpace4 {
  const FqField* F = nullptr;
  std::array<FqVec, 4> gram{};  // entries as field indices

  static FqSpace4 standard(const FqField& F) {
    FqSpace4 sp;
    sp.F = &F;
    for (auto& r : sp.gram) r = {0, 0, 0, 0};
    sp.gram[0][3] = 1;
    sp.gram[1][2] = 1;
    sp.gram[2][1] = F.neg(1);
    sp.gram[3][0] = F.neg(1);
    return sp;
  }
  static FqSpace4 from_gram(const FqField& F, const std::array<FqVec, 4>& g) {
    FqSpace4 sp;
    sp.F = &F;
    sp.gram = g;
    return sp;
  }

  int pair(const FqVec& x, const FqVec& y) const {
    int r = 0;
    for (int i = 0; i < 4; ++i) {
      if (x[i] == 0) continue;
      for (int j = 0; j < 4; ++j)
        if (gram[i][j] != 0) r = F->add(r, F->mul(x[i], F->mul(gram[i][j], y[j])));
    }
    return r;
  }
};

inline bool member(const FqField& F, const FqSubspace& U, FqVec x) {
  for (int i = 0; i < U.dim; ++i) {
    int pc = -1;
    for (int j = 0; j < 4; ++j)
      if (U.rows[i][j] != 0) { pc = j; break; }
    if (x[pc] != 0) {
      int c = x[pc];
      for (int j = 0; j < 4; ++j) x[j] = F.sub(x[j], F.mul(c, U.rows[i][j]));
    }
  }
  return x == FqVec{0, 0, 0, 0};
}

inline bool subspace_leq(const FqField& F, const FqSubspace& a, const FqSubspace& b) {
  for (int i = 0; i < a.dim; ++i)
    if (!member(F, b, a.rows[i])) return false;
  return true;
}

inline FqSubspace sum(const FqField& F, const FqSubspace& a, const FqSubspace& b) {
  std::vector<FqVec> g;
  for (int i = 0; i < a.dim; ++i) g.push_back(a.rows[i]);
  for (int i = 0; i < b.dim; ++i) g.push_back(b.rows[i]);
  return rref(F, g);
}

// orthogonal complement w.r.t. the space's symplectic form
inline FqSubspace perp(const FqSpace4& sp, const FqSubspace& U) {
  const FqField& F = *sp.F;
  // rows of M: U.rows[i] . gram; solve M x = 0
  std::vector<FqVec> M;
  for (int i = 0; i < U.dim; ++i) {
    FqVec r{0, 0, 0, 0};
    for (int j = 0; j < 4; ++j) {
      int s = 0;
      for (int k = 0; k < 4; ++k) s = F.add(s, F.mul(U.rows[i][k], sp.gram[k][j]));
      r[j] = s;
    }
    M.push_back(r);
  }
  FqSubspace R = rref(F, M);
  // back-substitute the null space of the reduced system
  std::array<int, 4> pivcol{-1, -1, -1, -1};
  std::array<bool, 4> is_piv{false, false, false, false};
  for (int i = 0; i < R.dim; ++i)
    for (int j = 0; j < 4; ++j)
      if (R.rows[i][j] != 0) { pivcol[i] = j; is_piv[j] = true; break; }
  std::vector<FqVec> basis;
  for (int fc = 0; fc < 4; ++fc) {
    if (is_piv[fc]) continue;
    FqVec v{0, 0, 0, 0};
    v[fc] = 1;
    for (int i = 0; i < R.dim; ++i) v[pivcol[i]] = F.neg(R.rows[i][fc]);
    basis.push_back(v);
  }
  return rref(F, basis);
}

inline FqSubspace intersect(const FqSpace4& sp, const FqSubspace& a, const FqSubspace& b) {
  return perp(sp, sum(*sp.F, perp(sp, a), perp(sp, b)));
}

// entrywise x -> x^{p^t}, re-canonicalized; t = 1 is sigma relative to F_p
inline FqSubspace frobenius_subspace(const FqField& F, const FqSubspace& U, int t = 1) {
  std::vector<FqVec> g;
  for (int i = 0; i < U.dim; ++i) {
    FqVec r;
    for (int j = 0; j < 4; ++j) r[j] = F.frob(U.rows[i][j], t);
    g.push_back(r);
  }
  return rref(F, g);
}

inline bool totally_isotropic(const FqSpace4& sp, const FqSubspace& U) {
  for (int i = 0; i < U.dim; ++i)
    for (int j = 0; j < U.dim; ++j)
      if (sp.pair(U.rows[i], U.rows[j]) != 0) return false;
  return true;
}

enum class StratumLabel { XP1, XBw1, XBw2, NotInY };

inline std::string label_name(StratumLabel l) {
  switch (l) {
    case StratumLabel::XP1: return "XP1";
    case StratumLabel::XBw1: return "XBw1";
    case StratumLabel::XBw2: return "XBw2";
    default: return "NotInY";
  }
}

// stratum of a dim-3 subspace in the minus model Y^-:
//   member iff U^perp c U intersect sigma(U) (and dim U / U cap sigma U <= 1)
//   XP1 : sigma-stable; XBw1 : U cap sigma U sigma-stable; XBw2 : otherwise
inline StratumLabel classify_point_minus(const FqSpace4& sp, const FqSubspace& U) {
  const FqField& F = *sp.F;
  if (U.dim != 3) throw std::invalid_argument("classify_point_minus: dim != 3");
  FqSubspace sU = frobenius_subspace(F, U, 1);
  FqSubspace inter = intersect(sp, U, sU);
  FqSubspace up = perp(sp, U);
  bool cond_codim = (U.dim - inter.dim) <= 1;
  bool cond_perp = subspace_leq(F, up, inter);
  if (!cond_codim || !cond_perp) return StratumLabel::NotInY;
  if (sU == U) return StratumLabel::XP1;
  if (inter.dim != 2 || !totally_isotropic(sp, inter))
    throw std::logic_error("classify_point_minus: Y-member without isotropic plane");
  FqSubspace sinter = frobenius_subspace(F, inter, 1);
  return sinter == inter ? StratumLabel::XBw1 : StratumLabel::XBw2;
}

// plus model via the fixed isomorphism U -> U^perp
inline StratumLabel classify_point_plus(const FqSpace4& sp, const FqSubspace& U) {
  if (U.dim != 1) throw std::invalid_argument("classify_point_plus: dim != 1");
  return classify_point_minus(sp, perp(sp, U));
}

// direct Y+ membership: (x, sigma x) = 0 for a generator
inline bool plus_member_direct(const FqSpace4& sp, const FqSubspace& U) {
  FqVec x = U.rows[0];
  FqVec sx;
  for (int j = 0; j < 4; ++j) sx[j] = sp.F->frob(x[j], 1);
  return sp.pair(x, sx) == 0;
}

// x3^p x0 - x0^p x3 + x2^p x1 - x1^p x2 = 0 on projective coordinates
inline bool surface_member(const FqField& F, const FqVec& x) {
  if (x == FqVec{0, 0, 0, 0})
    throw std::invalid_argument("surface_member: zero vector");
  int t = F.sub(F.mul(F.frob(x[3]), x[0]), F.mul(F.frob(x[0]), x[3]));
  t = F.add(t, F.sub(F.mul(F.frob(x[2]), x[1]), F.mul(F.frob(x[1]), x[2])));
  return t == 0;
}

// enumerate RREF bases of all dim-k subspaces with entries in the subfield
// fixed by frob^t (t = 0 or multiples of d mean the whole field); the order
// is lexicographic in (pivot columns, free entries)
inline void enumerate_subspaces(const FqField& F, int k, int t,
                                const std::function<void(const FqSubspace&)>& cb) {
  std::vector<int> elems =
      (t % F.d == 0) ? [&] {
        std::vector<int> v(F.q);
        for (int i = 0; i < F.q; ++i) v[i] = i;
        return v;
      }()
                     : F.subfield_elements(t);
  std::vector<int> cols(k);
  // pivot column combinations in lex order
  std::function<void(int, int)> rec = [&](int idx, int start) {
    if (idx == k) {
      std::array<bool, 4> piv{false, false, false, false};
      for (int c : cols) piv[c] = true;
      std::vector<std::pair<int, int>> free_pos;
      for (int r = 0; r < k; ++r)
        for (int c = cols[r] + 1; c < 4; ++c)
          if (!piv[c]) free_pos.emplace_back(r, c);
      std::vector<int> idxs(free_pos.size(), 0);
      while (true) {
        FqSubspace U;
        U.dim = k;
        for (int r = 0; r < k; ++r) {
          U.rows[r] = {0, 0, 0, 0};
          U.rows[r][cols[r]] = 1;
        }
        for (size_t fp = 0; fp < free_pos.size(); ++fp)
          U.rows[free_pos[fp].first][free_pos[fp].second] = elems[idxs[fp]];
        cb(U);
        size_t i = 0;
        while (i < idxs.size() && ++idxs[i] == int(elems.size())) idxs[i++] = 0;
        if (i == idxs.size()) break;
      }
      return;
    }
    for (int c = start; c < 4; ++c) {
      cols[idx] = c;
      rec(idx + 1, c + 1);
    }
  };
  rec(0, 0);
}

struct StrataCounts {
  long long xp1 = 0, xbw1 = 0, xbw2 = 0, not_in_y = 0;
  long long total() const { return xp1 + xbw1 + xbw2 + not_in_y; }
  long long members() const { return xp1 + xbw1 + xbw2; }
};

// exhaustive counts of dim-3 subspaces per label over F_{p^d}
inline StrataCounts count_strata(const FqSpace4& sp) {
  StrataCounts c;
  enumerate_subspaces(*sp.F, 3, 0, [&](const FqSubspace& U) {
    switch (classify_point_minus(sp, U)) {
      case StratumLabel::XP1: ++c.xp1; break;
      case StratumLabel::XBw1: ++c.xbw1; break;
      case StratumLabel::XBw2: ++c.xbw2; break;
      default: ++c.not_in_y;
    }
  });
  return c;
}

// F_p-rational totally isotropic planes T = T^perp, each with its p+1
// F_p-rational lines; the irreducible components of X_B(w_1)
struct W1Component {
  FqSubspace plane;
  std::vector<FqSubspace> lines;
};

inline std::vector<W1Component> components_w1(const FqSpace4& sp) {
  const FqField& F = *sp.F;
  std::vector<W1Component> out;
  enumerate_subspaces(F, 2, 1, [&](const FqSubspace& T) {
    if (!totally_isotropic(sp, T)) return;
    if (perp(sp, T) != T) return;
    W1Component comp;
    comp.plane = T;
    // rational lines inside T: nonzero subfield combinations of the 2 rows
    std::vector<int> elems = F.subfield_elements(1);
    for (int a : elems)
      for (int b : elems) {
        if (a == 0 && b == 0) continue;
        FqVec v;
        for (int j = 0; j < 4; ++j)
          v[j] = F.add(F.mul(a, T.rows[0][j]), F.mul(b, T.rows[1][j]));
        FqSubspace line = rref(F, {v});
        bool seen = false;
        for (const auto& l : comp.lines)
          if (l == line) { seen = true; break; }
        if (!seen) comp.lines.push_back(line);
      }
    out.push_back(std::move(comp));
  });
  return out;
}

}  // namespace stratalab
