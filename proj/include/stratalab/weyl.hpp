#pragma once
// The extended affine Weyl group of type C~2, realized by affine
// transformations of the rank-2 apartment: x -> fin . x + trans with fin a
// signed permutation matrix and trans in (1/2 Z)^2 (stored doubled).
//
// Base alcove: 1/2 > x1 > x2 > 0, vertices (0,0) type 0, (1/2,0) type 1,
// (1/2,1/2) type 2.  The adjoint realization is used: the length-zero alcove
// symmetry rho squares to the identity, which is faithful for every length,
// Bruhat-order and support computation on the Adm coset.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratalab {

struct AffineWeylElem {
  std::array<int, 4> fin{1, 0, 0, 1};  // row major 2x2, entries in {-1,0,1}
  std::array<int, 2> tr2{0, 0};        // doubled translation

  friend bool operator==(const AffineWeylElem& a, const AffineWeylElem& b) {
    return a.fin == b.fin && a.tr2 == b.tr2;
  }
  friend bool operator!=(const AffineWeylElem& a, const AffineWeylElem& b) {
    return !(a == b);
  }
  friend bool operator<(const AffineWeylElem& a, const AffineWeylElem& b) {
    return std::tie(a.fin, a.tr2) < std::tie(b.fin, b.tr2);
  }

  // act on a point in 1/16 apartment units
  std::array<long long, 2> act16(const std::array<long long, 2>& x) const {
    return {fin[0] * x[0] + fin[1] * x[1] + 8ll * tr2[0],
            fin[2] * x[0] + fin[3] * x[1] + 8ll * tr2[1]};
  }

  friend AffineWeylElem compose(const AffineWeylElem& a, const AffineWeylElem& b) {
    AffineWeylElem r;
    r.fin = {a.fin[0] * b.fin[0] + a.fin[1] * b.fin[2],
             a.fin[0] * b.fin[1] + a.fin[1] * b.fin[3],
             a.fin[2] * b.fin[0] + a.fin[3] * b.fin[2],
             a.fin[2] * b.fin[1] + a.fin[3] * b.fin[3]};
    r.tr2 = {a.fin[0] * b.tr2[0] + a.fin[1] * b.tr2[1] + a.tr2[0],
             a.fin[2] * b.tr2[0] + a.fin[3] * b.tr2[1] + a.tr2[1]};
    return r;
  }

  AffineWeylElem inverse() const {
    AffineWeylElem r;
    r.fin = {fin[0], fin[2], fin[1], fin[3]};  // signed permutations: inv = transpose
    r.tr2 = {-(r.fin[0] * tr2[0] + r.fin[1] * tr2[1]),
             -(r.fin[2] * tr2[0] + r.fin[3] * tr2[1])};
    return r;
  }

  // W_a-coset component in the adjoint Omega = Z/2
  int omega_flag() const { return ((tr2[0] % 2) + 2) % 2; }

  std::string key() const {
    std::string s;
    for (int v : fin) s += std::to_string(v) + ",";
    s += ";" + std::to_string(tr2[0]) + "," + std::to_string(tr2[1]);
    return s;
  }
};

inline AffineWeylElem weyl_identity() { return AffineWeylElem{}; }

// s1: coordinate swap; s2: negate x2; s0: x1 -> 1 - x1
inline std::array<AffineWeylElem, 3> simple_reflections() {
  AffineWeylElem s0, s1, s2;
  s0.fin = {-1, 0, 0, 1};
  s0.tr2 = {2, 0};
  s1.fin = {0, 1, 1, 0};
  s2.fin = {1, 0, 0, -1};
  return {s0, s1, s2};
}

// the nontrivial length-zero alcove symmetry: (x1,x2) -> (1/2 - x2, 1/2 - x1)
inline AffineWeylElem rho_element() {
  AffineWeylElem r;
  r.fin = {0, -1, -1, 0};
  r.tr2 = {1, 1};
  return r;
}

inline AffineWeylElem translation2(int a2, int b2) {
  AffineWeylElem t;
  t.tr2 = {a2, b2};
  return t;
}

namespace weyl_detail {
// positive roots of C2 in this coordinate frame
constexpr std::array<std::array<int, 2>, 4> kPosRoots{{{1, -1}, {1, 1}, {2, 0}, {0, 2}}};
constexpr std::array<long long, 2> kBasePt{6, 2};  // (3/8, 1/8), alcove interior

inline long long root_eval(const std::array<int, 2>& al, const std::array<long long, 2>& x) {
  return al[0] * x[0] + al[1] * x[1];
}

// integers k with 16k strictly between a and b
inline int strict_between(long long a, long long b) {
  if (a > b) std::swap(a, b);
  long long lo = (a >= 0) ? (a / 16 + 1) : -((-a) / 16);  // least k, 16k > a
  if (16 * lo <= a) ++lo;
  long long hi = (b >= 0) ? (b / 16) : -((-b + 15) / 16);  // greatest k, 16k < b
  if (16 * hi >= b) --hi;
  return int(hi >= lo ? hi - lo + 1 : 0);
}
}  // namespace weyl_detail

// number of affine root hyperplanes separating the base alcove from its image
inline int length(const AffineWeylElem& w) {
  using namespace weyl_detail;
  auto img = w.act16(kBasePt);
  int l = 0;
  for (const auto& al : kPosRoots)
    l += strict_between(root_eval(al, kBasePt), root_eval(al, img));
  return l;
}

struct ReducedWord {
  std::vector<int> letters;  // indices into {s0, s1, s2}
  int omega = 0;             // rho exponent
};

// deterministic alcove walk: repeatedly cross the lowest-indexed wall of the
// current alcove separating it from w's alcove
inline ReducedWord reduced_word(const AffineWeylElem& w) {
  using namespace weyl_detail;
  auto s = simple_reflections();
  AffineWeylElem rho = rho_element();
  // wall functionals, positive on the base alcove, in 1/16 units
  auto h = [](int i, const std::array<long long, 2>& x) -> long long {
    switch (i) {
      case 0: return 16 - 2 * x[0];
      case 1: return x[0] - x[1];
      default: return x[1];
    }
  };
  ReducedWord out;
  AffineWeylElem u;
  auto target = w.act16(kBasePt);
  for (int guard = 0; guard < 256; ++guard) {
    AffineWeylElem uinvw = compose(u.inverse(), w);
    if (uinvw == weyl_identity()) { out.omega = 0; return out; }
    if (uinvw == rho) { out.omega = 1; return out; }
    auto c = u.inverse().act16(target);
    int wall = -1;
    for (int i = 0; i < 3; ++i)
      if (h(i, c) < 0) { wall = i; break; }
    if (wall < 0) throw std::logic_error("reduced_word: walk stalled");
    u = compose(u, s[wall]);
    out.letters.push_back(wall);
  }
  throw std::logic_error("reduced_word: walk did not terminate");
}

inline AffineWeylElem recompose(const ReducedWord& rw) {
  auto s = simple_reflections();
  AffineWeylElem w;
  for (int i : rw.letters) w = compose(w, s[i]);
  if (rw.omega) w = compose(w, rho_element());
  return w;
}

inline std::string word_string(const ReducedWord& rw) {
  std::string out;
  for (int i : rw.letters) out += "s" + std::to_string(i) + "*";
  out += rw.omega ? "rho" : (rw.letters.empty() ? "1" : "");
  if (!rw.omega && !rw.letters.empty()) out.pop_back();  // drop trailing '*'
  return out;
}

// Bruhat order; elements in different W_a-cosets are incomparable
inline bool bruhat_leq(const AffineWeylElem& u, const AffineWeylElem& w) {
  if (u.omega_flag() != w.omega_flag()) return false;
  AffineWeylElem rho = rho_element();
  AffineWeylElem ua = u.omega_flag() ? compose(u, rho) : u;
  AffineWeylElem wa = w.omega_flag() ? compose(w, rho) : w;
  auto s = simple_reflections();
  std::vector<int> word = reduced_word(wa).letters;
  // classical one-pass subword recursion via the lifting property
  std::function<bool(AffineWeylElem, size_t)> rec = [&](AffineWeylElem v, size_t pos) {
    if (v == weyl_identity()) return true;
    if (pos == word.size()) return false;
    AffineWeylElem sv = compose(s[word[pos]], v);
    if (length(sv) < length(v)) return rec(sv, pos + 1);
    return rec(v, pos + 1);
  };
  return rec(ua, 0);
}

// all elements of W_a of length <= maxlen
inline std::vector<AffineWeylElem> wa_ball(int maxlen) {
  auto s = simple_reflections();
  std::map<std::string, AffineWeylElem> seen;
  std::vector<AffineWeylElem> frontier{weyl_identity()};
  seen.emplace(weyl_identity().key(), weyl_identity());
  for (int l = 0; l < maxlen; ++l) {
    std::vector<AffineWeylElem> next;
    for (const auto& w : frontier)
      for (const auto& g : s) {
        AffineWeylElem v = compose(w, g);
        if (length(v) != l + 1) continue;
        if (seen.emplace(v.key(), v).second) next.push_back(v);
      }
    frontier = std::move(next);
  }
  std::vector<AffineWeylElem> out;
  out.reserve(seen.size());
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

// Adm(mu): elements below some W_0-translate of the mu-translation (1/2,1/2)
inline std::vector<AffineWeylElem> adm_maximal_elements() {
  std::vector<AffineWeylElem> out;
  for (int a : {1, -1})
    for (int b : {1, -1}) out.push_back(translation2(a, b));
  return out;
}

inline std::vector<AffineWeylElem> adm_set() {
  AffineWeylElem rho = rho_element();
  auto maxima = adm_maximal_elements();
  std::vector<AffineWeylElem> out;
  for (const auto& wa : wa_ball(3)) {
    AffineWeylElem w = compose(wa, rho);
    if (length(w) > 3) continue;
    for (const auto& t : maxima)
      if (bruhat_leq(w, t)) {
        out.push_back(w);
        break;
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// independent enumeration: union of subword products of the four maxima
inline std::vector<AffineWeylElem> adm_set_by_subwords() {
  auto s = simple_reflections();
  AffineWeylElem rho = rho_element();
  std::set<AffineWeylElem> acc;
  for (const auto& t : adm_maximal_elements()) {
    ReducedWord rw = reduced_word(t);
    if (rw.omega != 1) throw std::logic_error("adm maxima must lie in the rho coset");
    int l = int(rw.letters.size());
    for (int mask = 0; mask < (1 << l); ++mask) {
      AffineWeylElem w;
      for (int i = 0; i < l; ++i)
        if (mask & (1 << i)) w = compose(w, s[rw.letters[i]]);
      acc.insert(compose(w, rho));
    }
  }
  return {acc.begin(), acc.end()};
}

// subgroup generated by {s_k : k in K}
inline std::vector<AffineWeylElem> parabolic_subgroup(const std::set<int>& K) {
  auto s = simple_reflections();
  std::set<AffineWeylElem> acc{weyl_identity()};
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<AffineWeylElem> cur(acc.begin(), acc.end());
    for (const auto& w : cur)
      for (int k : K) {
        if (acc.insert(compose(w, s[k])).second) grew = true;
        if (acc.size() > 64) throw std::logic_error("parabolic subgroup too large");
      }
  }
  return {acc.begin(), acc.end()};
}

// w in KW~ iff s_k w is longer for every k in K
inline bool is_min_coset_rep(const AffineWeylElem& w, const std::set<int>& K) {
  auto s = simple_reflections();
  int lw = length(w);
  for (int k : K)
    if (length(compose(s[k], w)) <= lw) return false;
  return true;
}

// EO^K(mu) = (union of W~_K-double cosets meeting Adm(mu)) intersected with KW~
inline std::vector<AffineWeylElem> eo_set(const std::set<int>& K) {
  if (K.size() >= 3) throw std::invalid_argument("eo_set: K must be proper");
  auto adm = adm_set();
  std::set<AffineWeylElem> admset(adm.begin(), adm.end());
  auto wk = parabolic_subgroup(K);
  AffineWeylElem rho = rho_element();
  std::set<AffineWeylElem> out;
  int maxlen = 0;
  for (const auto& w : adm) maxlen = std::max(maxlen, length(w));
  for (const auto& wa : wa_ball(maxlen)) {
    AffineWeylElem w = compose(wa, rho);
    if (!is_min_coset_rep(w, K)) continue;
    bool meets = false;
    for (const auto& a : wk) {
      for (const auto& b : wk)
        if (admset.count(compose(a, compose(w, b)))) { meets = true; break; }
      if (meets) break;
    }
    if (meets) out.insert(w);
  }
  return {out.begin(), out.end()};
}

struct DynkinAction {
  std::array<int, 3> perm{0, 1, 2};
  std::string name;

  static DynkinAction quaternionic() { return {{2, 1, 0}, "quaternionic"}; }
  static DynkinAction paramodular() { return {{0, 1, 2}, "paramodular"}; }
};

// the composite diagram action tau.sigma: rho-conjugation (0 2) followed by
// the case's sigma action
inline std::array<int, 3> composite_action(const DynkinAction& act) {
  std::array<int, 3> rho_conj{2, 1, 0};
  std::array<int, 3> c{};
  for (int i = 0; i < 3; ++i) c[i] = act.perm[rho_conj[i]];
  return c;
}

// supp_sigma(w) for w = w_a . rho: support of w_a closed under the composite
// diagram action
inline std::set<int> sigma_support(const AffineWeylElem& w, const DynkinAction& act) {
  if (w.omega_flag() != 1)
    throw std::invalid_argument("sigma_support: expected an element of the Adm coset");
  AffineWeylElem wa = compose(w, rho_element());
  std::set<int> supp;
  for (int i : reduced_word(wa).letters) supp.insert(i);
  auto c = composite_action(act);
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i : std::vector<int>(supp.begin(), supp.end()))
      if (supp.insert(c[i]).second) grew = true;
  }
  return supp;
}

// sigma-Coxeter: length equals the number of composite-action orbits on the
// sigma-support, and (for EO purposes) the support is not the whole diagram
inline bool is_sigma_coxeter(const AffineWeylElem& w, const DynkinAction& act) {
  std::set<int> supp = sigma_support(w, act);
  if (supp.size() == 3) return false;
  auto c = composite_action(act);
  std::set<int> seen;
  int orbits = 0;
  for (int i : supp) {
    if (seen.count(i)) continue;
    ++orbits;
    int j = i;
    do {
      seen.insert(j);
      j = c[j];
    } while (j != i);
  }
  AffineWeylElem wa = compose(w, rho_element());
  return length(wa) == orbits;
}

// J-set: nonempty composite-stable Sigma with all vertices equidistant from
// the unique vertex outside K; distances on the path 0 - 1 - 2
inline std::vector<std::set<int>> j_set(const std::set<int>& K, const DynkinAction& act) {
  if (K.size() != 2) throw std::invalid_argument("j_set: K must be a 2-element set");
  int v0 = 0;
  for (int v : {0, 1, 2})
    if (!K.count(v)) v0 = v;
  auto dist = [&](int a) { return std::abs(a - v0); };
  auto c = composite_action(act);
  std::vector<std::set<int>> out;
  for (int mask = 1; mask < 8; ++mask) {
    std::set<int> sig;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) sig.insert(i);
    bool stable = true;
    for (int i : sig)
      if (!sig.count(c[i])) stable = false;
    if (!stable) continue;
    int d0 = dist(*sig.begin());
    bool equi = true;
    for (int i : sig)
      if (dist(i) != d0) equi = false;
    if (!equi) continue;
    out.push_back(sig);
  }
  // column order: distance 0 first, then larger Sigma first, then lex
  std::sort(out.begin(), out.end(), [&](const std::set<int>& a, const std::set<int>& b) {
    int da = dist(*a.begin()), db = dist(*b.begin());
    if (da != db) return da < db;
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return out;
}

struct EoRow {
  std::set<int> sigma;
  AffineWeylElem w;
  std::string w_name;
  std::set<int> complement;
  std::set<int> supp;
};

// the sigma-Coxeter stratification tables: J-set rows matched to sigma-Coxeter EO elements by
// supp_sigma(w) = S~ - Sigma, with the leftover distance-0 row taking the
// length-zero element
inline std::vector<EoRow> eo_table(const DynkinAction& act) {
  std::set<int> K{0, 2};
  auto js = j_set(K, act);
  std::vector<AffineWeylElem> cox;
  for (const auto& w : eo_set(K))
    if (is_sigma_coxeter(w, act)) cox.push_back(w);
  std::vector<EoRow> rows;
  std::vector<bool> used(cox.size(), false);
  for (const auto& sig : js) {
    std::set<int> want;
    for (int i : {0, 1, 2})
      if (!sig.count(i)) want.insert(i);
    int pick = -1;
    for (size_t i = 0; i < cox.size(); ++i)
      if (!used[i] && sigma_support(cox[i], act) == want) { pick = int(i); break; }
    if (pick < 0) {
      // the superspecial row: the unique leftover with support strictly
      // inside the complement
      for (size_t i = 0; i < cox.size(); ++i) {
        if (used[i]) continue;
        auto s = sigma_support(cox[i], act);
        bool inside = true;
        for (int x : s)
          if (!want.count(x)) inside = false;
        if (inside) { pick = int(i); break; }
      }
    }
    if (pick < 0) throw std::logic_error("eo_table: no matching sigma-Coxeter element");
    used[pick] = true;
    EoRow row;
    row.sigma = sig;
    row.w = cox[pick];
    row.w_name = word_string(reduced_word(cox[pick]));
    row.complement = want;
    row.supp = sigma_support(cox[pick], act);
    rows.push_back(row);
  }
  for (bool u : used)
    if (!u) throw std::logic_error("eo_table: unmatched sigma-Coxeter element");
  return rows;
}

inline std::string set_string(const std::set<int>& s) {
  std::string out = "{";
  bool first = true;
  for (int v : s) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  return out + "}";
}

}  // namespace stratalab
