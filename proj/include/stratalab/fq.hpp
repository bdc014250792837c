#pragma once
// The residue field F_q of a Witt ring context, q = p^d, with log/exp
// multiplication tables.  Elements are encoded as integers sum c_i p^i for
// the coefficient vector (c_0..c_{d-1}) of the class mod (f, p).

#include "stratalab/witt.hpp"

#include <vector>

namespace stratalab {

struct FqField {
  i64 p = 0;
  int d = 0;
  int q = 0;
  std::array<i64, kMaxDeg> fbar{};  // defining polynomial mod p
  std::vector<int> expt, logt, frobt;
  int gen = 0;

  explicit FqField(const RingCtx& R) : p(R.p), d(R.d), q(int(pow_i64(R.p, R.d))) {
    for (int i = 0; i < d; ++i) fbar[i] = R.f[i] % p;
    build();
  }

  int add(int a, int b) const {
    int r = 0, mul = 1;
    for (int i = 0; i < d; ++i) {
      int s = (a % p + b % p) % p;
      r += s * mul;
      mul *= int(p);
      a /= int(p);
      b /= int(p);
    }
    return r;
  }
  int neg(int a) const {
    int r = 0, mul = 1;
    for (int i = 0; i < d; ++i) {
      int s = (int(p) - a % p) % p;
      r += s * mul;
      mul *= int(p);
      a /= int(p);
    }
    return r;
  }
  int sub(int a, int b) const { return add(a, neg(b)); }
  int mul(int a, int b) const {
    if (a == 0 || b == 0) return 0;
    return expt[(logt[a] + logt[b]) % (q - 1)];
  }
  int inv(int a) const {
    if (a == 0) throw std::invalid_argument("FqField::inv(0)");
    return expt[(q - 1 - logt[a]) % (q - 1)];
  }
  int pow(int a, i64 e) const {
    if (a == 0) return e == 0 ? 1 : 0;
    i64 k = (logt[a] * (e % (q - 1))) % (q - 1);
    if (k < 0) k += q - 1;
    return expt[k];
  }
  // t steps of the p-power Frobenius
  int frob(int a, int t = 1) const {
    t %= d;
    if (t < 0) t += d;
    for (int i = 0; i < t; ++i) a = frobt[a];
    return a;
  }
  bool in_subfield(int a, int t) const { return frob(a, t) == a; }

  int from_ring(const RingElem& e) const {
    int r = 0, mul = 1;
    for (int i = 0; i < d; ++i) {
      r += int(e.coeff(i) % p) * mul;
      mul *= int(p);
    }
    return r;
  }
  RingElem lift(const RingCtx& R, int a) const {
    std::array<i64, kMaxDeg> c{};
    for (int i = 0; i < d; ++i) { c[i] = a % p; a /= int(p); }
    return RingElem(&R, c);
  }

  // elements of the subfield fixed by frob^t, in increasing index order
  std::vector<int> subfield_elements(int t) const {
    std::vector<int> out;
    for (int a = 0; a < q; ++a)
      if (in_subfield(a, t)) out.push_back(a);
    return out;
  }

 private:
  int raw_mul(int a, int b) const {
    // schoolbook product mod (fbar, p), used only to build tables
    std::array<int, 2 * kMaxDeg> prod{};
    std::array<int, kMaxDeg> ca{}, cb{};
    for (int i = 0; i < d; ++i) { ca[i] = a % p; a /= int(p); }
    for (int i = 0; i < d; ++i) { cb[i] = b % p; b /= int(p); }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % int(p);
    for (int k = 2 * d - 2; k >= d; --k) {
      int c = prod[k];
      if (!c) continue;
      for (int i = 0; i < d; ++i)
        prod[k - d + i] = (prod[k - d + i] + c * int(p - fbar[i])) % int(p);
      prod[k] = 0;
    }
    int r = 0, mul = 1;
    for (int i = 0; i < d; ++i) { r += prod[i] * mul; mul *= int(p); }
    return r;
  }

  void build() {
    // deterministic generator: least index of multiplicative order q - 1
    for (int g = 1; g < q; ++g) {
      int x = g, ord = 1;
      while (x != 1) { x = raw_mul(x, g); ++ord; }
      if (ord == q - 1) { gen = g; break; }
    }
    expt.assign(q - 1, 1);
    logt.assign(q, 0);
    for (int k = 1; k < q - 1; ++k) expt[k] = raw_mul(expt[k - 1], gen);
    for (int k = 0; k < q - 1; ++k) logt[expt[k]] = k;
    frobt.assign(q, 0);
    for (int a = 0; a < q; ++a) {
      int r = 1;
      for (i64 e = 0; e < p; ++e) r = raw_mul(r, a);
      frobt[a] = r;
    }
  }
};

}  // namespace stratalab
