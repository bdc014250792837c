#pragma once
// Exact arithmetic in truncated unramified Witt rings W(F_{p^d}) / p^m.
//
// The ring is realized as (Z/p^m)[x] / (f) where f is the Hensel lift of a
// monic irreducible degree-d factor of x^{p^d - 1} - 1 over F_p.  With this
// choice x is a Teichmueller root of unity, so x -> x^p induces an exact ring
// automorphism at every precision: the Frobenius lift sigma.

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratalab {

using i64 = std::int64_t;

// Raised when a lattice/ring operation would need digits beyond the
// precision window p^m (or past the guard m-2 for lattice pivots).
class precision_error : public std::runtime_error {
 public:
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

inline i64 pow_i64(i64 base, int exp) {
  i64 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline bool is_prime_i64(i64 n) {
  if (n < 2) return false;
  for (i64 q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

constexpr int kMaxDeg = 4;

struct RingCtx;
RingCtx make_ring(i64 p, int d, int m);

// Context of W(F_{p^d})/p^m.  Immutable after construction; share freely.
struct RingCtx {
  i64 p = 0;
  int d = 0;
  int m = 0;
  i64 pm = 0;                          // p^m
  std::array<i64, kMaxDeg> f{};        // f = x^d + f[d-1] x^{d-1} + ... + f[0]
  // sigma(x^i) = (x^p)^i mod (f, p^m), for i = 0..d-1
  std::array<std::array<i64, kMaxDeg>, kMaxDeg> frob{};
  // x^{d+j} mod (f, p^m) for j = 0..d-2, used to fold products back to deg < d
  std::array<std::array<i64, kMaxDeg>, kMaxDeg> xpow{};

  i64 ppow(int k) const { return pow_i64(p, k); }
};

class RingElem {
 public:
  RingElem() = default;
  RingElem(const RingCtx* ctx, std::array<i64, kMaxDeg> c) : ctx_(ctx), c_(c) {
    reduce();
  }
  static RingElem from_int(const RingCtx& ctx, i64 v) {
    std::array<i64, kMaxDeg> c{};
    c[0] = v;
    return RingElem(&ctx, c);
  }
  static RingElem zero(const RingCtx& ctx) { return from_int(ctx, 0); }
  static RingElem one(const RingCtx& ctx) { return from_int(ctx, 1); }
  // x, the distinguished Teichmueller generator
  static RingElem gen(const RingCtx& ctx) {
    std::array<i64, kMaxDeg> c{};
    if (ctx.d == 1) c[0] = 1;  // x = 1 mod (x - 1)
    else c[1] = 1;
    return RingElem(&ctx, c);
  }

  const RingCtx& ctx() const { return *ctx_; }
  const std::array<i64, kMaxDeg>& coeffs() const { return c_; }
  i64 coeff(int i) const { return c_[i]; }

  bool is_zero() const {
    for (int i = 0; i < ctx_->d; ++i)
      if (c_[i] != 0) return false;
    return true;
  }

  friend bool operator==(const RingElem& a, const RingElem& b) {
    return a.c_ == b.c_;
  }
  friend bool operator!=(const RingElem& a, const RingElem& b) { return !(a == b); }

  friend RingElem operator+(const RingElem& a, const RingElem& b) {
    RingElem r = a;
    for (int i = 0; i < a.ctx_->d; ++i) r.c_[i] += b.c_[i];
    r.reduce();
    return r;
  }
  friend RingElem operator-(const RingElem& a, const RingElem& b) {
    RingElem r = a;
    for (int i = 0; i < a.ctx_->d; ++i) r.c_[i] -= b.c_[i];
    r.reduce();
    return r;
  }
  RingElem operator-() const {
    RingElem r = *this;
    for (int i = 0; i < ctx_->d; ++i) r.c_[i] = -r.c_[i];
    r.reduce();
    return r;
  }
  friend RingElem operator*(const RingElem& a, const RingElem& b) {
    const RingCtx& R = *a.ctx_;
    int d = R.d;
    std::array<i64, 2 * kMaxDeg - 1> prod{};
    for (int i = 0; i < d; ++i) {
      if (a.c_[i] == 0) continue;
      for (int j = 0; j < d; ++j) prod[i + j] += (a.c_[i] * b.c_[j]) % R.pm;
    }
    std::array<i64, kMaxDeg> out{};
    for (int i = 0; i < d; ++i) out[i] = prod[i] % R.pm;
    for (int j = 0; j < d - 1; ++j) {
      i64 hi = prod[d + j] % R.pm;
      if (hi == 0) continue;
      for (int i = 0; i < d; ++i) out[i] = (out[i] + hi * R.xpow[j][i]) % R.pm;
    }
    return RingElem(&R, out);
  }
  RingElem& operator+=(const RingElem& b) { return *this = *this + b; }
  RingElem& operator-=(const RingElem& b) { return *this = *this - b; }
  RingElem& operator*=(const RingElem& b) { return *this = *this * b; }

  RingElem scaled(i64 k) const {
    RingElem r = *this;
    k %= ctx_->pm;
    for (int i = 0; i < ctx_->d; ++i) r.c_[i] = (r.c_[i] * k);
    r.reduce();
    return r;
  }

  RingElem pow(i64 e) const {
    RingElem r = one(*ctx_), b = *this;
    while (e > 0) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  // Largest v <= m with e in p^v R; m iff zero residue.
  int valuation() const {
    if (is_zero()) return ctx_->m;
    int v = ctx_->m;
    for (int i = 0; i < ctx_->d; ++i) {
      if (c_[i] == 0) continue;
      i64 c = c_[i];
      int w = 0;
      while (c % ctx_->p == 0) { c /= ctx_->p; ++w; }
      if (w < v) v = w;
    }
    return v;
  }

  bool is_unit() const { return valuation() == 0; }

  // Exact division by p^k; throws if some coefficient is not divisible.
  RingElem div_p(int k) const {
    i64 pk = ctx_->ppow(k);
    RingElem r = *this;
    for (int i = 0; i < ctx_->d; ++i) {
      if (r.c_[i] % pk != 0)
        throw precision_error("div_p: element not divisible by p^" + std::to_string(k));
      r.c_[i] /= pk;
    }
    return r;
  }

  RingElem mul_p(int k) const { return scaled(ctx_->ppow(k)); }

  // Coefficientwise remainder mod p^k (the canonical representative of
  // the class in R / p^k R).
  RingElem mod_p(int k) const {
    i64 pk = ctx_->ppow(k);
    RingElem r = *this;
    for (int i = 0; i < ctx_->d; ++i) r.c_[i] %= pk;
    return r;
  }

  // Inverse of a unit, by Hensel iteration from the residue-field inverse.
  RingElem inv() const {
    const RingCtx& R = *ctx_;
    if (!is_unit()) throw precision_error("inv: not a unit");
    // residue field inverse via t^(p^d - 2)
    i64 q = pow_i64(R.p, R.d);
    RingElem t = mod_p(1).pow(q - 2).mod_p(1);
    RingElem two = from_int(R, 2);
    // x_{k+1} = x_k (2 - a x_k) doubles correct digits each step
    for (int prec = 1; prec < R.m; prec *= 2) t = t * (two - *this * t);
    return t;
  }

  // sigma^k, the exact Frobenius lift applied k times (k may be negative).
  RingElem frobenius(int k = 1) const {
    const RingCtx& R = *ctx_;
    int d = R.d;
    k %= d;
    if (k < 0) k += d;
    RingElem r = *this;
    for (int t = 0; t < k; ++t) {
      std::array<i64, kMaxDeg> out{};
      for (int i = 0; i < d; ++i) {
        if (r.c_[i] == 0) continue;
        for (int j = 0; j < d; ++j) out[j] = (out[j] + r.c_[i] * R.frob[i][j]) % R.pm;
      }
      r.c_ = out;
    }
    return r;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < ctx_->d; ++i) {
      if (i) s += ",";
      s += std::to_string(c_[i]);
    }
    return s + ")";
  }

 private:
  void reduce() {
    for (int i = 0; i < ctx_->d; ++i) {
      c_[i] %= ctx_->pm;
      if (c_[i] < 0) c_[i] += ctx_->pm;
    }
  }

  const RingCtx* ctx_ = nullptr;
  std::array<i64, kMaxDeg> c_{};
};

inline RingElem frobenius(const RingElem& e) { return e.frobenius(1); }
inline int valuation(const RingElem& e) { return e.valuation(); }

// The Teichmueller lift: the unique (p^d - 1)-st root of unity congruent to
// e mod p.  Rejects elements with zero residue.
inline RingElem teichmuller(const RingElem& e) {
  const RingCtx& R = e.ctx();
  if (e.valuation() > 0)
    throw std::invalid_argument("teichmuller: zero residue class");
  i64 q = pow_i64(R.p, R.d);
  RingElem t = e;
  for (int k = 1; k < R.m; ++k) t = t.pow(q);  // t <- t^(p^d), stabilizes
  return t;
}

namespace detail {

// dense polynomials over Z/p^k, coefficient vectors low degree first
using Poly = std::vector<i64>;

inline void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b, i64 mod) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + a[i] * b[j]) % mod;
  }
  poly_trim(r);
  return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b, i64 mod) {
  Poly r = a;
  if (b.size() > r.size()) r.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) {
    r[i] = (r[i] - b[i]) % mod;
    if (r[i] < 0) r[i] += mod;
  }
  poly_trim(r);
  return r;
}

// division by a monic divisor, exact coefficient arithmetic mod `mod`
inline void poly_divmod_monic(const Poly& a, const Poly& div, i64 mod, Poly& quo, Poly& rem) {
  rem = a;
  quo.assign(a.size(), 0);
  int dd = int(div.size()) - 1;
  while (int(rem.size()) - 1 >= dd && !rem.empty()) {
    int k = int(rem.size()) - 1 - dd;
    i64 c = rem.back();
    quo[k] = c;
    for (int i = 0; i <= dd; ++i) {
      rem[k + i] = (rem[k + i] - c * div[i]) % mod;
      if (rem[k + i] < 0) rem[k + i] += mod;
    }
    poly_trim(rem);
  }
  poly_trim(quo);
}

// extended gcd over F_p for monic coprime f, h: a f + b h = 1
inline void poly_ext_gcd_fp(const Poly& f, const Poly& h, i64 p, Poly& a, Poly& b) {
  Poly r0 = f, r1 = h;
  Poly s0 = {1}, s1 = {};
  Poly t0 = {}, t1 = {1};
  while (!r1.empty()) {
    // make r1 monic
    i64 lead = r1.back();
    i64 inv = 1;
    for (i64 x = 1; x < p; ++x)
      if ((x * lead) % p == 1) { inv = x; break; }
    Poly r1m = r1, s1m = s1, t1m = t1;
    for (auto& c : r1m) c = (c * inv) % p;
    for (auto& c : s1m) c = (c * inv) % p;
    for (auto& c : t1m) c = (c * inv) % p;
    Poly q, rem;
    poly_divmod_monic(r0, r1m, p, q, rem);
    Poly snew = poly_sub(s0, poly_mul(q, s1m, p), p);
    Poly tnew = poly_sub(t0, poly_mul(q, t1m, p), p);
    r0 = r1m; r1 = rem;
    s0 = s1m; s1 = snew;
    t0 = t1m; t1 = tnew;
  }
  // r0 = gcd, should be the constant 1 for coprime inputs
  if (r0.size() != 1)
    throw std::logic_error("poly_ext_gcd_fp: inputs not coprime");
  i64 g = r0[0], inv = 1;
  for (i64 x = 1; x < p; ++x)
    if ((x * g) % p == 1) { inv = x; break; }
  a = s0; b = t0;
  for (auto& c : a) c = (c * inv) % p;
  for (auto& c : b) c = (c * inv) % p;
}

inline bool poly_irreducible_fp(const Poly& f, i64 p) {
  int d = int(f.size()) - 1;
  if (d == 1) return true;
  // trial division by all monic polynomials of degree 1..d/2
  for (int e = 1; e <= d / 2; ++e) {
    std::vector<i64> c(e + 1, 0);
    c[e] = 1;
    while (true) {
      Poly q, rem;
      poly_divmod_monic(f, c, p, q, rem);
      if (rem.empty()) return false;
      int i = 0;
      while (i < e && ++c[i] == p) c[i++] = 0;
      if (i == e) break;
    }
  }
  return true;
}

}  // namespace detail

inline RingCtx make_ring(i64 p, int d, int m) {
  using namespace detail;
  if (p < 3 || p % 2 == 0 || !is_prime_i64(p))
    throw std::invalid_argument("make_ring: p must be an odd prime");
  if (d != 1 && d != 2 && d != 4)
    throw std::invalid_argument("make_ring: degree must be 1, 2 or 4");
  if (m < 1) throw std::invalid_argument("make_ring: precision must be >= 1");
  if (pow_i64(p, m) > (i64(1) << 40))
    throw std::invalid_argument("make_ring: precision out of the supported envelope");

  RingCtx R;
  R.p = p;
  R.d = d;
  R.m = m;
  R.pm = pow_i64(p, m);

  // pick f mod p
  Poly f0;
  if (d == 1) {
    f0 = {p - 1, 1};  // x - 1: the canonical split factor, x = 1
  } else {
    // lexicographically least coefficient vector (c_0, ..., c_{d-1}) among
    // monic irreducible degree-d polynomials (every such f divides
    // x^{p^d - 1} - 1 over F_p)
    std::vector<i64> c(d, 0);
    bool found = false;
    auto lex_next = [&]() {
      int i = d - 1;
      while (i >= 0 && ++c[i] == p) c[i--] = 0;
      return i >= 0;
    };
    while (true) {
      Poly cand(d + 1, 0);
      cand[d] = 1;
      for (int i = 0; i < d; ++i) cand[i] = c[i];
      if (poly_irreducible_fp(cand, p)) { f0 = cand; found = true; break; }
      if (!lex_next()) break;
    }
    if (!found) throw std::logic_error("make_ring: no irreducible factor found");
  }

  // Hensel-lift f0 against g = x^{p^d - 1} - 1 from mod p to mod p^m
  i64 q = pow_i64(p, d);
  Poly g(q, 0);
  g[0] = R.pm - 1;
  g[q - 1] = 1;
  Poly f = f0, h;
  {
    Poly rem;
    Poly gp = g;
    for (auto& x : gp) x %= p;
    poly_trim(gp);
    poly_divmod_monic(gp, f0, p, h, rem);
    if (!rem.empty()) throw std::logic_error("make_ring: f does not divide g mod p");
  }
  Poly a, b;
  poly_ext_gcd_fp(f0, h, p, a, b);
  i64 pk = p;
  while (pk < R.pm) {
    i64 next = pk * p;
    // e = (g - f h) / p^k mod p
    Poly fh = poly_mul(f, h, next);
    Poly e = poly_sub(g, fh, next);
    Poly delta;
    delta.reserve(e.size());
    for (auto x : e) delta.push_back((x / pk) % p);
    poly_trim(delta);
    // f += p^k (b delta mod f),  h += p^k (a delta + h floor(b delta / f))
    Poly bd = poly_mul(b, delta, p);
    Poly qd, wd;
    poly_divmod_monic(bd, f0, p, qd, wd);
    Poly ad = poly_mul(a, delta, p);
    Poly hq = poly_mul(h, qd, p);
    Poly ud = ad;
    if (hq.size() > ud.size()) ud.resize(hq.size(), 0);
    for (size_t i = 0; i < hq.size(); ++i) ud[i] = (ud[i] + hq[i]) % p;
    poly_trim(ud);
    if (wd.size() > f.size()) throw std::logic_error("make_ring: lift degree overflow");
    if (f.size() < size_t(d + 1)) f.resize(d + 1, 0);
    for (size_t i = 0; i < wd.size(); ++i) f[i] = (f[i] + pk * wd[i]) % next;
    if (h.size() < ud.size()) h.resize(ud.size(), 0);
    for (size_t i = 0; i < ud.size(); ++i) h[i] = (h[i] + pk * ud[i]) % next;
    pk = next;
  }
  for (int i = 0; i < d; ++i) R.f[i] = ((f[i] % R.pm) + R.pm) % R.pm;

  // x^{d+j} mod (f, p^m)
  {
    std::array<i64, kMaxDeg> cur{};  // x^d = -f[0] - f[1] x - ...
    for (int i = 0; i < d; ++i) cur[i] = (R.pm - R.f[i]) % R.pm;
    for (int j = 0; j < d - 1; ++j) {
      R.xpow[j] = cur;
      // multiply by x
      std::array<i64, kMaxDeg> nxt{};
      i64 top = cur[d - 1];
      for (int i = d - 1; i >= 1; --i) nxt[i] = cur[i - 1];
      nxt[0] = 0;
      for (int i = 0; i < d; ++i)
        nxt[i] = (nxt[i] + top * ((R.pm - R.f[i]) % R.pm)) % R.pm;
      cur = nxt;
    }
  }

  // frobenius basis images: sigma(x^i) = (x^p)^i
  {
    RingElem x = RingElem::gen(R);
    RingElem xp = x.pow(p);
    RingElem acc = RingElem::one(R);
    for (int i = 0; i < d; ++i) {
      R.frob[i] = acc.coeffs();
      acc *= xp;
    }
    // f(x^p) = 0 guarantees sigma is a ring automorphism
    RingElem val = xp.pow(d);
    for (int i = 0; i < d; ++i) {
      std::array<i64, kMaxDeg> ci{};
      ci[0] = R.f[i];
      val += RingElem(&R, ci) * xp.pow(i);
    }
    if (!val.is_zero()) throw std::logic_error("make_ring: sigma not well defined");
    // verify f | x^{p^d - 1} - 1 in (Z/p^m)[x]: the ring invariant
    if (x.pow(q - 1) != RingElem::one(R))
      throw std::logic_error("make_ring: f is not a Teichmueller factor");
    RingElem s = x;
    for (int i = 0; i < d; ++i) s = s.frobenius();
    if (s != x) throw std::logic_error("make_ring: sigma^d != id");
  }
  return R;
}

}  // namespace stratalab
