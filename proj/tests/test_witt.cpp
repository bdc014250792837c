#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stratalab/witt.hpp"

#include <vector>

using namespace stratalab;

namespace {

// deterministic PRNG for sampled properties
struct Lcg {
  std::uint64_t s = 0x9e3779b97f4a7c15ull;
  std::uint64_t next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return s >> 16;
  }
  i64 below(i64 n) { return i64(next() % std::uint64_t(n)); }
};

RingElem random_elem(const RingCtx& R, Lcg& rng) {
  std::array<i64, kMaxDeg> c{};
  for (int i = 0; i < R.d; ++i) c[i] = rng.below(R.pm);
  return RingElem(&R, c);
}

// independent polynomial division oracle over Z/mod, low-degree-first coeffs
bool divides_oracle(std::vector<i64> divisor, std::vector<i64> dividend, i64 mod) {
  while (!dividend.empty() && dividend.back() % mod == 0) dividend.pop_back();
  int dd = int(divisor.size()) - 1;
  while (int(dividend.size()) - 1 >= dd) {
    i64 c = dividend.back() % mod;
    int k = int(dividend.size()) - 1 - dd;
    for (int i = 0; i <= dd; ++i) {
      dividend[k + i] = ((dividend[k + i] - c * divisor[i]) % mod + mod) % mod;
    }
    while (!dividend.empty() && dividend.back() == 0) dividend.pop_back();
    if (int(dividend.size()) - 1 >= dd && dividend.back() % mod == 0) dividend.pop_back();
  }
  return dividend.empty();
}

std::vector<i64> xn_minus_1(int n, i64 mod) {
  std::vector<i64> g(n + 1, 0);
  g[0] = mod - 1;
  g[n] = 1;
  return g;
}

// oracle irreducibility over F_p by trial division against every lower-degree monic
bool irreducible_oracle(const std::vector<i64>& f, i64 p) {
  int d = int(f.size()) - 1;
  for (int e = 1; e <= d / 2; ++e) {
    std::vector<i64> c(e + 1, 0);
    c[e] = 1;
    i64 total = pow_i64(p, e);
    for (i64 t = 0; t < total; ++t) {
      i64 v = t;
      for (int i = 0; i < e; ++i) { c[i] = v % p; v /= p; }
      if (divides_oracle(c, f, p)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("make_ring degree 1 is plain Z/p^m with f = x - 1") {
  RingCtx R = make_ring(3, 1, 2);
  CHECK(R.pm == 9);
  CHECK(R.f[0] == 8);  // x + 8 = x - 1 mod 9
  RingElem a = RingElem::from_int(R, 5), b = RingElem::from_int(R, 7);
  CHECK((a * b).coeff(0) == 35 % 9);
  CHECK(frobenius(a) == a);
}

TEST_CASE("make_ring(3,2,3): f = x^2 + 1 exactly, verified against x^8 - 1 mod 27") {
  RingCtx R = make_ring(3, 2, 3);
  CHECK(R.f[0] == 1);
  CHECK(R.f[1] == 0);
  // oracle: (x^2 + 1) | x^8 - 1 in (Z/27)[x], irreducible mod 3
  CHECK(divides_oracle({1, 0, 1}, xn_minus_1(8, 27), 27));
  CHECK(irreducible_oracle({1, 0, 1}, 3));
}

TEST_CASE("make_ring(3,4,2): lex-least Hensel-lifted quartic factor of x^80 - 1 mod 9") {
  RingCtx R = make_ring(3, 4, 2);
  std::vector<i64> f = {R.f[0], R.f[1], R.f[2], R.f[3], 1};
  CHECK(divides_oracle(f, xn_minus_1(80, 9), 9));
  std::vector<i64> fbar(5);
  for (int i = 0; i < 5; ++i) fbar[i] = f[i] % 3;
  CHECK(irreducible_oracle(fbar, 3));
  // every lex-smaller monic quartic over F_3 is reducible
  bool minimal = true;
  for (i64 c0 = 0; c0 <= fbar[0] && minimal; ++c0) {
    i64 c1max = (c0 == fbar[0]) ? fbar[1] : 2;
    for (i64 c1 = 0; c1 <= c1max && minimal; ++c1) {
      i64 c2max = (c0 == fbar[0] && c1 == fbar[1]) ? fbar[2] : 2;
      for (i64 c2 = 0; c2 <= c2max && minimal; ++c2) {
        i64 c3max = (c0 == fbar[0] && c1 == fbar[1] && c2 == fbar[2]) ? fbar[3] : 2;
        for (i64 c3 = 0; c3 <= c3max; ++c3) {
          if (c0 == fbar[0] && c1 == fbar[1] && c2 == fbar[2] && c3 == fbar[3]) break;
          if (irreducible_oracle({c0, c1, c2, c3, 1}, 3)) { minimal = false; break; }
        }
      }
    }
  }
  CHECK(minimal);
}

TEST_CASE("make_ring rejects bad parameters") {
  CHECK_THROWS_AS(make_ring(2, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_ring(9, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_ring(15, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_ring(3, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_ring(3, 2, 0), std::invalid_argument);
}

TEST_CASE("frobenius on W(F_9)/27: a + b x -> a - b x") {
  RingCtx R = make_ring(3, 2, 3);
  // oracle: x^3 mod (x^2 + 1) = -x
  RingElem x = RingElem::gen(R);
  CHECK(x.pow(3) == -x);
  Lcg rng;
  for (int t = 0; t < 50; ++t) {
    RingElem e = random_elem(R, rng);
    RingElem expect(&R, {e.coeff(0), (R.pm - e.coeff(1)) % R.pm, 0, 0});
    CHECK(frobenius(e) == expect);
  }
}

TEST_CASE("frobenius has order d at d = 4") {
  RingCtx R = make_ring(3, 4, 2);
  Lcg rng;
  for (int t = 0; t < 100; ++t) {
    RingElem e = random_elem(R, rng);
    CHECK(e.frobenius(4) == e);
  }
}

TEST_CASE("frobenius is a ring automorphism (exhaustive at p=3, d=2, m=2)") {
  RingCtx R = make_ring(3, 2, 2);
  std::vector<RingElem> all;
  for (i64 a = 0; a < 9; ++a)
    for (i64 b = 0; b < 9; ++b) all.push_back(RingElem(&R, {a, b, 0, 0}));
  for (const auto& e1 : all)
    for (const auto& e2 : all) {
      REQUIRE(frobenius(e1 * e2) == frobenius(e1) * frobenius(e2));
      REQUIRE(frobenius(e1 + e2) == frobenius(e1) + frobenius(e2));
    }
}

TEST_CASE("frobenius fixes exactly the subring generated by 1 (exhaustive)") {
  RingCtx R = make_ring(3, 2, 2);
  int fixed = 0;
  for (i64 a = 0; a < 9; ++a)
    for (i64 b = 0; b < 9; ++b) {
      RingElem e(&R, {a, b, 0, 0});
      bool is_fixed = frobenius(e) == e;
      bool rational = (b == 0);
      REQUIRE(is_fixed == rational);
      if (is_fixed) ++fixed;
    }
  CHECK(fixed == 9);
}

TEST_CASE("valuation") {
  RingCtx R = make_ring(3, 2, 3);
  CHECK(valuation(RingElem::zero(R)) == 3);
  CHECK(valuation(RingElem::from_int(R, 3)) == 1);
  CHECK(valuation(RingElem::from_int(R, 1)) == 0);
  // 3x + 3 = 3 (x + 1), x + 1 a unit
  RingElem e(&R, {3, 3, 0, 0});
  CHECK(valuation(e) == 1);
  SUBCASE("valuation of products, exhaustive at m = 2") {
    RingCtx S = make_ring(3, 2, 2);
    for (i64 a = 0; a < 9; ++a)
      for (i64 b = 0; b < 9; ++b)
        for (i64 c = 0; c < 9; ++c)
          for (i64 d = 0; d < 9; ++d) {
            RingElem e1(&S, {a, b, 0, 0}), e2(&S, {c, d, 0, 0});
            int lhs = valuation(e1 * e2);
            int rhs = std::min(valuation(e1) + valuation(e2), S.m);
            REQUIRE(lhs == rhs);
          }
  }
}

TEST_CASE("reduction mod p is a ring homomorphism intertwining frobenius") {
  RingCtx R = make_ring(3, 2, 3);
  Lcg rng;
  for (int t = 0; t < 100; ++t) {
    RingElem a = random_elem(R, rng), b = random_elem(R, rng);
    CHECK((a * b).mod_p(1) == (a.mod_p(1) * b.mod_p(1)).mod_p(1));
    CHECK((a + b).mod_p(1) == (a.mod_p(1) + b.mod_p(1)).mod_p(1));
    CHECK(frobenius(a).mod_p(1) == a.mod_p(1).pow(3).mod_p(1));
  }
}

TEST_CASE("teichmuller lifts") {
  SUBCASE("teichmuller(1) = 1") {
    RingCtx R = make_ring(3, 2, 3);
    CHECK(teichmuller(RingElem::one(R)) == RingElem::one(R));
  }
  SUBCASE("p=3, d=1, m=2: teichmuller(2) = 8 mod 9") {
    RingCtx R = make_ring(3, 1, 2);
    CHECK(teichmuller(RingElem::from_int(R, 2)) == RingElem::from_int(R, 8));
  }
  SUBCASE("rejects zero residue") {
    RingCtx R = make_ring(3, 2, 2);
    CHECK_THROWS_AS(teichmuller(RingElem::from_int(R, 3)), std::invalid_argument);
  }
  SUBCASE("teichmuller(g)^8 = 1 at p=3, d=2, m=2, and multiplicativity") {
    RingCtx R = make_ring(3, 2, 2);
    // x has order 8 iff it generates F_9^x; otherwise pick x + 1
    RingElem g = RingElem::gen(R);
    bool gen_ok = true;
    for (int k : {1, 2, 4}) {
      if (g.pow(k).mod_p(1) == RingElem::one(R).mod_p(1)) gen_ok = false;
    }
    if (!gen_ok) g = g + RingElem::one(R);
    RingElem t = teichmuller(g);
    CHECK(t.pow(8) == RingElem::one(R));
    CHECK(t.pow(4) != RingElem::one(R));
    Lcg rng;
    for (int i = 0; i < 30; ++i) {
      RingElem a = random_elem(R, rng), b = random_elem(R, rng);
      if (a.valuation() > 0 || b.valuation() > 0) continue;
      CHECK(teichmuller(a * b) == teichmuller(a) * teichmuller(b));
    }
  }
}

TEST_CASE("unit inverse") {
  RingCtx R = make_ring(5, 2, 4);
  Lcg rng;
  int done = 0;
  while (done < 40) {
    RingElem e = random_elem(R, rng);
    if (!e.is_unit()) continue;
    CHECK(e * e.inv() == RingElem::one(R));
    ++done;
  }
  CHECK_THROWS_AS(RingElem::from_int(R, 5).inv(), precision_error);
}

TEST_CASE("rings at p = 5 construct and verify") {
  for (int d : {1, 2, 4}) {
    RingCtx R = make_ring(5, d, 3);
    RingElem x = RingElem::gen(R);
    CHECK(x.pow(pow_i64(5, d) - 1) == RingElem::one(R));
  }
}
