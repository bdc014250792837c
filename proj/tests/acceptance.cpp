// Acceptance suite: the ten primary criteria, one pass/fail line each.
// Exit status is nonzero iff any criterion fails.

#include "stratalab/report.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace stratalab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

long long ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// shared censuses at p = 3, radius 1
struct Shared {
  std::unique_ptr<RingCtx> ring1, ring2, ring4;
  std::unique_ptr<QuatModel> quat1, quat2;
  std::vector<Lattice> census1, census2;

  Shared() {
    ring1 = std::make_unique<RingCtx>(make_ring(3, 1, 6));
    ring2 = std::make_unique<RingCtx>(make_ring(3, 2, 6));
    ring4 = std::make_unique<RingCtx>(make_ring(3, 4, 6));
    quat1 = std::make_unique<QuatModel>(*ring1);
    quat2 = std::make_unique<QuatModel>(*ring2);
    census1 = enumerate_ball_points(
        quat1->sp4, 1, 5, [&](const Lattice& D) { return is_quat_point(*quat1, D); }, 2);
    census2 = enumerate_ball_points(
        quat2->sp4, 1, 5, [&](const Lattice& D) { return is_quat_point(*quat2, D); }, 2);
  }
};

Outcome criterion_tables() {
  Outcome out;
  auto t0 = std::chrono::steady_clock::now();
  auto fmt = [](const std::vector<EoRow>& rows) {
    std::string s;
    for (const auto& r : rows)
      s += set_string(r.sigma) + "|" + r.w_name + "|" + set_string(r.complement) + "|" +
           set_string(r.supp) + ";";
    return s;
  };
  std::string quat = fmt(eo_table(DynkinAction::quaternionic()));
  std::string param = fmt(eo_table(DynkinAction::paramodular()));
  const std::string quat_golden =
      "{1}|rho|{0,2}|{};"
      "{0,2}|s1*rho|{1}|{1};"
      "{0}|s1*s2*rho|{1,2}|{1,2};"
      "{2}|s1*s0*rho|{0,1}|{0,1};";
  const std::string param_golden =
      "{1}|rho|{0,2}|{};"
      "{0,2}|s1*rho|{1}|{1};";
  if (quat != quat_golden) out.fail("quaternionic table mismatch: " + quat);
  if (param != param_golden) out.fail("paramodular table mismatch: " + param);
  long long ms = ms_since(t0);
  if (ms >= 1000) out.fail("runtime " + std::to_string(ms) + " ms exceeds 1 s");
  out.note("4 + 2 rows in " + std::to_string(ms) + " ms");
  return out;
}

Outcome criterion_dl_partition() {
  Outcome out;
  struct Case {
    i64 p;
    int d;
  };
  for (Case c : {Case{3, 1}, Case{3, 2}, Case{5, 1}, Case{5, 2}, Case{3, 4}}) {
    RingCtx R = make_ring(c.p, c.d, 2);
    FqField F(R);
    FqSpace4 sp = FqSpace4::standard(F);
    StrataCounts sc = count_strata(sp);
    i64 q = pow_i64(c.p, c.d);
    std::string tag = "p=" + std::to_string(c.p) + ",d=" + std::to_string(c.d);
    if (sc.total() != q * q * q + q * q + q + 1)
      out.fail(tag + ": partition does not cover all dim-3 subspaces");
    long long mismatch = 0, surface = 0;
    enumerate_subspaces(F, 1, 0, [&](const FqSubspace& U) {
      bool surf = surface_member(F, U.rows[0]);
      bool plus = classify_point_plus(sp, U) != StratumLabel::NotInY;
      bool direct = plus_member_direct(sp, U);
      if (surf != plus || surf != direct) ++mismatch;
      if (surf) ++surface;
    });
    if (mismatch) out.fail(tag + ": surface identity fails at " + std::to_string(mismatch) + " points");
    if (surface != sc.members()) out.fail(tag + ": Y+ and Y- cardinalities differ");
    if (c.d == 1 && (sc.xbw1 || sc.xbw2)) out.fail(tag + ": non-XP1 member over F_p");
    if (c.d == 2 && sc.xbw2) out.fail(tag + ": XBw2 member over F_{p^2}");
    out.note(tag + ": " + std::to_string(sc.xp1) + "/" + std::to_string(sc.xbw1) + "/" +
             std::to_string(sc.xbw2));
  }
  return out;
}

Outcome criterion_components() {
  Outcome out;
  for (i64 p : {3, 5}) {
    RingCtx R = make_ring(p, 1, 2);
    FqField F(R);
    FqSpace4 sp = FqSpace4::standard(F);
    auto comps = components_w1(sp);
    i64 expect = (p + 1) * (p * p + 1);
    if (i64(comps.size()) != expect)
      out.fail("p=" + std::to_string(p) + ": plane count " + std::to_string(comps.size()) +
               " != " + std::to_string(expect));
    for (const auto& comp : comps) {
      if (i64(comp.lines.size()) != p + 1) {
        out.fail("p=" + std::to_string(p) + ": a plane without p+1 rational lines");
        break;
      }
    }
    out.note("p=" + std::to_string(p) + ": " + std::to_string(comps.size()) + " planes");
  }
  return out;
}

Outcome criterion_crucial(const Shared& sh) {
  Outcome out;
  auto run = [&](const QuatModel& m, const std::vector<Lattice>& census, const std::string& tag) {
    long long bad = 0;
    for (const auto& D : census) {
      CrucialResult cr = crucial_lattice(m, D);
      if (!cr.findings.empty()) ++bad;
      int want = cr.kind == CrucialCase::stable ? 1
                 : cr.kind == CrucialCase::sum  ? 0
                                                : 2;
      auto got = classify_vertex(cr.L);
      if (!got || *got != want) ++bad;
      if (apply_semilinear(m.tau, cr.L) != cr.L) ++bad;
    }
    if (bad) out.fail(tag + ": " + std::to_string(bad) + " failures");
    out.note(tag + ": " + std::to_string(census.size()) + " points");
  };
  run(*sh.quat1, sh.census1, "d=1");
  run(*sh.quat2, sh.census2, "d=2");
  return out;
}

Outcome criterion_pappas(const Shared& sh) {
  Outcome out;
  auto run = [&](const QuatModel& m, const std::vector<Lattice>& census, const std::string& tag) {
    int maxd = 0;
    for (const auto& D : census) maxd = std::max(maxd, pappas_defect(m, D));
    if (maxd > 1) out.fail(tag + ": defect " + std::to_string(maxd));
    out.note(tag + ": max defect " + std::to_string(maxd));
  };
  run(*sh.quat1, sh.census1, "d=1");
  run(*sh.quat2, sh.census2, "d=2");
  return out;
}

Outcome criterion_equivalence(const Shared& sh) {
  Outcome out;
  // d = 1: the whole radius-1 window, every colength
  {
    std::atomic<long long> bad{0}, total{0};
    enumerate_sublattice_reps(
        sh.quat1->sp4, 2, -1,
        [&](const Mat& C) {
          Lattice D = Lattice::from_canonical(sh.quat1->sp4, C, -1);
          total.fetch_add(1, std::memory_order_relaxed);
          if (is_quat_point(*sh.quat1, D) != full_module_check(*sh.quat1, D))
            bad.fetch_add(1, std::memory_order_relaxed);
        },
        2);
    if (bad.load()) out.fail("d=1: " + std::to_string(bad.load()) + " discrepancies");
    out.note("d=1: " + std::to_string(total.load()) + " lattices");
  }
  // d = 2: the determinant slice exhaustively.  Off the slice both sides are
  // false by their shared colength-2 condition (valuation of det must be 1);
  // deterministic samples of every other slice confirm it.
  {
    std::atomic<long long> bad{0}, total{0};
    enumerate_sublattice_reps(
        sh.quat2->sp4, 2, 5,
        [&](const Mat& C) {
          Lattice D = Lattice::from_canonical(sh.quat2->sp4, C, -1);
          total.fetch_add(1, std::memory_order_relaxed);
          if (is_quat_point(*sh.quat2, D) != full_module_check(*sh.quat2, D))
            bad.fetch_add(1, std::memory_order_relaxed);
        },
        2);
    if (bad.load()) out.fail("d=2 slice: " + std::to_string(bad.load()) + " discrepancies");
    out.note("d=2 slice: " + std::to_string(total.load()) + " lattices");
    long long off_bad = 0, off_total = 0;
    for (int colen = 0; colen <= 8; ++colen) {
      if (colen == 5) continue;
      long long budget = 2000, used = 0;
      std::atomic<bool> stop{false};
      enumerate_sublattice_reps(
          sh.quat2->sp4, 2, colen,
          [&](const Mat& C) {
            if (used++ >= budget) {
              stop.store(true, std::memory_order_relaxed);
              return;
            }
            Lattice D = Lattice::from_canonical(sh.quat2->sp4, C, -1);
            ++off_total;
            bool a = is_quat_point(*sh.quat2, D), b = full_module_check(*sh.quat2, D);
            if (a || b) ++off_bad;  // both must be false off the slice
          },
          1, &stop);
    }
    if (off_bad) out.fail("d=2 off-slice: " + std::to_string(off_bad) + " unexpected points");
    out.note("d=2 off-slice samples: " + std::to_string(off_total));
  }
  return out;
}

Outcome criterion_bijections(const Shared& sh) {
  Outcome out;
  struct Expect {
    const RingCtx* R;
    long long points;  // -1: take the DL member count
  };
  for (Expect e : {Expect{sh.ring1.get(), 40}, Expect{sh.ring2.get(), 280},
                   Expect{sh.ring4.get(), -1}}) {
    QuatModel m(*e.R);
    FqField F(*e.R);
    std::string tag = "quat d=" + std::to_string(e.R->d);
    VertexLattice L0 = make_vertex(Lattice::standard(m.sp4));
    VertexLattice L2 = make_vertex(apply_semilinear(m.pi4, L0.lat));
    BijectionReport b0 = bijection_report_L0(m, F, L0, 2);
    BijectionReport b2 = bijection_report_L2(m, F, L2, 2);
    if (!b0.passed()) out.fail(tag + " L0: " + b0.findings.front());
    if (!b2.passed()) out.fail(tag + " L2: " + b2.findings.front());
    long long want = e.points;
    if (want < 0) {
      StrataCounts sc = count_strata(FqSpace4::standard(F));
      want = sc.members();
      if (!(b0.xp1 > 0 && b0.xbw1 > 0 && b0.xbw2 > 0))
        out.fail(tag + ": not all three strata occur");
    }
    if (b0.stratum_points != want || b2.stratum_points != want)
      out.fail(tag + ": stratum cardinality " + std::to_string(b0.stratum_points) +
               " != " + std::to_string(want));
    out.note(tag + ": " + std::to_string(b0.stratum_points) + " points");
  }
  for (int d : {2, 4}) {
    const RingCtx& R = d == 2 ? *sh.ring2 : *sh.ring4;
    ParamModel m(R);
    FqField F(R);
    std::string tag = "param d=" + std::to_string(d);
    VertexLattice L0 = make_vertex(Lattice::standard(m.sp));
    VertexLattice L2 = make_vertex(apply_semilinear(m.Pi, L0.lat));
    ParamBijectionReport pb = param_bijection_report(m, F, L0, L2);
    if (!pb.passed()) out.fail(tag + ": " + pb.findings.front());
    long long want = pow_i64(3, d) + 1;
    if (pb.points != want)
      out.fail(tag + ": " + std::to_string(pb.points) + " points != " + std::to_string(want));
    if (pb.superspecial != 10)
      out.fail(tag + ": " + std::to_string(pb.superspecial) + " superspecial != 10");
    out.note(tag + ": " + std::to_string(pb.points) + "/" + std::to_string(pb.superspecial));
  }
  return out;
}

Outcome criterion_intersections(const Shared& sh) {
  Outcome out;
  {
    FqField F1(*sh.ring1);
    IntersectionReport r1 = intersection_checks(*sh.quat1, F1, sh.census1);
    if (!r1.passed()) out.fail("quat d=1: " + r1.findings.front());
    out.note("d=1 pairs 00/22/02: " + std::to_string(r1.pairs00_shared) + "/" +
             std::to_string(r1.pairs22_shared) + "/" + std::to_string(r1.pairs02));
  }
  {
    FqField F2(*sh.ring2);
    IntersectionReport r2 = intersection_checks(*sh.quat2, F2, sh.census2);
    if (!r2.passed()) out.fail("quat d=2: " + r2.findings.front());
    out.note("d=2 pairs 00/22/02: " + std::to_string(r2.pairs00_shared) + "/" +
             std::to_string(r2.pairs22_shared) + "/" + std::to_string(r2.pairs02));
  }
  {
    ParamModel m(*sh.ring2);
    FqField F(*sh.ring2);
    auto census = enumerate_ball_points(
        m.sp, 1, 5, [&](const Lattice& M) { return is_param_point(m, M); }, 2);
    ParamIntersectionReport r = param_intersection_checks(m, F, census);
    if (!r.passed()) out.fail("param d=2: " + r.findings.front());
    out.note("param census " + std::to_string(r.census_points) + ", shared pairs " +
             std::to_string(r.shared_pairs));
  }
  return out;
}

Outcome criterion_building() {
  Outcome out;
  for (i64 p : {3, 5}) {
    RingCtx R = make_ring(p, 1, 6);
    SympSpace sp = SympSpace::standard(R, 4);
    Building bld(sp, 1);
    std::string tag = "p=" + std::to_string(p);
    Mat m1(R, 4, 4);
    for (int i = 0; i < 4; ++i) m1(i, i) = RingElem::one(R).mul_p(i == 3 ? 1 : 0);
    VertexLattice v1 = make_vertex(Lattice(sp, m1));
    auto n0 = neighbors(bld, v1, 0);
    auto n2 = neighbors(bld, v1, 2);
    if (i64(n0.size()) != p + 1 || i64(n2.size()) != p + 1)
      out.fail(tag + ": neighbor counts " + std::to_string(n0.size()) + "/" +
               std::to_string(n2.size()));
    out.note(tag + ": " + std::to_string(n0.size()) + "+" + std::to_string(n2.size()));
  }
  // every type-1 vertex of the radius-1 ball at p = 3 has both witnesses
  {
    RingCtx R = make_ring(3, 1, 6);
    SympSpace sp = SympSpace::standard(R, 4);
    Building bld(sp, 1);
    VertexLattice v0 = make_vertex(Lattice::standard(sp));
    BuildingGraph g = enumerate_ball(bld, v0, 1);
    long long checked = 0, bad = 0;
    for (const auto& v : g.nodes) {
      if (v.vtype != 1) continue;
      ++checked;
      bool has0 = false, has2 = false;
      for (const auto& w : neighbors(bld, v, 0))
        if (w.lat.contains(v.lat)) has0 = true;
      for (const auto& w : neighbors(bld, v, 2))
        if (v.lat.contains(w.lat)) has2 = true;
      if (!has0 || !has2) ++bad;
    }
    if (bad) out.fail("witness failures: " + std::to_string(bad));
    out.note("type-1 vertices with witnesses: " + std::to_string(checked));
  }
  return out;
}

Outcome criterion_weyl_internal() {
  Outcome out;
  auto t0 = std::chrono::steady_clock::now();
  auto s = simple_reflections();
  auto pw = [&](const AffineWeylElem& w, int k) {
    AffineWeylElem r;
    for (int i = 0; i < k; ++i) r = compose(r, w);
    return r;
  };
  if (pw(compose(s[0], s[1]), 4) != weyl_identity() ||
      pw(compose(s[1], s[2]), 4) != weyl_identity() ||
      pw(compose(s[0], s[2]), 2) != weyl_identity())
    out.fail("braid relations");
  if (length(translation2(1, 1)) != 3) out.fail("length of the mu-translation");
  auto adm = adm_set();
  if (adm != adm_set_by_subwords()) out.fail("admissible enumeration strategies disagree");
  AffineWeylElem rho = rho_element();
  std::set<AffineWeylElem> admset(adm.begin(), adm.end());
  long long closure_bad = 0;
  for (const auto& w : adm)
    for (const auto& va : wa_ball(3)) {
      AffineWeylElem v = compose(va, rho);
      if (bruhat_leq(v, w) && !admset.count(v)) ++closure_bad;
    }
  if (closure_bad) out.fail("Adm not downward closed");
  std::set<AffineWeylElem> maxima;
  for (const auto& w : adm) {
    bool maximal = true;
    for (const auto& v : adm)
      if (v != w && bruhat_leq(w, v)) maximal = false;
    if (maximal) maxima.insert(w);
  }
  auto expected_maxima = adm_maximal_elements();
  if (maxima.size() != 4) out.fail("Adm maxima count " + std::to_string(maxima.size()));
  for (const auto& t : expected_maxima)
    if (!maxima.count(t)) out.fail("a mu-translate is not maximal");
  long long coset_bad = 0;
  for (std::set<int> K : {std::set<int>{0, 2}, std::set<int>{0, 1}, std::set<int>{1}}) {
    auto wk = parabolic_subgroup(K);
    for (const auto& wa : wa_ball(4))
      for (int flag = 0; flag < 2; ++flag) {
        AffineWeylElem w = flag ? compose(wa, rho) : wa;
        int best = length(w);
        for (const auto& a : wk) best = std::min(best, length(compose(a, w)));
        if (is_min_coset_rep(w, K) != (best == length(w))) ++coset_bad;
      }
  }
  if (coset_bad) out.fail("coset-minimum predicate disagrees with brute force");
  long long ms = ms_since(t0);
  if (ms >= 10000) out.fail("runtime " + std::to_string(ms) + " ms exceeds 10 s");
  out.note("|Adm| = " + std::to_string(adm.size()) + " in " + std::to_string(ms) + " ms");
  return out;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  auto t_all = std::chrono::steady_clock::now();
  std::printf("building shared censuses (p = 3, radius 1, d = 1 and 2)...\n");
  Shared sh;
  std::printf("censuses ready: %zu and %zu points, %lld ms\n\n", sh.census1.size(),
              sh.census2.size(), ms_since(t_all));

  criteria.emplace_back("sigma-Coxeter golden tables", criterion_tables);
  criteria.emplace_back("DL partition and surface identity", criterion_dl_partition);
  criteria.emplace_back("component count", criterion_components);
  criteria.emplace_back("crucial-lemma soundness", [&] { return criterion_crucial(sh); });
  criteria.emplace_back("Pappas bound", [&] { return criterion_pappas(sh); });
  criteria.emplace_back("description equivalence", [&] { return criterion_equivalence(sh); });
  criteria.emplace_back("bijection oracles", [&] { return criterion_bijections(sh); });
  criteria.emplace_back("intersection combinatorics",
                        [&] { return criterion_intersections(sh); });
  criteria.emplace_back("building counts", criterion_building);
  criteria.emplace_back("Weyl-group internal consistency", criterion_weyl_internal);

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = criteria[i].second();
    if (!o.pass) ++failures;
    std::printf("criterion %2zu [%s] %s (%s) [%lld ms]\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), ms_since(t0));
  }
  std::printf("\n%d of %zu criteria failed, total %lld ms\n", failures, criteria.size(),
              ms_since(t_all));
  return failures == 0 ? 0 : 1;
}
