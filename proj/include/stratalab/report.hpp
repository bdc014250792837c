#pragma once
// Suite driver and machine-readable reporting: each verification suite
// produces a list of named checks with expected/actual values and witnesses;
// reports serialize deterministically (timing is opt-in so that byte-identical
// reports across runs and worker counts are the default).

#include "stratalab/building.hpp"
#include "stratalab/dl.hpp"
#include "stratalab/rz.hpp"
#include "stratalab/weyl.hpp"

#include "json.hpp"

#include <chrono>
#include <sstream>

namespace stratalab {

struct SuiteConfig {
  std::string suite = "all";
  i64 p = 3;
  int d = 1;
  int radius = 1;
  int precision = 0;  // 0 means the derived default 2 * radius + 4
  int threads = 0;
  bool timing = false;

  int effective_precision() const { return precision > 0 ? precision : 2 * radius + 4; }

  void validate() const {
    if (p != 3 && p != 5)
      throw std::invalid_argument("config: p must be 3 or 5");
    if (d != 1 && d != 2 && d != 4)
      throw std::invalid_argument("config: degree must be 1, 2 or 4");
    if (radius < 0 || radius > 2)
      throw std::invalid_argument("config: radius must be at most 2");
    if (precision < 0 || (precision > 0 && precision < 2 * radius + 2))
      throw std::invalid_argument("config: precision too small for this radius");
    static const char* suites[] = {"dl-partition", "dl-components", "building-ball",
                                   "rz-quaternionic", "rz-paramodular", "weyl-eo", "all"};
    bool known = false;
    for (const char* s : suites)
      if (suite == s) known = true;
    if (!known) throw std::invalid_argument("config: unknown suite " + suite);
  }
};

struct CheckResult {
  std::string name;
  std::string status;  // pass | fail | skipped
  std::string expected;
  std::string actual;
  std::string witness;
  long long elapsed_ms = 0;
};

class Checker {
 public:
  explicit Checker(std::string prefix = "") : prefix_(std::move(prefix)) { tick(); }

  template <typename A, typename B>
  void equals(const std::string& name, const A& expected, const B& actual,
              const std::string& witness = "") {
    std::ostringstream e, a;
    e << expected;
    a << actual;
    push(name, e.str() == a.str(), e.str(), a.str(), witness);
  }

  void require(const std::string& name, bool ok, const std::string& witness = "") {
    push(name, ok, "true", ok ? "true" : "false", witness);
  }

  // findings lists: pass iff empty; the first finding becomes the witness
  void findings(const std::string& name, std::vector<std::string> fs) {
    std::sort(fs.begin(), fs.end());
    push(name, fs.empty(), "no findings", std::to_string(fs.size()) + " findings",
         fs.empty() ? "" : fs.front());
  }

  void skipped(const std::string& name, const std::string& reason) {
    CheckResult r;
    r.name = prefix_ + name;
    r.status = "skipped";
    r.expected = "";
    r.actual = "";
    r.witness = reason;
    r.elapsed_ms = elapsed();
    out_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  void push(const std::string& name, bool ok, std::string expected, std::string actual,
            std::string witness) {
    CheckResult r;
    r.name = prefix_ + name;
    r.status = ok ? "pass" : "fail";
    r.expected = std::move(expected);
    r.actual = std::move(actual);
    r.witness = std::move(witness);
    r.elapsed_ms = elapsed();
    out_.push_back(std::move(r));
  }

  long long elapsed() {
    auto now = std::chrono::steady_clock::now();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - mark_).count();
    tick();
    return static_cast<long long>(ms);
  }
  void tick() { mark_ = std::chrono::steady_clock::now(); }

  std::string prefix_;
  std::vector<CheckResult> out_;
  std::chrono::steady_clock::time_point mark_;
};

struct SuiteReport {
  std::string suite;
  SuiteConfig cfg;
  std::vector<CheckResult> checks;

  long long count(const std::string& status) const {
    long long n = 0;
    for (const auto& c : checks)
      if (c.status == status) ++n;
    return n;
  }
  bool ok() const { return count("fail") == 0; }
};

// ---------------------------------------------------------------------------
// suites

inline void suite_weyl_eo(const SuiteConfig&, Checker& ck) {
  auto s = simple_reflections();
  AffineWeylElem rho = rho_element();
  auto pw = [&](const AffineWeylElem& w, int k) {
    AffineWeylElem r;
    for (int i = 0; i < k; ++i) r = compose(r, w);
    return r;
  };
  ck.require("braid relations",
             pw(compose(s[0], s[1]), 4) == weyl_identity() &&
                 pw(compose(s[1], s[2]), 4) == weyl_identity() &&
                 pw(compose(s[0], s[2]), 2) == weyl_identity());
  ck.equals("length of the mu-translation", 3, length(translation2(1, 1)));
  ck.equals("length of rho", 0, length(rho));
  auto adm = adm_set();
  auto adm2 = adm_set_by_subwords();
  ck.require("two admissible-set enumerations agree", adm == adm2);
  ck.equals("admissible set cardinality", std::size_t(13), adm.size());
  auto fmt_rows = [](const std::vector<EoRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
      out += "Sigma=" + set_string(r.sigma) + " w=" + r.w_name +
             " rest=" + set_string(r.complement) + " supp=" + set_string(r.supp) + "; ";
    }
    return out;
  };
  std::string quat = fmt_rows(eo_table(DynkinAction::quaternionic()));
  std::string param = fmt_rows(eo_table(DynkinAction::paramodular()));
  ck.equals("quaternionic table",
            std::string("Sigma={1} w=rho rest={0,2} supp={}; "
                        "Sigma={0,2} w=s1*rho rest={1} supp={1}; "
                        "Sigma={0} w=s1*s2*rho rest={1,2} supp={1,2}; "
                        "Sigma={2} w=s1*s0*rho rest={0,1} supp={0,1}; "),
            quat);
  ck.equals("paramodular table",
            std::string("Sigma={1} w=rho rest={0,2} supp={}; "
                        "Sigma={0,2} w=s1*rho rest={1} supp={1}; "),
            param);
  ck.equals("J-set sizes", std::string("4/2"),
            std::to_string(j_set({0, 2}, DynkinAction::quaternionic()).size()) + "/" +
                std::to_string(j_set({0, 2}, DynkinAction::paramodular()).size()));
}

inline void suite_dl_partition(const SuiteConfig& cfg, Checker& ck) {
  if (cfg.p == 5 && cfg.d == 4) {
    ck.skipped("partition", "p = 5, d = 4 is outside the enumeration envelope");
    return;
  }
  RingCtx R = make_ring(cfg.p, cfg.d, 2);
  FqField F(R);
  FqSpace4 sp = FqSpace4::standard(F);
  StrataCounts c = count_strata(sp);
  i64 q = pow_i64(cfg.p, cfg.d);
  ck.equals("every dim-3 subspace received exactly one label",
            q * q * q + q * q + q + 1, c.total());
  long long surface = 0, plus_members = 0, coherent = 0, lines = 0;
  enumerate_subspaces(F, 1, 0, [&](const FqSubspace& U) {
    ++lines;
    bool surf = surface_member(F, U.rows[0]);
    StratumLabel lp = classify_point_plus(sp, U);
    StratumLabel lm = classify_point_minus(sp, perp(sp, U));
    if (surf) ++surface;
    if (lp != StratumLabel::NotInY) ++plus_members;
    if ((lp == lm) && (surf == (lp != StratumLabel::NotInY)) &&
        (surf == plus_member_direct(sp, U)))
      ++coherent;
  });
  ck.equals("surface points equal Y+ members", surface, plus_members);
  ck.equals("plus/minus/surface routes agree pointwise", lines, coherent);
  ck.equals("Y- members equal Y+ members", c.members(), plus_members);
  if (cfg.d == 1) {
    ck.equals("over F_p every member is XP1", c.members(), c.xp1);
    ck.equals("no XBw1 over F_p", 0ll, c.xbw1);
  }
  if (cfg.d <= 2) ck.equals("no XBw2 below F_{p^4}", 0ll, c.xbw2);
  if (cfg.d == 4) {
    ck.require("all three strata occur", c.xp1 > 0 && c.xbw1 > 0 && c.xbw2 > 0);
  }
  ck.equals("XP1 equals the rational hyperplane count",
            cfg.p * cfg.p * cfg.p + cfg.p * cfg.p + cfg.p + 1, c.xp1);
}

inline void suite_dl_components(const SuiteConfig& cfg, Checker& ck) {
  RingCtx R = make_ring(cfg.p, 1, 2);
  FqField F(R);
  FqSpace4 sp = FqSpace4::standard(F);
  auto comps = components_w1(sp);
  ck.equals("isotropic plane count", (cfg.p + 1) * (cfg.p * cfg.p + 1),
            i64(comps.size()));
  bool lines_ok = true, perp_ok = true;
  for (const auto& c : comps) {
    if (i64(c.lines.size()) != cfg.p + 1) lines_ok = false;
    if (perp(sp, c.plane) != c.plane) perp_ok = false;
  }
  ck.require("each plane carries p+1 rational lines", lines_ok);
  ck.require("each plane is its own perp", perp_ok);
}

inline void suite_building_ball(const SuiteConfig& cfg, Checker& ck) {
  RingCtx R = make_ring(cfg.p, 1, cfg.effective_precision());
  SympSpace sp = SympSpace::standard(R, 4);
  Building bld(sp, 1);
  VertexLattice v0 = make_vertex(Lattice::standard(sp));
  Mat m1(R, 4, 4);
  for (int i = 0; i < 4; ++i)
    m1(i, i) = RingElem::one(R).mul_p(i == 3 ? 1 : 0);
  VertexLattice v1 = make_vertex(Lattice(sp, m1));
  auto n0 = neighbors(bld, v1, 0);
  auto n2 = neighbors(bld, v1, 2);
  ck.equals("type-1 vertex: type-0 neighbor count", cfg.p + 1, i64(n0.size()));
  ck.equals("type-1 vertex: type-2 neighbor count", cfg.p + 1, i64(n2.size()));
  bool contains_witness = false, inside_witness = false, types_ok = true;
  for (auto& w : n0) {
    if (w.lat.contains(v1.lat)) contains_witness = true;
    if (classify_vertex(w.lat) != 0) types_ok = false;
  }
  for (auto& w : n2) {
    if (v1.lat.contains(w.lat)) inside_witness = true;
    if (classify_vertex(w.lat) != 2) types_ok = false;
  }
  ck.require("a containing type-0 and a contained type-2 witness exist",
             contains_witness && inside_witness);
  ck.require("all neighbors classify as requested", types_ok);
  i64 links = (cfg.p + 1) * (cfg.p * cfg.p + 1);
  ck.equals("type-0 vertex: type-1 neighbor count", links,
            i64(neighbors(bld, v0, 1).size()));
  ck.equals("type-0 vertex: type-2 neighbor count", links,
            i64(neighbors(bld, v0, 2).size()));
  int r = std::min(cfg.radius, 1);
  BuildingGraph g = enumerate_ball(bld, v0, r);
  BuildingGraph g2 = enumerate_ball(bld, v0, r, true);
  if (r == 1)
    ck.equals("radius-1 ball size", 1 + 2 * links, i64(g.nodes.size()));
  bool same = g.nodes.size() == g2.nodes.size() && g.edges == g2.edges;
  for (size_t i = 0; same && i < g.nodes.size(); ++i)
    if (g.nodes[i].lat != g2.nodes[i].lat) same = false;
  ck.require("ball enumeration is traversal-order independent", same);
}

inline void suite_rz_quaternionic(const SuiteConfig& cfg, Checker& ck) {
  RingCtx R = make_ring(cfg.p, cfg.d, cfg.effective_precision());
  QuatModel model(R);
  FqField F(R);
  VertexLattice L0 = make_vertex(Lattice::standard(model.sp4));
  VertexLattice L2 = make_vertex(apply_semilinear(model.pi4, L0.lat));
  if (cfg.p == 5 && cfg.d == 4) {
    ck.skipped("quaternionic checks", "p = 5, d = 4 is outside the enumeration envelope");
    return;
  }
  // the global census is only enumerated at desk scale
  bool census_scale =
      (cfg.d == 1 && cfg.radius <= 2) || (cfg.p == 3 && cfg.d == 2 && cfg.radius <= 1);
  if (census_scale) {
    auto census = enumerate_ball_points(
        model.sp4, cfg.radius, 4 * cfg.radius + 1,
        [&](const Lattice& D) { return is_quat_point(model, D); }, cfg.threads);
    ck.equals("census is nonempty", true, !census.empty());
    int max_defect = 0;
    long long q1 = 0, q0 = 0, q2 = 0, q02 = 0;
    std::vector<std::string> findings;
    for (const auto& D : census) {
      max_defect = std::max(max_defect, pappas_defect(model, D));
      CrucialResult cr = crucial_lattice(model, D);
      for (auto& f : cr.findings) findings.push_back(f);
      QuatLabel lab = bt_label(model, D);
      for (auto& f : lab.findings) findings.push_back(f);
      switch (lab.kind) {
        case QuatKind::Q1: ++q1; break;
        case QuatKind::Q0: ++q0; break;
        case QuatKind::Q2: ++q2; break;
        default: ++q02;
      }
      int want = cr.kind == CrucialCase::stable ? 1
                 : cr.kind == CrucialCase::sum  ? 0
                                                : 2;
      auto got = classify_vertex(cr.L);
      if (!got || *got != want)
        findings.push_back("crucial case does not match vertex type at " + D.to_string());
    }
    ck.require("pappas defect never exceeds 1", max_defect <= 1,
               "max defect " + std::to_string(max_defect));
    ck.findings("crucial lemma soundness", findings);
    ck.equals("label partition covers the census", static_cast<long long>(census.size()),
              q1 + q0 + q2 + q02);
    ck.equals("Q1 labels are exactly the tau-stable points", q1, [&] {
      long long n = 0;
      for (const auto& D : census)
        if (apply_semilinear(model.tau, D) == D) ++n;
      return n;
    }());
    IntersectionReport ir = intersection_checks(model, F, census);
    ck.findings("stratum intersection combinatorics", ir.findings);
    ck.equals("type-1 strata counted", q1, ir.l1_strata);
    // description equivalence on the determinant slice
    std::vector<std::string> eqf;
    std::mutex mu;
    enumerate_sublattice_reps(
        model.sp4, 2 * cfg.radius, 4 * cfg.radius + 1,
        [&](const Mat& C) {
          Lattice D = Lattice::from_canonical(model.sp4, C, -cfg.radius);
          if (is_quat_point(model, D) != full_module_check(model, D)) {
            std::lock_guard<std::mutex> lock(mu);
            eqf.push_back("descriptions disagree at " + D.to_string());
          }
        },
        cfg.threads);
    ck.findings("height-8 and height-4 descriptions agree on the slice", eqf);
  } else {
    ck.skipped("census checks", "global census runs at p = 3, d <= 2 only");
  }
  BijectionReport b0 = bijection_report_L0(model, F, L0, cfg.threads);
  BijectionReport b2 = bijection_report_L2(model, F, L2, cfg.threads);
  ck.findings("type-0 bijection oracle", b0.findings);
  ck.findings("type-2 bijection oracle", b2.findings);
  ck.equals("type-0 and type-2 strata have equal stratum counts", b0.stratum_points,
            b2.stratum_points);
  StrataCounts sc = count_strata(FqSpace4::standard(F));
  ck.equals("stratum census equals the DL member count", sc.members(), b0.stratum_points);
  ck.equals("XP1 matches Q1", b0.q1, b0.xp1);
  ck.equals("XBw1 matches Q02", b0.q02, b0.xbw1);
  ck.equals("XBw2 matches the open label", b0.q_open, b0.xbw2);
}

inline void suite_rz_paramodular(const SuiteConfig& cfg, Checker& ck) {
  if (cfg.d % 2 != 0) {
    ck.skipped("paramodular checks", "the paramodular model needs an even degree");
    return;
  }
  int m = cfg.effective_precision();
  RingCtx R = make_ring(cfg.p, cfg.d, m);
  ParamModel model(R);
  FqField F(R);
  VertexLattice L0 = make_vertex(Lattice::standard(model.sp));
  VertexLattice L2 = make_vertex(apply_semilinear(model.Pi, L0.lat));
  ck.require("the canonical pair validates", pair_check(L0, L2, model.Pi));
  ParamBijectionReport pb = param_bijection_report(model, F, L0, L2);
  ck.findings("pair stratum bijection with the projective line", pb.findings);
  ck.equals("pair stratum cardinality", pow_i64(cfg.p, cfg.d) + 1, pb.points);
  ck.equals("superspecial points in the pair stratum", pow_i64(cfg.p, 2) + 1,
            pb.superspecial);
  if (cfg.p == 3 && cfg.d == 2) {
    RingCtx R2 = make_ring(cfg.p, 2, m);
    ParamModel m2(R2);
    FqField F2(R2);
    Lattice base = param_base_point(m2);
    ck.require("a tau2-stable base point exists", is_param_point(m2, base));
    ParamLabel lab = param_stratify(m2, base);
    ck.findings("base point stratification", lab.findings);
    auto census = enumerate_ball_points(
        m2.sp, 1, 5, [&](const Lattice& M) { return is_param_point(m2, M); },
        cfg.threads);
    ck.equals("census is nonempty", true, !census.empty());
    std::vector<std::string> findings;
    for (const auto& M : census) {
      ParamLabel l = param_stratify(m2, M);
      for (auto& f : l.findings) findings.push_back(f);
    }
    ck.findings("stratification of the census", findings);
    ParamIntersectionReport ir = param_intersection_checks(m2, F2, census);
    ck.findings("pair intersections", ir.findings);
  }
}

inline std::vector<CheckResult> run_checks(const SuiteConfig& cfg) {
  std::vector<CheckResult> out;
  auto add = [&](const char* name, auto&& fn) {
    if (cfg.suite != "all" && cfg.suite != name) return;
    Checker ck(std::string(name) + ": ");
    fn(cfg, ck);
    for (auto& c : ck.take()) out.push_back(std::move(c));
  };
  add("weyl-eo", suite_weyl_eo);
  add("dl-partition", suite_dl_partition);
  add("dl-components", suite_dl_components);
  add("building-ball", suite_building_ball);
  add("rz-quaternionic", suite_rz_quaternionic);
  add("rz-paramodular", suite_rz_paramodular);
  return out;
}

inline SuiteReport run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  rep.suite = cfg.suite;
  rep.cfg = cfg;
  rep.checks = run_checks(cfg);
  return rep;
}

// ---------------------------------------------------------------------------
// serialization

inline std::string emit_report(const SuiteReport& rep, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["params"] = {{"p", rep.cfg.p},
                   {"deg", rep.cfg.d},
                   {"radius", rep.cfg.radius},
                   {"precision", rep.cfg.effective_precision()}};
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks) {
      nlohmann::ordered_json jc;
      jc["name"] = c.name;
      jc["status"] = c.status;
      jc["expected"] = c.expected;
      jc["actual"] = c.actual;
      jc["witness"] = c.witness;
      if (rep.cfg.timing) jc["elapsed_ms"] = c.elapsed_ms;
      j["checks"].push_back(std::move(jc));
    }
    j["totals"] = {{"pass", rep.count("pass")},
                   {"fail", rep.count("fail")},
                   {"skipped", rep.count("skipped")}};
    return j.dump(2) + "\n";
  }
  if (format != "text") throw std::invalid_argument("emit_report: unknown format");
  std::ostringstream out;
  out << "suite " << rep.suite << " (p=" << rep.cfg.p << ", deg=" << rep.cfg.d
      << ", radius=" << rep.cfg.radius << ", precision=" << rep.cfg.effective_precision()
      << ")\n";
  for (const auto& c : rep.checks) {
    std::string tag = c.status == "pass" ? "PASS" : c.status == "fail" ? "FAIL" : "SKIP";
    out << "[" << tag << "] " << c.name;
    if (c.status == "fail")
      out << " (expected " << c.expected << ", got " << c.actual << ")";
    else if (!c.actual.empty())
      out << " = " << c.actual;
    if (!c.witness.empty()) out << "  [" << c.witness << "]";
    if (rep.cfg.timing) out << "  (" << c.elapsed_ms << " ms)";
    out << "\n";
  }
  out << rep.count("pass") << " passed, " << rep.count("fail") << " failed, "
      << rep.count("skipped") << " skipped\n";
  return out.str();
}

}  // namespace stratalab
