// Acceptance checks: one line of output per criterion, nonzero exit when any
// of them fails. Each criterion carries a wall-clock budget.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "tvlab/dimension.hpp"
#include "tvlab/multipoint.hpp"
#include "tvlab/pareto.hpp"
#include "tvlab/registry.hpp"
#include "tvlab/rng.hpp"
#include "tvlab/strata.hpp"
#include "tvlab/transversality.hpp"

using namespace tvlab;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

// criterion 1: classification over the full 201x201 parameter grid of the
// degenerate planar family matches the analytic case table exactly.
void criterion_1(Check& c) {
  const FamilyProblem p = make_family(find_problem("ex-2-2"));
  const Eigen::VectorXd x = vec1(0.0);
  int in_w = 0;
  for (int i = 0; i <= 200 && c.pass; ++i) {
    for (int j = 0; j <= 200; ++j) {
      Eigen::VectorXd a(2);
      a << (i - 100) * 0.01, (j - 100) * 0.01;
      const DefectReport rep = classify_family_point(p, x, a);
      PointClass expected;
      int expected_family;
      if (i == 100 && j == 100) {
        expected = PointClass::InW;
        expected_family = 2;
      } else if (std::abs(a(0)) == std::abs(a(1))) {
        expected = PointClass::InWTilde;
        expected_family = 1;
      } else {
        expected = PointClass::NotOnZ;
        expected_family = 0;
      }
      if (rep.classification != expected || rep.delta_family != expected_family) {
        c.require(false, "mismatch at a=(" + std::to_string(a(0)) + "," +
                             std::to_string(a(1)) + "): got " +
                             to_string(rep.classification) + " with family defect " +
                             std::to_string(rep.delta_family));
        break;
      }
      if (rep.classification == PointClass::InW) ++in_w;
    }
  }
  c.require(in_w == 1, "IN_W seen " + std::to_string(in_w) + " times, expected only the origin");
}

// criterion 2: the translation family's bad parameter cloud sits on the line
// a1 = a2, box-counts to dimension 1, and reports the strict exponent bound 1.
void criterion_2(Check& c) {
  const FamilyProblem p = make_family(find_problem("ex-2-3"));
  SigmaDimensionOptions opts;
  opts.sample.budget = 2000;
  opts.sample.seed = 2;
  opts.scales = ScaleSpec{8, 4.0, 256.0};
  const SigmaDimensionReport rep = sigma_dimension_report(p, opts);

  double worst = 0.0;
  for (const auto& a : rep.sample.points) worst = std::max(worst, std::abs(a(0) - a(1)));
  c.require(!rep.sample.points.empty(), "no bad parameters detected");
  c.require(worst <= 1e-3, "cloud strays " + std::to_string(worst) + " from a1 = a2");
  c.require(rep.estimate.has_value(), "not enough points for a dimension estimate");
  if (rep.estimate)
    c.require(std::abs(rep.estimate->dimension - 1.0) <= 0.1,
              "dimension " + std::to_string(rep.estimate->dimension));
  c.require(rep.threshold.num == 1 && rep.threshold.den == 1 && rep.threshold.strict,
            "threshold is not the strict bound 1");
}

// criterion 3: middle-thirds cloud box-counts to log2/log3 within 0.05.
void criterion_3(Check& c) {
  const BoxCountEstimate est = box_count(make_cloud(find_problem("cantor-depth-12")));
  const double target = std::log(2.0) / std::log(3.0);
  c.require(std::abs(est.dimension - target) <= 0.05,
            "dimension " + std::to_string(est.dimension) + " vs " + std::to_string(target));
}

// criterion 4: the cubic under linear perturbation is Morse for every sampled
// nonzero coefficient and degenerate exactly at zero.
void criterion_4(Check& c) {
  const ExprMap family = parse("[x1^3 + a1*x1]", 1, 1);
  const Box box = Box::cube(1, -1.5, 1.5);
  CriticalSearchOptions opts;
  opts.multistarts = 10;

  SubstreamRng rng(4, 0);
  int false_verdicts = 0;
  for (int t = 0; t < 1000; ++t) {
    const double a = rng.uniform(-1.0, 1.0);
    if (std::abs(a) <= 1e-6) continue;
    const MorseReport rep = morse_check(bind_parameters(family, vec1(a)), box, opts);
    if (rep.verdict != MorseVerdict::Morse) ++false_verdicts;
  }
  c.require(false_verdicts == 0, std::to_string(false_verdicts) + " false degenerate verdicts");

  const MorseReport zero = morse_check(bind_parameters(family, vec1(0.0)), box, opts);
  c.require(zero.verdict == MorseVerdict::Degenerate, "a = 0 not flagged degenerate");
  c.require(!zero.degenerate_witnesses.empty() &&
                std::abs(zero.degenerate_witnesses.front()(0)) <= 1e-6,
            "degenerate witness not at the origin");
}

// criterion 5: for the triple parabola, every detected non-immersion
// perturbation lies on the diagonal, whose witness is x = -a/2.
void criterion_5(Check& c) {
  const ExprMap family = parse("[x1^2 + a1*x1; x1^2 + a2*x1; x1^2 + a3*x1]", 1, 3);
  const Box box = Box::cube(1, -1.5, 1.5);
  ImmersionSearchOptions opts;
  opts.multistarts = 6;

  SubstreamRng rng(5, 0);
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd a(3);
    for (int i = 0; i < 3; ++i) a(i) = rng.uniform(-1.0, 1.0);
    const ImmersionReport rep = immersion_check(bind_parameters(family, a), box, opts);
    if (!rep.is_immersion) {
      const double dist = 0.5 * (a.maxCoeff() - a.minCoeff());
      if (dist > 1e-6) {
        c.require(false, "off-diagonal perturbation flagged at distance " + std::to_string(dist));
        break;
      }
    }
  }

  Eigen::VectorXd diag(3);
  diag << 0.4, 0.4, 0.4;
  const ImmersionReport rep = immersion_check(bind_parameters(family, diag), box, opts);
  c.require(!rep.is_immersion, "diagonal perturbation not flagged");
  c.require(!rep.corank_witnesses.empty() &&
                std::abs(rep.corank_witnesses.front()(0) + 0.2) <= 1e-8,
            "witness is not x = -a/2");
}

// criterion 6: cross-cap normal form versus its degenerate variant.
void criterion_6(Check& c) {
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  c.require(whitney_umbrella_check(make_map(find_problem("umbrella-normal")), origin),
            "normal form rejected");
  c.require(!whitney_umbrella_check(make_map(find_problem("umbrella-degenerate")), origin),
            "degenerate variant accepted");
}

// criterion 7: affine-independence order of the circle and the moment curve.
void criterion_7(Check& c) {
  DfEstimateOptions opts;
  opts.tuples_per_d = 10000;
  const RegistryEntry& circle = find_problem("circle-r3");
  const DfEstimate dc = estimate_df(make_map(circle), circle.x_box, opts);
  c.require(dc.d_hat == 3, "circle d_hat " + std::to_string(dc.d_hat));
  const RegistryEntry& cubic = find_problem("twisted-cubic");
  const DfEstimate dt = estimate_df(make_map(cubic), cubic.x_box, opts);
  c.require(dt.d_hat == 4, "moment curve d_hat " + std::to_string(dt.d_hat));
}

// criterion 8: exact rational thresholds across the four closed forms.
void criterion_8(Check& c) {
  ThresholdQuery q;
  q.kind = ThresholdQuery::Kind::Morse;
  q.m = 1;
  q.r = 2;
  ThresholdBound b = genericity_threshold(q);
  c.require(b.num == 1 && b.den == 1 && !b.strict, "morse(m=1,r=2) != 1");

  q = ThresholdQuery{};
  q.kind = ThresholdQuery::Kind::Jet;
  q.n = 1;
  q.ell = 1;
  q.m = 1;
  q.k = 1;
  q.r = 2;
  b = genericity_threshold(q);
  c.require(b.num == 1 && b.den == 1, "jet(n=ell=m=1,k=1,r=2) != m*ell");

  q = ThresholdQuery{};
  q.kind = ThresholdQuery::Kind::Pareto;
  q.m = 2;
  q.ell = 2;
  b = genericity_threshold(q);
  c.require(b.num == 2 && b.den == 1 && b.strict, "pareto(2,2) != strict 2");

  q = ThresholdQuery{};
  q.kind = ThresholdQuery::Kind::Main2;
  q.dim_a = 2;
  q.delta_star = -1;
  b = genericity_threshold(q);
  c.require(b.num == 1 && b.den == 1 && b.strict, "negative branch != strict 1");
}

// criterion 9: equal perturbations collapse the atlas and fail simpliciality;
// independent axis perturbations restore it with rank exactly ell - 1.
void criterion_9(Check& c) {
  const MultiObjective f = make_objective(find_problem("pareto-9-1"));

  Eigen::MatrixXd equal(2, 2);
  equal << 0.6, -0.4, 0.6, -0.4;
  const MultiObjective g = perturb_linear(f, equal);
  const ParetoAtlas collapsed = build_pareto_atlas(g, 50);
  double worst = 0.0;
  for (const auto& x : collapsed.minimizers)
    worst = std::max(worst, std::max(std::abs(x(0) + 0.3), std::abs(x(1) - 0.2)));
  c.require(worst <= 1e-8, "atlas node strays " + std::to_string(worst) + " from (-a1/2,-a2/2)");
  c.require(simpliciality_check(g, collapsed).verdict == SimplicialityVerdict::Failed,
            "collapsed atlas not FAILED");

  Eigen::MatrixXd axes(2, 2);
  axes << 1.0, 0.0, 0.0, 1.0;
  const MultiObjective h = perturb_linear(f, axes);
  const ParetoAtlas spread = build_pareto_atlas(h, 50);
  const SimplicialityReport rep = simpliciality_check(h, spread);
  c.require(rep.verdict == SimplicialityVerdict::SimplicialEvidence,
            std::string("verdict ") + to_string(rep.verdict));
  bool ranks_ok = true;
  for (const auto& x : spread.minimizers) {
    Eigen::MatrixXd J(2, 2);
    for (int i = 0; i < 2; ++i)
      J.row(i) = jacobian(h.components[static_cast<std::size_t>(i)], x, Eigen::VectorXd(),
                          WithRespectTo::X)
                     .row(0);
    if (rank_decide(J).rank != 1) ranks_ok = false;
  }
  c.require(ranks_ok, "differential rank != 1 at some node");
}

// criterion 10: property suites; derivative agreement, defect monotonicity,
// the dimension inequality, convexity invariance, and scheduling determinism.
void criterion_10(Check& c) {
  // Forward-mode derivatives against central differences on every registry
  // expression, 100 points each.
  for (const auto& e : registry()) {
    std::vector<ExprMap> maps;
    std::vector<int> arity_a;
    if (!e.map_src.empty()) {
      maps.push_back(make_map(e));
      arity_a.push_back(0);
    }
    if (e.kind == "family") {
      maps.push_back(parse(e.family_src, e.n, e.p));
      arity_a.push_back(e.p);
    }
    for (const auto& src : e.objective_srcs) {
      maps.push_back(parse(src, e.n, 0));
      arity_a.push_back(0);
    }
    for (std::size_t mi = 0; mi < maps.size() && c.pass; ++mi) {
      const ExprMap& f = maps[mi];
      SubstreamRng rng(10, mi);
      for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd x(f.arity_x()), a(arity_a[mi]);
        for (int i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < a.size(); ++i) a(i) = rng.uniform(-1.0, 1.0);
        const Eigen::MatrixXd J = jacobian(f, x, a, WithRespectTo::X);
        Eigen::MatrixXd fd(f.output_dim(), f.arity_x());
        const double h = 1e-6;
        for (int i = 0; i < f.arity_x(); ++i) {
          Eigen::VectorXd xp = x, xm = x;
          xp(i) += h;
          xm(i) -= h;
          fd.col(i) = (eval(f, xp, a) - eval(f, xm, a)) / (2.0 * h);
        }
        const double err = (J - fd).norm() / std::max(1.0, J.norm());
        if (err > 1e-6) {
          c.require(false, e.name + ": derivative mismatch " + std::to_string(err));
          break;
        }
      }
    }
  }

  // Section defect dominates family defect on random family points.
  {
    SubstreamRng rng(11, 0);
    int checked = 0;
    bool ok = true;
    while (checked < 1000) {
      for (const auto& e : registry()) {
        if (e.kind != "family") continue;
        const FamilyProblem p = make_family(e);
        Eigen::VectorXd x(p.x_box.dim()), a(p.a_box.dim());
        for (int i = 0; i < x.size(); ++i) x(i) = rng.uniform(p.x_box.lo(i), p.x_box.hi(i));
        for (int i = 0; i < a.size(); ++i) a(i) = rng.uniform(p.a_box.lo(i), p.a_box.hi(i));
        const DefectReport rep = classify_family_point(p, x, a);
        if (rep.delta_section < rep.delta_family) ok = false;
        ++checked;
      }
    }
    c.require(ok, "section defect fell below family defect");
  }

  // Whenever the sampled family meets Z, dim A + delta* stays nonnegative.
  for (const auto& e : registry()) {
    if (e.kind != "family") continue;
    const FamilyProblem p = make_family(e);
    bool meets_z = false;
    SubstreamRng rng(12, 0);
    for (int t = 0; t < 200 && !meets_z; ++t) {
      Eigen::VectorXd x(p.x_box.dim()), a(p.a_box.dim());
      for (int i = 0; i < x.size(); ++i)
        x(i) = std::round(rng.uniform(p.x_box.lo(i), p.x_box.hi(i)) * 4.0) / 4.0;
      for (int i = 0; i < a.size(); ++i)
        a(i) = std::round(rng.uniform(p.a_box.lo(i), p.a_box.hi(i)) * 4.0) / 4.0;
      if (classify_family_point(p, x, a).classification != PointClass::NotOnZ) meets_z = true;
    }
    if (meets_z) {
      const int ds = delta_star(p, defect_family_sup(p, GridSpec{17}));
      c.require(p.a_box.dim() + ds >= 0, e.name + ": dim A + delta* negative");
    }
  }

  // Strong convexity is invariant under linear perturbations, bitwise.
  {
    const MultiObjective f = make_objective(find_problem("pareto-9-1"));
    const double alpha = strong_convexity_estimate(f);
    SubstreamRng rng(13, 0);
    bool ok = true;
    for (int t = 0; t < 100; ++t) {
      Eigen::MatrixXd pi(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) pi(i, j) = rng.uniform(-1.0, 1.0);
      if (strong_convexity_estimate(perturb_linear(f, pi)) != alpha) ok = false;
    }
    c.require(ok, "alpha_hat drifted under linear perturbation");
  }

  // Stochastic kernels reproduce bitwise across worker counts.
  {
    auto with_threads = [](int n, const std::function<void()>& fn) {
#ifdef _OPENMP
      const int prev = omp_get_max_threads();
      omp_set_num_threads(n);
      fn();
      omp_set_num_threads(prev);
#else
      (void)n;
      fn();
#endif
    };
    const FamilyProblem p = make_family(find_problem("ex-2-3"));
    SigmaSampleOptions so;
    so.budget = 400;
    so.seed = 14;
    SigmaSample s1, s8;
    with_threads(1, [&] { s1 = sample_sigma(p, so); });
    with_threads(8, [&] { s8 = sample_sigma(p, so); });
    bool same = s1.points.size() == s8.points.size();
    for (std::size_t i = 0; same && i < s1.points.size(); ++i)
      same = (s1.points[i] - s8.points[i]).norm() == 0.0;
    c.require(same, "sigma sample depends on worker count");

    const auto cloud = make_cloud(find_problem("cantor-depth-12"));
    BoxCountEstimate b1, b8;
    with_threads(1, [&] { b1 = box_count(cloud); });
    with_threads(8, [&] { b8 = box_count(cloud); });
    c.require(b1.dimension == b8.dimension && b1.scales == b8.scales,
              "box count depends on worker count");

    const MultiObjective f = make_objective(find_problem("pareto-9-1"));
    PerturbationStudyOptions po;
    po.trials = 12;
    po.seed = 15;
    PerturbationStudy t1, t8;
    with_threads(1, [&] { t1 = perturbation_study(f, po); });
    with_threads(8, [&] { t8 = perturbation_study(f, po); });
    c.require(t1.bad_count == t8.bad_count && t1.solver_failures == t8.solver_failures,
              "perturbation study depends on worker count");

    MeasureZeroProbe m1, m8;
    with_threads(1, [&] { m1 = measure_zero_probe(p, 32, 16); });
    with_threads(8, [&] { m8 = measure_zero_probe(p, 32, 16); });
    c.require(m1.hit_count == m8.hit_count, "measure-zero probe depends on worker count");
  }
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    double budget_s;
    std::function<void(Check&)> fn;
  };
  const std::vector<Entry> entries = {
      {1, "planar family classification grid", 5.0, criterion_1},
      {2, "translation family bad-set cloud and dimension", 30.0, criterion_2},
      {3, "cantor box-counting dimension", 10.0, criterion_3},
      {4, "morse genericity of the perturbed cubic", 20.0, criterion_4},
      {5, "immersion bad set equals the diagonal", 30.0, criterion_5},
      {6, "whitney umbrella normal form", 1.0, criterion_6},
      {7, "affine-independence order estimates", 60.0, criterion_7},
      {8, "exact rational threshold calculator", 1.0, criterion_8},
      {9, "pareto atlas collapse and recovery", 30.0, criterion_9},
      {10, "property suites", 300.0, criterion_10},
  };

  int failures = 0;
  for (const auto& e : entries) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    e.fn(c);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(secs <= e.budget_s, "runtime " + std::to_string(secs) + "s over budget");
    std::printf("criterion %2d: %s (%.1fs) %s%s%s\n", e.id, c.pass ? "PASS" : "FAIL", secs,
                e.title, c.pass ? "" : " -- ", c.pass ? "" : c.detail.str().c_str());
    if (!c.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
