#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "tvlab/registry.hpp"
#include "tvlab/rng.hpp"
#include "tvlab/transversality.hpp"

using namespace tvlab;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

LevelSetSubmanifold axis_target(int ambient) {
  // Z = {0} in R^ambient, h = identity.
  LevelSetSubmanifold Z;
  std::string src = "[";
  for (int i = 0; i < ambient; ++i) src += (i ? "; x" : "x") + std::to_string(i + 1);
  src += "]";
  Z.defining_map = parse(src, ambient, 0);
  return Z;
}

}  // namespace

TEST_CASE("defect_at detects tangency to a hyperplane") {
  // Parabola (x, x^2) against the horizontal axis {y2 = 0}: tangent at 0.
  LevelSetSubmanifold Z;
  Z.defining_map = parse("[x2]", 2, 0);
  const ExprMap f = parse("[x1; x1^2]", 1, 0);
  CHECK(defect_at(f, Z, vec({0.0})) == 1);
  CHECK(defect_at(f, Z, vec({0.5})) == 0);  // off Z

  // Transverse crossing (x, x).
  const ExprMap g = parse("[x1; x1]", 1, 0);
  CHECK(defect_at(g, Z, vec({0.0})) == 0);
}

TEST_CASE("defect_at rejects parametric maps and bad targets") {
  LevelSetSubmanifold Z;
  Z.defining_map = parse("[x2]", 2, 0);
  CHECK_THROWS_AS(defect_at(parse("[x1; a1]", 1, 1), Z, vec({0.0})), ArityError);

  // h = x1^2 is singular at its own zero set: submersion check fires.
  LevelSetSubmanifold bad;
  bad.defining_map = parse("[x1^2]", 2, 0);
  const ExprMap f = parse("[x1; x1]", 1, 0);
  CHECK_THROWS(defect_at(f, bad, vec({0.0})));
}

TEST_CASE("classification matches the degenerate planar family case table") {
  const FamilyProblem P = make_family(find_problem("ex-2-2"));

  // On the bad lines with a1 != 0: section defect 2, family defect 1.
  DefectReport r = classify_family_point(P, vec({0.2}), vec({0.5, 0.5}));
  CHECK(r.delta_section == 2);
  CHECK(r.delta_family == 1);
  CHECK(r.classification == PointClass::InWTilde);

  r = classify_family_point(P, vec({0.2}), vec({0.5, -0.5}));
  CHECK(r.classification == PointClass::InWTilde);

  // At the origin both defects are 2.
  r = classify_family_point(P, vec({0.0}), vec({0.0, 0.0}));
  CHECK(r.delta_section == 2);
  CHECK(r.delta_family == 2);
  CHECK(r.classification == PointClass::InW);

  // Off the zero set of a1^2 - a2^2.
  r = classify_family_point(P, vec({0.2}), vec({0.5, 0.3}));
  CHECK(r.classification == PointClass::NotOnZ);
  CHECK(std::string(to_string(r.classification)) == "NOT_ON_Z");
}

TEST_CASE("translation family classification") {
  const FamilyProblem P = make_family(find_problem("ex-2-3"));
  DefectReport r = classify_family_point(P, vec({-0.3}), vec({0.3, 0.3}));
  CHECK(r.delta_section == 1);
  CHECK(r.delta_family == 0);
  CHECK(r.classification == PointClass::InWTilde);

  r = classify_family_point(P, vec({0.0}), vec({0.3, -0.3}));
  CHECK(r.classification == PointClass::NotOnZ);
}

TEST_CASE("transverse section classifies as such") {
  FamilyProblem P;
  P.family = parse("[x1 + a1]", 1, 1);
  P.target = axis_target(1);
  P.x_box = Box::cube(1, -2.0, 2.0);
  P.a_box = Box::cube(1, -1.0, 1.0);
  const DefectReport r = classify_family_point(P, vec({-0.4}), vec({0.4}));
  CHECK(r.classification == PointClass::Transverse);
  CHECK(r.delta_section == 0);
}

TEST_CASE("section defect dominates family defect on random points") {
  SubstreamRng rng(0x5eed, 0);
  for (const char* name : {"ex-2-2", "ex-2-3"}) {
    const FamilyProblem P = make_family(find_problem(name));
    for (int t = 0; t < 500; ++t) {
      Eigen::VectorXd x(P.x_box.dim()), a(P.a_box.dim());
      for (int i = 0; i < x.size(); ++i) x(i) = rng.uniform(P.x_box.lo(i), P.x_box.hi(i));
      for (int i = 0; i < a.size(); ++i) a(i) = rng.uniform(P.a_box.lo(i), P.a_box.hi(i));
      const DefectReport r = classify_family_point(P, x, a);
      CHECK(r.delta_section >= r.delta_family);
      CHECK(r.delta_family >= 0);
    }
  }
}

TEST_CASE("family defect supremum and delta star") {
  // An odd grid pins the supremum at the origin of the parameter box.
  const FamilyProblem P2 = make_family(find_problem("ex-2-2"));
  CHECK(defect_family_sup(P2, GridSpec{17}) == 2);
  CHECK(delta_star(P2, 2) == 1);

  const FamilyProblem P3 = make_family(find_problem("ex-2-3"));
  CHECK(defect_family_sup(P3, GridSpec{17}) == 0);
  CHECK(delta_star(P3, 0) == -1);
}

TEST_CASE("dim A + delta star is nonnegative whenever Z is met") {
  // Holds for every registry family whose image meets Z on the sample grid.
  for (const auto& entry : registry()) {
    if (entry.kind != "family") continue;
    const FamilyProblem P = make_family(entry);
    bool meets_z = false;
    GridSpec grid{9};
    const int n = P.x_box.dim();
    const int p = P.a_box.dim();
    SubstreamRng rng(0x2718, 0);
    for (int t = 0; t < 2000 && !meets_z; ++t) {
      Eigen::VectorXd x(n), a(p);
      for (int i = 0; i < n; ++i) x(i) = rng.uniform(P.x_box.lo(i), P.x_box.hi(i));
      for (int i = 0; i < p; ++i) a(i) = rng.uniform(P.a_box.lo(i), P.a_box.hi(i));
      // Quantize to hit thin zero sets exactly where they are axis-aligned.
      for (int i = 0; i < n; ++i) x(i) = std::round(x(i) * 4.0) / 4.0;
      for (int i = 0; i < p; ++i) a(i) = std::round(a(i) * 4.0) / 4.0;
      const Eigen::VectorXd hy = eval(P.target.defining_map, eval(P.family, x, a));
      if (hy.lpNorm<Eigen::Infinity>() <= P.target.membership_tol) meets_z = true;
    }
    const int ds = delta_star(P, defect_family_sup(P, grid));
    if (meets_z) CHECK(P.a_box.dim() + ds >= 0);
    if (entry.known_delta_star)
      CHECK(delta_star(P, defect_family_sup(P, GridSpec{17})) == *entry.known_delta_star);
  }
}

TEST_CASE("witness search finds tangencies and rejects clean parameters") {
  const FamilyProblem P = make_family(find_problem("ex-2-3"));
  const auto hit = find_nontransverse_witness(P, vec({0.3, 0.3}));
  REQUIRE(hit.has_value());
  CHECK(std::abs((*hit)(0) + 0.3) < 1e-6);
  CHECK_FALSE(find_nontransverse_witness(P, vec({0.3, -0.2})).has_value());

  const FamilyProblem M = make_family(find_problem("morse-cubic"));
  const auto degenerate = find_nontransverse_witness(M, vec({0.0}));
  REQUIRE(degenerate.has_value());
  CHECK(std::abs((*degenerate)(0)) < 1e-6);
  CHECK_FALSE(find_nontransverse_witness(M, vec({0.5})).has_value());
  CHECK_FALSE(find_nontransverse_witness(M, vec({-0.5})).has_value());
}

TEST_CASE("sigma sampling clusters on the bad set and is reproducible") {
  const FamilyProblem P = make_family(find_problem("ex-2-3"));
  SigmaSampleOptions opts;
  opts.budget = 200;
  opts.seed = 7;
  const SigmaSample par = sample_sigma(P, opts);
  const SigmaSample ser = sample_sigma_serial(P, opts);
  CHECK(par.trials == 200);
  REQUIRE(par.points.size() == ser.points.size());
  CHECK(par.points.size() > 50);
  for (std::size_t i = 0; i < par.points.size(); ++i) {
    CHECK((par.points[i] - ser.points[i]).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(std::abs(par.points[i](0) - par.points[i](1)) < 1e-3);
  }

  // A different seed produces a different cloud.
  opts.seed = 8;
  const SigmaSample other = sample_sigma(P, opts);
  bool same = other.points.size() == par.points.size();
  if (same)
    for (std::size_t i = 0; i < par.points.size(); ++i)
      if ((par.points[i] - other.points[i]).lpNorm<Eigen::Infinity>() != 0.0) same = false;
  CHECK_FALSE(same);
}

TEST_CASE("threshold calculator closed forms") {
  ThresholdQuery q;
  q.kind = ThresholdQuery::Kind::Morse;
  q.m = 1;
  q.r = 2;
  ThresholdBound b = genericity_threshold(q);
  CHECK(b.num == 1);
  CHECK(b.den == 1);
  CHECK_FALSE(b.strict);

  q.m = 3;
  q.r = 4;  // s >= 2 + 1/3
  b = genericity_threshold(q);
  CHECK(b.num == 7);
  CHECK(b.den == 3);

  q.kind = ThresholdQuery::Kind::Main1;
  q.dim_a = 2;
  q.delta_star = 1;
  q.r = 1;  // s >= 1 + 2/1
  b = genericity_threshold(q);
  CHECK(b.value() == doctest::Approx(3.0));
  CHECK_FALSE(b.strict);

  q.smooth_infinity = true;  // s > dim A - 1
  b = genericity_threshold(q);
  CHECK(b.value() == doctest::Approx(1.0));
  CHECK(b.strict);
  q.smooth_infinity = false;

  q.kind = ThresholdQuery::Kind::Main2;
  q.dim_a = 2;
  q.delta_star = -1;  // s > 1
  b = genericity_threshold(q);
  CHECK(b.num == 1);
  CHECK(b.den == 1);
  CHECK(b.strict);

  q.kind = ThresholdQuery::Kind::Jet;
  q.n = 1;
  q.ell = 1;
  q.m = 1;
  q.k = 1;
  q.r = 2;  // codim 1, diff 0: s >= ml - 1 + 1/(r-1) = 1
  b = genericity_threshold(q);
  CHECK(b.value() == doctest::Approx(1.0));
  CHECK_FALSE(b.strict);

  q.kind = ThresholdQuery::Kind::Multipoint;
  q.n = 1;
  q.ell = 3;
  q.m = 3;
  q.d = 2;  // diff = 2 - 3 < 0: s > 9 - 1
  q.r = 1;
  b = genericity_threshold(q);
  CHECK(b.value() == doctest::Approx(8.0));
  CHECK(b.strict);

  q.kind = ThresholdQuery::Kind::Pareto;
  q.m = 2;
  q.ell = 2;
  b = genericity_threshold(q);
  CHECK(b.num == 2);
  CHECK(b.den == 1);
  CHECK(b.strict);
}

TEST_CASE("threshold bounds are monotone non-increasing in smoothness") {
  ThresholdQuery q;
  q.kind = ThresholdQuery::Kind::Main1;
  q.dim_a = 3;
  q.delta_star = 2;
  double prev = 1e300;
  for (int r = 1; r <= 10; ++r) {
    q.r = r;
    const double v = genericity_threshold(q).value();
    CHECK(v <= prev + 1e-12);
    prev = v;
  }

  ThresholdQuery jm;
  jm.kind = ThresholdQuery::Kind::Morse;
  jm.m = 2;
  prev = 1e300;
  for (int r = 2; r <= 10; ++r) {
    jm.r = r;
    const double v = genericity_threshold(jm).value();
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("threshold calculator rejects invalid regimes") {
  ThresholdQuery q;
  q.kind = ThresholdQuery::Kind::Morse;
  q.m = 1;
  q.r = 1;
  CHECK_THROWS_AS(genericity_threshold(q), std::invalid_argument);

  q.kind = ThresholdQuery::Kind::Pareto;
  q.m = 1;
  q.ell = 2;
  CHECK_THROWS_AS(genericity_threshold(q), std::invalid_argument);
  q.m = 8;
  q.ell = 6;  // m - 2l + 4 = 0
  CHECK_THROWS_AS(genericity_threshold(q), std::invalid_argument);

  q.kind = ThresholdQuery::Kind::Multipoint;
  q.d = 1;
  q.r = 1;
  CHECK_THROWS_AS(genericity_threshold(q), std::invalid_argument);

  q.kind = ThresholdQuery::Kind::Jet;
  q.n = 2;
  q.ell = 2;
  q.k = 3;
  q.r = 2;
  CHECK_THROWS_AS(genericity_threshold(q), std::invalid_argument);
}
