#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "tvlab/multipoint.hpp"
#include "tvlab/registry.hpp"

using namespace tvlab;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

MultiPointTuple tuple_of(std::initializer_list<double> xs) {
  MultiPointTuple t;
  for (double x : xs) t.points.push_back(vec({x}));
  return t;
}

}  // namespace

TEST_CASE("multipoint evaluation stacks images and enforces separation") {
  const ExprMap f = parse("[x1; x1^2]", 1, 0);
  const Eigen::VectorXd y = multipoint_eval(f, tuple_of({1.0, 2.0}));
  REQUIRE(y.size() == 4);
  CHECK(y(0) == doctest::Approx(1.0));
  CHECK(y(1) == doctest::Approx(1.0));
  CHECK(y(2) == doctest::Approx(2.0));
  CHECK(y(3) == doctest::Approx(4.0));

  CHECK_THROWS_AS(multipoint_eval(f, tuple_of({1.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS(multipoint_eval(f, tuple_of({1.0})), std::invalid_argument);
}

TEST_CASE("diagonal defect at double points") {
  // f(x) = x^2 sends +-t to the same value with opposite derivatives:
  // a transverse double point, defect 0.
  const ExprMap square = parse("[x1^2]", 1, 0);
  CHECK(diagonal_defect(square, tuple_of({-0.7, 0.7})) == 0);
  // Off the diagonal the defect is 0 by convention.
  CHECK(diagonal_defect(square, tuple_of({0.3, 0.7})) == 0);

  // A constant map hits the diagonal with zero differential: full defect.
  const ExprMap constant = parse("[1]", 1, 0);
  CHECK(diagonal_defect(constant, tuple_of({0.0, 0.5})) == 1);
  CHECK(diagonal_defect(constant, tuple_of({0.0, 0.4, 0.8})) == 2);
}

TEST_CASE("double point search on curves") {
  const Box box = Box::cube(1, -1.0, 1.0);
  const ExprMap square = parse("[x1^2]", 1, 0);
  DoublePointSearchOptions opts;
  opts.multistarts = 40;
  const auto hits = double_point_search(square, box, opts);
  REQUIRE(!hits.empty());
  for (const auto& t : hits)
    CHECK(t.points[0](0) == doctest::Approx(-t.points[1](0)).epsilon(1e-5));

  // Injective maps produce no double points.
  CHECK(double_point_search(parse("[x1]", 1, 0), box, opts).empty());
  const RegistryEntry& circle = find_problem("circle-r3");
  CHECK(double_point_search(make_map(circle), circle.x_box, opts).empty());
}

TEST_CASE("normal crossings verdicts") {
  DoublePointSearchOptions opts;
  opts.multistarts = 30;
  const NormalCrossingsReport good =
      normal_crossings_check(parse("[x1^2]", 1, 0), Box::cube(1, -1.0, 1.0), 2, opts);
  CHECK(good.normal_crossings);
  REQUIRE(good.per_d.size() == 1);
  CHECK(good.per_d[0].tuples_found > 0);
  CHECK(good.per_d[0].max_defect == 0);

  const NormalCrossingsReport bad =
      normal_crossings_check(parse("[x1^2; 0]", 1, 0), Box::cube(1, -1.0, 1.0), 2, opts);
  CHECK_FALSE(bad.normal_crossings);
  REQUIRE(bad.per_d[0].defect_witness.has_value());
  CHECK(bad.per_d[0].max_defect > 0);

  CHECK_THROWS_AS(normal_crossings_check(parse("[x1]", 1, 0), Box::cube(1, 0.0, 1.0), 1),
                  std::invalid_argument);
}

TEST_CASE("df estimate distinguishes planar circles from moment curves") {
  DfEstimateOptions opts;
  opts.tuples_per_d = 2000;

  const RegistryEntry& circle = find_problem("circle-r3");
  const DfEstimate dc = estimate_df(make_map(circle), circle.x_box, opts);
  CHECK(dc.d_hat == 3);
  REQUIRE(dc.violating_tuple.has_value());
  CHECK(dc.violating_tuple->count() == 4);

  const RegistryEntry& cubic = find_problem("twisted-cubic");
  const DfEstimate dt = estimate_df(make_map(cubic), cubic.x_box, opts);
  CHECK(dt.d_hat == 4);

  // A line in R^1: any three points have dependent image differences.
  const DfEstimate dl = estimate_df(parse("[x1]", 1, 0), Box::cube(1, 0.0, 1.0), opts);
  CHECK(dl.d_hat == 2);
}

TEST_CASE("df estimate rejects non-injective maps") {
  CHECK_THROWS_AS(estimate_df(parse("[x1^2]", 1, 0), Box::cube(1, -1.0, 1.0)),
                  std::invalid_argument);
}
