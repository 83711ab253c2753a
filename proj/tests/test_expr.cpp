#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "tvlab/expr.hpp"
#include "tvlab/rng.hpp"

using namespace tvlab;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const Eigen::VectorXd kEmpty;

}  // namespace

TEST_CASE("parse and eval basic arithmetic") {
  const ExprMap m = parse("x1^2 + 2*x1*a1 - sin(x2)", 2, 1);
  const double x1 = 1.5, x2 = 0.5, a1 = 2.0;
  const double expected = x1 * x1 + 2.0 * x1 * a1 - std::sin(x2);
  CHECK(eval(m, vec({x1, x2}), vec({a1}))(0) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("component splitting and output dimension") {
  const ExprMap m = parse("[x1 + a1; x1 * a1]", 1, 1);
  CHECK(m.output_dim() == 2);
  const Eigen::VectorXd y = eval(m, vec({3.0}), vec({4.0}));
  CHECK(y(0) == doctest::Approx(7.0));
  CHECK(y(1) == doctest::Approx(12.0));
}

TEST_CASE("comma separators and nested parentheses") {
  const ExprMap m = parse("[ (x1 + 1) * (x2 - 2), x1 / (x2 + 3) ]", 2, 0);
  const Eigen::VectorXd y = eval(m, vec({2.0, 5.0}), kEmpty);
  CHECK(y(0) == doctest::Approx(9.0));
  CHECK(y(1) == doctest::Approx(0.25));
}

TEST_CASE("negative integer exponents") {
  const ExprMap m = parse("x1^-2", 1, 0);
  CHECK(eval(m, vec({2.0}), kEmpty)(0) == doctest::Approx(0.25));
}

TEST_CASE("unary functions and domain errors") {
  const ExprMap m = parse("[exp(x1); log(x1); sqrt(x1); abs(x1); cos(x1)]", 1, 0);
  const Eigen::VectorXd y = eval(m, vec({2.0}), kEmpty);
  CHECK(y(0) == doctest::Approx(std::exp(2.0)));
  CHECK(y(1) == doctest::Approx(std::log(2.0)));
  CHECK(y(2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(y(3) == doctest::Approx(2.0));
  CHECK(y(4) == doctest::Approx(std::cos(2.0)));

  CHECK_THROWS_AS(eval(parse("log(x1)", 1, 0), vec({-1.0}), kEmpty), EvalError);
  CHECK_THROWS_AS(eval(parse("sqrt(x1)", 1, 0), vec({-1.0}), kEmpty), EvalError);
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(parse("x1 + y1", 1, 0), ParseError);
  CHECK_THROWS_AS(parse("x2", 1, 0), ParseError);
  CHECK_THROWS_AS(parse("a1", 1, 0), ParseError);
  CHECK_THROWS_AS(parse("x1^x1", 1, 0), ParseError);
  CHECK_THROWS_AS(parse("(x1", 1, 0), ParseError);
  CHECK_THROWS_AS(parse("x1 +", 1, 0), ParseError);
  try {
    parse("x1 + y1", 1, 0);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
}

TEST_CASE("arity violations") {
  const ExprMap m = parse("x1 + a1", 1, 1);
  CHECK_THROWS_AS(eval(m, vec({1.0, 2.0}), vec({1.0})), ArityError);
  CHECK_THROWS_AS(eval(m, vec({1.0}), kEmpty), ArityError);
}

TEST_CASE("jacobian matches hand derivatives") {
  // f(x, a) = (x1^2 * x2, x1 + 3*a1)
  const ExprMap m = parse("[x1^2 * x2; x1 + 3*a1]", 2, 1);
  const Eigen::VectorXd x = vec({2.0, 5.0});
  const Eigen::VectorXd a = vec({7.0});

  const Eigen::MatrixXd Jx = jacobian(m, x, a, WithRespectTo::X);
  CHECK(Jx(0, 0) == doctest::Approx(2.0 * 2.0 * 5.0));
  CHECK(Jx(0, 1) == doctest::Approx(4.0));
  CHECK(Jx(1, 0) == doctest::Approx(1.0));
  CHECK(Jx(1, 1) == doctest::Approx(0.0));

  const Eigen::MatrixXd Ja = jacobian(m, x, a, WithRespectTo::A);
  CHECK(Ja(0, 0) == doctest::Approx(0.0));
  CHECK(Ja(1, 0) == doctest::Approx(3.0));

  const Eigen::MatrixXd Jxa = jacobian(m, x, a, WithRespectTo::XA);
  CHECK(Jxa.cols() == 3);
  CHECK(Jxa(1, 2) == doctest::Approx(3.0));
}

TEST_CASE("jacobian agrees with central differences on random maps") {
  const char* sources[] = {
      "[x1^2 + x2^2 + a1*x1; sin(x1*x2) - a2]",
      "[exp(x1/4) * cos(x2); x1^3 - 2*x2 + a1*a2]",
  };
  SubstreamRng rng(0x1234, 0);
  for (const char* src : sources) {
    const ExprMap m = parse(src, 2, 2);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd x(2), a(2);
      for (int i = 0; i < 2; ++i) x(i) = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < 2; ++i) a(i) = rng.uniform(-1.0, 1.0);
      const Eigen::MatrixXd J = jacobian(m, x, a, WithRespectTo::X);
      const double h = 1e-5;
      for (int i = 0; i < 2; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const Eigen::VectorXd col = (eval(m, xp, a) - eval(m, xm, a)) / (2.0 * h);
        for (int r = 0; r < m.output_dim(); ++r) {
          const double scale = std::max(1.0, std::abs(J(r, i)));
          CHECK(std::abs(J(r, i) - col(r)) / scale < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("hessians are exact for polynomials") {
  // f = x1^2 * x2: H = [[2*x2, 2*x1], [2*x1, 0]]
  const ExprMap m = parse("x1^2 * x2", 2, 0);
  const Eigen::VectorXd x = vec({3.0, 4.0});
  const Eigen::MatrixXd H = hessians(m, x)[0];
  CHECK(H(0, 0) == doctest::Approx(8.0));
  CHECK(H(0, 1) == doctest::Approx(6.0));
  CHECK(H(1, 0) == doctest::Approx(6.0));
  CHECK(H(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("hessian of sin matches closed form") {
  const ExprMap m = parse("sin(x1 * x2)", 2, 0);
  const Eigen::VectorXd x = vec({0.7, -0.3});
  const double s = std::sin(x(0) * x(1));
  const double c = std::cos(x(0) * x(1));
  const Eigen::MatrixXd H = hessians(m, x)[0];
  CHECK(H(0, 0) == doctest::Approx(-x(1) * x(1) * s).epsilon(1e-12));
  CHECK(H(0, 1) == doctest::Approx(c - x(0) * x(1) * s).epsilon(1e-12));
  CHECK(H(1, 1) == doctest::Approx(-x(0) * x(0) * s).epsilon(1e-12));
  CHECK(H(0, 1) == doctest::Approx(H(1, 0)));
}

TEST_CASE("print round trip evaluates identically") {
  const char* sources[] = {
      "[x1^2 + 2*x1*a1 - sin(x2); x1 / (x2 + 2)]",
      "[-x1^-3 + 0.5; abs(x2 - a1)]",
  };
  SubstreamRng rng(0x55, 1);
  for (const char* src : sources) {
    const ExprMap m = parse(src, 2, 1);
    const ExprMap m2 = parse(print(m), 2, 1);
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd x(2), a(1);
      x(0) = rng.uniform(0.5, 1.5);
      x(1) = rng.uniform(0.5, 1.5);
      a(0) = rng.uniform(-1.0, 1.0);
      const Eigen::VectorXd y1 = eval(m, x, a);
      const Eigen::VectorXd y2 = eval(m2, x, a);
      CHECK((y1 - y2).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("bind_parameters fixes the section") {
  const ExprMap family = parse("[x1 + a1; x1 * a2]", 1, 2);
  const ExprMap section = bind_parameters(family, vec({2.0, 3.0}));
  CHECK(section.arity_a() == 0);
  const Eigen::VectorXd y = eval(section, vec({5.0}), kEmpty);
  CHECK(y(0) == doctest::Approx(7.0));
  CHECK(y(1) == doctest::Approx(15.0));
  CHECK_THROWS_AS(bind_parameters(family, vec({1.0})), ArityError);
}
