#include "tvlab/strata.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "tvlab/optim.hpp"
#include "tvlab/rng.hpp"

namespace tvlab {

namespace {

Eigen::VectorXd empty_vec() { return Eigen::VectorXd(); }

Eigen::VectorXd random_point(const Box& box, SubstreamRng& rng) {
  Eigen::VectorXd x(box.dim());
  for (int i = 0; i < box.dim(); ++i) x(i) = rng.uniform(box.lo(i), box.hi(i));
  return x;
}

template <class Fn>
void for_each_corner(const Box& box, Fn&& fn) {
  const int n = box.dim();
  for (unsigned long long mask = 0; mask < (1ull << n); ++mask) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = (mask >> i) & 1 ? box.hi(i) : box.lo(i);
    fn(c);
  }
}

}  // namespace

int stratum_codim(int n, int ell, int k) {
  const int v = std::min(n, ell);
  if (k < 1 || k > v) throw std::invalid_argument("stratum_codim: k out of range");
  return (n - v + k) * (ell - v + k);
}

JetPoint jet_extension(const ExprMap& f, const Eigen::VectorXd& x) {
  JetPoint jet;
  jet.x = x;
  jet.y = eval(f, x);
  jet.jacobian = jacobian(f, x, empty_vec(), WithRespectTo::X);
  return jet;
}

int stratum_defect(const ExprMap& f, int k, const Eigen::VectorXd& x,
                   const StratumDefectOptions& opts) {
  const int n = f.arity_x();
  const int ell = f.output_dim();
  const int codim = stratum_codim(n, ell, k);

  const Eigen::MatrixXd J0 = jacobian(f, x, empty_vec(), WithRespectTo::X);
  if (rank_decide(J0, opts.rank_tol).corank != k)
    throw std::invalid_argument("stratum_defect: point is not on the corank-k stratum");

  // Pivot selection frozen at the center so the chart is smooth in x.
  const SchurChart chart = schur_stratum_chart(J0, k, opts.rank_tol);

  auto chart_at = [&](const Eigen::VectorXd& xx) {
    const Eigen::MatrixXd J = jacobian(f, xx, empty_vec(), WithRespectTo::X);
    const Eigen::MatrixXd S = chart.apply(J);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(S.data(), S.size()));
  };

  Eigen::MatrixXd D(codim, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += opts.fd_step;
    xm(i) -= opts.fd_step;
    D.col(i) = (chart_at(xp) - chart_at(xm)) / (2.0 * opts.fd_step);
  }
  return codim - rank_decide(D, opts.rank_tol).rank;
}

MorseReport morse_check(const ExprMap& f, const Box& box, const CriticalSearchOptions& opts) {
  if (f.output_dim() != 1)
    throw std::invalid_argument("morse_check expects a scalar function");
  if (f.arity_a() != 0)
    throw std::invalid_argument("morse_check expects a bound (non-parametric) function");
  const int n = f.arity_x();

  MorseReport report;
  auto gradient = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(jacobian(f, x, empty_vec(), WithRespectTo::X).row(0).transpose());
  };
  auto hessian = [&](const Eigen::VectorXd& x) { return hessians(f, x)[0]; };

  // Degeneracy is judged against the Hessian scale of the whole box; a
  // relative rank test at the critical point itself would call a vanishing
  // Hessian full-rank.
  double hessian_scale = 1.0;
  for_each_corner(box, [&](const Eigen::VectorXd& c) {
    hessian_scale = std::max(hessian_scale, hessian(c).norm());
  });
  hessian_scale = std::max(hessian_scale, hessian(box.center()).norm());
  const double degeneracy_tol =
      (opts.rank_tol.kind == TolPolicy::Kind::Relative ? opts.rank_tol.value * hessian_scale
                                                       : opts.rank_tol.value);

  auto record_critical = [&](const Eigen::VectorXd& x) {
    for (const auto& seen : report.critical_points)
      if ((seen - x).norm() < opts.dedupe_dist) return;
    report.critical_points.push_back(x);
    if (rank_decide(hessian(x), TolPolicy::absolute(degeneracy_tol)).rank < n) {
      report.degenerate_witnesses.push_back(x);
      report.verdict = MorseVerdict::Degenerate;
    }
  };

  const double volume = std::max(1.0, (box.hi - box.lo).prod());
  const int starts = std::max(4, static_cast<int>(opts.multistarts * volume));
  SubstreamRng rng(0x6d6f727365ull, 0);  // fixed stream: search is deterministic
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x = random_point(box, rng);
    // Damped Newton on the gradient, with gradient descent fallback.
    for (int it = 0; it < 60; ++it) {
      // Polish past gradient_tol: near a degenerate critical point the
      // Hessian scales like a root of the gradient, so stopping at the
      // recording tolerance would leave the Hessian spuriously large.
      const Eigen::VectorXd g = gradient(x);
      if (g.norm() == 0.0) break;
      const Eigen::MatrixXd H = hessian(x);
      Eigen::VectorXd dx = H.fullPivLu().solve(-g);
      if (!dx.allFinite() || (H * dx + g).norm() > 1e-8 * (1.0 + g.norm()))
        dx = -g;  // singular Hessian
      double t = 1.0;
      const double g0 = g.norm();
      bool accepted = false;
      for (int bt = 0; bt < 25; ++bt) {
        const Eigen::VectorXd cand = x + t * dx;
        if (gradient(cand).norm() < g0) {
          x = cand;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
    }
    if (gradient(x).norm() <= opts.gradient_tol && box.contains(x, 1e-9))
      record_critical(x);
  }
  return report;
}

ImmersionReport immersion_check(const ExprMap& f, const Box& box,
                                const ImmersionSearchOptions& opts) {
  const int n = f.arity_x();
  ImmersionReport report;

  auto smallest_sv_sq = [&](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd J = jacobian(f, x, empty_vec(), WithRespectTo::X);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    const double s = sv.size() >= n ? sv(n - 1) : 0.0;
    return s * s;
  };
  auto clamped = [&](const Eigen::VectorXd& x) {
    return smallest_sv_sq(x.cwiseMax(box.lo).cwiseMin(box.hi));
  };

  SubstreamRng rng(0x696d6dull, 0);
  for (int s = 0; s < opts.multistarts; ++s) {
    Eigen::VectorXd x0 = random_point(box, rng);
    NelderMeadOptions nm;
    nm.max_iters = 400;
    nm.f_tol = 1e-18;
    MinimizeResult r = nelder_mead(clamped, x0, nm);
    Eigen::VectorXd x = fd_newton_polish(clamped, r.x, 8, 1e-6);
    x = x.cwiseMax(box.lo).cwiseMin(box.hi);
    if (std::sqrt(smallest_sv_sq(x)) < opts.sigma_tol) {
      bool dup = false;
      for (const auto& seen : report.corank_witnesses)
        if ((seen - x).norm() < 1e-6) dup = true;
      if (!dup) report.corank_witnesses.push_back(x);
      report.is_immersion = false;
    }
  }
  return report;
}

bool whitney_umbrella_check(const ExprMap& f, const Eigen::VectorXd& x_singular,
                            const StratumDefectOptions& opts) {
  const int n = f.arity_x();
  if (f.output_dim() != 2 * n - 1)
    throw std::invalid_argument("whitney_umbrella_check expects a map into R^(2n-1)");
  const Eigen::MatrixXd J = jacobian(f, x_singular, empty_vec(), WithRespectTo::X);
  if (rank_decide(J, opts.rank_tol).corank != 1)
    throw std::invalid_argument("whitney_umbrella_check: point is not corank-1 singular");
  return stratum_defect(f, 1, x_singular, opts) == 0;
}

CorankSurvey corank_survey(const ExprMap& f, const Box& box, int grid_per_axis,
                           TolPolicy rank_tol) {
  CorankSurvey survey;
  const int n = box.dim();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd x(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      const double t = grid_per_axis == 1
                           ? 0.5
                           : static_cast<double>(idx[static_cast<std::size_t>(i)]) /
                                 static_cast<double>(grid_per_axis - 1);
      x(i) = box.lo(i) + t * (box.hi(i) - box.lo(i));
    }
    const int corank = rank_decide(jacobian(f, x, empty_vec(), WithRespectTo::X), rank_tol).corank;
    ++survey.histogram[corank];
    survey.first_witness.emplace(corank, x);
    survey.max_corank = std::max(survey.max_corank, corank);
    int axis = 0;
    while (axis < n && ++idx[static_cast<std::size_t>(axis)] == grid_per_axis) {
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == n) break;
  }
  return survey;
}

}  // namespace tvlab
