#include "tvlab/multipoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tvlab/optim.hpp"
#include "tvlab/rng.hpp"

namespace tvlab {

namespace {

Eigen::VectorXd empty_vec() { return Eigen::VectorXd(); }

MultiPointTuple unpack(const Eigen::VectorXd& z, int n, int d, double sep) {
  MultiPointTuple t;
  t.min_separation = sep;
  t.points.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) t.points.push_back(z.segment(i * n, n));
  return t;
}

double separation_penalty(const MultiPointTuple& t) {
  double pen = 0.0;
  for (std::size_t i = 0; i < t.points.size(); ++i)
    for (std::size_t j = i + 1; j < t.points.size(); ++j) {
      const double gap = (t.points[i] - t.points[j]).norm();
      if (gap < t.min_separation) {
        const double miss = t.min_separation - gap;
        pen += 1e4 * miss * miss;
      }
    }
  return pen;
}

double diagonal_residual_sq(const ExprMap& f, const MultiPointTuple& t) {
  double r = 0.0;
  const Eigen::VectorXd y0 = eval(f, t.points[0]);
  for (std::size_t i = 1; i < t.points.size(); ++i)
    r += (eval(f, t.points[i]) - y0).squaredNorm();
  return r;
}

MultiPointTuple sample_tuple(const Box& box, int d, double sep, SubstreamRng& rng) {
  MultiPointTuple t;
  t.min_separation = sep;
  while (t.count() < d) {
    Eigen::VectorXd q(box.dim());
    for (int i = 0; i < box.dim(); ++i) q(i) = rng.uniform(box.lo(i), box.hi(i));
    bool ok = true;
    for (const auto& seen : t.points)
      if ((seen - q).norm() < sep) ok = false;
    if (ok) t.points.push_back(q);
  }
  return t;
}

}  // namespace

bool MultiPointTuple::separated() const {
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if ((points[i] - points[j]).norm() < min_separation) return false;
  return true;
}

Eigen::VectorXd multipoint_eval(const ExprMap& f, const MultiPointTuple& tuple) {
  if (tuple.count() < 2) throw std::invalid_argument("tuple needs at least two points");
  if (!tuple.separated())
    throw std::invalid_argument("tuple violates its minimum separation");
  const int ell = f.output_dim();
  Eigen::VectorXd out(ell * tuple.count());
  for (int i = 0; i < tuple.count(); ++i)
    out.segment(i * ell, ell) = eval(f, tuple.points[static_cast<std::size_t>(i)]);
  return out;
}

int diagonal_defect(const ExprMap& f, const MultiPointTuple& tuple, double membership_tol,
                    TolPolicy rank_tol) {
  const int ell = f.output_dim();
  const int n = f.arity_x();
  const int d = tuple.count();
  const DiagonalSpec spec{ell, d};
  const Eigen::VectorXd stacked = multipoint_eval(f, tuple);

  double worst = 0.0;
  for (int i = 1; i < d; ++i)
    worst = std::max(worst, (stacked.segment(i * ell, ell) - stacked.head(ell))
                                .lpNorm<Eigen::Infinity>());
  if (worst > membership_tol) return 0;

  // dh * df^(d): block row (i-2) is [-Jf(q1) | 0 .. Jf(qi) .. 0].
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(spec.codim(), n * d);
  const Eigen::MatrixXd J0 =
      jacobian(f, tuple.points[0], empty_vec(), WithRespectTo::X);
  for (int i = 1; i < d; ++i) {
    const Eigen::MatrixXd Ji =
        jacobian(f, tuple.points[static_cast<std::size_t>(i)], empty_vec(), WithRespectTo::X);
    M.block((i - 1) * ell, 0, ell, n) = -J0;
    M.block((i - 1) * ell, i * n, ell, n) = Ji;
  }
  return spec.codim() - rank_decide(M, rank_tol).rank;
}

std::vector<MultiPointTuple> double_point_search(const ExprMap& f, const Box& box,
                                                 const DoublePointSearchOptions& opts) {
  const int n = box.dim();
  const double sep = opts.separation_fraction * box.diameter();
  std::vector<MultiPointTuple> hits;

  auto objective = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd c(z.size());
    for (int i = 0; i < 2; ++i)
      c.segment(i * n, n) = z.segment(i * n, n).cwiseMax(box.lo).cwiseMin(box.hi);
    MultiPointTuple t = unpack(c, n, 2, sep);
    return diagonal_residual_sq(f, t) + separation_penalty(t);
  };

  SubstreamRng rng(opts.seed, 0x64626cull);
  for (int s = 0; s < opts.multistarts; ++s) {
    Eigen::VectorXd z(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
      const int axis = i % n;
      z(i) = rng.uniform(box.lo(axis), box.hi(axis));
    }
    NelderMeadOptions nm;
    nm.max_iters = 500;
    nm.f_tol = 1e-18;
    MinimizeResult r = nelder_mead(objective, z, nm);
    Eigen::VectorXd zz = fd_newton_polish(objective, r.x, 6, 1e-6);
    for (int i = 0; i < 2; ++i)
      zz.segment(i * n, n) = zz.segment(i * n, n).cwiseMax(box.lo).cwiseMin(box.hi);
    MultiPointTuple t = unpack(zz, n, 2, sep);
    if (!t.separated()) continue;
    if (std::sqrt(diagonal_residual_sq(f, t)) > opts.image_tol) continue;
    bool dup = false;
    for (const auto& seen : hits)
      if ((seen.points[0] - t.points[0]).norm() + (seen.points[1] - t.points[1]).norm() < 1e-4 ||
          (seen.points[0] - t.points[1]).norm() + (seen.points[1] - t.points[0]).norm() < 1e-4)
        dup = true;
    if (!dup) hits.push_back(std::move(t));
  }
  return hits;
}

NormalCrossingsReport normal_crossings_check(const ExprMap& f, const Box& box, int d_max,
                                             const DoublePointSearchOptions& opts) {
  if (d_max < 2) throw std::invalid_argument("normal_crossings_check requires d_max >= 2");
  const int n = box.dim();
  const double sep = opts.separation_fraction * box.diameter();

  NormalCrossingsReport report;
  for (int d = 2; d <= d_max; ++d) {
    NormalCrossingsPerD row;
    row.d = d;

    auto objective = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd c(z.size());
      for (int i = 0; i < d; ++i)
        c.segment(i * n, n) = z.segment(i * n, n).cwiseMax(box.lo).cwiseMin(box.hi);
      MultiPointTuple t = unpack(c, n, d, sep);
      return diagonal_residual_sq(f, t) + separation_penalty(t);
    };

    SubstreamRng rng(opts.seed, 0x6e63ull + static_cast<std::uint64_t>(d));
    for (int s = 0; s < opts.multistarts; ++s) {
      Eigen::VectorXd z(d * n);
      for (int i = 0; i < d * n; ++i) {
        const int axis = i % n;
        z(i) = rng.uniform(box.lo(axis), box.hi(axis));
      }
      NelderMeadOptions nm;
      nm.max_iters = 600;
      nm.f_tol = 1e-18;
      MinimizeResult r = nelder_mead(objective, z, nm);
      Eigen::VectorXd zz = fd_newton_polish(objective, r.x, 6, 1e-6);
      for (int i = 0; i < d; ++i)
        zz.segment(i * n, n) = zz.segment(i * n, n).cwiseMax(box.lo).cwiseMin(box.hi);
      MultiPointTuple t = unpack(zz, n, d, sep);
      if (!t.separated()) continue;
      if (std::sqrt(diagonal_residual_sq(f, t)) > opts.image_tol) continue;
      ++row.tuples_found;
      const int defect = diagonal_defect(f, t, std::max(opts.image_tol, 1e-9));
      if (defect > row.max_defect) {
        row.max_defect = defect;
        row.defect_witness = t;
      }
    }
    if (row.max_defect > 0) report.normal_crossings = false;
    report.per_d.push_back(std::move(row));
  }
  return report;
}

DfEstimate estimate_df(const ExprMap& f, const Box& box, const DfEstimateOptions& opts) {
  const int m = f.output_dim();
  const double sep = opts.separation_fraction * box.diameter();

  DoublePointSearchOptions pre;
  pre.multistarts = 64;
  pre.seed = opts.seed;
  pre.separation_fraction = opts.separation_fraction;
  if (!double_point_search(f, box, pre).empty())
    throw std::invalid_argument("estimate_df: map is not injective on the box");

  DfEstimate est;
  est.d_hat = 2;
  // d capped at m + 2: beyond m + 1 points the rank condition cannot hold.
  for (int d = 3; d <= m + 2; ++d) {
    SubstreamRng rng(opts.seed, 0x6466ull + static_cast<std::uint64_t>(d));
    bool violated = false;
    for (int s = 0; s < opts.tuples_per_d && !violated; ++s) {
      MultiPointTuple t = sample_tuple(box, d, sep, rng);
      Eigen::MatrixXd diffs(m, d - 1);
      const Eigen::VectorXd y0 = eval(f, t.points[0]);
      for (int i = 1; i < d; ++i)
        diffs.col(i - 1) = eval(f, t.points[static_cast<std::size_t>(i)]) - y0;
      if (rank_decide(diffs, opts.rank_tol).rank < d - 1) {
        violated = true;
        est.violating_tuple = t;
      }
    }
    if (violated) break;
    est.d_hat = d;
  }
  return est;
}

}  // namespace tvlab
