#include "tvlab/transversality.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "tvlab/optim.hpp"
#include "tvlab/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tvlab {

namespace {

Eigen::VectorXd empty_vec() { return Eigen::VectorXd(); }

void check_submersion(const LevelSetSubmanifold& Z, const Eigen::VectorXd& y,
                      TolPolicy rank_tol) {
  const Eigen::MatrixXd dh = jacobian(Z.defining_map, y, empty_vec(), WithRespectTo::X);
  if (rank_decide(dh, rank_tol).rank < Z.codim())
    throw std::invalid_argument(
        "level-set submanifold fails its submersion check at the image point");
}

int defect_from_jacobians(const LevelSetSubmanifold& Z, const Eigen::VectorXd& y,
                          const Eigen::MatrixXd& df, TolPolicy rank_tol) {
  const Eigen::VectorXd hy = eval(Z.defining_map, y);
  if (hy.lpNorm<Eigen::Infinity>() > Z.membership_tol) return 0;
  check_submersion(Z, y, rank_tol);
  const Eigen::MatrixXd dh = jacobian(Z.defining_map, y, empty_vec(), WithRespectTo::X);
  return Z.codim() - rank_decide(dh * df, rank_tol).rank;
}

// c-th largest singular value of dh * d_x F: its vanishing marks the rank
// drop that makes the section defect positive.
double rank_drop_gap(const FamilyProblem& P, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& a) {
  const Eigen::VectorXd y = eval(P.family, x, a);
  const Eigen::MatrixXd dh =
      jacobian(P.target.defining_map, y, empty_vec(), WithRespectTo::X);
  const Eigen::MatrixXd dfx = jacobian(P.family, x, a, WithRespectTo::X);
  const Eigen::MatrixXd M = dh * dfx;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const int c = P.target.codim();
  const Eigen::VectorXd& sv = svd.singularValues();
  return c - 1 < sv.size() ? sv(c - 1) : 0.0;
}

// Damped Gauss-Newton descent on ||h(F_a(x))||^2, clamped to the box.
Eigen::VectorXd refine_on_z(const FamilyProblem& P, const Eigen::VectorXd& a,
                            Eigen::VectorXd x, int max_iters) {
  auto residual = [&](const Eigen::VectorXd& xx) {
    return eval(P.target.defining_map, eval(P.family, xx, a));
  };
  double fx = residual(x).squaredNorm();
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd y = eval(P.family, x, a);
    const Eigen::MatrixXd dh =
        jacobian(P.target.defining_map, y, empty_vec(), WithRespectTo::X);
    const Eigen::MatrixXd J = dh * jacobian(P.family, x, a, WithRespectTo::X);
    const Eigen::VectorXd r = residual(x);
    if (r.squaredNorm() == 0.0) break;
    const double mu = 1e-12 * J.squaredNorm() + 1e-300;
    const Eigen::MatrixXd JtJ =
        J.transpose() * J + mu * Eigen::MatrixXd::Identity(J.cols(), J.cols());
    const Eigen::VectorXd step = JtJ.ldlt().solve(J.transpose() * r);
    if (!step.allFinite() || step.norm() == 0.0) break;
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Eigen::VectorXd cand = x - t * step;
      cand = cand.cwiseMax(P.x_box.lo).cwiseMin(P.x_box.hi);
      const double fc = residual(cand).squaredNorm();
      if (fc < fx) {
        x = cand;
        fx = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || fx < 1e-28) break;
  }
  return x;
}

int pick_grid_resolution(int n, int requested) {
  if (requested > 0) return requested;
  if (n <= 2) return 64;
  if (n <= 4) return 16;
  return 8;
}

void for_each_grid_node(const Box& box, int per_axis,
                        const std::function<void(const Eigen::VectorXd&)>& fn) {
  const int n = box.dim();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd x(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      const double t = per_axis == 1 ? 0.5
                                     : static_cast<double>(idx[static_cast<std::size_t>(i)]) /
                                           static_cast<double>(per_axis - 1);
      x(i) = box.lo(i) + t * (box.hi(i) - box.lo(i));
    }
    fn(x);
    int axis = 0;
    while (axis < n && ++idx[static_cast<std::size_t>(axis)] == per_axis) {
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == n) break;
  }
}

long long llgcd(long long a, long long b) {
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

ThresholdBound make_bound(long long num, long long den, bool strict, std::string rule) {
  const long long g = llgcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return ThresholdBound{num, den, strict, std::move(rule)};
}

}  // namespace

const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::NotOnZ: return "NOT_ON_Z";
    case PointClass::Transverse: return "TRANSVERSE";
    case PointClass::InW: return "IN_W";
    case PointClass::InWTilde: return "IN_W_TILDE";
  }
  return "?";
}

int defect_at(const ExprMap& f, const LevelSetSubmanifold& Z, const Eigen::VectorXd& x,
              TolPolicy rank_tol) {
  if (f.arity_a() != 0)
    throw ArityError("defect_at expects a non-parametric map; bind parameters first");
  const Eigen::VectorXd y = eval(f, x);
  const Eigen::MatrixXd df = jacobian(f, x, empty_vec(), WithRespectTo::X);
  return defect_from_jacobians(Z, y, df, rank_tol);
}

int section_defect(const FamilyProblem& P, const Eigen::VectorXd& x, const Eigen::VectorXd& a) {
  const Eigen::VectorXd y = eval(P.family, x, a);
  const Eigen::MatrixXd df = jacobian(P.family, x, a, WithRespectTo::X);
  return defect_from_jacobians(P.target, y, df, P.rank_tol);
}

int family_defect(const FamilyProblem& P, const Eigen::VectorXd& x, const Eigen::VectorXd& a) {
  const Eigen::VectorXd y = eval(P.family, x, a);
  const Eigen::MatrixXd df = jacobian(P.family, x, a, WithRespectTo::XA);
  return defect_from_jacobians(P.target, y, df, P.rank_tol);
}

DefectReport classify_family_point(const FamilyProblem& P, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& a) {
  DefectReport report;
  report.delta_section = section_defect(P, x, a);
  report.delta_family = family_defect(P, x, a);
  report.witness_x = x;
  report.witness_a = a;

  const Eigen::VectorXd hy = eval(P.target.defining_map, eval(P.family, x, a));
  if (hy.lpNorm<Eigen::Infinity>() > P.target.membership_tol)
    report.classification = PointClass::NotOnZ;
  else if (report.delta_section == 0)
    report.classification = PointClass::Transverse;
  else if (report.delta_section == report.delta_family)
    report.classification = PointClass::InW;
  else
    report.classification = PointClass::InWTilde;
  return report;
}

int delta_star(const FamilyProblem& P, int family_sup) {
  return P.family.arity_x() - P.target.codim() + family_sup;
}

int defect_family_sup(const FamilyProblem& P, const GridSpec& grid) {
  if (grid.points_per_axis < 1) throw std::invalid_argument("empty sample grid");
  Box product;
  const int n = P.x_box.dim();
  const int p = P.a_box.dim();
  product.lo.resize(n + p);
  product.hi.resize(n + p);
  product.lo << P.x_box.lo, P.a_box.lo;
  product.hi << P.x_box.hi, P.a_box.hi;

  int sup = 0;
  for_each_grid_node(product, grid.points_per_axis, [&](const Eigen::VectorXd& z) {
    sup = std::max(sup, family_defect(P, z.head(n), z.tail(p)));
  });
  return sup;
}

std::optional<Eigen::VectorXd> find_nontransverse_witness(const FamilyProblem& P,
                                                          const Eigen::VectorXd& a,
                                                          const WitnessSearchOptions& opts) {
  const int n = P.x_box.dim();
  const int per_axis = pick_grid_resolution(n, opts.grid_per_axis);
  const double accept = std::max(P.target.membership_tol, opts.residual_tol);

  // Rank drop measured by an absolute singular-value gap: a relative rank
  // test on a near-zero product would never drop.
  auto is_witness = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd hy = eval(P.target.defining_map, eval(P.family, x, a));
    if (hy.lpNorm<Eigen::Infinity>() > accept) return false;
    return rank_drop_gap(P, x, a) < opts.gap_tol;
  };

  // Coarse scan, keeping the lowest-residual starts for refinement.
  struct Start {
    double residual;
    Eigen::VectorXd x;
  };
  std::vector<Start> starts;
  std::optional<Eigen::VectorXd> direct_hit;
  for_each_grid_node(P.x_box, per_axis, [&](const Eigen::VectorXd& x) {
    if (direct_hit) return;
    if (is_witness(x)) {
      direct_hit = x;
      return;
    }
    const double r =
        eval(P.target.defining_map, eval(P.family, x, a)).lpNorm<Eigen::Infinity>();
    starts.push_back({r, x});
  });
  if (direct_hit) return direct_hit;

  std::stable_sort(starts.begin(), starts.end(),
                   [](const Start& u, const Start& v) { return u.residual < v.residual; });
  const std::size_t tries = std::min<std::size_t>(starts.size(), 8);
  for (std::size_t i = 0; i < tries; ++i) {
    const Eigen::VectorXd refined = refine_on_z(P, a, starts[i].x, opts.refine_iters);
    if (is_witness(refined)) return refined;
  }
  return std::nullopt;
}

namespace {

std::optional<Eigen::VectorXd> sigma_trial(const FamilyProblem& P,
                                           const SigmaSampleOptions& opts, std::uint64_t index) {
  SubstreamRng rng(opts.seed, index);
  const int n = P.x_box.dim();
  const int p = P.a_box.dim();
  Eigen::VectorXd z(n + p);
  for (int i = 0; i < n; ++i) z(i) = rng.uniform(P.x_box.lo(i), P.x_box.hi(i));
  for (int i = 0; i < p; ++i) z(n + i) = rng.uniform(P.a_box.lo(i), P.a_box.hi(i));

  auto clamp = [&](Eigen::VectorXd w) {
    w.head(n) = w.head(n).cwiseMax(P.x_box.lo).cwiseMin(P.x_box.hi);
    w.tail(p) = w.tail(p).cwiseMax(P.a_box.lo).cwiseMin(P.a_box.hi);
    return w;
  };

  // Badness: residual on Z plus the rank-drop gap of the section Jacobian.
  // Its zero set projected to A is exactly the sampled portion of Sigma.
  auto badness = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd c = clamp(w);
    const Eigen::VectorXd x = c.head(n);
    const Eigen::VectorXd a = c.tail(p);
    const double res =
        eval(P.target.defining_map, eval(P.family, x, a)).squaredNorm();
    const double gap = rank_drop_gap(P, x, a);
    return res + gap * gap;
  };

  NelderMeadOptions nm;
  nm.max_iters = 800;
  nm.f_tol = 1e-18;
  nm.initial_step = 0.05;
  const MinimizeResult r = nelder_mead(badness, z, nm);
  const Eigen::VectorXd w = clamp(r.x);
  const Eigen::VectorXd x = w.head(n);
  const Eigen::VectorXd a = w.tail(p);

  const Eigen::VectorXd hy = eval(P.target.defining_map, eval(P.family, x, a));
  if (hy.lpNorm<Eigen::Infinity>() > opts.accept_residual) return std::nullopt;
  if (rank_drop_gap(P, x, a) >= opts.accept_gap) return std::nullopt;
  return a;
}

SigmaSample sample_sigma_impl(const FamilyProblem& P, const SigmaSampleOptions& opts,
                              bool parallel) {
  std::vector<std::optional<Eigen::VectorXd>> slots(static_cast<std::size_t>(opts.budget));
  if (parallel) {
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < opts.budget; ++i)
      slots[static_cast<std::size_t>(i)] = sigma_trial(P, opts, static_cast<std::uint64_t>(i));
#else
    for (int i = 0; i < opts.budget; ++i)
      slots[static_cast<std::size_t>(i)] = sigma_trial(P, opts, static_cast<std::uint64_t>(i));
#endif
  } else {
    for (int i = 0; i < opts.budget; ++i)
      slots[static_cast<std::size_t>(i)] = sigma_trial(P, opts, static_cast<std::uint64_t>(i));
  }

  SigmaSample out;
  out.trials = opts.budget;
  for (auto& s : slots)
    if (s) out.points.push_back(std::move(*s));
  return out;
}

}  // namespace

SigmaSample sample_sigma(const FamilyProblem& P, const SigmaSampleOptions& opts) {
  return sample_sigma_impl(P, opts, true);
}

SigmaSample sample_sigma_serial(const FamilyProblem& P, const SigmaSampleOptions& opts) {
  return sample_sigma_impl(P, opts, false);
}

ThresholdBound genericity_threshold(const ThresholdQuery& q) {
  using Kind = ThresholdQuery::Kind;
  switch (q.kind) {
    case Kind::Main1:
    case Kind::Main2: {
      if (q.kind == Kind::Main1 && q.delta_star >= 0) {
        if (q.smooth_infinity)
          return make_bound(q.dim_a - 1, 1, true, "s > dim A - 1 (C-infinity)");
        if (q.r < 1) throw std::invalid_argument("main theorem requires r >= 1");
        return make_bound(static_cast<long long>(q.dim_a - 1) * q.r + q.delta_star + 1, q.r,
                          false, "s >= dim A - 1 + (delta* + 1)/r");
      }
      if (q.kind == Kind::Main1 && q.delta_star < 0) {
        // delta* < 0 falls through to the second branch of the theorem.
        return make_bound(q.dim_a + q.delta_star, 1, true, "s > dim A + delta*");
      }
      return make_bound(q.dim_a + q.delta_star, 1, true, "s > dim A + delta*");
    }
    case Kind::Jet: {
      if (!q.smooth_infinity && q.r < 2)
        throw std::invalid_argument("jet-stratum theorem requires r >= 2");
      const int v = std::min(q.n, q.ell);
      if (q.k < 1 || q.k > v) throw std::invalid_argument("stratum corank k out of range");
      const long long codim =
          static_cast<long long>(q.n - v + q.k) * (q.ell - v + q.k);
      const long long diff = q.n - codim;
      const long long ml = static_cast<long long>(q.m) * q.ell;
      if (q.smooth_infinity) return make_bound(ml - 1, 1, true, "s > ml - 1 (C-infinity)");
      if (diff >= 0)
        return make_bound((ml - 1) * (q.r - 1) + diff + 1, q.r - 1, false,
                          "s >= ml - 1 + (dim X - codim S^k + 1)/(r - 1)");
      return make_bound(ml + diff, 1, true, "s > ml + dim X - codim S^k");
    }
    case Kind::Multipoint: {
      if (!q.smooth_infinity && q.r < 1)
        throw std::invalid_argument("multipoint theorem requires r >= 1");
      if (q.d < 2) throw std::invalid_argument("multipoint theorem requires d >= 2");
      const long long diff =
          static_cast<long long>(q.n) * q.d - static_cast<long long>(q.ell) * (q.d - 1);
      const long long ml = static_cast<long long>(q.m) * q.ell;
      if (q.smooth_infinity) return make_bound(ml - 1, 1, true, "s > ml - 1 (C-infinity)");
      if (diff >= 0)
        return make_bound((ml - 1) * q.r + diff + 1, q.r, false,
                          "s >= ml - 1 + (dim X^(d) - codim Delta_d + 1)/r");
      return make_bound(ml + diff, 1, true, "s > ml + dim X^(d) - codim Delta_d");
    }
    case Kind::Morse: {
      if (q.smooth_infinity) return make_bound(q.m - 1, 1, true, "s > m - 1 (C-infinity)");
      if (q.r < 2) throw std::invalid_argument("Morse corollary requires r >= 2");
      return make_bound(static_cast<long long>(q.m - 1) * (q.r - 1) + 1, q.r - 1, false,
                        "s >= m - 1 + 1/(r - 1)");
    }
    case Kind::Pareto: {
      if (q.m < q.ell) throw std::invalid_argument("simpliciality theorem requires m >= ell");
      if (q.m - 2 * q.ell + 4 <= 0)
        throw std::invalid_argument("simpliciality theorem requires m - 2l + 4 > 0");
      return make_bound(static_cast<long long>(q.m) * q.ell - (q.m - 2 * q.ell + 4), 1, true,
                        "s > ml - (m - 2l + 4)");
    }
  }
  throw std::invalid_argument("unknown threshold query");
}

}  // namespace tvlab
