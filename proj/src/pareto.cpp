#include "tvlab/pareto.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvlab/optim.hpp"
#include "tvlab/rng.hpp"
#include "tvlab/strata.hpp"

namespace tvlab {

namespace {

Eigen::VectorXd empty_vec() { return Eigen::VectorXd(); }

void check_objective(const MultiObjective& f) {
  if (f.components.empty()) throw std::invalid_argument("objective needs at least one component");
  for (const auto& c : f.components) {
    if (c.output_dim() != 1 || c.arity_a() != 0 || c.arity_x() != f.m())
      throw std::invalid_argument("objective components must be scalar maps on the domain box");
  }
}

Eigen::VectorXd objective_values(const MultiObjective& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(f.ell());
  for (int i = 0; i < f.ell(); ++i) y(i) = eval(f.components[static_cast<std::size_t>(i)], x)(0);
  return y;
}

Eigen::VectorXd scalarized_gradient(const MultiObjective& f, const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& x) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(f.m());
  for (int i = 0; i < f.ell(); ++i)
    if (w(i) != 0.0)
      g += w(i) * jacobian(f.components[static_cast<std::size_t>(i)], x, empty_vec(),
                           WithRespectTo::X)
                      .row(0)
                      .transpose();
  return g;
}

Eigen::MatrixXd scalarized_hessian(const MultiObjective& f, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& x) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(f.m(), f.m());
  for (int i = 0; i < f.ell(); ++i)
    if (w(i) != 0.0) H += w(i) * hessians(f.components[static_cast<std::size_t>(i)], x)[0];
  return H;
}

double scalarized_value(const MultiObjective& f, const Eigen::VectorXd& w,
                        const Eigen::VectorXd& x) {
  return w.dot(objective_values(f, x));
}

// Gradient with descent components blocked by the box zeroed out.
double projected_gradient_norm(const Box& box, const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  double s = 0.0;
  for (int i = 0; i < box.dim(); ++i) {
    const bool at_lo = x(i) <= box.lo(i) + 1e-14 && g(i) > 0.0;
    const bool at_hi = x(i) >= box.hi(i) - 1e-14 && g(i) < 0.0;
    if (!at_lo && !at_hi) s += g(i) * g(i);
  }
  return std::sqrt(s);
}

Eigen::MatrixXd stacked_jacobian(const MultiObjective& f, const Eigen::VectorXd& x) {
  Eigen::MatrixXd J(f.ell(), f.m());
  for (int i = 0; i < f.ell(); ++i)
    J.row(i) = jacobian(f.components[static_cast<std::size_t>(i)], x, empty_vec(),
                        WithRespectTo::X)
                   .row(0);
  return J;
}

void enumerate_compositions(int remaining, int slots, std::vector<int>& cur,
                            std::vector<std::vector<int>>& out) {
  if (slots == 1) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur.push_back(v);
    enumerate_compositions(remaining - v, slots - 1, cur, out);
    cur.pop_back();
  }
}

MultiObjective sub_objective(const MultiObjective& f, const std::vector<int>& support) {
  MultiObjective sub;
  sub.domain_box = f.domain_box;
  sub.alpha_hat = f.alpha_hat;
  for (int i : support) sub.components.push_back(f.components[static_cast<std::size_t>(i)]);
  return sub;
}

ExprPtr make_const(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->cval = v;
  return e;
}

ExprPtr make_var_x(int index) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::VarX;
  e->index = index;
  return e;
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

Eigen::MatrixXd sample_perturbation(int ell, int m, double scale, SubstreamRng& rng) {
  // Uniform in the Frobenius ball: gaussian direction times u^(1/dim) radius.
  const int dim = ell * m;
  Eigen::VectorXd g(dim);
  for (int i = 0; i < dim; i += 2) {
    const double u1 = 1.0 - rng.next_double();
    const double u2 = rng.next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    g(i) = r * std::cos(2.0 * M_PI * u2);
    if (i + 1 < dim) g(i + 1) = r * std::sin(2.0 * M_PI * u2);
  }
  const double nrm = g.norm();
  if (nrm == 0.0) return Eigen::MatrixXd::Zero(ell, m);
  const double radius =
      scale * std::pow(rng.next_double(), 1.0 / static_cast<double>(dim));
  g *= radius / nrm;
  return Eigen::Map<Eigen::MatrixXd>(g.data(), ell, m);
}

struct TrialOutcome {
  bool bad = false;
  bool simpliciality_failed = false;
  bool solver_failed = false;
  Eigen::MatrixXd pi;
};

TrialOutcome run_trial(const MultiObjective& f, const PerturbationStudyOptions& opts, int trial) {
  const int ell = f.ell();
  const int m = f.m();
  TrialOutcome out;
  SubstreamRng rng(opts.seed, static_cast<std::uint64_t>(trial));
  out.pi = sample_perturbation(ell, m, opts.perturbation_scale, rng);
  const MultiObjective g = perturb_linear(f, out.pi);

  // Bundle the components into one map for the corank screen.
  std::vector<ExprPtr> comps;
  for (const auto& c : g.components) comps.push_back(c.components().front());
  const ExprMap bundled(m, 0, comps);

  if (ell >= 2) {
    const CorankSurvey survey = corank_survey(bundled, g.domain_box, 5);
    bool witness = survey.max_corank >= 2;

    if (!witness) {
      // Second-smallest singular value of the differential; zero at rank <= ell-2.
      auto second_sv_sq = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd c =
            x.cwiseMax(g.domain_box.lo).cwiseMin(g.domain_box.hi);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked_jacobian(g, c));
        const double s = svd.singularValues()(ell - 2);
        return s * s;
      };
      for (int s = 0; s < opts.corank_multistarts && !witness; ++s) {
        Eigen::VectorXd x0(m);
        for (int i = 0; i < m; ++i)
          x0(i) = rng.uniform(g.domain_box.lo(i), g.domain_box.hi(i));
        NelderMeadOptions nm;
        nm.max_iters = 300;
        nm.f_tol = 1e-18;
        const MinimizeResult r = nelder_mead(second_sv_sq, x0, nm);
        const Eigen::VectorXd x = fd_newton_polish(second_sv_sq, r.x, 6, 1e-6);
        if (std::sqrt(second_sv_sq(x)) < opts.corank_tol) witness = true;
      }
    }
    out.bad = witness;
  }

  try {
    const ParetoAtlas atlas = build_pareto_atlas_serial(g, opts.coarse_resolution);
    const SimplicialityReport rep = simpliciality_check(g, atlas);
    out.simpliciality_failed = rep.verdict == SimplicialityVerdict::Failed;
  } catch (const std::exception&) {
    out.solver_failed = true;
  }
  return out;
}

PerturbationStudy study_impl(const MultiObjective& f, const PerturbationStudyOptions& opts,
                             bool parallel) {
  check_objective(f);
  const int ell = f.ell();
  const int m = f.m();
  if (m < ell) throw std::invalid_argument("perturbation_study requires m >= ell");
  if (m - 2 * ell + 4 <= 0)
    throw std::invalid_argument("perturbation_study requires m - 2*ell + 4 > 0");
  if (f.alpha_hat <= 0.0)
    throw std::invalid_argument("perturbation_study requires a strongly convex objective");
  if (opts.trials < 1) throw std::invalid_argument("perturbation_study needs trials >= 1");

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(opts.trials));
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < opts.trials; ++t)
      outcomes[static_cast<std::size_t>(t)] = run_trial(f, opts, t);
  } else {
    for (int t = 0; t < opts.trials; ++t)
      outcomes[static_cast<std::size_t>(t)] = run_trial(f, opts, t);
  }

  PerturbationStudy study;
  study.trials = opts.trials;
  for (int t = 0; t < opts.trials; ++t) {
    const TrialOutcome& o = outcomes[static_cast<std::size_t>(t)];
    if (o.bad) {
      ++study.bad_count;
      study.bad_samples.push_back(o.pi);
    }
    if (o.simpliciality_failed) study.failed_simpliciality_trials.push_back(t);
    if (o.solver_failed) ++study.solver_failures;
  }
  study.bad_fraction = static_cast<double>(study.bad_count) / static_cast<double>(opts.trials);

  if (study.bad_samples.size() >= 100) {
    std::vector<Eigen::VectorXd> cloud;
    for (const auto& pi : study.bad_samples)
      cloud.emplace_back(Eigen::Map<const Eigen::VectorXd>(pi.data(), pi.size()));
    study.bad_set_dimension = box_count(cloud);
  }

  ThresholdQuery q;
  q.kind = ThresholdQuery::Kind::Pareto;
  q.m = m;
  q.ell = ell;
  study.threshold = genericity_threshold(q);
  return study;
}

}  // namespace

const char* to_string(SimplicialityVerdict v) {
  switch (v) {
    case SimplicialityVerdict::SimplicialEvidence: return "SIMPLICIAL_EVIDENCE";
    case SimplicialityVerdict::WeaklySimplicialEvidence: return "WEAKLY_SIMPLICIAL_EVIDENCE";
    case SimplicialityVerdict::Failed: return "FAILED";
  }
  return "?";
}

WeightSimplexGrid WeightSimplexGrid::build(int ell, int resolution) {
  if (ell < 1 || resolution < 1)
    throw std::invalid_argument("weight grid needs ell >= 1 and resolution >= 1");
  WeightSimplexGrid grid;
  grid.ell = ell;
  grid.resolution = resolution;
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  enumerate_compositions(resolution, ell, cur, comps);
  for (const auto& c : comps) {
    Eigen::VectorXd w(ell);
    std::vector<int> support;
    for (int i = 0; i < ell; ++i) {
      w(i) = static_cast<double>(c[static_cast<std::size_t>(i)]) / resolution;
      if (c[static_cast<std::size_t>(i)] > 0) support.push_back(i);
    }
    grid.nodes.push_back(std::move(w));
    grid.supports.push_back(std::move(support));
  }
  return grid;
}

double strong_convexity_estimate(const MultiObjective& f, int samples) {
  check_objective(f);
  const int m = f.m();
  int per_axis = std::max(
      3, static_cast<int>(std::round(std::pow(static_cast<double>(samples), 1.0 / m))));
  if (per_axis % 2 == 0) ++per_axis;

  double alpha = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  Eigen::VectorXd x(m);
  for (;;) {
    for (int i = 0; i < m; ++i) {
      const double t =
          static_cast<double>(idx[static_cast<std::size_t>(i)]) / (per_axis - 1);
      x(i) = f.domain_box.lo(i) + t * (f.domain_box.hi(i) - f.domain_box.lo(i));
    }
    for (const auto& c : f.components) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessians(c, x)[0]);
      alpha = std::min(alpha, es.eigenvalues().minCoeff());
    }
    int axis = 0;
    while (axis < m && ++idx[static_cast<std::size_t>(axis)] == per_axis) {
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == m) break;
  }
  return alpha;
}

Eigen::VectorXd scalarize_min(const MultiObjective& f, const Eigen::VectorXd& w,
                              const ScalarizeOptions& opts) {
  check_objective(f);
  if (w.size() != f.ell()) throw std::invalid_argument("weight dimension mismatch");
  if (f.alpha_hat <= 0.0)
    throw std::invalid_argument("scalarize_min requires a strongly convex objective");

  const Box& box = f.domain_box;
  Eigen::VectorXd x = box.center();
  double fx = scalarized_value(f, w, x);
  for (int it = 0; it < opts.max_iters; ++it) {
    const Eigen::VectorXd g = scalarized_gradient(f, w, x);
    if (projected_gradient_norm(box, x, g) <= opts.gradient_tol) return x;
    Eigen::VectorXd dx = scalarized_hessian(f, w, x).fullPivLu().solve(-g);
    if (!dx.allFinite()) dx = -g;
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd cand = (x + t * dx).cwiseMax(box.lo).cwiseMin(box.hi);
      const double fc = scalarized_value(f, w, cand);
      if (fc < fx || (cand - x).norm() == 0.0) {
        if ((cand - x).norm() == 0.0 && fc >= fx) break;
        x = cand;
        fx = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (projected_gradient_norm(box, x, scalarized_gradient(f, w, x)) <= opts.gradient_tol)
        return x;
      break;
    }
  }
  if (projected_gradient_norm(box, x, scalarized_gradient(f, w, x)) <= opts.gradient_tol)
    return x;
  throw std::runtime_error("scalarize_min did not converge within its iteration budget");
}

bool pareto_membership(const MultiObjective& f, const Eigen::VectorXd& x, int probe_budget) {
  check_objective(f);
  const Eigen::VectorXd fx = objective_values(f, x);
  const Box& box = f.domain_box;

  for (int j = 0; j < f.ell(); ++j) {
    // Descend objective j while penalizing any worsening of the others.
    auto probe = [&](const Eigen::VectorXd& y) {
      const Eigen::VectorXd c = y.cwiseMax(box.lo).cwiseMin(box.hi);
      const Eigen::VectorXd fy = objective_values(f, c);
      double pen = 0.0;
      for (int i = 0; i < f.ell(); ++i) {
        if (i == j) continue;
        const double excess = fy(i) - fx(i);
        // Stiff enough that the penalty-optimal excess sits far below the
        // non-worsening tolerance used in the dominance verdict.
        if (excess > 0.0) pen += 1e12 * excess * excess;
      }
      return fy(j) + pen;
    };
    NelderMeadOptions nm;
    nm.max_iters = probe_budget;
    nm.initial_step = 0.05 * box.diameter();
    const MinimizeResult r = nelder_mead(probe, x, nm);
    const Eigen::VectorXd y = r.x.cwiseMax(box.lo).cwiseMin(box.hi);
    const Eigen::VectorXd fy = objective_values(f, y);
    bool dominates = fy(j) < fx(j) - 1e-6;
    for (int i = 0; i < f.ell(); ++i)
      if (i != j && fy(i) > fx(i) + 1e-9) dominates = false;
    if (dominates) return false;
  }
  return true;
}

namespace {

ParetoAtlas atlas_impl(const MultiObjective& f, int resolution, const ScalarizeOptions& opts,
                       bool parallel) {
  check_objective(f);
  ParetoAtlas atlas;
  atlas.grid = WeightSimplexGrid::build(f.ell(), resolution);
  const int count = static_cast<int>(atlas.grid.nodes.size());
  atlas.minimizers.resize(static_cast<std::size_t>(count));
  atlas.values.resize(static_cast<std::size_t>(count));

  std::vector<std::string> failures(static_cast<std::size_t>(count));
  auto solve_node = [&](int i) {
    try {
      const Eigen::VectorXd x =
          scalarize_min(f, atlas.grid.nodes[static_cast<std::size_t>(i)], opts);
      atlas.minimizers[static_cast<std::size_t>(i)] = x;
      atlas.values[static_cast<std::size_t>(i)] = objective_values(f, x);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) solve_node(i);
  } else {
    for (int i = 0; i < count; ++i) solve_node(i);
  }

  for (int i = 0; i < count; ++i)
    if (!failures[static_cast<std::size_t>(i)].empty())
      throw std::runtime_error("atlas node " + std::to_string(i) +
                               " failed: " + failures[static_cast<std::size_t>(i)]);
  return atlas;
}

}  // namespace

ParetoAtlas build_pareto_atlas(const MultiObjective& f, int resolution,
                               const ScalarizeOptions& opts) {
  return atlas_impl(f, resolution, opts, true);
}

ParetoAtlas build_pareto_atlas_serial(const MultiObjective& f, int resolution,
                                      const ScalarizeOptions& opts) {
  return atlas_impl(f, resolution, opts, false);
}

SimplicialityReport simpliciality_check(const MultiObjective& f, const ParetoAtlas& atlas,
                                        TolPolicy rank_tol) {
  check_objective(f);
  SimplicialityReport report;
  const int ell = f.ell();
  const int count = static_cast<int>(atlas.grid.nodes.size());

  if (ell >= 2) {
    for (int i = 0; i < count; ++i) {
      const Eigen::MatrixXd J =
          stacked_jacobian(f, atlas.minimizers[static_cast<std::size_t>(i)]);
      if (rank_decide(J, rank_tol).rank != ell - 1) {
        report.rank_condition_ok = false;
        report.rank_violations.push_back(i);
      }
    }
  }

  for (int i = 0; i < count; ++i) {
    const MultiObjective sub =
        sub_objective(f, atlas.grid.supports[static_cast<std::size_t>(i)]);
    if (!pareto_membership(sub, atlas.minimizers[static_cast<std::size_t>(i)])) {
      report.face_consistency_ok = false;
      report.face_violations.push_back(i);
    }
  }

  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const double dw =
          (atlas.grid.nodes[static_cast<std::size_t>(i)] - atlas.grid.nodes[static_cast<std::size_t>(j)])
              .norm();
      const double dx =
          (atlas.minimizers[static_cast<std::size_t>(i)] - atlas.minimizers[static_cast<std::size_t>(j)])
              .norm();
      const double dy =
          (atlas.values[static_cast<std::size_t>(i)] - atlas.values[static_cast<std::size_t>(j)])
              .norm();
      if (dw > 1e-12 && (dx < 1e-8 || dy < 1e-10)) {
        report.injectivity_ok = false;
        report.injectivity_witnesses.emplace_back(i, j);
      }
    }

  if (!report.injectivity_ok || !report.face_consistency_ok)
    report.verdict = SimplicialityVerdict::Failed;
  else if (!report.rank_condition_ok)
    report.verdict = SimplicialityVerdict::WeaklySimplicialEvidence;
  else
    report.verdict = SimplicialityVerdict::SimplicialEvidence;
  return report;
}

void write_atlas_csv(const ParetoAtlas& atlas, std::ostream& out) {
  const int ell = atlas.grid.ell;
  const int m = atlas.minimizers.empty() ? 0 : static_cast<int>(atlas.minimizers.front().size());
  for (int i = 0; i < ell; ++i) out << "w" << i + 1 << ",";
  for (int i = 0; i < m; ++i) out << "x" << i + 1 << ",";
  for (int i = 0; i < ell; ++i) out << "f" << i + 1 << (i + 1 < ell ? "," : "");
  out << "\n";
  for (std::size_t n = 0; n < atlas.grid.nodes.size(); ++n) {
    for (int i = 0; i < ell; ++i) out << atlas.grid.nodes[n](i) << ",";
    for (int i = 0; i < m; ++i) out << atlas.minimizers[n](i) << ",";
    for (int i = 0; i < ell; ++i) out << atlas.values[n](i) << (i + 1 < ell ? "," : "");
    out << "\n";
  }
}

MultiObjective perturb_linear(const MultiObjective& f, const Eigen::MatrixXd& pi) {
  check_objective(f);
  if (pi.rows() != f.ell() || pi.cols() != f.m())
    throw std::invalid_argument("perturbation matrix shape mismatch");
  MultiObjective g;
  g.domain_box = f.domain_box;
  g.alpha_hat = f.alpha_hat;  // linear terms do not change the Hessians
  for (int i = 0; i < f.ell(); ++i) {
    ExprPtr body = f.components[static_cast<std::size_t>(i)].components().front();
    for (int j = 0; j < f.m(); ++j) {
      if (pi(i, j) == 0.0) continue;
      body = make_binary(Expr::Kind::Add, body,
                         make_binary(Expr::Kind::Mul, make_const(pi(i, j)), make_var_x(j)));
    }
    g.components.emplace_back(f.m(), 0, std::vector<ExprPtr>{body});
  }
  return g;
}

PerturbationStudy perturbation_study(const MultiObjective& f,
                                     const PerturbationStudyOptions& opts) {
  return study_impl(f, opts, true);
}

PerturbationStudy perturbation_study_serial(const MultiObjective& f,
                                            const PerturbationStudyOptions& opts) {
  return study_impl(f, opts, false);
}

}  // namespace tvlab
