#ifndef TVLAB_PARETO_HPP
#define TVLAB_PARETO_HPP

#include <Eigen/Core>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tvlab/dimension.hpp"
#include "tvlab/expr.hpp"
#include "tvlab/transversality.hpp"

namespace tvlab {

/// l scalar objectives on a common box domain in R^m.
struct MultiObjective {
  std::vector<ExprMap> components;  // each with arity (m, 0) and one output
  Box domain_box;
  double alpha_hat = 0.0;  // filled by strong_convexity_estimate

  int ell() const { return static_cast<int>(components.size()); }
  int m() const { return domain_box.dim(); }
};

/// All weights w in the standard simplex with coordinates in {0, 1/k, .., 1}.
struct WeightSimplexGrid {
  int ell = 1;
  int resolution = 1;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<std::vector<int>> supports;  // indices i with w_i > 0, per node

  static WeightSimplexGrid build(int ell, int resolution);
};

struct ParetoAtlas {
  WeightSimplexGrid grid;
  std::vector<Eigen::VectorXd> minimizers;  // x*(w) per node
  std::vector<Eigen::VectorXd> values;      // f(x*(w)) per node
};

enum class SimplicialityVerdict { SimplicialEvidence, WeaklySimplicialEvidence, Failed };

const char* to_string(SimplicialityVerdict v);

struct SimplicialityReport {
  bool rank_condition_ok = true;
  std::vector<int> rank_violations;  // node indices
  bool face_consistency_ok = true;
  std::vector<int> face_violations;
  bool injectivity_ok = true;
  std::vector<std::pair<int, int>> injectivity_witnesses;  // colliding node pairs
  SimplicialityVerdict verdict = SimplicialityVerdict::SimplicialEvidence;
};

/// Minimum Hessian eigenvalue over all components on an odd per-axis sample
/// grid (so centered boxes include their midpoint). Positive means strongly
/// convex on the sampled box.
double strong_convexity_estimate(const MultiObjective& f, int samples = 1000);

struct ScalarizeOptions {
  int max_iters = 200;
  double gradient_tol = 1e-10;
};

/// Unique minimizer of sum w_i f_i on the box by damped Newton.
/// Throws on non-convergence within the iteration budget.
Eigen::VectorXd scalarize_min(const MultiObjective& f, const Eigen::VectorXd& w,
                              const ScalarizeOptions& opts = ScalarizeOptions());

/// One-sided numerical Pareto test: no dominating point found by descent on
/// each objective under non-worsening of the others.
bool pareto_membership(const MultiObjective& f, const Eigen::VectorXd& x, int probe_budget = 200);

ParetoAtlas build_pareto_atlas(const MultiObjective& f, int resolution,
                               const ScalarizeOptions& opts = ScalarizeOptions());

/// Serial reference with identical output.
ParetoAtlas build_pareto_atlas_serial(const MultiObjective& f, int resolution,
                                      const ScalarizeOptions& opts = ScalarizeOptions());

SimplicialityReport simpliciality_check(const MultiObjective& f, const ParetoAtlas& atlas,
                                        TolPolicy rank_tol = TolPolicy::relative());

void write_atlas_csv(const ParetoAtlas& atlas, std::ostream& out);

/// f with component i replaced by f_i + sum_j pi(i,j) x_j.
MultiObjective perturb_linear(const MultiObjective& f, const Eigen::MatrixXd& pi);

struct PerturbationStudyOptions {
  double perturbation_scale = 1.0;
  int trials = 100;
  std::uint64_t seed = 0;
  int corank_multistarts = 16;
  double corank_tol = 1e-7;
  int coarse_resolution = 3;
};

struct PerturbationStudy {
  int trials = 0;
  int bad_count = 0;
  int solver_failures = 0;
  double bad_fraction = 0.0;
  std::vector<Eigen::MatrixXd> bad_samples;
  std::vector<int> failed_simpliciality_trials;
  std::optional<BoxCountEstimate> bad_set_dimension;  // when enough bad samples
  ThresholdBound threshold;
};

/// Samples linear perturbations pi in a Frobenius ball, flags those whose
/// perturbed objective has a point with corank >= 2 differential, and runs a
/// coarse simpliciality check per trial. Requires m >= ell, m - 2*ell + 4 > 0
/// and strong convexity.
PerturbationStudy perturbation_study(const MultiObjective& f,
                                     const PerturbationStudyOptions& opts =
                                         PerturbationStudyOptions());

PerturbationStudy perturbation_study_serial(const MultiObjective& f,
                                            const PerturbationStudyOptions& opts =
                                                PerturbationStudyOptions());

}  // namespace tvlab

#endif
