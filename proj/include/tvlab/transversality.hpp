#ifndef TVLAB_TRANSVERSALITY_HPP
#define TVLAB_TRANSVERSALITY_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "tvlab/expr.hpp"
#include "tvlab/linalg.hpp"

namespace tvlab {

/// Target submanifold Z given as the zero set of an explicit submersion
/// h : R^q -> R^c. Membership is tested in the infinity norm.
struct LevelSetSubmanifold {
  ExprMap defining_map;  // h, arity (q, 0)
  double membership_tol = 1e-9;

  int ambient_dim() const { return defining_map.arity_x(); }
  int codim() const { return defining_map.output_dim(); }
};

/// Axis-aligned box, one (lo, hi) pair per coordinate.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  bool contains(const Eigen::VectorXd& x, double slack = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x(i) < lo(i) - slack || x(i) > hi(i) + slack) return false;
    return true;
  }
  static Box cube(int dim, double lo_v, double hi_v) {
    Box b;
    b.lo = Eigen::VectorXd::Constant(dim, lo_v);
    b.hi = Eigen::VectorXd::Constant(dim, hi_v);
    return b;
  }
};

/// A parametric family F : X_box x A_box -> R^q to be tested against Z.
struct FamilyProblem {
  ExprMap family;  // arity (n, p)
  LevelSetSubmanifold target;
  Box x_box;
  Box a_box;
  TolPolicy rank_tol = TolPolicy::relative();
};

enum class PointClass { NotOnZ, Transverse, InW, InWTilde };

const char* to_string(PointClass c);

struct DefectReport {
  int delta_section = 0;  // delta(F_a, x, Z)
  int delta_family = 0;   // delta(F, (x,a), Z)
  PointClass classification = PointClass::NotOnZ;
  Eigen::VectorXd witness_x;
  Eigen::VectorXd witness_a;
};

/// Transversality defect of a non-parametric map f at x:
/// 0 off Z, otherwise codim Z - rank(dh * df). Throws if h fails its
/// submersion check at f(x).
int defect_at(const ExprMap& f, const LevelSetSubmanifold& Z, const Eigen::VectorXd& x,
              TolPolicy rank_tol = TolPolicy::relative());

/// Defect of the section F_a at x computed from the X-Jacobian only.
int section_defect(const FamilyProblem& problem, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& a);

/// Defect of the full family at (x, a) from the combined XA-Jacobian.
int family_defect(const FamilyProblem& problem, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& a);

DefectReport classify_family_point(const FamilyProblem& problem, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& a);

/// delta*(F,Z) = dim X - codim Z + delta(F,Z).
int delta_star(const FamilyProblem& problem, int family_sup);

struct GridSpec {
  int points_per_axis = 16;
};

/// Sampled maximum of delta(F, (x,a), Z) over a grid on the box product.
/// A lower bound for the true supremum; reported as such by callers.
int defect_family_sup(const FamilyProblem& problem, const GridSpec& grid = GridSpec());

struct WitnessSearchOptions {
  int grid_per_axis = 0;    // 0: pick by dimension (64 for n<=2, 16 for n<=4, 8 above)
  int refine_iters = 400;
  double residual_tol = 1e-9;
  double gap_tol = 1e-6;    // absolute floor on the c-th singular value of dh*dFx
};

/// Looks for x in X_box with positive section defect for the given a.
/// Absence of a witness is evidence, not proof, of transversality.
std::optional<Eigen::VectorXd> find_nontransverse_witness(const FamilyProblem& problem,
                                                          const Eigen::VectorXd& a,
                                                          const WitnessSearchOptions& opts =
                                                              WitnessSearchOptions());

struct SigmaSampleOptions {
  int budget = 1000;
  std::uint64_t seed = 0;
  double accept_residual = 1e-6;  // infinity-norm bound on h after refinement
  double accept_gap = 1e-6;       // absolute rank-drop acceptance for dh*dFx
  int threads = 0;                // 0: OpenMP default
};

struct SigmaSample {
  std::vector<Eigen::VectorXd> points;  // detected parameters in A_box
  int trials = 0;
};

/// Samples parameters, refines each toward the bad set Sigma(F,Z) by joint
/// minimization over (x, a), and keeps confirmed hits. OpenMP-parallel over
/// samples; identical output to sample_sigma_serial for a fixed seed.
SigmaSample sample_sigma(const FamilyProblem& problem,
                         const SigmaSampleOptions& opts = SigmaSampleOptions());

/// Serial reference implementation with identical semantics.
SigmaSample sample_sigma_serial(const FamilyProblem& problem,
                                const SigmaSampleOptions& opts = SigmaSampleOptions());

/// Exact rational bound num/den on the exponent s, with strictness flag.
struct ThresholdBound {
  long long num = 0;
  long long den = 1;
  bool strict = false;
  std::string rule;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ThresholdQuery {
  enum class Kind { Main1, Main2, Jet, Multipoint, Morse, Pareto };
  Kind kind = Kind::Main1;
  int dim_a = 0;
  int delta_star = 0;
  int r = 1;               // smoothness order; ignored when smooth_infinity
  bool smooth_infinity = false;
  int m = 0;
  int ell = 0;
  int n = 0;
  int k = 0;
  int d = 0;
};

/// Hausdorff-exponent threshold for each theorem regime. Main-theorem
/// queries pick the delta* >= 0 or delta* < 0 branch automatically.
ThresholdBound genericity_threshold(const ThresholdQuery& query);

}  // namespace tvlab

#endif
