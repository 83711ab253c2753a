#ifndef TVLAB_STRATA_HPP
#define TVLAB_STRATA_HPP

#include <Eigen/Core>
#include <map>
#include <vector>

#include "tvlab/linalg.hpp"
#include "tvlab/transversality.hpp"

namespace tvlab {

struct JetPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd jacobian;
};

/// codim S^k(X, R^l) = (n - v + k)(l - v + k), v = min(n, l).
int stratum_codim(int n, int ell, int k);

JetPoint jet_extension(const ExprMap& f, const Eigen::VectorXd& x);

struct StratumDefectOptions {
  double fd_step = 1e-5;
  TolPolicy rank_tol = TolPolicy::relative();
};

/// Defect of the jet extension against S^k at a corank-k point x, via the
/// Schur-complement local chart differentiated by central differences.
/// Throws if corank at x differs from k.
int stratum_defect(const ExprMap& f, int k, const Eigen::VectorXd& x,
                   const StratumDefectOptions& opts = StratumDefectOptions());

enum class MorseVerdict { Morse, Degenerate };

struct MorseReport {
  MorseVerdict verdict = MorseVerdict::Morse;
  std::vector<Eigen::VectorXd> critical_points;
  std::vector<Eigen::VectorXd> degenerate_witnesses;
};

struct CriticalSearchOptions {
  int multistarts = 100;       // per unit box volume, scaled by the caller
  double gradient_tol = 1e-10;
  double dedupe_dist = 1e-6;
  TolPolicy rank_tol = TolPolicy::relative();
};

/// Finds critical points of a scalar function by multistart Newton on the
/// gradient and tests each Hessian for nonsingularity.
MorseReport morse_check(const ExprMap& f, const Box& box,
                        const CriticalSearchOptions& opts = CriticalSearchOptions());

struct ImmersionReport {
  bool is_immersion = true;
  std::vector<Eigen::VectorXd> corank_witnesses;
};

struct ImmersionSearchOptions {
  int multistarts = 64;
  double sigma_tol = 1e-8;  // absolute floor on the smallest singular value
};

/// Multistart minimization of the smallest singular value of the Jacobian;
/// a drop below tolerance witnesses a non-immersion point.
ImmersionReport immersion_check(const ExprMap& f, const Box& box,
                                const ImmersionSearchOptions& opts = ImmersionSearchOptions());

/// Cross-cap test: at a corank-1 singular point of f : R^n -> R^{2n-1},
/// true iff the jet extension is transverse to S^1 there.
bool whitney_umbrella_check(const ExprMap& f, const Eigen::VectorXd& x_singular,
                            const StratumDefectOptions& opts = StratumDefectOptions());

struct CorankSurvey {
  std::map<int, int> histogram;                    // corank -> sample count
  std::map<int, Eigen::VectorXd> first_witness;    // corank -> first grid point seen
  int max_corank = 0;
};

CorankSurvey corank_survey(const ExprMap& f, const Box& box, int grid_per_axis = 16,
                           TolPolicy rank_tol = TolPolicy::relative());

}  // namespace tvlab

#endif
