#ifndef TVLAB_LINALG_HPP
#define TVLAB_LINALG_HPP

#include <Eigen/Core>
#include <vector>

#include "tvlab/expr.hpp"

namespace tvlab {

/// Numerical rank of a matrix together with the evidence behind the call.
struct RankDecision {
  int rank = 0;
  int corank = 0;
  std::vector<double> singular_values;  // descending
  double tolerance_used = 0.0;
};

struct TolPolicy {
  enum class Kind { Relative, Absolute };
  Kind kind = Kind::Relative;
  double value = 1e-8;

  static TolPolicy relative(double tau = 1e-8) { return {Kind::Relative, tau}; }
  static TolPolicy absolute(double eps) { return {Kind::Absolute, eps}; }
};

/// Rank by singular values against the tolerance policy. With the relative
/// policy the cut is tau * sigma_max * max(rows, cols).
RankDecision rank_decide(const Eigen::MatrixXd& M, TolPolicy policy = TolPolicy::relative());

/// corank of the X-Jacobian of a map at (x, a): min(n, l) - rank.
int corank_of_jacobian(const ExprMap& map, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& a = Eigen::VectorXd(),
                       TolPolicy policy = TolPolicy::relative());

/// Local chart for the corank->=k matrix set near M. A (v-k)x(v-k) invertible
/// pivot block is selected by full pivoting; the returned Schur complement
/// D - C A^{-1} B vanishes entrywise exactly where corank >= k, supplying
/// (rows - v + k)(cols - v + k) local equations.
struct SchurChart {
  Eigen::MatrixXd chart;                 // the Schur complement block
  std::vector<int> pivot_rows;           // rows of the pivot block, in order
  std::vector<int> pivot_cols;           // cols of the pivot block, in order

  /// Re-evaluates the chart on a nearby matrix with the pivot frozen.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& M) const;
};

SchurChart schur_stratum_chart(const Eigen::MatrixXd& M, int k,
                               TolPolicy policy = TolPolicy::relative());

}  // namespace tvlab

#endif
