#ifndef TVLAB_MULTIPOINT_HPP
#define TVLAB_MULTIPOINT_HPP

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "tvlab/linalg.hpp"
#include "tvlab/transversality.hpp"

namespace tvlab {

/// d pairwise-distinct domain points with a positive separation floor.
struct MultiPointTuple {
  std::vector<Eigen::VectorXd> points;
  double min_separation = 1e-4;

  int count() const { return static_cast<int>(points.size()); }
  bool separated() const;
};

/// The small diagonal in (R^l)^d, codim l(d-1), as h(y1..yd) = (y2-y1, ..., yd-y1).
struct DiagonalSpec {
  int ell = 1;
  int d = 2;
  int codim() const { return ell * (d - 1); }
};

/// Stacked image (f(q1), ..., f(qd)).
Eigen::VectorXd multipoint_eval(const ExprMap& f, const MultiPointTuple& tuple);

/// Defect of f^(d) against the diagonal at the tuple; 0 when the stacked
/// image is off the diagonal.
int diagonal_defect(const ExprMap& f, const MultiPointTuple& tuple, double membership_tol = 1e-9,
                    TolPolicy rank_tol = TolPolicy::relative());

struct DoublePointSearchOptions {
  int multistarts = 200;
  double image_tol = 1e-8;
  double separation_fraction = 1e-4;  // of box diameter
  std::uint64_t seed = 0;
};

/// Near-coincident image pairs f(q1) = f(q2) with q1 != q2.
std::vector<MultiPointTuple> double_point_search(const ExprMap& f, const Box& box,
                                                 const DoublePointSearchOptions& opts =
                                                     DoublePointSearchOptions());

struct NormalCrossingsPerD {
  int d = 2;
  int tuples_found = 0;
  int max_defect = 0;
  std::optional<MultiPointTuple> defect_witness;
};

struct NormalCrossingsReport {
  bool normal_crossings = true;
  std::vector<NormalCrossingsPerD> per_d;
};

/// For each d in 2..d_max: search for on-diagonal tuples and check that every
/// one is transverse to the diagonal.
NormalCrossingsReport normal_crossings_check(const ExprMap& f, const Box& box, int d_max,
                                             const DoublePointSearchOptions& opts =
                                                 DoublePointSearchOptions());

struct DfEstimateOptions {
  int tuples_per_d = 10000;
  double separation_fraction = 1e-4;
  std::uint64_t seed = 0;
  TolPolicy rank_tol = TolPolicy::relative();
};

struct DfEstimate {
  int d_hat = 2;
  std::optional<MultiPointTuple> violating_tuple;  // for d_hat + 1, when seen
};

/// Sampled estimate of d_f: largest d such that no sampled d-tuple of
/// distinct points has affinely dependent image differences. Requires f
/// injective on the box (pre-checked with double_point_search).
DfEstimate estimate_df(const ExprMap& f, const Box& box,
                       const DfEstimateOptions& opts = DfEstimateOptions());

}  // namespace tvlab

#endif
