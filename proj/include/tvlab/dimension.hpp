#ifndef TVLAB_DIMENSION_HPP
#define TVLAB_DIMENSION_HPP

#include <Eigen/Core>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "tvlab/transversality.hpp"

namespace tvlab {

/// Geometric ladder of box sizes, from diameter/coarse_divisor down by a
/// constant ratio to diameter/fine_divisor.
struct ScaleSpec {
  int levels = 12;
  double coarse_divisor = 4.0;
  double fine_divisor = 16384.0;  // 2^14
};

/// Minkowski (box-counting) dimension fit; a numerical upper proxy for
/// Hausdorff dimension.
struct BoxCountEstimate {
  double dimension = 0.0;
  std::vector<std::pair<double, long long>> scales;  // (epsilon, N(epsilon))
  double fit_r2 = 0.0;
  int ambient_dim = 0;
};

/// Counts occupied grid boxes per scale (grid anchored at the bounding-box
/// corner) and fits the slope of log N against log(1/eps), dropping the
/// coarsest and finest level. Needs at least 100 points. A degenerate cloud
/// (zero-diameter bounding box) gets dimension 0 with fit_r2 = 1.
BoxCountEstimate box_count(const std::vector<Eigen::VectorXd>& points,
                           const ScaleSpec& spec = ScaleSpec());

/// Serial reference with identical output.
BoxCountEstimate box_count_serial(const std::vector<Eigen::VectorXd>& points,
                                  const ScaleSpec& spec = ScaleSpec());

void write_scales_csv(const BoxCountEstimate& estimate, std::ostream& out);

struct MeasureZeroProbe {
  int trials = 0;
  int hit_count = 0;
  double hit_fraction = 0.0;
};

/// Samples parameters uniformly in A_box and counts those with a
/// non-transverse witness. Null Sigma gives expected hit_count 0.
MeasureZeroProbe measure_zero_probe(const FamilyProblem& problem, int trials,
                                    std::uint64_t seed,
                                    const WitnessSearchOptions& witness_opts =
                                        WitnessSearchOptions());

MeasureZeroProbe measure_zero_probe_serial(const FamilyProblem& problem, int trials,
                                           std::uint64_t seed,
                                           const WitnessSearchOptions& witness_opts =
                                               WitnessSearchOptions());

struct SigmaDimensionOptions {
  SigmaSampleOptions sample;
  ScaleSpec scales;
  int r = 1;
  bool smooth_infinity = false;
};

struct SigmaDimensionReport {
  SigmaSample sample;
  std::optional<BoxCountEstimate> estimate;  // empty when no Sigma points found
  int delta_star = 0;
  ThresholdBound threshold;
};

/// sample_sigma then box_count on the detected parameter cloud, with the
/// matching exponent threshold attached.
SigmaDimensionReport sigma_dimension_report(const FamilyProblem& problem,
                                            const SigmaDimensionOptions& opts =
                                                SigmaDimensionOptions());

}  // namespace tvlab

#endif
