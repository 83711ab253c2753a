#include "tvlab/dimension.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "tvlab/rng.hpp"

namespace tvlab {

namespace {

std::vector<double> scale_ladder(double diameter, const ScaleSpec& spec) {
  if (spec.levels < 4) throw std::invalid_argument("scale ladder needs at least 4 levels");
  if (spec.fine_divisor <= spec.coarse_divisor)
    throw std::invalid_argument("scale ladder divisors out of order");
  const double e0 = diameter / spec.coarse_divisor;
  const double e1 = diameter / spec.fine_divisor;
  const double ratio = std::pow(e1 / e0, 1.0 / static_cast<double>(spec.levels - 1));
  std::vector<double> eps(static_cast<std::size_t>(spec.levels));
  for (int i = 0; i < spec.levels; ++i) eps[static_cast<std::size_t>(i)] = e0 * std::pow(ratio, i);
  return eps;
}

long long occupied_boxes(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& anchor,
                         double eps) {
  std::unordered_set<std::uint64_t> keys;
  keys.reserve(points.size());
  const int p = static_cast<int>(anchor.size());
  for (const auto& q : points) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < p; ++i) {
      const auto cell = static_cast<std::int64_t>(std::floor((q(i) - anchor(i)) / eps));
      h ^= static_cast<std::uint64_t>(cell) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    keys.insert(h);
  }
  return static_cast<long long>(keys.size());
}

BoxCountEstimate box_count_impl(const std::vector<Eigen::VectorXd>& points, const ScaleSpec& spec,
                                bool parallel) {
  if (points.size() < 100) throw std::invalid_argument("box_count needs at least 100 points");
  const int p = static_cast<int>(points.front().size());
  Eigen::VectorXd lo = points.front();
  Eigen::VectorXd hi = points.front();
  for (const auto& q : points) {
    if (q.size() != p) throw std::invalid_argument("box_count: inconsistent point dimensions");
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  BoxCountEstimate est;
  est.ambient_dim = p;
  const double diameter = (hi - lo).norm();
  if (diameter <= 0.0) {
    est.dimension = 0.0;
    est.fit_r2 = 1.0;
    return est;
  }

  const std::vector<double> eps = scale_ladder(diameter, spec);
  std::vector<long long> counts(eps.size(), 0);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < static_cast<int>(eps.size()); ++i)
      counts[static_cast<std::size_t>(i)] = occupied_boxes(points, lo, eps[static_cast<std::size_t>(i)]);
  } else {
    for (std::size_t i = 0; i < eps.size(); ++i) counts[i] = occupied_boxes(points, lo, eps[i]);
  }
  for (std::size_t i = 0; i < eps.size(); ++i) est.scales.emplace_back(eps[i], counts[i]);

  // Least-squares slope of log N against log(1/eps); the coarsest and the
  // finest level are dropped as saturation-prone.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int nfit = 0;
  for (std::size_t i = 1; i + 1 < eps.size(); ++i) {
    const double x = std::log(1.0 / eps[i]);
    const double y = std::log(static_cast<double>(counts[i]));
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    ++nfit;
  }
  const double denom = nfit * sxx - sx * sx;
  est.dimension = denom != 0.0 ? (nfit * sxy - sx * sy) / denom : 0.0;
  const double var_y = nfit * syy - sy * sy;
  est.fit_r2 = var_y > 0.0 ? (nfit * sxy - sx * sy) * (nfit * sxy - sx * sy) / (denom * var_y) : 1.0;
  return est;
}

MeasureZeroProbe probe_impl(const FamilyProblem& problem, int trials, std::uint64_t seed,
                            const WitnessSearchOptions& witness_opts, bool parallel) {
  if (trials < 1) throw std::invalid_argument("measure_zero_probe needs trials >= 1");
  const int p = problem.a_box.dim();
  std::vector<unsigned char> hit(static_cast<std::size_t>(trials), 0);

  auto run_trial = [&](int t) {
    SubstreamRng rng(seed, static_cast<std::uint64_t>(t));
    Eigen::VectorXd a(p);
    for (int i = 0; i < p; ++i) a(i) = rng.uniform(problem.a_box.lo(i), problem.a_box.hi(i));
    if (find_nontransverse_witness(problem, a, witness_opts).has_value())
      hit[static_cast<std::size_t>(t)] = 1;
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    for (int t = 0; t < trials; ++t) run_trial(t);
  }

  MeasureZeroProbe probe;
  probe.trials = trials;
  for (auto h : hit) probe.hit_count += h;
  probe.hit_fraction = static_cast<double>(probe.hit_count) / static_cast<double>(trials);
  return probe;
}

}  // namespace

BoxCountEstimate box_count(const std::vector<Eigen::VectorXd>& points, const ScaleSpec& spec) {
  return box_count_impl(points, spec, true);
}

BoxCountEstimate box_count_serial(const std::vector<Eigen::VectorXd>& points,
                                  const ScaleSpec& spec) {
  return box_count_impl(points, spec, false);
}

void write_scales_csv(const BoxCountEstimate& estimate, std::ostream& out) {
  out << "epsilon,count\n";
  for (const auto& [eps, count] : estimate.scales) out << eps << "," << count << "\n";
}

MeasureZeroProbe measure_zero_probe(const FamilyProblem& problem, int trials, std::uint64_t seed,
                                    const WitnessSearchOptions& witness_opts) {
  return probe_impl(problem, trials, seed, witness_opts, true);
}

MeasureZeroProbe measure_zero_probe_serial(const FamilyProblem& problem, int trials,
                                           std::uint64_t seed,
                                           const WitnessSearchOptions& witness_opts) {
  return probe_impl(problem, trials, seed, witness_opts, false);
}

SigmaDimensionReport sigma_dimension_report(const FamilyProblem& problem,
                                            const SigmaDimensionOptions& opts) {
  SigmaDimensionReport report;
  report.sample = sample_sigma(problem, opts.sample);
  report.delta_star = delta_star(problem, defect_family_sup(problem));

  ThresholdQuery q;
  q.kind = report.delta_star >= 0 ? ThresholdQuery::Kind::Main1 : ThresholdQuery::Kind::Main2;
  q.dim_a = problem.a_box.dim();
  q.delta_star = report.delta_star;
  q.r = opts.r;
  q.smooth_infinity = opts.smooth_infinity;
  report.threshold = genericity_threshold(q);

  if (report.sample.points.size() >= 100)
    report.estimate = box_count(report.sample.points, opts.scales);
  return report;
}

}  // namespace tvlab
