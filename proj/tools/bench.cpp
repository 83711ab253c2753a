// Timing comparison between the OpenMP kernels and their serial reference
// twins, with an equality check on each pair of results.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "tvlab/dimension.hpp"
#include "tvlab/pareto.hpp"
#include "tvlab/registry.hpp"
#include "tvlab/transversality.hpp"

using namespace tvlab;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

void row(const std::string& name, double serial, double parallel, bool identical) {
  std::printf("%-20s %10.3fs %10.3fs %8.2fx   %s\n", name.c_str(), serial, parallel,
              parallel > 0.0 ? serial / parallel : 0.0, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("%-20s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    const FamilyProblem p = make_family(find_problem("ex-2-3"));
    SigmaSampleOptions opts;
    opts.budget = 4000;
    opts.seed = 17;
    SigmaSample a, b;
    const double ts = seconds([&] { a = sample_sigma_serial(p, opts); });
    const double tp = seconds([&] { b = sample_sigma(p, opts); });
    bool same = a.points.size() == b.points.size();
    for (std::size_t i = 0; same && i < a.points.size(); ++i)
      same = (a.points[i] - b.points[i]).norm() == 0.0;
    row("sample_sigma", ts, tp, same);
  }

  {
    const auto cloud = cantor_cloud(16);
    BoxCountEstimate a, b;
    const double ts = seconds([&] { a = box_count_serial(cloud); });
    const double tp = seconds([&] { b = box_count(cloud); });
    row("box_count", ts, tp, a.dimension == b.dimension && a.scales == b.scales);
  }

  {
    const MultiObjective f = make_objective(find_problem("quad-centroid"));
    ParetoAtlas a, b;
    const double ts = seconds([&] { a = build_pareto_atlas_serial(f, 400); });
    const double tp = seconds([&] { b = build_pareto_atlas(f, 400); });
    bool same = a.minimizers.size() == b.minimizers.size();
    for (std::size_t i = 0; same && i < a.minimizers.size(); ++i)
      same = (a.minimizers[i] - b.minimizers[i]).norm() == 0.0;
    row("build_pareto_atlas", ts, tp, same);
  }

  {
    const MultiObjective f = make_objective(find_problem("pareto-9-1"));
    PerturbationStudyOptions opts;
    opts.trials = 48;
    opts.seed = 23;
    PerturbationStudy a, b;
    const double ts = seconds([&] { a = perturbation_study_serial(f, opts); });
    const double tp = seconds([&] { b = perturbation_study(f, opts); });
    row("perturbation_study", ts, tp,
        a.bad_count == b.bad_count && a.solver_failures == b.solver_failures);
  }

  {
    const FamilyProblem p = make_family(find_problem("ex-2-3"));
    MeasureZeroProbe a, b;
    const double ts = seconds([&] { a = measure_zero_probe_serial(p, 64, 31); });
    const double tp = seconds([&] { b = measure_zero_probe(p, 64, 31); });
    row("measure_zero_probe", ts, tp, a.hit_count == b.hit_count);
  }

  return 0;
}
