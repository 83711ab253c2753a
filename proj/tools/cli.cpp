// Batch front end: runs one named pipeline per invocation and emits a
// versioned JSON report plus optional CSV point data.

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tvlab/dimension.hpp"
#include "tvlab/multipoint.hpp"
#include "tvlab/pareto.hpp"
#include "tvlab/registry.hpp"
#include "tvlab/strata.hpp"
#include "tvlab/transversality.hpp"

using nlohmann::json;
using namespace tvlab;

namespace {

constexpr int kSchemaVersion = 1;

struct Options {
  std::string config_path;
  std::string problem;
  std::string expr;
  std::string out_dir;
  std::string format = "json";
  std::string kind = "main1";
  std::uint64_t seed = 0;
  int budget = 1000;
  int trials = 100;
  int resolution = 10;
  int tuples = 10000;
  int d_max = 2;
  int r = 1;
  bool cinf = false;
  double tol = 0.0;
  double scale = 1.0;
  int n = 0;
  int m = 0;
  int ell = 0;
  int k = 0;
  int d = 0;
  int dim_a = 0;
  int delta_star = 0;
  std::vector<double> x;
  std::vector<double> a;
  std::vector<double> pi;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
};

// Config file values fill in any flag the command line left untouched.
struct ConfigBinder {
  std::vector<std::function<void(const json&)>> handlers;

  template <class T>
  void bind(CLI::Option* opt, const std::string& key, T& var) {
    handlers.push_back([opt, key, &var](const json& cfg) {
      if (opt->count() == 0 && cfg.contains(key)) var = cfg.at(key).get<T>();
    });
  }
  void apply(const json& cfg) const {
    for (const auto& h : handlers) h(cfg);
  }
};

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json box_json(const Box& box) {
  return json{{"lo", to_std(box.lo)}, {"hi", to_std(box.hi)}};
}

json threshold_json(const ThresholdBound& b) {
  return json{{"num", b.num}, {"den", b.den}, {"value", b.value()},
              {"strict", b.strict}, {"rule", b.rule}};
}

json points_json(const std::vector<Eigen::VectorXd>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(to_std(p));
  return arr;
}

Box box_from(const Options& o, const Box& fallback) {
  if (o.box_lo.empty() && o.box_hi.empty()) return fallback;
  if (o.box_lo.size() != o.box_hi.size() || o.box_lo.empty())
    throw std::invalid_argument("--box-lo and --box-hi need the same nonzero length");
  Box b;
  b.lo = to_eigen(o.box_lo);
  b.hi = to_eigen(o.box_hi);
  return b;
}

Eigen::VectorXd point_or_center(const std::vector<double>& given, const Box& box) {
  if (given.empty()) return box.center();
  if (static_cast<int>(given.size()) != box.dim())
    throw std::invalid_argument("point dimension does not match the box");
  return to_eigen(given);
}

// The plain map under test: a registry map entry or an inline expression.
ExprMap resolve_map(const Options& o, Box& box) {
  if (!o.expr.empty()) {
    if (o.n < 1) throw std::invalid_argument("inline expressions need --n");
    if (o.box_lo.empty()) throw std::invalid_argument("inline expressions need --box-lo/--box-hi");
    box = box_from(o, box);
    return parse(o.expr, o.n, 0);
  }
  const RegistryEntry& e = find_problem(o.problem);
  box = box_from(o, e.x_box);
  return make_map(e);
}

// The perturbed section g + pi with the pi coefficients bound from --a.
ExprMap resolve_section(const Options& o, Box& box) {
  if (!o.expr.empty()) {
    if (o.n < 1) throw std::invalid_argument("inline expressions need --n");
    box = box_from(o, box);
    return parse(o.expr, o.n, 0);
  }
  const RegistryEntry& e = find_problem(o.problem);
  if (e.section_src.empty())
    throw std::invalid_argument(e.name + " has no perturbed-section form");
  box = box_from(o, e.x_box);
  const ExprMap section = parse(e.section_src, e.n, e.p);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(e.p);
  if (!o.a.empty()) {
    if (static_cast<int>(o.a.size()) != e.p)
      throw std::invalid_argument("--a dimension does not match the section parameters");
    a = to_eigen(o.a);
  }
  return bind_parameters(section, a);
}

FamilyProblem resolve_family(const Options& o) {
  FamilyProblem p = make_family(find_problem(o.problem));
  if (o.tol > 0.0) p.target.membership_tol = o.tol;
  return p;
}

MultiObjective resolve_objective(const Options& o) {
  MultiObjective f = make_objective(find_problem(o.problem));
  if (!o.pi.empty()) {
    if (static_cast<int>(o.pi.size()) != f.ell() * f.m())
      throw std::invalid_argument("--pi needs ell*m row-major coefficients");
    Eigen::MatrixXd pi(f.ell(), f.m());
    for (int i = 0; i < f.ell(); ++i)
      for (int j = 0; j < f.m(); ++j)
        pi(i, j) = o.pi[static_cast<std::size_t>(i * f.m() + j)];
    f = perturb_linear(f, pi);
  }
  return f;
}

struct Emission {
  json report;
  std::string csv;       // empty when the command has no point data
  std::string csv_name;  // file stem for --out
  int exit_code = 0;
};

void emit(const Options& o, const std::string& command, Emission& em) {
  em.report["schema_version"] = kSchemaVersion;
  em.report["command"] = command;
  const std::string text = em.report.dump(2) + "\n";

  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    std::ofstream jf(std::filesystem::path(o.out_dir) / (command + ".json"));
    jf << text;
    if (!em.csv.empty()) {
      std::ofstream cf(std::filesystem::path(o.out_dir) / (em.csv_name + ".csv"));
      cf << em.csv;
    }
  }
  if (o.format == "csv" && !em.csv.empty())
    std::cout << em.csv;
  else
    std::cout << text;
}

std::string cloud_csv(const std::vector<Eigen::VectorXd>& pts, const std::string& stem) {
  std::ostringstream out;
  const int p = pts.empty() ? 0 : static_cast<int>(pts.front().size());
  for (int i = 0; i < p; ++i) out << stem << "_" << i + 1 << (i + 1 < p ? "," : "");
  out << "\n";
  for (const auto& q : pts) {
    for (int i = 0; i < p; ++i) out << q(i) << (i + 1 < p ? "," : "");
    out << "\n";
  }
  return out.str();
}

Emission run_defect(const Options& o, bool classify) {
  const FamilyProblem p = resolve_family(o);
  const Eigen::VectorXd x = point_or_center(o.x, p.x_box);
  const Eigen::VectorXd a = point_or_center(o.a, p.a_box);
  const DefectReport rep = classify_family_point(p, x, a);
  Emission em;
  em.report["problem"] = o.problem;
  em.report["x"] = to_std(x);
  em.report["a"] = to_std(a);
  em.report["delta_section"] = rep.delta_section;
  em.report["delta_family"] = rep.delta_family;
  if (classify) em.report["classification"] = to_string(rep.classification);
  return em;
}

Emission run_sigma_sample(const Options& o) {
  const FamilyProblem p = resolve_family(o);
  SigmaSampleOptions opts;
  opts.budget = o.budget;
  opts.seed = o.seed;
  const SigmaSample sample = sample_sigma(p, opts);
  Emission em;
  em.report["problem"] = o.problem;
  em.report["seed"] = o.seed;
  em.report["trials"] = sample.trials;
  em.report["hits"] = sample.points.size();
  em.report["points"] = points_json(sample.points);
  em.csv = cloud_csv(sample.points, "a");
  em.csv_name = "sigma-sample";
  return em;
}

Emission run_sigma_dim(const Options& o) {
  const FamilyProblem p = resolve_family(o);
  SigmaDimensionOptions opts;
  opts.sample.budget = o.budget;
  opts.sample.seed = o.seed;
  opts.r = o.r;
  opts.smooth_infinity = o.cinf;
  const SigmaDimensionReport rep = sigma_dimension_report(p, opts);
  Emission em;
  em.report["problem"] = o.problem;
  em.report["seed"] = o.seed;
  em.report["hits"] = rep.sample.points.size();
  em.report["delta_star"] = rep.delta_star;
  em.report["threshold"] = threshold_json(rep.threshold);
  if (rep.estimate) {
    em.report["dimension"] = rep.estimate->dimension;
    em.report["fit_r2"] = rep.estimate->fit_r2;
    std::ostringstream csv;
    write_scales_csv(*rep.estimate, csv);
    em.csv = csv.str();
    em.csv_name = "sigma-dim";
  }
  return em;
}

Emission run_threshold(const Options& o) {
  ThresholdQuery q;
  if (o.kind == "main1") q.kind = ThresholdQuery::Kind::Main1;
  else if (o.kind == "main2") q.kind = ThresholdQuery::Kind::Main2;
  else if (o.kind == "jet") q.kind = ThresholdQuery::Kind::Jet;
  else if (o.kind == "multipoint") q.kind = ThresholdQuery::Kind::Multipoint;
  else if (o.kind == "morse") q.kind = ThresholdQuery::Kind::Morse;
  else if (o.kind == "pareto") q.kind = ThresholdQuery::Kind::Pareto;
  else throw std::invalid_argument("unknown threshold kind: " + o.kind);
  q.dim_a = o.dim_a;
  q.delta_star = o.delta_star;
  q.r = o.r;
  q.smooth_infinity = o.cinf;
  q.m = o.m;
  q.ell = o.ell;
  q.n = o.n;
  q.k = o.k;
  q.d = o.d;
  Emission em;
  em.report["kind"] = o.kind;
  em.report["threshold"] = threshold_json(genericity_threshold(q));
  return em;
}

Emission run_morse(const Options& o) {
  Box box = Box::cube(1, -1.0, 1.0);
  const ExprMap f = resolve_section(o, box);
  const MorseReport rep = morse_check(f, box);
  Emission em;
  em.report["verdict"] = rep.verdict == MorseVerdict::Morse ? "MORSE" : "DEGENERATE";
  em.report["critical_points"] = points_json(rep.critical_points);
  em.report["degenerate_witnesses"] = points_json(rep.degenerate_witnesses);
  em.exit_code = rep.verdict == MorseVerdict::Morse ? 0 : 2;
  return em;
}

Emission run_immersion(const Options& o) {
  Box box = Box::cube(1, -1.0, 1.0);
  const ExprMap f = resolve_section(o, box);
  const ImmersionReport rep = immersion_check(f, box);
  Emission em;
  em.report["is_immersion"] = rep.is_immersion;
  em.report["corank_witnesses"] = points_json(rep.corank_witnesses);
  em.exit_code = rep.is_immersion ? 0 : 2;
  return em;
}

Emission run_umbrella(const Options& o) {
  Box box = Box::cube(1, -1.0, 1.0);
  const ExprMap f = resolve_map(o, box);
  const Eigen::VectorXd x = o.x.empty() ? Eigen::VectorXd::Zero(f.arity_x()) : to_eigen(o.x);
  const bool ok = whitney_umbrella_check(f, x);
  Emission em;
  em.report["x"] = to_std(x);
  em.report["normal_form"] = ok;
  em.exit_code = ok ? 0 : 2;
  return em;
}

Emission run_normal_crossings(const Options& o) {
  Box box = Box::cube(1, -1.0, 1.0);
  const ExprMap f = resolve_map(o, box);
  const NormalCrossingsReport rep = normal_crossings_check(f, box, o.d_max);
  Emission em;
  em.report["normal_crossings"] = rep.normal_crossings;
  json per_d = json::array();
  for (const auto& row : rep.per_d) {
    json j{{"d", row.d}, {"tuples_found", row.tuples_found}, {"max_defect", row.max_defect}};
    if (row.defect_witness) j["defect_witness"] = points_json(row.defect_witness->points);
    per_d.push_back(j);
  }
  em.report["per_d"] = per_d;
  em.exit_code = rep.normal_crossings ? 0 : 2;
  return em;
}

Emission run_injectivity(const Options& o) {
  Box box = Box::cube(1, -1.0, 1.0);
  const ExprMap f = resolve_map(o, box);
  const auto hits = double_point_search(f, box);
  Emission em;
  em.report["injective"] = hits.empty();
  json wit = json::array();
  for (const auto& t : hits) wit.push_back(points_json(t.points));
  em.report["double_points"] = wit;
  em.exit_code = hits.empty() ? 0 : 2;
  return em;
}

Emission run_df_estimate(const Options& o) {
  Box box = Box::cube(1, -1.0, 1.0);
  const ExprMap f = resolve_map(o, box);
  DfEstimateOptions opts;
  opts.tuples_per_d = o.tuples;
  opts.seed = o.seed;
  const DfEstimate est = estimate_df(f, box, opts);
  Emission em;
  em.report["d_hat"] = est.d_hat;
  em.report["seed"] = o.seed;
  if (est.violating_tuple)
    em.report["violating_tuple"] = points_json(est.violating_tuple->points);
  return em;
}

Emission run_boxdim(const Options& o) {
  const RegistryEntry& e = find_problem(o.problem);
  const BoxCountEstimate est = box_count(make_cloud(e));
  Emission em;
  em.report["problem"] = o.problem;
  em.report["dimension"] = est.dimension;
  em.report["fit_r2"] = est.fit_r2;
  em.report["ambient_dim"] = est.ambient_dim;
  std::ostringstream csv;
  write_scales_csv(est, csv);
  em.csv = csv.str();
  em.csv_name = "boxdim";
  return em;
}

Emission run_pareto_atlas(const Options& o) {
  const MultiObjective f = resolve_objective(o);
  const ParetoAtlas atlas = build_pareto_atlas(f, o.resolution);
  Emission em;
  em.report["problem"] = o.problem;
  em.report["resolution"] = o.resolution;
  em.report["nodes"] = atlas.grid.nodes.size();
  em.report["alpha_hat"] = f.alpha_hat;
  std::ostringstream csv;
  write_atlas_csv(atlas, csv);
  em.csv = csv.str();
  em.csv_name = "pareto-atlas";
  return em;
}

Emission run_simpliciality(const Options& o) {
  const MultiObjective f = resolve_objective(o);
  const ParetoAtlas atlas = build_pareto_atlas(f, o.resolution);
  const SimplicialityReport rep = simpliciality_check(f, atlas);
  Emission em;
  em.report["problem"] = o.problem;
  em.report["resolution"] = o.resolution;
  em.report["verdict"] = to_string(rep.verdict);
  em.report["rank_condition_ok"] = rep.rank_condition_ok;
  em.report["rank_violations"] = rep.rank_violations;
  em.report["face_consistency_ok"] = rep.face_consistency_ok;
  em.report["face_violations"] = rep.face_violations;
  em.report["injectivity_ok"] = rep.injectivity_ok;
  json pairs = json::array();
  for (const auto& [i, j] : rep.injectivity_witnesses) pairs.push_back({i, j});
  em.report["injectivity_witnesses"] = pairs;
  em.exit_code = rep.verdict == SimplicialityVerdict::Failed ? 2 : 0;
  return em;
}

Emission run_perturb_study(const Options& o) {
  const MultiObjective f = resolve_objective(o);
  PerturbationStudyOptions opts;
  opts.trials = o.trials;
  opts.seed = o.seed;
  opts.perturbation_scale = o.scale;
  const PerturbationStudy study = perturbation_study(f, opts);
  Emission em;
  em.report["problem"] = o.problem;
  em.report["seed"] = o.seed;
  em.report["trials"] = study.trials;
  em.report["bad_count"] = study.bad_count;
  em.report["bad_fraction"] = study.bad_fraction;
  em.report["solver_failures"] = study.solver_failures;
  em.report["failed_simpliciality_trials"] = study.failed_simpliciality_trials;
  em.report["threshold"] = threshold_json(study.threshold);
  if (study.bad_set_dimension)
    em.report["bad_set_dimension"] = study.bad_set_dimension->dimension;
  em.exit_code = study.bad_count > 0 ? 2 : 0;
  return em;
}

Emission run_measure_zero_probe(const Options& o) {
  const FamilyProblem p = resolve_family(o);
  const MeasureZeroProbe probe = measure_zero_probe(p, o.trials, o.seed);
  Emission em;
  em.report["problem"] = o.problem;
  em.report["seed"] = o.seed;
  em.report["trials"] = probe.trials;
  em.report["hit_count"] = probe.hit_count;
  em.report["hit_fraction"] = probe.hit_fraction;
  em.exit_code = probe.hit_count > 0 ? 2 : 0;
  return em;
}

Emission run_list() {
  Emission em;
  json arr = json::array();
  for (const auto& e : registry())
    arr.push_back({{"name", e.name}, {"kind", e.kind}, {"anchor", e.anchor},
                   {"summary", e.summary}});
  em.report["problems"] = arr;
  return em;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("TVLAB_THREADS")) {
#ifdef _OPENMP
    const int t = std::atoi(threads);
    if (t > 0) omp_set_num_threads(t);
#endif
  }

  CLI::App app{"numerical laboratory for transversality, strata, dimension, and Pareto checks"};
  app.require_subcommand(1);

  Options o;
  ConfigBinder cfg;
  std::string command;
  std::function<Emission()> runner;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cfg.bind(sub->add_option("--out", o.out_dir, "directory for report files"), "out", o.out_dir);
    cfg.bind(sub->add_option("--format", o.format, "json or csv stdout output")
                 ->check(CLI::IsMember({"json", "csv"})),
             "format", o.format);
    cfg.bind(sub->add_option("--seed", o.seed, "rng seed"), "seed", o.seed);
    cfg.bind(sub->add_option("--tol", o.tol, "tolerance override"), "tol", o.tol);
  };
  auto add_problem = [&](CLI::App* sub) {
    cfg.bind(sub->add_option("--problem", o.problem, "registry problem name"), "problem",
             o.problem);
  };
  auto add_inline = [&](CLI::App* sub) {
    cfg.bind(sub->add_option("--expr", o.expr, "inline map source"), "expr", o.expr);
    cfg.bind(sub->add_option("--n", o.n, "inline map arity"), "n", o.n);
    cfg.bind(sub->add_option("--box-lo", o.box_lo, "box lower corner"), "box_lo", o.box_lo);
    cfg.bind(sub->add_option("--box-hi", o.box_hi, "box upper corner"), "box_hi", o.box_hi);
  };
  auto make_sub = [&](const std::string& name, const std::string& desc,
                      std::function<Emission()> fn) {
    CLI::App* sub = app.add_subcommand(name, desc);
    add_common(sub);
    sub->callback([&, name, fn] {
      command = name;
      runner = fn;
    });
    return sub;
  };

  {
    CLI::App* s = make_sub("defect", "section and family defects at one point",
                           [&] { return run_defect(o, false); });
    add_problem(s);
    cfg.bind(s->add_option("--x", o.x, "point in the x box"), "x", o.x);
    cfg.bind(s->add_option("--a", o.a, "parameter in the a box"), "a", o.a);
  }
  {
    CLI::App* s = make_sub("classify", "classify a family point against W and W-tilde",
                           [&] { return run_defect(o, true); });
    add_problem(s);
    cfg.bind(s->add_option("--x", o.x, "point in the x box"), "x", o.x);
    cfg.bind(s->add_option("--a", o.a, "parameter in the a box"), "a", o.a);
  }
  {
    CLI::App* s = make_sub("sigma-sample", "sample the bad parameter set",
                           [&] { return run_sigma_sample(o); });
    add_problem(s);
    cfg.bind(s->add_option("--budget", o.budget, "sample budget"), "budget", o.budget);
  }
  {
    CLI::App* s = make_sub("sigma-dim", "bad-set dimension and exponent threshold",
                           [&] { return run_sigma_dim(o); });
    add_problem(s);
    cfg.bind(s->add_option("--budget", o.budget, "sample budget"), "budget", o.budget);
    cfg.bind(s->add_option("--r", o.r, "smoothness order"), "r", o.r);
    cfg.bind(s->add_flag("--cinf", o.cinf, "smooth-of-infinite-order regime"), "cinf", o.cinf);
  }
  {
    CLI::App* s = make_sub("threshold", "exact rational exponent threshold",
                           [&] { return run_threshold(o); });
    cfg.bind(s->add_option("--kind", o.kind, "main1|main2|jet|multipoint|morse|pareto"),
             "kind", o.kind);
    cfg.bind(s->add_option("--dim-a", o.dim_a, "parameter dimension"), "dim_a", o.dim_a);
    cfg.bind(s->add_option("--delta-star", o.delta_star, "delta* value"), "delta_star",
             o.delta_star);
    cfg.bind(s->add_option("--r", o.r, "smoothness order"), "r", o.r);
    cfg.bind(s->add_flag("--cinf", o.cinf, "smooth-of-infinite-order regime"), "cinf", o.cinf);
    cfg.bind(s->add_option("--m", o.m, "source dimension"), "m", o.m);
    cfg.bind(s->add_option("--ell", o.ell, "target or objective count"), "ell", o.ell);
    cfg.bind(s->add_option("--n", o.n, "jet source dimension"), "n", o.n);
    cfg.bind(s->add_option("--k", o.k, "corank"), "k", o.k);
    cfg.bind(s->add_option("--d", o.d, "diagonal multiplicity"), "d", o.d);
  }
  {
    CLI::App* s = make_sub("morse", "critical point nondegeneracy check",
                           [&] { return run_morse(o); });
    add_problem(s);
    add_inline(s);
    cfg.bind(s->add_option("--a", o.a, "perturbation coefficients"), "a", o.a);
  }
  {
    CLI::App* s = make_sub("immersion", "corank witness search for a curve or map",
                           [&] { return run_immersion(o); });
    add_problem(s);
    add_inline(s);
    cfg.bind(s->add_option("--a", o.a, "perturbation coefficients"), "a", o.a);
  }
  {
    CLI::App* s = make_sub("umbrella", "cross-cap normal form test at a singular point",
                           [&] { return run_umbrella(o); });
    add_problem(s);
    add_inline(s);
    cfg.bind(s->add_option("--x", o.x, "singular point"), "x", o.x);
  }
  {
    CLI::App* s = make_sub("normal-crossings", "multipoint transversality to the diagonal",
                           [&] { return run_normal_crossings(o); });
    add_problem(s);
    add_inline(s);
    cfg.bind(s->add_option("--d-max", o.d_max, "largest multiplicity checked"), "d_max",
             o.d_max);
  }
  {
    CLI::App* s = make_sub("injectivity", "double point search",
                           [&] { return run_injectivity(o); });
    add_problem(s);
    add_inline(s);
  }
  {
    CLI::App* s = make_sub("df-estimate", "largest d with affinely independent image differences",
                           [&] { return run_df_estimate(o); });
    add_problem(s);
    add_inline(s);
    cfg.bind(s->add_option("--tuples", o.tuples, "tuples sampled per d"), "tuples", o.tuples);
  }
  {
    CLI::App* s = make_sub("boxdim", "box-counting dimension of a registry cloud",
                           [&] { return run_boxdim(o); });
    add_problem(s);
  }
  {
    CLI::App* s = make_sub("pareto-atlas", "weighted scalarization atlas",
                           [&] { return run_pareto_atlas(o); });
    add_problem(s);
    cfg.bind(s->add_option("--resolution", o.resolution, "weight grid resolution"),
             "resolution", o.resolution);
    cfg.bind(s->add_option("--pi", o.pi, "row-major linear perturbation"), "pi", o.pi);
  }
  {
    CLI::App* s = make_sub("simpliciality", "rank, face, and injectivity evidence",
                           [&] { return run_simpliciality(o); });
    add_problem(s);
    cfg.bind(s->add_option("--resolution", o.resolution, "weight grid resolution"),
             "resolution", o.resolution);
    cfg.bind(s->add_option("--pi", o.pi, "row-major linear perturbation"), "pi", o.pi);
  }
  {
    CLI::App* s = make_sub("perturb-study", "random linear perturbations of an objective",
                           [&] { return run_perturb_study(o); });
    add_problem(s);
    cfg.bind(s->add_option("--trials", o.trials, "perturbations sampled"), "trials", o.trials);
    cfg.bind(s->add_option("--scale", o.scale, "perturbation ball radius"), "scale", o.scale);
  }
  {
    CLI::App* s = make_sub("measure-zero-probe", "random parameters against the bad set",
                           [&] { return run_measure_zero_probe(o); });
    add_problem(s);
    cfg.bind(s->add_option("--trials", o.trials, "parameters sampled"), "trials", o.trials);
  }
  make_sub("list", "registry problems with their anchors", [&] { return run_list(); });

  CLI11_PARSE(app, argc, argv);

  try {
    if (!o.config_path.empty()) {
      std::ifstream in(o.config_path);
      if (!in) throw std::runtime_error("cannot read config file: " + o.config_path);
      json parsed;
      in >> parsed;
      cfg.apply(parsed);
    }
    Emission em = runner();
    emit(o, command, em);
    return em.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
