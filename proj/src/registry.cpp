#include "tvlab/registry.hpp"

#include <stdexcept>

namespace tvlab {

namespace {

std::vector<RegistryEntry> build_registry() {
  std::vector<RegistryEntry> entries;

  {
    RegistryEntry e;
    e.name = "ex-2-2";
    e.kind = "family";
    e.anchor = "F(x,a)=(0, a_1^2-a_2^2)";
    e.summary = "degenerate planar family against Z={(0,0)}; the bad set is the pair of lines a1^2=a2^2";
    e.family_src = "[0; a1^2 - a2^2]";
    e.n = 1;
    e.p = 2;
    e.target_src = "[x1; x2]";
    e.q = 2;
    e.x_box = Box::cube(1, -1.0, 1.0);
    e.a_box = Box::cube(2, -1.0, 1.0);
    e.known_delta_star = 1;
    e.known_sigma_dim = 1.0;
    e.known_threshold = 1.0;
    e.known_threshold_strict = true;
    e.known_sigma = "{(a1,a2) | a1^2 - a2^2 = 0}";
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "ex-2-3";
    e.kind = "family";
    e.anchor = "F(x,a)=(x+a_1,..., x+a_l)";
    e.summary = "translation family with l=2 against Z={(0,0)}; the bad set is the line a1=a2";
    e.family_src = "[x1 + a1; x1 + a2]";
    e.n = 1;
    e.p = 2;
    e.target_src = "[x1; x2]";
    e.q = 2;
    e.x_box = Box::cube(1, -2.0, 2.0);
    e.a_box = Box::cube(2, -1.0, 1.0);
    e.known_delta_star = -1;
    e.known_sigma_dim = 1.0;
    e.known_threshold = 1.0;
    e.known_threshold_strict = true;
    e.known_sigma = "{(a1,a2) | a1 = a2}";
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "ex-2-4";
    e.kind = "family";
    e.anchor = "F(x,a)=(0,..., 0), with Z={(1,0,..., 0)}";
    e.summary = "constant family missing its target; dim A + delta* is negative";
    e.family_src = "[0; 0; 0]";
    e.n = 1;
    e.p = 1;
    e.target_src = "[x1 - 1; x2; x3]";
    e.q = 3;
    e.x_box = Box::cube(1, -1.0, 1.0);
    e.a_box = Box::cube(1, -1.0, 1.0);
    e.known_delta_star = -2;
    e.known_sigma = "empty (the image never meets Z)";
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "morse-cubic";
    e.kind = "family";
    e.anchor = "g+pi is not a Morse function";
    e.summary = "cubic g(x)=x^3 under linear perturbation a*x; degenerate critical point only at a=0";
    // Morse failure is non-transversality of the derivative family to {0}.
    e.family_src = "[3*x1^2 + a1]";
    e.n = 1;
    e.p = 1;
    e.target_src = "[x1]";
    e.q = 1;
    e.section_src = "[x1^3 + a1*x1]";
    e.x_box = Box::cube(1, -1.5, 1.5);
    e.a_box = Box::cube(1, -1.0, 1.0);
    e.map_src = "[x1^3]";
    e.known_delta_star = 0;
    e.known_sigma = "{a | a = 0}";
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "immersion-sigma-b";
    e.kind = "family";
    e.anchor = "we obtain Sigma=B";
    e.summary = "g(x)=(x^2, x^2, x^2) under linear perturbation; bad set is the diagonal a1=a2=a3";
    // Immersion failure is the derivative family hitting 0 in R^3.
    e.family_src = "[2*x1 + a1; 2*x1 + a2; 2*x1 + a3]";
    e.n = 1;
    e.p = 3;
    e.target_src = "[x1; x2; x3]";
    e.q = 3;
    e.section_src = "[x1^2 + a1*x1; x1^2 + a2*x1; x1^2 + a3*x1]";
    e.x_box = Box::cube(1, -1.5, 1.5);
    e.a_box = Box::cube(3, -1.0, 1.0);
    e.map_src = "[x1^2; x1^2; x1^2]";
    e.known_delta_star = -2;
    e.known_sigma_dim = 1.0;
    e.known_threshold = 1.0;
    e.known_threshold_strict = true;
    e.known_sigma = "{(a1,a2,a3) | a1 = a2 = a3}";
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "umbrella-normal";
    e.kind = "map";
    e.anchor = "(x1^2, x1*x2, x2)";
    e.summary = "cross-cap normal form; corank-1 point at the origin with transverse jet";
    e.map_src = "[x1^2; x1*x2; x2]";
    e.n = 2;
    e.q = 3;
    e.x_box = Box::cube(2, -1.0, 1.0);
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "umbrella-degenerate";
    e.kind = "map";
    e.anchor = "(x1^3, x1^2*x2, x2)";
    e.summary = "degenerate variant; corank-1 point at the origin whose jet is not transverse";
    e.map_src = "[x1^3; x1^2*x2; x2]";
    e.n = 2;
    e.q = 3;
    e.x_box = Box::cube(2, -1.0, 1.0);
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "circle-r3";
    e.kind = "map";
    e.anchor = "d_f = 3";
    e.summary = "planar circle embedded in R^3 via an injective chart; four image differences are always coplanar";
    e.map_src = "[cos(x1); sin(x1); 0]";
    e.n = 1;
    e.q = 3;
    e.x_box = Box::cube(1, 0.0, 6.0);
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "twisted-cubic";
    e.kind = "map";
    e.anchor = "d_f = m+1";
    e.summary = "moment curve (x, x^2, x^3); every 4-tuple of image differences is independent";
    e.map_src = "[x1; x1^2; x1^3]";
    e.n = 1;
    e.q = 3;
    e.x_box = Box::cube(1, -1.0, 1.0);
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "cantor-depth-12";
    e.kind = "cloud";
    e.anchor = "log 2/log 3 = 0.63...";
    e.summary = "middle-thirds construction truncated at depth 12; 4096 interval endpoints";
    e.cloud_depth = 12;
    e.known_sigma_dim = 0.6309297535714574;
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "pareto-9-1";
    e.kind = "objective";
    e.anchor = "X*(f+pi) = {(-a1/2, -a2/2)}";
    e.summary = "two identical strongly convex objectives x1^2+x2^2; equal linear perturbations collapse the atlas";
    e.objective_srcs = {"x1^2 + x2^2", "x1^2 + x2^2"};
    e.n = 2;
    e.domain_box = Box::cube(2, -2.0, 2.0);
    e.known_threshold = 2.0;
    e.known_threshold_strict = true;
    e.known_sigma = "{pi | pi_1 = pi_2}";
    entries.push_back(e);
  }
  {
    RegistryEntry e;
    e.name = "quad-centroid";
    e.kind = "objective";
    e.anchor = "x*(w) = w1*p + w2*q";
    e.summary = "squared distances to p=(1,0) and q=(-1,0); the atlas is the segment between them";
    e.objective_srcs = {"(x1 - 1)^2 + x2^2", "(x1 + 1)^2 + x2^2"};
    e.n = 2;
    e.domain_box = Box::cube(2, -2.0, 2.0);
    entries.push_back(e);
  }
  return entries;
}

}  // namespace

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries = build_registry();
  return entries;
}

const RegistryEntry& find_problem(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw std::invalid_argument("unknown registry problem: " + name);
}

FamilyProblem make_family(const RegistryEntry& entry) {
  if (entry.kind != "family")
    throw std::invalid_argument(entry.name + " is not a family problem");
  FamilyProblem problem;
  problem.family = parse(entry.family_src, entry.n, entry.p);
  problem.target.defining_map = parse(entry.target_src, entry.q, 0);
  problem.x_box = entry.x_box;
  problem.a_box = entry.a_box;
  return problem;
}

ExprMap make_map(const RegistryEntry& entry) {
  if (entry.map_src.empty())
    throw std::invalid_argument(entry.name + " has no plain map form");
  return parse(entry.map_src, entry.n, 0);
}

MultiObjective make_objective(const RegistryEntry& entry) {
  if (entry.kind != "objective")
    throw std::invalid_argument(entry.name + " is not an objective problem");
  MultiObjective f;
  f.domain_box = entry.domain_box;
  for (const auto& src : entry.objective_srcs) f.components.push_back(parse(src, entry.n, 0));
  f.alpha_hat = strong_convexity_estimate(f);
  return f;
}

std::vector<Eigen::VectorXd> make_cloud(const RegistryEntry& entry) {
  if (entry.kind != "cloud")
    throw std::invalid_argument(entry.name + " is not a cloud generator");
  return cantor_cloud(entry.cloud_depth);
}

std::vector<Eigen::VectorXd> cantor_cloud(int depth) {
  if (depth < 1 || depth > 20) throw std::invalid_argument("cantor depth out of range");
  std::vector<double> xs{0.0};
  double scale = 1.0;
  for (int level = 0; level < depth; ++level) {
    scale /= 3.0;
    std::vector<double> next;
    next.reserve(xs.size() * 2);
    for (double x : xs) {
      next.push_back(x);
      next.push_back(x + 2.0 * scale);
    }
    xs.swap(next);
  }
  std::vector<Eigen::VectorXd> cloud;
  cloud.reserve(xs.size());
  for (double x : xs) {
    Eigen::VectorXd v(1);
    v(0) = x;
    cloud.push_back(v);
  }
  return cloud;
}

}  // namespace tvlab
