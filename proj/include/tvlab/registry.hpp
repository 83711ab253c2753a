#ifndef TVLAB_REGISTRY_HPP
#define TVLAB_REGISTRY_HPP

#include <optional>
#include <string>
#include <vector>

#include "tvlab/pareto.hpp"
#include "tvlab/transversality.hpp"

namespace tvlab {

/// A named benchmark problem with its analytic facts recorded for fixture
/// checks. Kinds: family (F with target Z), map (plain f), objective
/// (multiobjective), cloud (generated point set).
struct RegistryEntry {
  std::string name;
  std::string kind;
  std::string anchor;   // quoted closed form the entry encodes
  std::string summary;

  // family
  std::string family_src;
  int n = 0;
  int p = 0;
  std::string target_src;
  int q = 0;
  Box x_box;
  Box a_box;

  // map
  std::string map_src;

  // perturbed section g + pi with the pi coefficients as parameters, for
  // binding concrete perturbations
  std::string section_src;

  // objective
  std::vector<std::string> objective_srcs;
  Box domain_box;

  // cloud
  int cloud_depth = 0;

  // analytic metadata
  std::optional<int> known_delta_star;
  std::optional<double> known_sigma_dim;
  std::optional<double> known_threshold;
  bool known_threshold_strict = false;
  std::string known_sigma;  // closed form of the bad set, when available
};

const std::vector<RegistryEntry>& registry();

/// Throws std::invalid_argument for unknown names.
const RegistryEntry& find_problem(const std::string& name);

FamilyProblem make_family(const RegistryEntry& entry);
ExprMap make_map(const RegistryEntry& entry);
MultiObjective make_objective(const RegistryEntry& entry);
std::vector<Eigen::VectorXd> make_cloud(const RegistryEntry& entry);

/// Left endpoints of the 2^depth surviving middle-thirds intervals.
std::vector<Eigen::VectorXd> cantor_cloud(int depth);

}  // namespace tvlab

#endif
