#pragma once

#include <string>
#include <vector>

#include "fsi/fsisolver.hpp"

namespace fsi {

// Run configuration parsed from a flat key/value JSON object. Keys are
// dotted names ("physics.rho_f"); unknown keys and wrongly typed values are
// rejected with an error naming the key. Membrane coefficients are derived
// from E, sigma, eps and R unless physics.C0 and physics.C1 are both given.
struct RunConfig {
  SchemeConfig scheme;
  PhysicalParams phys = PhysicalParams::benchmark();

  std::vector<double> dt_list;
  std::vector<double> beta_list;
  double dt_ref = 0.0;
  std::vector<int> nx_list;
  int ref_nx = 0;
  double c_linear = 4e-3;
  double c_threehalf = 4e-3;

  std::string output_dir = "out";
  bool write_snapshots = false;
  bool write_figures = true;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace fsi
