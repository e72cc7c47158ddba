#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <string>

#include "impact/mc_sim.hpp"
#include "impact/model.hpp"

// JSON system description: plant/controller matrices as row-major nested
// arrays, an optional detector block, and the attack horizon N.
//
// {
//   "A": [[...],[...]], "B": [[...]], "C": [[...]], "K": [[...]], "L": [[...]],
//   "Sigma_w": [[...]],   // optional, default 0
//   "Sigma_v": [[...]],   // optional, default I
//   "Sigma_r": [[...]],   // optional, default from the Riccati fixed point
//   "N": 10,
//   "detector": { "kind": "chi2"|"cusum", "m": 1, "b": 1.0, "delta": 0.5, "sigma_r": 1.0 }
// }

namespace impact::config {

struct DetectorBlock {
  mc::DetectorKind kind = mc::DetectorKind::Chi2;
  int m = 1;
  std::optional<double> b;
  std::optional<double> delta;
  double sigma_r = 1.0;
};

struct SystemConfig {
  model::PlantModel plant;
  model::ControllerModel ctrl;
  int N = 10;
  DetectorBlock detector;

  Eigen::MatrixXd sigma_r_sqrt() const { return model::psd_sqrt(ctrl.Sigma_r); }
  model::ClosedLoop closed_loop() const { return model::closed_loop_under_attack(plant, ctrl); }
  model::AttackMap attack_map() const {
    return model::build_attack_map(closed_loop(), sigma_r_sqrt(), N);
  }
};

/// Parses and validates a config (dimension and stability checks are done by
/// the model constructors). Throws std::runtime_error with a description on
/// bad input.
SystemConfig load_system_config(std::istream& in);
SystemConfig load_system_config_file(const std::string& path);

/// The two-state reference system used by the worked example (N = 10,
/// Sigma_w = 0, Sigma_v = I, hence Sigma_r = I).
SystemConfig example1_config();

}  // namespace impact::config
