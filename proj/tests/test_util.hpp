#pragma once

#include <functional>

#include "impact/mc_sim.hpp"
#include "impact/model.hpp"

namespace test_util {

inline double central_diff1(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_diff2(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

struct RandomSystem {
  impact::model::PlantModel plant;
  impact::model::ControllerModel ctrl;
};

inline Eigen::MatrixXd random_matrix(impact::mc::Rng& rng, int r, int c, double scale) {
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = scale * (2.0 * rng.next_uniform() - 1.0);
  return M;
}

/// Random stable system with all three Schur conditions satisfied;
/// Sigma_w = 0, Sigma_v = Sigma_r = I. Retries until the draws are stable.
inline RandomSystem random_stable_system(impact::mc::Rng& rng, int n, int q, int m) {
  using impact::model::spectral_radius;
  for (;;) {
    Eigen::MatrixXd A = random_matrix(rng, n, n, 1.0);
    double rho = spectral_radius(A);
    if (rho > 0.0) A *= (0.3 + 0.5 * rng.next_uniform()) / rho;
    Eigen::MatrixXd B = random_matrix(rng, n, q, 1.0);
    Eigen::MatrixXd C = random_matrix(rng, m, n, 1.0);
    Eigen::MatrixXd K = random_matrix(rng, q, n, 0.2);
    Eigen::MatrixXd L = random_matrix(rng, n, m, 0.2);
    if (spectral_radius(A - B * K) >= 0.98) continue;
    if (spectral_radius(A - L * C) >= 0.98) continue;
    impact::model::PlantModel plant(A, B, C, Eigen::MatrixXd::Zero(n, n),
                                    Eigen::MatrixXd::Identity(m, m));
    impact::model::ControllerModel ctrl(plant, K, L, Eigen::MatrixXd::Identity(m, m));
    return {plant, ctrl};
  }
}

}  // namespace test_util
