#pragma once

#include <cstdint>

#include "impact/curve.hpp"
#include "impact/model.hpp"

// Monte Carlo validation: empirical mean time between false alarms under no
// attack, and trajectory replay of optimal attacks through the attacked loop.

namespace impact::mc {

/// xoshiro256++ seeded through splitmix64. Fixed project-wide so results are
/// reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  /// Uniform in (0,1).
  double next_uniform();
  /// Standard normal, paired Box-Muller.
  double next_normal();

 private:
  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

struct SimResult {
  double empirical_tau = 0.0;
  double ci95_half_width = 0.0;
  long trials = 0;      // alarms observed
  long horizon = 0;     // detector steps consumed
  std::uint64_t seed = 0;
};

/// Draws i.i.d. whitened residuals and measures the geometric inter-alarm
/// time of z = ||r||^2 > alpha. `trials` is the number of alarms to collect;
/// the estimate is the geometric MLE steps/alarms.
SimResult simulate_chi2_false_alarms(int m, double alpha, long trials, std::uint64_t seed);

/// Per-sensor CUSUM recursion with alarm-and-reset (renewal). Each side of
/// each sensor is one one-sided drift test -- the object the ARL map
/// describes -- and the 2m sides are pooled as i.i.d. renewal streams.
SimResult simulate_cusum_false_alarms(int m, double alpha, double b, double sigma_r, long trials,
                                      std::uint64_t seed);

enum class DetectorKind { Chi2, Cusum };

struct DetectorConfig {
  DetectorKind kind = DetectorKind::Chi2;
  double alpha = 1.0;
  double b = 1.0;  // CUSUM only
};

struct ReplayResult {
  double terminal_deviation = 0.0;  // ||x_a[N]||_inf over plant states
  bool stealth_ok = true;           // statistic stayed <= alpha at every step
  double max_statistic = 0.0;
};

/// Runs the stacked attack a through the noise-free attacked closed loop and
/// the true detector recursion (chi^2 quadratic form or max(0,.) CUSUM).
ReplayResult replay_attack(const model::ClosedLoop& loop, const Eigen::MatrixXd& Sigma_r_sqrt,
                           const Eigen::VectorXd& a, const DetectorConfig& det);

}  // namespace impact::mc
