#include "impact/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace impact::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

SimResult finish(long alarms, long steps, std::uint64_t seed) {
  SimResult out;
  out.trials = alarms;
  out.horizon = steps;
  out.seed = seed;
  out.empirical_tau = static_cast<double>(steps) / static_cast<double>(alarms);
  double p = static_cast<double>(alarms) / static_cast<double>(steps);
  double var = (1.0 - p) / (p * p);  // geometric inter-alarm variance
  out.ci95_half_width = 1.96 * std::sqrt(var / static_cast<double>(alarms));
  return out;
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::next_uniform() {
  // 53-bit mantissa, strictly inside (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = next_uniform();
  double u2 = next_uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

SimResult simulate_chi2_false_alarms(int m, double alpha, long trials, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("simulate_chi2_false_alarms: m must be positive");
  if (alpha < 0.0) throw std::invalid_argument("simulate_chi2_false_alarms: alpha must be >= 0");
  if (trials < 1) throw std::invalid_argument("simulate_chi2_false_alarms: trials must be >= 1");
  Rng rng(seed);
  long alarms = 0;
  long steps = 0;
  while (alarms < trials) {
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
      double g = rng.next_normal();
      z += g * g;
    }
    ++steps;
    if (z > alpha) ++alarms;
  }
  return finish(alarms, steps, seed);
}

SimResult simulate_cusum_false_alarms(int m, double alpha, double b, double sigma_r, long trials,
                                      std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("simulate_cusum_false_alarms: m must be positive");
  if (!(alpha > 0.0 && b > 0.0 && sigma_r > 0.0))
    throw std::invalid_argument("simulate_cusum_false_alarms: parameters must be positive");
  Rng rng(seed);
  // The ARL map describes a single one-sided drift test. Each side of each
  // sensor is such a test on the same residual stream, so all 2m sides are
  // pooled as renewal streams: a side that crosses is reset alone, and steps
  // are counted per side. The pooled rate is a consistent estimate of the
  // per-side ARL regardless of the correlation between the two sides.
  std::vector<double> sp(m, 0.0), sm(m, 0.0);
  long alarms = 0;
  long steps = 0;  // side-steps: 2 per sensor per time step
  while (alarms < trials) {
    for (int i = 0; i < m; ++i) {
      double r = sigma_r * rng.next_normal();
      sp[i] = std::max(0.0, sp[i] - b + r);
      sm[i] = std::max(0.0, sm[i] - b - r);
      steps += 2;
      if (sp[i] > alpha) {
        ++alarms;
        sp[i] = 0.0;
      }
      if (sm[i] > alpha) {
        ++alarms;
        sm[i] = 0.0;
      }
    }
  }
  return finish(alarms, steps, seed);
}

ReplayResult replay_attack(const model::ClosedLoop& loop, const Eigen::MatrixXd& Sigma_r_sqrt,
                           const Eigen::VectorXd& a, const DetectorConfig& det) {
  const int m = loop.m;
  if (a.size() % m != 0) throw std::invalid_argument("replay_attack: attack length must be N*m");
  const int N = static_cast<int>(a.size()) / m;

  ReplayResult out;
  Eigen::VectorXd state = Eigen::VectorXd::Zero(2 * loop.n);
  Eigen::VectorXd sp = Eigen::VectorXd::Zero(m), sm = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < N; ++k) {
    Eigen::VectorXd ak = a.segment(k * m, m);
    Eigen::VectorXd r = Sigma_r_sqrt * ak;
    double stat = 0.0;
    if (det.kind == DetectorKind::Chi2) {
      stat = ak.squaredNorm();  // r' Sigma_r^{-1} r with r = Sigma_r^{1/2} a
    } else {
      for (int i = 0; i < m; ++i) {
        sp[i] = std::max(0.0, sp[i] - det.b + r[i]);
        sm[i] = std::max(0.0, sm[i] - det.b - r[i]);
        stat = std::max({stat, sp[i], sm[i]});
      }
    }
    out.max_statistic = std::max(out.max_statistic, stat);
    if (stat > det.alpha + 1e-9) out.stealth_ok = false;
    state = loop.F * state + loop.G * r;
  }
  out.terminal_deviation = state.head(loop.n).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace impact::mc
