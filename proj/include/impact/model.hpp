#pragma once

#include <Eigen/Dense>

namespace impact::model {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// LTI plant x[k+1] = A x + B u + w, y = C x + v.
/// Constructors reject unstable A and non-PSD noise covariances.
struct PlantModel {
  MatrixXd A;        // n x n, rho(A) < 1
  MatrixXd B;        // n x q
  MatrixXd C;        // m x n
  MatrixXd Sigma_w;  // n x n PSD
  MatrixXd Sigma_v;  // m x m PSD

  PlantModel(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd Sigma_w, MatrixXd Sigma_v);

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(C.rows()); }
  int q() const { return static_cast<int>(B.cols()); }
};

/// Observer-based controller u = -K xhat with innovation gain L.
struct ControllerModel {
  MatrixXd K;        // q x n
  MatrixXd L;        // n x m
  MatrixXd Sigma_r;  // m x m SPD residual covariance

  /// Validates rho(A-BK) < 1 and rho(A-LC) < 1 against the plant.
  ControllerModel(const PlantModel& plant, MatrixXd K, MatrixXd L, MatrixXd Sigma_r);
};

/// Toeplitz map from the stacked attack sequence a = [a[0];...;a[N-1]] to the
/// terminal plant state: x_a[N] = H a.
struct AttackMap {
  MatrixXd H;            // n x (N*m)
  int N = 0;
  int m = 0;
  MatrixXd block_norms;  // n x N, entry (i,j) = ||h_ij||_2

  /// Block of row i covering attack step j (length m).
  Eigen::RowVectorXd block(int i, int j) const { return H.block(i, j * m, 1, m); }
};

struct KalmanResult {
  MatrixXd L;        // n x m predictor gain
  MatrixXd Sigma_e;  // n x n steady-state prediction error covariance
  MatrixXd Sigma_r;  // m x m residual covariance C Sigma_e C' + Sigma_v
};

/// Steady-state Kalman predictor: iterates the discrete Riccati recursion
/// Sigma_e <- A Sigma_e A' + Sigma_w - A Sigma_e C'(C Sigma_e C' + Sigma_v)^{-1} C Sigma_e A'
/// to a 1e-12 max-abs fixed point. Requires (A,C) observable.
KalmanResult steady_state_kalman(const PlantModel& plant);

struct ClosedLoop {
  MatrixXd F;  // 2n x 2n, [[A-BK, BK],[0, A]]
  MatrixXd G;  // 2n x m,  [[0],[-L]]
  int n = 0;
  int m = 0;
};

/// Closed-loop dynamics under the second-stage attack:
/// [x_a; e_a][k+1] = F [x_a; e_a][k] + G r_a[k],  r_a[k] = Sigma_r^{1/2} a[k].
ClosedLoop closed_loop_under_attack(const PlantModel& plant, const ControllerModel& ctrl);

/// H column block j equals the x_a-rows of F^{N-1-j} G Sigma_r^{1/2}.
AttackMap build_attack_map(const ClosedLoop& loop, const MatrixXd& Sigma_r_sqrt, int N);

/// max_i |lambda_i(M)|.
double spectral_radius(const MatrixXd& M);

/// Symmetric PSD square root via eigendecomposition; eigenvalues below
/// 1e-12 are clipped to zero.
MatrixXd psd_sqrt(const MatrixXd& M);

/// Simulates the attacked closed loop from zero initial state for N steps and
/// returns the full terminal stacked state [x_a[N]; e_a[N]].
/// a is the stacked attack sequence of length N*m.
VectorXd simulate_closed_loop(const ClosedLoop& loop, const MatrixXd& Sigma_r_sqrt,
                              const VectorXd& a, int N);

}  // namespace impact::model
