#include "impact/model.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace impact::model {

namespace {

void check_psd(const MatrixXd& M, const char* name) {
  if (M.rows() != M.cols()) throw std::invalid_argument(std::string(name) + " must be square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
}

void check_schur(const MatrixXd& M, const char* what) {
  double rho = spectral_radius(M);
  if (rho >= 1.0) {
    std::ostringstream os;
    os << what << " is not Schur stable: spectral radius " << rho << " >= 1";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

PlantModel::PlantModel(MatrixXd A_, MatrixXd B_, MatrixXd C_, MatrixXd Sigma_w_, MatrixXd Sigma_v_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)),
      Sigma_w(std::move(Sigma_w_)), Sigma_v(std::move(Sigma_v_)) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("B row count must match A");
  if (C.cols() != A.rows()) throw std::invalid_argument("C column count must match A");
  if (Sigma_w.rows() != A.rows()) throw std::invalid_argument("Sigma_w must be n x n");
  if (Sigma_v.rows() != C.rows()) throw std::invalid_argument("Sigma_v must be m x m");
  check_psd(Sigma_w, "Sigma_w");
  check_psd(Sigma_v, "Sigma_v");
  check_schur(A, "A");
}

ControllerModel::ControllerModel(const PlantModel& plant, MatrixXd K_, MatrixXd L_, MatrixXd Sigma_r_)
    : K(std::move(K_)), L(std::move(L_)), Sigma_r(std::move(Sigma_r_)) {
  if (K.rows() != plant.q() || K.cols() != plant.n())
    throw std::invalid_argument("K must be q x n");
  if (L.rows() != plant.n() || L.cols() != plant.m())
    throw std::invalid_argument("L must be n x m");
  if (Sigma_r.rows() != plant.m() || Sigma_r.cols() != plant.m())
    throw std::invalid_argument("Sigma_r must be m x m");
  check_psd(Sigma_r, "Sigma_r");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sigma_r, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("Sigma_r must be positive definite");
  check_schur(plant.A - plant.B * K, "A - BK");
  check_schur(plant.A - L * plant.C, "A - LC");
}

double spectral_radius(const MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd psd_sqrt(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev[i] = ev[i] < 1e-12 ? 0.0 : std::sqrt(ev[i]);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

KalmanResult steady_state_kalman(const PlantModel& plant) {
  const int n = plant.n();
  const int m = plant.m();

  // Observability stack rank check.
  MatrixXd obs(n * m, n);
  MatrixXd Ak = MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    obs.block(i * m, 0, m, n) = plant.C * Ak;
    Ak = Ak * plant.A;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(obs);
  if (qr.rank() < n) throw std::runtime_error("steady_state_kalman: (A,C) is not observable");

  MatrixXd S = plant.Sigma_w;
  const int kMaxIter = 1000000;
  for (int it = 0; it < kMaxIter; ++it) {
    MatrixXd innov = plant.C * S * plant.C.transpose() + plant.Sigma_v;
    MatrixXd gain = plant.A * S * plant.C.transpose() * innov.inverse();
    MatrixXd Sn = plant.A * S * plant.A.transpose() + plant.Sigma_w -
                  gain * plant.C * S * plant.A.transpose();
    Sn = 0.5 * (Sn + Sn.transpose());
    double diff = (Sn - S).cwiseAbs().maxCoeff();
    S = Sn;
    if (diff < 1e-12) {
      KalmanResult out;
      out.Sigma_e = S;
      MatrixXd innov2 = plant.C * S * plant.C.transpose() + plant.Sigma_v;
      out.L = plant.A * S * plant.C.transpose() * innov2.inverse();
      out.Sigma_r = innov2;
      return out;
    }
  }
  throw std::runtime_error("steady_state_kalman: Riccati iteration did not converge");
}

ClosedLoop closed_loop_under_attack(const PlantModel& plant, const ControllerModel& ctrl) {
  const int n = plant.n();
  const int m = plant.m();
  ClosedLoop loop;
  loop.n = n;
  loop.m = m;
  loop.F = MatrixXd::Zero(2 * n, 2 * n);
  loop.F.topLeftCorner(n, n) = plant.A - plant.B * ctrl.K;
  loop.F.topRightCorner(n, n) = plant.B * ctrl.K;
  loop.F.bottomRightCorner(n, n) = plant.A;
  loop.G = MatrixXd::Zero(2 * n, m);
  loop.G.bottomRows(n) = -ctrl.L;
  return loop;
}

AttackMap build_attack_map(const ClosedLoop& loop, const MatrixXd& Sigma_r_sqrt, int N) {
  if (N < 1) throw std::invalid_argument("build_attack_map: N must be >= 1");
  const int n = loop.n;
  const int m = loop.m;
  AttackMap map;
  map.N = N;
  map.m = m;
  map.H = MatrixXd::Zero(n, N * m);
  MatrixXd Fp = MatrixXd::Identity(2 * n, 2 * n);  // F^{N-1-j}, built from j = N-1 down
  for (int j = N - 1; j >= 0; --j) {
    map.H.block(0, j * m, n, m) = (Fp * loop.G * Sigma_r_sqrt).topRows(n);
    Fp = loop.F * Fp;
  }
  map.block_norms = MatrixXd::Zero(n, N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < N; ++j)
      map.block_norms(i, j) = map.H.block(i, j * m, 1, m).norm();
  return map;
}

VectorXd simulate_closed_loop(const ClosedLoop& loop, const MatrixXd& Sigma_r_sqrt,
                              const VectorXd& a, int N) {
  if (a.size() != static_cast<long>(N) * loop.m)
    throw std::invalid_argument("simulate_closed_loop: attack length must be N*m");
  VectorXd s = VectorXd::Zero(2 * loop.n);
  for (int k = 0; k < N; ++k)
    s = loop.F * s + loop.G * (Sigma_r_sqrt * a.segment(k * loop.m, loop.m));
  return s;
}

}  // namespace impact::model
