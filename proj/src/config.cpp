#include "impact/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace impact::config {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::runtime_error("config: " + name + " must be a nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw std::runtime_error("config: ragged rows in " + name);
    for (std::size_t k = 0; k < cols; ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

}  // namespace

SystemConfig load_system_config(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: JSON parse error: ") + e.what());
  }
  for (const char* key : {"A", "B", "C", "K", "L"})
    if (!j.contains(key)) throw std::runtime_error(std::string("config: missing matrix ") + key);

  Eigen::MatrixXd A = parse_matrix(j["A"], "A");
  Eigen::MatrixXd B = parse_matrix(j["B"], "B");
  Eigen::MatrixXd C = parse_matrix(j["C"], "C");
  Eigen::MatrixXd K = parse_matrix(j["K"], "K");
  Eigen::MatrixXd L = parse_matrix(j["L"], "L");

  const long n = A.rows();
  const long m = C.rows();
  Eigen::MatrixXd Sigma_w =
      j.contains("Sigma_w") ? parse_matrix(j["Sigma_w"], "Sigma_w") : Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd Sigma_v =
      j.contains("Sigma_v") ? parse_matrix(j["Sigma_v"], "Sigma_v") : Eigen::MatrixXd::Identity(m, m);

  model::PlantModel plant(A, B, C, Sigma_w, Sigma_v);
  Eigen::MatrixXd Sigma_r;
  if (j.contains("Sigma_r")) {
    Sigma_r = parse_matrix(j["Sigma_r"], "Sigma_r");
  } else {
    Sigma_r = model::steady_state_kalman(plant).Sigma_r;
  }

  SystemConfig cfg{plant, model::ControllerModel(plant, K, L, Sigma_r),
                   j.value("N", 10), DetectorBlock{}};
  if (cfg.N < 1) throw std::runtime_error("config: N must be >= 1");

  if (j.contains("detector")) {
    const json& d = j["detector"];
    std::string kind = d.value("kind", "chi2");
    if (kind == "chi2") cfg.detector.kind = mc::DetectorKind::Chi2;
    else if (kind == "cusum") cfg.detector.kind = mc::DetectorKind::Cusum;
    else throw std::runtime_error("config: detector.kind must be chi2 or cusum");
    cfg.detector.m = d.value("m", static_cast<int>(m));
    if (d.contains("b")) cfg.detector.b = d["b"].get<double>();
    if (d.contains("delta")) cfg.detector.delta = d["delta"].get<double>();
    cfg.detector.sigma_r = d.value("sigma_r", 1.0);
  } else {
    cfg.detector.m = static_cast<int>(m);
  }
  return cfg;
}

SystemConfig load_system_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  return load_system_config(in);
}

SystemConfig example1_config() {
  Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2), K(1, 2), L(2, 1);
  A << 0.84, 0.23, -0.47, 0.12;
  B << 0.07, 0.23;
  C << 1.0, 0.0;
  K << 1.85, 0.96;
  L << 0.25, -0.18;
  model::PlantModel plant(A, B, C, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(1, 1));
  // Sigma_w = 0 gives Sigma_e = 0 and Sigma_r = Sigma_v = I.
  model::ControllerModel ctrl(plant, K, L, Eigen::MatrixXd::Identity(1, 1));
  SystemConfig cfg{plant, ctrl, 10, DetectorBlock{}};
  cfg.detector.m = 1;
  cfg.detector.sigma_r = 1.0;
  return cfg;
}

}  // namespace impact::config
