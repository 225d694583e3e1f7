#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtm/matrix.hpp"

namespace rtm {

struct Tolerances {
  double quotient_gap = 1e-6;
  double residual = 1e-8;
  double measure_agreement = 1e-6;
  double pf = 1e-12;
  double stationary = 1e-13;
  double agree = 1e-8;
};

struct RunParams {
  int a = 0;
  int N = 4;
  int n_max = 40;
  int q = 5;
  int mixing_horizon = 64;
  int schedule_J = 30;
  int measure_J = 30;
  long long series_n_max = 0;  // 0 selects the automatic truncation
  int depth = 2;
  int gibbs_max_len = 10;
  int rpf_n_max = 60;
  int recurrence_n_max = 40;
  int divergence_n_max = 60;
  int backward_n_max = 200;
  std::vector<int> target;  // empty selects Omega*
  Symbols f = {0};          // test function is the indicator of this cylinder
  std::uint64_t seed = 1;
  Tolerances tol;
};

struct CertificateSpec {
  StateSet omega_bi, omega_bp;
  std::vector<std::vector<int>> images, preimages;  // one set used everywhere, or one per state
};

struct ExperimentConfig {
  std::string fixture;
  BaseMode mode = BaseMode::Cyclic;
  int period = 1;
  std::vector<int> path;
  int truncation = 0;
  double eps_tail = 1e-6;
  std::vector<AdjacencySpec> environments;
  int potential_depth = 1;
  std::vector<PotentialSpec> potentials;
  std::vector<double> kappa = {1.0};
  double r = 0.5;
  std::optional<CertificateSpec> certificate;
  std::vector<Eigen::MatrixXd> matrices;  // per environment label, optional
  RunParams run;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// A document naming a fixture is merged over that fixture's configuration.
ExperimentConfig resolve_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// SHA-256 of the canonical JSON form
std::string config_digest(const ExperimentConfig& cfg);

BaseSystem build_base(const ExperimentConfig& cfg);
RandomShift build_shift(const ExperimentConfig& cfg);
Model build_model(const ExperimentConfig& cfg);
// explicit certificate, or the smallest one found by search
BipCertificate build_certificate(const ExperimentConfig& cfg, const RandomShift& shift);
// explicit matrices, or the weights E of the model
MatrixCocycle build_cocycle(const ExperimentConfig& cfg);

}  // namespace rtm
