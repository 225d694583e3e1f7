#include "rtm/fixtures.hpp"

#include "rtm/error.hpp"

namespace rtm {

namespace {

using Rows = std::vector<std::vector<double>>;

ExperimentConfig one_state(const std::string& name, AdjacencySpec env, PotentialSpec pot) {
  ExperimentConfig c;
  c.fixture = name;
  c.mode = BaseMode::Cyclic;
  c.period = 1;
  c.environments = {std::move(env)};
  c.potentials = {std::move(pot)};
  c.potential_depth = 1;
  c.certificate = CertificateSpec{{0}, {0}, {{0}}, {{0}}};
  return c;
}

Eigen::MatrixXd to_matrix(const Rows& rows) {
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  return m;
}

ExperimentConfig matrix_pair(const std::string& name, const Rows& A0, const Rows& A1, double kappa) {
  ExperimentConfig c;
  c.fixture = name;
  c.mode = BaseMode::Cyclic;
  c.period = 2;
  c.environments = {AdjacencySpec::full(static_cast<int>(A0.size()))};
  c.potentials = {PotentialSpec::matrix_log(A0), PotentialSpec::matrix_log(A1)};
  c.potential_depth = 2;
  c.kappa = {kappa};
  c.certificate = CertificateSpec{{0, 1}, {0, 1}, {{0}}, {{0}}};
  c.matrices = {to_matrix(A0), to_matrix(A1)};
  return c;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"FS2", "FS2-bernoulli", "GM",  "GEO",
                                                 "P2",  "DS3",           "NOBIP", "STOCH2"};
  return names;
}

ExperimentConfig fixture(const std::string& name) {
  if (name == "FS2") return one_state(name, AdjacencySpec::full(2), PotentialSpec::zero());
  if (name == "FS2-bernoulli")
    return one_state(name, AdjacencySpec::full(2), PotentialSpec::bernoulli({0.3, 0.7}));
  if (name == "GM") return one_state(name, AdjacencySpec::golden(), PotentialSpec::zero());
  if (name == "GEO") {
    ExperimentConfig c = one_state(name, AdjacencySpec::full(0), PotentialSpec::geometric());
    c.truncation = 20;
    c.eps_tail = 1e-5;
    c.run.gibbs_max_len = 3;
    return c;
  }
  if (name == "NOBIP") {
    ExperimentConfig c = one_state(name, AdjacencySpec::band_rule(1, 0), PotentialSpec::zero());
    c.truncation = 16;
    return c;
  }
  if (name == "P2") {
    ExperimentConfig c;
    c.fixture = name;
    c.mode = BaseMode::Cyclic;
    c.period = 2;
    c.environments = {AdjacencySpec::explicit_matrix({{1, 1}, {1, 0}}),
                      AdjacencySpec::explicit_matrix({{1, 1}, {0, 1}})};
    c.potentials = {PotentialSpec::zero()};
    c.potential_depth = 1;
    c.certificate = CertificateSpec{{0, 1}, {0, 1}, {{0, 1}, {0}}, {{0}}};
    return c;
  }
  if (name == "DS3")
    return matrix_pair(name, {{.5, .3, .2}, {.2, .5, .3}, {.3, .2, .5}},
                       {{.1, .6, .3}, {.6, .3, .1}, {.3, .1, .6}}, 4.0);
  if (name == "STOCH2") return matrix_pair(name, {{.9, .1}, {.2, .8}}, {{.5, .5}, {.3, .7}}, 5.0);
  throw Error(ErrorKind::UnknownFixture, "unknown fixture '" + name + "'");
}

}  // namespace rtm
