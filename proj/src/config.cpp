#include "rtm/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "rtm/error.hpp"
#include "rtm/fixtures.hpp"

namespace rtm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail("unknown key '" + it.key() + "' in " + where);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& where) {
  auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty() || rows[0].empty()) fail(where + " is empty");
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) fail(where + " is ragged");
    for (size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

json env_json(const AdjacencySpec& s) {
  switch (s.kind) {
    case Generator::Explicit: return {{"adjacency", s.matrix}};
    case Generator::Full: return {{"generator", "full"}, {"alphabet", s.alphabet}};
    case Generator::Band: return {{"generator", "band"}, {"band", s.band}, {"alphabet", s.alphabet}};
    case Generator::Golden: return {{"generator", "golden"}};
    case Generator::Renewal: return {{"generator", "renewal"}, {"alphabet", s.alphabet}};
  }
  return {};
}

AdjacencySpec env_from(const json& j) {
  only_keys(j, "shift environment", {"generator", "alphabet", "band", "adjacency"});
  if (j.contains("adjacency")) return AdjacencySpec::explicit_matrix(j.at("adjacency").get<std::vector<std::vector<int>>>());
  std::string g = j.at("generator").get<std::string>();
  int alphabet = j.value("alphabet", 2);
  if (alphabet < 0) fail("alphabet must be >= 0");
  if (g == "full") return AdjacencySpec::full(alphabet);
  if (g == "band") return AdjacencySpec::band_rule(j.value("band", 1), alphabet);
  if (g == "golden") return AdjacencySpec::golden();
  if (g == "renewal") return AdjacencySpec::renewal(alphabet);
  fail("unknown generator '" + g + "'");
}

json pot_json(const PotentialSpec& p) {
  using K = PotentialSpec::Kind;
  switch (p.kind) {
    case K::Zero: return {{"kind", "zero"}};
    case K::Geometric: return {{"kind", "geometric"}};
    case K::Bernoulli: return {{"kind", "bernoulli"}, {"p", p.p}};
    case K::MatrixLog: return {{"kind", "matrix-log"}, {"matrix", p.matrix}};
    case K::Table:
      if (!p.matrix.empty()) return {{"kind", "table"}, {"matrix", p.matrix}};
      return {{"kind", "table"}, {"values", p.p}};
  }
  return {};
}

PotentialSpec pot_from(const json& j) {
  only_keys(j, "potential environment", {"kind", "p", "matrix", "values"});
  std::string k = j.at("kind").get<std::string>();
  if (k == "zero") return PotentialSpec::zero();
  if (k == "geometric") return PotentialSpec::geometric();
  if (k == "bernoulli") return PotentialSpec::bernoulli(j.at("p").get<std::vector<double>>());
  if (k == "matrix-log")
    return PotentialSpec::matrix_log(j.at("matrix").get<std::vector<std::vector<double>>>());
  if (k == "table") {
    if (j.contains("matrix")) return PotentialSpec::table2(j.at("matrix").get<std::vector<std::vector<double>>>());
    return PotentialSpec::table1(j.at("values").get<std::vector<double>>());
  }
  fail("unknown potential kind '" + k + "'");
}

std::vector<std::vector<int>> expand_sets(const std::vector<std::vector<int>>& sets, int n,
                                          const std::string& what) {
  if (sets.size() == 1) return std::vector<std::vector<int>>(n, sets[0]);
  if (static_cast<int>(sets.size()) != n) fail(what + " needs one set or one per state");
  return sets;
}

void check_states(const std::vector<int>& xs, int n, const std::string& what) {
  for (int x : xs)
    if (x < 0 || x >= n) fail(what + " refers to a state outside the base");
}

}  // namespace

json ExperimentConfig::to_json() const {
  json j;
  if (!fixture.empty()) j["fixture"] = fixture;
  if (mode == BaseMode::Cyclic)
    j["base"] = {{"mode", "cyclic"}, {"period", period}};
  else
    j["base"] = {{"mode", "path"}, {"path", path}};
  json envs = json::array();
  for (const auto& e : environments) envs.push_back(env_json(e));
  j["shift"] = {{"truncation", truncation}, {"eps_tail", eps_tail}, {"environments", envs}};
  json pots = json::array();
  for (const auto& p : potentials) pots.push_back(pot_json(p));
  j["potential"] = {{"depth", potential_depth}, {"environments", pots}, {"kappa", kappa}, {"r", r}};
  if (certificate)
    j["certificate"] = {{"omega_bi", certificate->omega_bi},
                        {"images", certificate->images},
                        {"omega_bp", certificate->omega_bp},
                        {"preimages", certificate->preimages}};
  if (!matrices.empty()) {
    json ms = json::array();
    for (const auto& m : matrices) ms.push_back(matrix_json(m));
    j["matrices"] = ms;
  }
  const Tolerances& t = run.tol;
  j["run"] = {{"a", run.a},
              {"N", run.N},
              {"n_max", run.n_max},
              {"q", run.q},
              {"mixing_horizon", run.mixing_horizon},
              {"schedule_J", run.schedule_J},
              {"measure_J", run.measure_J},
              {"series_n_max", run.series_n_max},
              {"depth", run.depth},
              {"gibbs_max_len", run.gibbs_max_len},
              {"rpf_n_max", run.rpf_n_max},
              {"recurrence_n_max", run.recurrence_n_max},
              {"divergence_n_max", run.divergence_n_max},
              {"backward_n_max", run.backward_n_max},
              {"target", run.target},
              {"f", run.f},
              {"seed", run.seed},
              {"tolerances",
               {{"quotient_gap", t.quotient_gap},
                {"residual", t.residual},
                {"measure_agreement", t.measure_agreement},
                {"pf", t.pf},
                {"stationary", t.stationary},
                {"agree", t.agree}}}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  try {
    only_keys(j, "config", {"fixture", "base", "shift", "potential", "certificate", "matrices", "run"});
    ExperimentConfig c;
    c.fixture = j.value("fixture", "");

    const json& b = j.at("base");
    only_keys(b, "base", {"mode", "period", "path"});
    std::string mode = b.at("mode").get<std::string>();
    if (mode == "cyclic") {
      c.mode = BaseMode::Cyclic;
      c.period = b.at("period").get<int>();
      if (c.period < 1) fail("period must be >= 1");
    } else if (mode == "path") {
      c.mode = BaseMode::SampledPath;
      c.path = b.at("path").get<std::vector<int>>();
      if (c.path.empty()) fail("path must be nonempty");
      for (int x : c.path)
        if (x < 0) fail("path labels must be >= 0");
      c.period = static_cast<int>(c.path.size());
    } else {
      fail("base mode must be 'cyclic' or 'path'");
    }
    int states = c.period;
    int labels = 0;
    for (int x : c.path) labels = std::max(labels, x + 1);
    if (c.mode == BaseMode::Cyclic) labels = states;

    const json& s = j.at("shift");
    only_keys(s, "shift", {"truncation", "eps_tail", "environments"});
    c.truncation = s.value("truncation", 0);
    c.eps_tail = s.value("eps_tail", 1e-6);
    for (const auto& e : s.at("environments")) c.environments.push_back(env_from(e));
    if (c.environments.empty()) fail("shift needs at least one environment");
    if (c.environments.size() > 1 && static_cast<int>(c.environments.size()) < labels)
      fail("shift environments do not cover every label");
    if (c.truncation < 0) fail("truncation must be >= 0");
    if (!(c.eps_tail > 0.0)) fail("eps_tail must be positive");

    const json& p = j.at("potential");
    only_keys(p, "potential", {"depth", "environments", "kappa", "r"});
    c.potential_depth = p.value("depth", 1);
    if (c.potential_depth != 1 && c.potential_depth != 2) fail("potential depth must be 1 or 2");
    for (const auto& e : p.at("environments")) c.potentials.push_back(pot_from(e));
    if (c.potentials.empty()) fail("potential needs at least one environment");
    if (c.potentials.size() > 1 && static_cast<int>(c.potentials.size()) < labels)
      fail("potential environments do not cover every label");
    c.kappa = p.value("kappa", std::vector<double>{1.0});
    c.r = p.value("r", 0.5);
    for (double k : c.kappa)
      if (!(k >= 1.0)) fail("kappa must be >= 1");
    if (c.kappa.size() != 1 && static_cast<int>(c.kappa.size()) != states)
      fail("kappa needs one value or one per state");
    if (!(c.r > 0.0 && c.r < 1.0)) fail("r must lie in (0,1)");

    if (j.contains("certificate")) {
      const json& cj = j.at("certificate");
      only_keys(cj, "certificate", {"omega_bi", "images", "omega_bp", "preimages"});
      CertificateSpec cs;
      cs.omega_bi = cj.at("omega_bi").get<std::vector<int>>();
      cs.omega_bp = cj.at("omega_bp").get<std::vector<int>>();
      cs.images = cj.at("images").get<std::vector<std::vector<int>>>();
      cs.preimages = cj.at("preimages").get<std::vector<std::vector<int>>>();
      check_states(cs.omega_bi, states, "omega_bi");
      check_states(cs.omega_bp, states, "omega_bp");
      expand_sets(cs.images, states, "images");
      expand_sets(cs.preimages, states, "preimages");
      std::sort(cs.omega_bi.begin(), cs.omega_bi.end());
      std::sort(cs.omega_bp.begin(), cs.omega_bp.end());
      c.certificate = cs;
    }

    if (j.contains("matrices")) {
      for (const auto& m : j.at("matrices")) c.matrices.push_back(matrix_from(m, "matrix"));
      if (c.matrices.size() > 1 && static_cast<int>(c.matrices.size()) < labels)
        fail("matrices do not cover every label");
    }

    const json& r = j.at("run");
    only_keys(r, "run",
              {"a", "N", "n_max", "q", "mixing_horizon", "schedule_J", "measure_J", "series_n_max",
               "depth", "gibbs_max_len", "rpf_n_max", "recurrence_n_max", "divergence_n_max", "backward_n_max",
               "target", "f", "seed", "tolerances"});
    RunParams& rp = c.run;
    if (!r.contains("seed")) fail("run.seed is mandatory");
    rp.seed = r.at("seed").get<std::uint64_t>();
    rp.a = r.value("a", rp.a);
    rp.N = r.value("N", rp.N);
    rp.n_max = r.value("n_max", rp.n_max);
    rp.q = r.value("q", rp.q);
    rp.mixing_horizon = r.value("mixing_horizon", rp.mixing_horizon);
    rp.schedule_J = r.value("schedule_J", rp.schedule_J);
    rp.measure_J = r.value("measure_J", rp.measure_J);
    rp.series_n_max = r.value("series_n_max", rp.series_n_max);
    rp.depth = r.value("depth", rp.depth);
    rp.gibbs_max_len = r.value("gibbs_max_len", rp.gibbs_max_len);
    rp.rpf_n_max = r.value("rpf_n_max", rp.rpf_n_max);
    rp.recurrence_n_max = r.value("recurrence_n_max", rp.recurrence_n_max);
    rp.divergence_n_max = r.value("divergence_n_max", rp.divergence_n_max);
    rp.backward_n_max = r.value("backward_n_max", rp.backward_n_max);
    rp.target = r.value("target", rp.target);
    rp.f = r.value("f", rp.f);
    if (r.contains("tolerances")) {
      const json& t = r.at("tolerances");
      only_keys(t, "tolerances", {"quotient_gap", "residual", "measure_agreement", "pf", "stationary", "agree"});
      Tolerances& tl = rp.tol;
      tl.quotient_gap = t.value("quotient_gap", tl.quotient_gap);
      tl.residual = t.value("residual", tl.residual);
      tl.measure_agreement = t.value("measure_agreement", tl.measure_agreement);
      tl.pf = t.value("pf", tl.pf);
      tl.stationary = t.value("stationary", tl.stationary);
      tl.agree = t.value("agree", tl.agree);
      for (double x : {tl.quotient_gap, tl.residual, tl.measure_agreement, tl.pf, tl.stationary, tl.agree})
        if (!(x > 0.0)) fail("tolerances must be positive");
    }
    if (rp.a < 0) fail("run.a must be >= 0");
    if (rp.N < 1) fail("run.N must be >= 1");
    if (rp.n_max < 2) fail("run.n_max must be >= 2");
    if (rp.q < 1) fail("run.q must be >= 1");
    if (rp.mixing_horizon < 1) fail("run.mixing_horizon must be >= 1");
    if (rp.schedule_J < 2 || rp.schedule_J > 40) fail("run.schedule_J must lie in [2, 40]");
    if (rp.measure_J < 1 || rp.measure_J > 40) fail("run.measure_J must lie in [1, 40]");
    if (rp.series_n_max < 0) fail("run.series_n_max must be >= 0");
    if (rp.depth < 1 || rp.depth > 6) fail("run.depth must lie in [1, 6]");
    if (rp.gibbs_max_len < 1) fail("run.gibbs_max_len must be >= 1");
    if (rp.rpf_n_max < 1 || rp.recurrence_n_max < 1 || rp.divergence_n_max < 1 ||
        rp.backward_n_max < 1)
      fail("run horizons must be >= 1");
    if (rp.f.empty()) fail("run.f must name a cylinder");
    check_states(rp.target, states, "run.target");
    std::sort(rp.target.begin(), rp.target.end());
    return c;
  } catch (const json::exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
}

ExperimentConfig resolve_config(const json& doc) {
  if (!doc.is_object()) fail("config must be a JSON object");
  if (doc.contains("fixture")) {
    json merged = fixture(doc.at("fixture").get<std::string>()).to_json();
    merged.merge_patch(doc);
    return ExperimentConfig::from_json(merged);
  }
  return ExperimentConfig::from_json(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  return resolve_config(doc);
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::string text = cfg.to_json().dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return out.str();
}

BaseSystem build_base(const ExperimentConfig& cfg) {
  return cfg.mode == BaseMode::Cyclic ? BaseSystem::cyclic(cfg.period) : BaseSystem::sampled_path(cfg.path);
}

RandomShift build_shift(const ExperimentConfig& cfg) {
  return RandomShift(build_base(cfg), cfg.environments, cfg.truncation);
}

Model build_model(const ExperimentConfig& cfg) {
  RandomShift shift = build_shift(cfg);
  Potential pot = make_potential(shift, cfg.potentials, cfg.potential_depth, cfg.kappa, cfg.r, cfg.eps_tail);
  return Model(std::move(shift), std::move(pot));
}

BipCertificate build_certificate(const ExperimentConfig& cfg, const RandomShift& shift) {
  int n = shift.base().size();
  if (cfg.certificate) {
    BipCertificate c;
    c.omega_bi = cfg.certificate->omega_bi;
    c.omega_bp = cfg.certificate->omega_bp;
    c.images = expand_sets(cfg.certificate->images, n, "images");
    c.preimages = expand_sets(cfg.certificate->preimages, n, "preimages");
    return c;
  }
  auto found = search_bip_certificate(shift);
  if (!found) throw Error(ErrorKind::HypothesisFail, "no certificate with sets of size <= 4");
  return *found;
}

MatrixCocycle build_cocycle(const ExperimentConfig& cfg) {
  BaseSystem base = build_base(cfg);
  std::vector<Eigen::MatrixXd> A(base.size());
  if (!cfg.matrices.empty()) {
    for (int o = 0; o < base.size(); ++o)
      A[o] = cfg.matrices.size() == 1 ? cfg.matrices[0] : cfg.matrices.at(base.label(o));
  } else {
    Model model = build_model(cfg);
    for (int o = 0; o < base.size(); ++o) A[o] = model.weights(o);
  }
  return MatrixCocycle(std::move(base), std::move(A));
}

}  // namespace rtm
