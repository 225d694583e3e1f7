#include "rtm/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "rtm/error.hpp"

namespace rtm {

using nlohmann::json;

namespace {

const std::vector<std::pair<std::string, Command>>& command_table() {
  static const std::vector<std::pair<std::string, Command>> t = {
      {"check-bip", Command::CheckBip}, {"pressure", Command::Pressure},
      {"rpf", Command::Rpf},            {"conformal", Command::Conformal},
      {"gibbs", Command::Gibbs},        {"matrix-pf", Command::MatrixPf},
      {"stationary", Command::Stationary}, {"all", Command::All}};
  return t;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string word_str(const Symbols& w) {
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

class Csv {
 public:
  explicit Csv(const std::string& header) { out_ << header << '\n'; }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long long x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& x) { return x; }
  std::ostringstream out_;
};

std::string vector_table(const std::vector<Eigen::VectorXd>& v) {
  Csv t("state,index,value");
  for (size_t o = 0; o < v.size(); ++o)
    for (int i = 0; i < v[o].size(); ++i) t.row(static_cast<int>(o), i, v[o](i));
  return t.str();
}

std::string decay_table(const DecayTable& d) {
  Csv t("n,deviation");
  for (size_t i = 0; i < d.n.size(); ++i) t.row(d.n[i], d.deviation[i]);
  return t.str();
}

double last_or_nan(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : v.back();
}

// Shared state of one run; every stage computes its inputs on demand.
class Pipeline {
 public:
  Pipeline(const ExperimentConfig& cfg, RunReport& rep) : cfg_(cfg), rep_(rep) {}

  bool bip() {
    const Model& m = model();
    const BipCertificate& c = cert();
    BipReport b = verify_bip(m.shift(), c);
    json wi = json::array(), wp = json::array();
    Csv t("kind,state,symbol");
    for (auto w : b.image_failures) {
      wi.push_back({{"omega", w.omega}, {"a", w.a}});
      t.row(std::string("image"), w.omega, w.a);
    }
    for (auto w : b.preimage_failures) {
      wp.push_back({{"omega", w.omega}, {"a", w.a}});
      t.row(std::string("preimage"), w.omega, w.a);
    }
    rep_.json["bip"] = {{"images_ok", b.images_ok},
                        {"preimages_ok", b.preimages_ok},
                        {"image_failures", wi},
                        {"preimage_failures", wp},
                        {"truncation", b.truncation},
                        {"weight_bi", b.weight_bi},
                        {"weight_bp", b.weight_bp},
                        {"certificate",
                         {{"omega_bi", c.omega_bi},
                          {"images", c.images},
                          {"omega_bp", c.omega_bp},
                          {"preimages", c.preimages}}}};
    rep_.csv["bip_witnesses.csv"] = t.str();
    ConditionReport cr = check_conditions(m, c);
    rep_.json["conditions"] = {{"H1", cr.H1},
                               {"H2", cr.H2},
                               {"Hstar", cr.Hstar},
                               {"S1", cr.S1},
                               {"S2", cr.S2},
                               {"avg_log_B", cr.avg_log_B},
                               {"avg_log_M", cr.avg_log_M},
                               {"avg_neg_log_m", cr.avg_neg_log_m},
                               {"V1", cr.V1},
                               {"holder1", cr.holder1},
                               {"holder2", cr.holder2},
                               {"truncation_dependent", cr.truncation_dependent},
                               {"tail_mass", m.potential().tail_mass},
                               {"tail_certified", m.potential().tail_flag}};
    return b.ok();
  }

  void pressure_stage() {
    const PressureEstimate& p = pressure_est();
    json rows = json::array();
    Csv t("n,in_return_set,logZ_over_n,logCZ_over_n,gap");
    for (const auto& r : p.rows) t.row(r.n, r.in_return_set, r.logZ_over_n, r.logCZ_over_n, r.gap);
    rep_.csv["pressure.csv"] = t.str();
    rep_.json["pressure"] = {{"P_hat", p.value},       {"P_local", p.value_local},
                             {"gap", p.gap},           {"gap_local", p.gap_local},
                             {"below_floor", p.below_floor}, {"a", p.a},
                             {"N", p.N},               {"omega", p.omega},
                             {"lag", p.lag},           {"omega_star", p.omega_star},
                             {"target", target()}};
    assert_le("pressure_gap", p.gap, cfg_.run.tol.quotient_gap);

    Csv d("s_factor,n,log_partial");
    json div = json::array();
    for (double factor : {1.0, 0.9}) {
      double s = factor * std::exp(-p.value);
      DivergenceTable tab = divergence_diagnostic(model(), anchors(), p.omega, target(), s,
                                                  cfg_.run.divergence_n_max);
      for (size_t i = 0; i < tab.n.size(); ++i) d.row(factor, tab.n[i], tab.log_partial[i]);
      double tail = 0.0;
      if (tab.log_partial.size() >= 2) {
        size_t k = tab.log_partial.size();
        tail = std::exp(tab.log_partial[k - 1]) - std::exp(tab.log_partial[k - 2]);
      }
      div.push_back({{"s_factor", factor},
                     {"slope", tab.slope},
                     {"log_partial_last", last_or_nan(tab.log_partial)},
                     {"last_increment", tail}});
    }
    rep_.csv["divergence.csv"] = d.str();
    rep_.json["divergence"] = div;
  }

  void quotient_stage() {
    const QuotientReport& q = quotient();
    Csv t("state,j,s,P,quotient");
    for (size_t o = 0; o < q.quotient.size(); ++o)
      for (size_t j = 0; j < q.quotient[o].size(); ++j)
        t.row(static_cast<int>(o), static_cast<int>(j + 1), q.profile.s[j], q.profile.P[o][j],
              q.quotient[o][j]);
    rep_.csv["lambda.csv"] = t.str();
    rep_.json["lambda"] = {{"lambda", q.lambda},         {"m", q.m},
                           {"M", q.M},                   {"gap", q.gap},
                           {"checks", q.checks},         {"violations", q.violations},
                           {"log_average", q.log_average}, {"series_n_max", q.profile.n_max}};
    assert_le("sandwich_violations", q.violations, 0);
    assert_le("lambda_normalization", std::abs(q.log_average), 5.0 * q.gap + 1e-12);
  }

  void conformal_stage() {
    const CylinderMeasure& mu = dual_measure();
    ConformalOptions opt;
    opt.J = cfg_.run.measure_J;
    opt.n_max = cfg_.run.series_n_max;
    CylinderMeasure series = conformal_measure(model(), anchors(), target(), P_hat(),
                                               cfg_.run.depth, MeasureMethod::Series, opt);
    double tv = tv_distance(mu, series);
    Residual r = conformality_residual(model(), mu, quotient().lambda, P_hat());
    Residual rs = conformality_residual(model(), series, quotient().lambda, P_hat());
    Csv t("state,cylinder,mass");
    for (size_t o = 0; o < mu.mass.size(); ++o) {
      const FiberFunction& f = mu.mass[o];
      for (size_t i = 0; i < f.words().size(); ++i)
        t.row(static_cast<int>(o), word_str(f.words()[i]), f.values()(i));
    }
    rep_.csv["conformal.csv"] = t.str();
    rep_.json["conformal"] = {{"depth", mu.depth},
                              {"dual_sweeps", dual().sweeps},
                              {"dual_step", dual().step},
                              {"scale", dual().scale},
                              {"tv_series_dual", tv},
                              {"residual", r.value},
                              {"residual_omega", r.omega},
                              {"residual_word", r.word},
                              {"residual_series", rs.value}};
    assert_le("conformality_residual", r.value, cfg_.run.tol.residual);
    assert_le("measure_agreement", tv, cfg_.run.tol.measure_agreement);
  }

  void rpf_stage() {
    conformal_stage();
    EigenData eig = eigenfunction(model(), dual_measure(), quotient().lambda, P_hat());
    int omega0 = 0;
    Symbols f = cfg_.run.f;
    FiberFunction ind =
        FiberFunction::indicator(model().shift(), omega0, static_cast<int>(f.size()), f);
    DecayTable ex = exactness_convergence(model(), dual(), eig, ind, cfg_.run.rpf_n_max);
    RecurrenceReport rec = recurrence_report(model(), quotient().lambda, P_hat(), cfg_.run.a,
                                             cfg_.run.recurrence_n_max);
    Csv h("state,cylinder,value");
    for (size_t o = 0; o < eig.h.size(); ++o) {
      const FiberFunction& fn = eig.h[o];
      for (size_t i = 0; i < fn.words().size(); ++i)
        h.row(static_cast<int>(o), word_str(fn.words()[i]), fn.values()(i));
    }
    rep_.csv["eigenfunction.csv"] = h.str();
    rep_.csv["exactness.csv"] = decay_table(ex);
    Csv rc("state,n,ratio");
    for (const auto& r : rec.rows) rc.row(r.omega, r.n, r.ratio);
    rep_.csv["recurrence.csv"] = rc.str();
    rep_.json["eigen"] = {{"lambda", eig.lambda},   {"lambda_re", eig.lambda_re},
                          {"residual", eig.residual}, {"residual_re", eig.residual_re},
                          {"steps", eig.steps}};
    rep_.json["exactness"] = {{"f", f},
                              {"rate", ex.rate},
                              {"last_deviation", last_or_nan(ex.deviation)},
                              {"n_max", cfg_.run.rpf_n_max}};
    rep_.json["recurrence"] = {{"min", rec.min}, {"max", rec.max}, {"bounded", rec.bounded}};
    assert_le("eigen_residual", eig.residual, cfg_.run.tol.residual);
    assert_true("recurrence_bounded", rec.bounded);
  }

  void gibbs_stage() {
    GibbsReport g = gibbs_report(model(), cert(), dual(), quotient().lambda, P_hat(),
                                 cfg_.run.gibbs_max_len);
    Csv t("state,word,ratio_min,ratio_max,lower,upper,ok");
    for (const auto& r : g.rows)
      t.row(r.omega, word_str(r.word), r.ratio_min, r.ratio_max, r.lower, r.upper, r.ok);
    rep_.csv["gibbs.csv"] = t.str();
    rep_.json["gibbs"] = {{"rows", g.rows.size()},
                          {"violations", g.violations},
                          {"max_len", cfg_.run.gibbs_max_len}};
    assert_le("gibbs_violations", g.violations, 0);
  }

  void matrix_stage() {
    const MatrixCocycle& A = cocycle();
    SummableBipReport sb = check_summable_bip(A, cert());
    rep_.json["summable_bip"] = {{"i", sb.i},
                                 {"ii", sb.ii},
                                 {"iii", sb.iii},
                                 {"ratio_sup", sb.ratio_sup},
                                 {"col_min", sb.col_min},
                                 {"col_max", sb.col_max}};
    assert_true("summable_bip", sb.ok());
    PFTriple pf = random_pf(A, cfg_.run.tol.pf);
    DecayTable ro = rank_one_convergence(A, pf, 0, 0, cfg_.run.rpf_n_max);
    rep_.csv["pf_h.csv"] = vector_table(pf.h);
    rep_.csv["pf_mu.csv"] = vector_table(pf.mu);
    rep_.csv["rank_one.csv"] = decay_table(ro);
    rep_.json["matrix_pf"] = {{"lambda", pf.lambda},
                              {"residual_h", pf.residual_h},
                              {"residual_mu", pf.residual_mu},
                              {"residual_norm", pf.residual_norm},
                              {"sweeps", pf.sweeps},
                              {"rank_one_rate", ro.rate},
                              {"rank_one_last", last_or_nan(ro.deviation)}};
    assert_le("pf_residual", pf.max_residual(), cfg_.run.tol.pf);
  }

  void stationary_stage() {
    const MatrixCocycle& A = cocycle();
    require_stochastic(A);
    StationaryResult st =
        stationary_distribution(A, cfg_.run.tol.stationary, 100000, cfg_.run.seed);
    std::vector<Eigen::VectorXd> f(A.size());
    for (int o = 0; o < A.size(); ++o) f[o] = Eigen::VectorXd::Unit(A.dim(o), 0);
    DecayTable bp = backward_product_convergence(A, st, f, 0, cfg_.run.backward_n_max);
    ReversalCheck tr = time_reversal_check(A, st, cfg_.run.depth);
    rep_.csv["stationary.csv"] = vector_table(st.pi);
    rep_.csv["backward.csv"] = decay_table(bp);
    rep_.json["stationary"] = {{"residual", st.residual},
                               {"restart_agreement", st.restart_agreement},
                               {"sweeps", st.sweeps},
                               {"seed", cfg_.run.seed},
                               {"backward_rate", bp.rate},
                               {"backward_last", last_or_nan(bp.deviation)},
                               {"time_reversal",
                                {{"convention", "reverse-time transpose convention"},
                                 {"max_error", tr.max_error},
                                 {"omega", tr.omega},
                                 {"word", tr.word},
                                 {"words", tr.words}}}};
    double tol = cfg_.run.tol.agree;
    assert_le("stationary_residual", st.residual, tol);
    assert_le("restart_agreement", st.restart_agreement, tol);
    assert_le("backward_decay", last_or_nan(bp.deviation), tol);
    assert_le("time_reversal", tr.max_error, tol);
  }

  bool stochastic() {
    try {
      require_stochastic(cocycle());
      return true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotStochastic) throw;
      return false;
    }
  }

 private:
  const Model& model() {
    if (!model_) model_ = std::make_unique<Model>(build_model(cfg_));
    return *model_;
  }
  const BipCertificate& cert() {
    if (!cert_) cert_ = std::make_unique<BipCertificate>(build_certificate(cfg_, model().shift()));
    return *cert_;
  }
  const AnchorFamily& anchors() {
    if (!anchors_) anchors_ = std::make_unique<AnchorFamily>(make_anchors(model().shift(), cfg_.run.a));
    return *anchors_;
  }
  const PressureEstimate& pressure_est() {
    if (!pressure_) {
      PressureOptions opt;
      opt.n_max = cfg_.run.n_max;
      opt.q = cfg_.run.q;
      opt.mixing_horizon = cfg_.run.mixing_horizon;
      opt.agree_tol = cfg_.run.tol.agree;
      pressure_ = std::make_unique<PressureEstimate>(
          pressure(model(), anchors(), cfg_.run.a, cfg_.run.N, opt));
    }
    return *pressure_;
  }
  double P_hat() { return pressure_est().value; }
  const StateSet& target() {
    const StateSet& t = cfg_.run.target;
    return t.empty() ? pressure_est().omega_star : t;
  }
  const QuotientReport& quotient() {
    if (!quotient_)
      quotient_ = std::make_unique<QuotientReport>(
          lambda_quotient(model(), anchors(), target(), P_hat(),
                          default_schedule(P_hat(), cfg_.run.schedule_J), cfg_.run.series_n_max));
    return *quotient_;
  }
  const DualMeasure& dual() {
    if (!dual_) dual_ = std::make_unique<DualMeasure>(dual_fixed_point(model(), 1e-14));
    return *dual_;
  }
  const CylinderMeasure& dual_measure() {
    if (!mu_) mu_ = std::make_unique<CylinderMeasure>(measure_from_dual(model(), dual(), cfg_.run.depth));
    return *mu_;
  }
  const MatrixCocycle& cocycle() {
    if (!cocycle_) cocycle_ = std::make_unique<MatrixCocycle>(build_cocycle(cfg_));
    return *cocycle_;
  }

  void assert_le(const std::string& name, double value, double bound) {
    rep_.assertions.push_back({name, value <= bound, value, bound});
  }
  void assert_true(const std::string& name, bool ok) {
    rep_.assertions.push_back({name, ok, ok ? 1.0 : 0.0, 1.0});
  }

  const ExperimentConfig& cfg_;
  RunReport& rep_;
  std::unique_ptr<Model> model_;
  std::unique_ptr<BipCertificate> cert_;
  std::unique_ptr<AnchorFamily> anchors_;
  std::unique_ptr<PressureEstimate> pressure_;
  std::unique_ptr<QuotientReport> quotient_;
  std::unique_ptr<DualMeasure> dual_;
  std::unique_ptr<CylinderMeasure> mu_;
  std::unique_ptr<MatrixCocycle> cocycle_;
};

void execute(Command cmd, Pipeline& p, RunReport& rep) {
  bool bip_ok = p.bip();
  rep.assertions.push_back({"bip", bip_ok, bip_ok ? 1.0 : 0.0, 1.0});
  if (!bip_ok) {
    rep.exit_code = exit_code::bip;
    return;
  }
  switch (cmd) {
    case Command::CheckBip: break;
    case Command::Pressure: p.pressure_stage(); break;
    case Command::Conformal:
      p.pressure_stage();
      p.quotient_stage();
      p.conformal_stage();
      break;
    case Command::Rpf:
      p.pressure_stage();
      p.quotient_stage();
      p.rpf_stage();
      break;
    case Command::Gibbs:
      p.pressure_stage();
      p.quotient_stage();
      p.gibbs_stage();
      break;
    case Command::MatrixPf: p.matrix_stage(); break;
    case Command::Stationary: p.stationary_stage(); break;
    case Command::All:
      p.pressure_stage();
      p.quotient_stage();
      p.rpf_stage();
      p.gibbs_stage();
      p.matrix_stage();
      rep.json["stationary_skipped"] = !p.stochastic();
      if (p.stochastic()) p.stationary_stage();
      break;
  }
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [n, c] : command_table())
    if (n == name) return c;
  return std::nullopt;
}

std::string command_name(Command cmd) {
  for (const auto& [n, c] : command_table())
    if (c == cmd) return n;
  return "";
}

RunReport run(Command cmd, const ExperimentConfig& cfg) {
  RunReport rep;
  auto start = std::chrono::steady_clock::now();
  rep.json["command"] = command_name(cmd);
  rep.json["fixture"] = cfg.fixture;
  rep.json["digest"] = config_digest(cfg);
  Pipeline p(cfg, rep);
  try {
    execute(cmd, p, rep);
  } catch (const Error& e) {
    rep.json["error"] = {{"kind", kind_name(e.kind())}, {"message", e.what()}};
    rep.exit_code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    rep.json["error"] = {{"kind", "internal"}, {"message", e.what()}};
    rep.exit_code = exit_code::internal;
  }
  json as = json::array();
  bool all_pass = true;
  for (const auto& a : rep.assertions) {
    as.push_back({{"name", a.name}, {"pass", a.pass}, {"value", a.value}, {"bound", a.bound}});
    all_pass = all_pass && a.pass;
  }
  rep.json["assertions"] = as;
  if (rep.exit_code == 0 && !all_pass) rep.exit_code = exit_code::assertion;
  rep.json["exit_code"] = rep.exit_code;
  rep.json["wall_clock_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

void write_outputs(const RunReport& report, const ExperimentConfig& cfg, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "cannot create output directory " + dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + name);
    out << text;
  };
  put("report.json", report.json.dump(2) + "\n");
  put("config.json", cfg.to_json().dump(2) + "\n");
  for (const auto& [name, text] : report.csv) put(name, text);
}

}  // namespace rtm
