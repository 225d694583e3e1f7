#include "rtm/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtm/error.hpp"

namespace rtm {

FiberFunction::FiberFunction(const RandomShift& shift, int omega, int depth)
    : omega_(omega), depth_(depth) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  for (auto& w : admissible_words(shift, omega, depth)) words_.push_back(std::move(w.symbols));
  for (size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = static_cast<int>(i);
  values_ = Eigen::VectorXd::Zero(words_.size());
}

FiberFunction FiberFunction::constant(const RandomShift& shift, int omega, int depth, double c) {
  return from(shift, omega, depth, [c](const Symbols&) { return c; });
}

FiberFunction FiberFunction::indicator(const RandomShift& shift, int omega, int depth,
                                       const Symbols& prefix) {
  if (static_cast<int>(prefix.size()) > depth)
    throw Error(ErrorKind::DepthUnderflow, "indicator needs depth >= cylinder length");
  return from(shift, omega, depth, [&](const Symbols& w) {
    return std::equal(prefix.begin(), prefix.end(), w.begin()) ? 1.0 : 0.0;
  });
}

int FiberFunction::index(const Symbols& prefix) const {
  auto it = index_.find(prefix);
  return it == index_.end() ? -1 : it->second;
}

double FiberFunction::at(const Symbols& x) const {
  if (static_cast<int>(x.size()) < depth_)
    throw Error(ErrorKind::DepthUnderflow, "point prefix shorter than the function depth");
  int i = index(Symbols(x.begin(), x.begin() + depth_));
  if (i < 0) throw Error(ErrorKind::InvalidArgument, "prefix is not admissible");
  return values_(i);
}

FiberFunction ruelle_apply(const Model& model, const FiberFunction& f, int out_depth) {
  const RandomShift& shift = model.shift();
  int omega = f.omega();
  int need = std::max({f.depth() - 1, model.potential().depth - 1, 1});
  int d = out_depth == 0 ? need : out_depth;
  if (d < need) throw Error(ErrorKind::DepthUnderflow, "requested depth cannot hold L f exactly");
  int next = shift.base().step(omega);
  const Eigen::MatrixXd& E = model.weights(omega);
  FiberFunction out(shift, next, d);
  Symbols x(d + 1);
  for (size_t i = 0; i < out.words().size(); ++i) {
    const Symbols& c = out.words()[i];
    std::copy(c.begin(), c.end(), x.begin() + 1);
    double s = 0.0;
    for (int a = 0; a < E.rows(); ++a) {
      if (E(a, c[0]) == 0.0) continue;
      x[0] = a;
      s += E(a, c[0]) * f.at(x);
    }
    out.values()(i) = s;
  }
  return out;
}

AnchorPoint anchor_point(const RandomShift& shift, int omega, int a, int length) {
  if (a < 0 || a >= shift.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "anchor symbol outside the alphabet");
  const BaseSystem& base = shift.base();
  AnchorPoint p;
  std::map<std::pair<int, int>, int> seen;
  Symbols x{a};
  int o = omega;
  bool closed = false;
  while (!closed || static_cast<int>(x.size()) < length) {
    int i = static_cast<int>(x.size()) - 1;
    if (!closed) {
      auto key = std::make_pair(o, x[i]);
      auto it = seen.find(key);
      if (it != seen.end()) {
        closed = true;
        p.preperiod = it->second;
        p.period = i - it->second;
      } else {
        seen[key] = i;
      }
    }
    if (closed && static_cast<int>(x.size()) >= length) break;
    auto succ = shift.successors(o, x[i]);
    if (succ.empty()) throw Error(ErrorKind::InvalidArgument, "dead end in anchor construction");
    x.push_back(succ.front());
    o = base.step(o);
  }
  x.resize(length);
  p.prefix = x;
  return p;
}

AnchorFamily make_anchors(const RandomShift& shift, int a) {
  AnchorFamily f;
  f.a = a;
  int n = shift.base().size();
  f.first.resize(n);
  for (int o = 0; o < n; ++o) f.first[o] = a < shift.alphabet(o) ? a : 0;
  return f;
}

namespace {

void step_row(ScaledVector& v, const Eigen::MatrixXd& E) {
  v.v = (v.v.transpose() * E).transpose();
  v.normalize();
}

}  // namespace

PartitionSequences partition_sequences(const Model& model, const AnchorFamily& anchors, int omega,
                                       int n_max) {
  const BaseSystem& base = model.base();
  int a = anchors.a;
  PartitionSequences s;
  s.logZ.assign(n_max, neg_inf);
  s.logCZa.assign(n_max, std::numeric_limits<double>::quiet_NaN());
  s.logCZ.assign(n_max, neg_inf);
  s.logA.assign(n_max, neg_inf);
  ScaledVector va, v1;
  int l0 = model.alphabet(omega);
  va.v = Eigen::VectorXd::Zero(l0);
  if (a < l0) va.v(a) = 1.0;
  v1.v = Eigen::VectorXd::Ones(l0);
  v1.normalize();
  int o = omega;
  for (int n = 1; n <= n_max; ++n) {
    const Eigen::MatrixXd& E = model.weights(o);
    Eigen::VectorXd rowmax = E.rowwise().maxCoeff();
    double dot = v1.v.dot(rowmax);
    s.logA[n - 1] = dot > 0.0 ? std::log(dot) + v1.log_scale : neg_inf;
    step_row(va, E);
    step_row(v1, E);
    o = base.step(o);
    if (a < model.alphabet(o)) {
      s.logZ[n - 1] = va.log_entry(a);
      if (anchors.in_a(o)) s.logCZa[n - 1] = s.logZ[n - 1];
    }
    s.logCZ[n - 1] = v1.log_entry(anchors.first[o]);
  }
  return s;
}

double log_gurevic_Z(const Model& model, int omega, int a, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (a < 0 || a >= model.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "state is not in Omega_a");
  AnchorFamily anchors = make_anchors(model.shift(), a);
  return partition_sequences(model, anchors, omega, n).logZ.back();
}

double log_local_preimage_Z(const Model& model, const AnchorFamily& anchors, int omega, int a,
                            int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (a != anchors.a) throw Error(ErrorKind::InvalidArgument, "anchors belong to another symbol");
  if (a < 0 || a >= model.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "state is not in Omega_a");
  int end = advance(model.base(), omega, n);
  if (!anchors.in_a(end)) throw Error(ErrorKind::AnchorMissing, "theta^n omega is not in Omega_a");
  return partition_sequences(model, anchors, omega, n).logCZa.back();
}

double log_full_preimage_Z(const Model& model, const AnchorFamily& anchors, int omega, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  return partition_sequences(model, anchors, omega, n).logCZ.back();
}

double log_sup_partition_A(const Model& model, int omega, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  return partition_sequences(model, make_anchors(model.shift(), 0), omega, n).logA.back();
}

double gurevic_Z(const Model& m, int omega, int a, int n) { return std::exp(log_gurevic_Z(m, omega, a, n)); }
double local_preimage_Z(const Model& m, const AnchorFamily& an, int omega, int a, int n) {
  return std::exp(log_local_preimage_Z(m, an, omega, a, n));
}
double full_preimage_Z(const Model& m, const AnchorFamily& an, int omega, int n) {
  return std::exp(log_full_preimage_Z(m, an, omega, n));
}
double sup_partition_A(const Model& m, int omega, int n) { return std::exp(log_sup_partition_A(m, omega, n)); }

StateSet omega_star(const RandomShift& shift, int a, int N, int horizon) {
  StateSet out;
  for (int o = 0; o < shift.base().size(); ++o) {
    if (a >= shift.alphabet(o)) continue;
    MixingTime m = mixing_time(shift, o, a, a, horizon);
    if (m.mixed && m.N <= N) out.push_back(o);
  }
  return out;
}

namespace {

struct Tail {
  double mean = 0.0;
  double spread = 0.0;
};

Tail tail_stats(const std::vector<double>& xs, int q) {
  Tail t;
  int k = std::min<int>(q, xs.size());
  if (k == 0) return t;
  double lo = xs[xs.size() - k], hi = lo, sum = 0.0;
  for (size_t i = xs.size() - k; i < xs.size(); ++i) {
    sum += xs[i];
    lo = std::min(lo, xs[i]);
    hi = std::max(hi, xs[i]);
  }
  t.mean = sum / k;
  t.spread = hi - lo;
  return t;
}

}  // namespace

PressureEstimate pressure(const Model& model, const AnchorFamily& anchors, int a, int N,
                          const PressureOptions& opt) {
  const BaseSystem& base = model.base();
  if (a != anchors.a) throw Error(ErrorKind::InvalidArgument, "anchors belong to another symbol");
  if (opt.n_max < 2 || opt.q < 1) throw Error(ErrorKind::InvalidArgument, "need n_max >= 2 and q >= 1");
  PressureEstimate est;
  est.a = a;
  est.N = N;
  est.omega_star = omega_star(model.shift(), a, N, opt.mixing_horizon);
  if (est.omega_star.empty())
    throw Error(ErrorKind::HypothesisFail, "Omega* is empty for the chosen a and N");
  int omega = opt.omega >= 0 ? opt.omega : est.omega_star.front();
  if (a >= model.alphabet(omega)) throw Error(ErrorKind::InvalidArgument, "start state not in Omega_a");
  est.omega = omega;
  PartitionSequences seq = partition_sequences(model, anchors, omega, opt.n_max);

  int lag = base.cycle_length(omega);
  bool use_lag = 2 * lag <= opt.n_max;
  est.lag = use_lag ? lag : 0;
  std::vector<char> in(opt.n_max + 1, 0);
  for (int n = 1; n <= opt.n_max; ++n) in[n] = contains(est.omega_star, advance(base, omega, n));

  std::vector<double> dz, dc;
  auto term = [&](const std::vector<double>& lg, int n, double& out) {
    double x = lg[n - 1];
    if (!std::isfinite(x)) return false;
    if (!use_lag) {
      out = x / n;
      return true;
    }
    if (n - lag < 1 || !in[n - lag] || !std::isfinite(lg[n - lag - 1])) return false;
    out = (x - lg[n - lag - 1]) / lag;
    return true;
  };
  for (int n = 1; n <= opt.n_max; ++n) {
    PressureRow row{n, static_cast<bool>(in[n]), seq.logZ[n - 1] / n, seq.logCZa[n - 1] / n,
                    std::numeric_limits<double>::quiet_NaN()};
    if (in[n]) {
      double x;
      if (term(seq.logZ, n, x)) dz.push_back(x);
      if (term(seq.logCZa, n, x)) dc.push_back(x);
      if (static_cast<int>(dz.size()) >= opt.q) row.gap = tail_stats(dz, opt.q).spread;
    }
    est.rows.push_back(row);
  }
  if (dz.empty() || dc.empty())
    throw Error(ErrorKind::HypothesisFail, "no usable return times within n_max");
  Tail tz = tail_stats(dz, opt.q), tc = tail_stats(dc, opt.q);
  est.value = tz.mean;
  est.gap = tz.spread;
  est.value_local = tc.mean;
  est.gap_local = tc.spread;
  est.below_floor = est.value < -1e3;
  double tol = opt.agree_tol + 5.0 * (tz.spread + tc.spread);
  if (std::abs(tz.mean - tc.mean) > tol)
    throw Error(ErrorKind::DivergentDiagnostics,
                "Gurevic and local preimage estimates disagree beyond tolerance");
  return est;
}

DivergenceTable divergence_diagnostic(const Model& model, const AnchorFamily& anchors, int omega,
                                      const StateSet& target, double s, int n_max) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  PartitionSequences seq = partition_sequences(model, anchors, omega, n_max);
  DivergenceTable t;
  LogAccumulator acc;
  double ls = std::log(s);
  for (int n = 1; n <= n_max; ++n) {
    if (!contains(target, advance(model.base(), omega, n))) continue;
    acc.add_log(n * ls + seq.logCZ[n - 1]);
    t.n.push_back(n);
    t.log_partial.push_back(acc.log_value());
  }
  // least squares slope over the second half of the table
  size_t start = t.n.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (size_t i = start; i < t.n.size(); ++i) {
    double x = std::log(static_cast<double>(t.n[i])), y = t.log_partial[i];
    if (!std::isfinite(y)) continue;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k >= 2 && k * sxx - sx * sx > 0) t.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return t;
}

namespace {

// lexicographically minimal word of length k at omega with w_0 = first and
// end(w_{k-1}) true; empty if none exists
Symbols lexmin_connector(const RandomShift& shift, int omega, int k, int first,
                         const std::function<bool(int)>& end) {
  const BaseSystem& base = shift.base();
  std::vector<int> st(k);
  st[0] = omega;
  for (int i = 1; i < k; ++i) st[i] = base.step(st[i - 1]);
  std::vector<std::vector<char>> ok(k);
  ok[k - 1].assign(shift.alphabet(st[k - 1]), 0);
  for (int x = 0; x < shift.alphabet(st[k - 1]); ++x) ok[k - 1][x] = end(x);
  for (int i = k - 2; i >= 0; --i) {
    ok[i].assign(shift.alphabet(st[i]), 0);
    for (int x = 0; x < shift.alphabet(st[i]); ++x)
      for (int y : shift.successors(st[i], x))
        if (ok[i + 1][y]) {
          ok[i][x] = 1;
          break;
        }
  }
  if (first < 0 || first >= shift.alphabet(omega) || !ok[0][first]) return {};
  Symbols w{first};
  for (int i = 1; i < k; ++i)
    for (int y : shift.successors(st[i - 1], w.back()))
      if (ok[i][y]) {
        w.push_back(y);
        break;
      }
  return w;
}

double min_inf_weight(const Model& model, int omega, const std::vector<Symbols>& words, int k) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : words) best = std::min(best, std::exp(phi_sum(model, omega, v, k, Eval::Inf)));
  return best;
}

}  // namespace

ConnectorConstant constant_C(const Model& model, const BipCertificate& cert, int omega, int a,
                             int k, int horizon) {
  const RandomShift& shift = model.shift();
  if (k < 1) throw Error(ErrorKind::HypothesisFail, "k must be >= 1");
  int alpha;
  try {
    alpha = alpha_of(shift, cert, omega, a, horizon);
  } catch (const Error& e) {
    throw Error(ErrorKind::HypothesisFail, e.what());
  }
  if (k < alpha) throw Error(ErrorKind::HypothesisFail, "k below alpha_omega");
  int target = advance(shift.base(), omega, k);
  if (!contains(cert.omega_bp, target)) throw Error(ErrorKind::HypothesisFail, "theta^k omega not in Omega_bp");
  ConnectorConstant out;
  for (int c : cert.preimages[target]) {
    Symbols v = lexmin_connector(shift, omega, k, a, [c](int x) { return x == c; });
    if (v.empty()) throw Error(ErrorKind::HypothesisFail, "no connector word from a to the preimage set");
    out.connectors.push_back(v);
  }
  out.value = std::max(1.0, 1.0 / min_inf_weight(model, omega, out.connectors, k));
  return out;
}

ConnectorConstant constant_D(const Model& model, const BipCertificate& cert, int omega, int a,
                             int k, int horizon) {
  const RandomShift& shift = model.shift();
  const BaseSystem& base = shift.base();
  if (k < 1) throw Error(ErrorKind::HypothesisFail, "k must be >= 1");
  if (!contains(cert.omega_bi, omega)) throw Error(ErrorKind::HypothesisFail, "omega not in Omega_bi");
  int end_state = advance(base, omega, k);
  if (a < 0 || a >= shift.alphabet(end_state))
    throw Error(ErrorKind::HypothesisFail, "theta^k omega not in Omega_a");
  int beta;
  try {
    beta = beta_of(shift, cert, end_state, a, horizon);
  } catch (const Error& e) {
    throw Error(ErrorKind::HypothesisFail, e.what());
  }
  if (k < beta) throw Error(ErrorKind::HypothesisFail, "k below beta at the end state");
  int last = advance(base, omega, k - 1);
  ConnectorConstant out;
  for (int c : cert.images[omega]) {
    Symbols v = lexmin_connector(shift, omega, k, c, [&](int x) { return shift.allowed(last, x, a); });
    if (v.empty()) throw Error(ErrorKind::HypothesisFail, "no connector word from the image set to a");
    out.connectors.push_back(v);
  }
  double v1 = variation(model, base.step_inverse(omega), 1);
  out.value = std::exp(-v1) * min_inf_weight(model, omega, out.connectors, k);
  return out;
}

BoundConstants bound_constants_CD(const Model& model, const BipCertificate& cert, int omega, int a,
                                  int k, int horizon) {
  return {constant_C(model, cert, omega, a, k, horizon).value,
          constant_D(model, cert, omega, a, k, horizon).value};
}

}  // namespace rtm
