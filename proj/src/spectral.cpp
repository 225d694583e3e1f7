#include "rtm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "rtm/error.hpp"

namespace rtm {

namespace {

constexpr double rel_slack = 1e-12;

template <class F>
void for_each_cycle(const BaseSystem& base, F fn) {
  for (int start : cycle_starts(base)) fn(start);
}

Eigen::VectorXd anchor_vector(const Model& model, const AnchorFamily& anchors,
                              const StateSet& target, int eta) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(model.alphabet(eta));
  if (contains(target, eta)) b(anchors.first[eta]) = 1.0;
  return b;
}

Eigen::VectorXd series_vector(const Model& model, const AnchorFamily& anchors,
                              const StateSet& target, int eta, double s, long long N) {
  const BaseSystem& base = model.base();
  int p = base.cycle_length(eta);
  int l = model.alphabet(eta);
  long long K = N / p;
  int r = static_cast<int>(N % p);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(l, l);
  Eigen::VectorXd c_full = Eigen::VectorXd::Zero(l), c_r = Eigen::VectorXd::Zero(l);
  int o = eta;
  for (int k = 1; k <= p; ++k) {
    Q = s * (Q * model.weights(o));
    o = base.step(o);
    if (contains(target, o)) c_full += Q.col(anchors.first[o]);
    if (k == r) c_r = c_full;
  }
  // sum_{j<K} Q^j and Q^K by binary expansion of K
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(l, l), Pw = Eigen::MatrixXd::Identity(l, l);
  int top = 62;
  while (top >= 0 && !((K >> top) & 1LL)) --top;
  for (int bit = top; bit >= 0; --bit) {
    S += Pw * S;
    Pw = Pw * Pw;
    if ((K >> bit) & 1LL) {
      S = Eigen::MatrixXd::Identity(l, l) + Q * S;
      Pw = Q * Pw;
    }
  }
  Eigen::VectorXd u = S * c_full + Pw * c_r;
  if (!u.allFinite())
    throw Error(ErrorKind::NoConvergence, "power series diverges at s = " + std::to_string(s));
  return u;
}

}  // namespace

std::vector<double> default_schedule(double P_hat, int J) {
  if (J < 1) throw Error(ErrorKind::InvalidArgument, "schedule needs J >= 1");
  std::vector<double> s(J);
  for (int j = 1; j <= J; ++j) s[j - 1] = (1.0 - std::ldexp(1.0, -j)) * std::exp(-P_hat);
  return s;
}

long long auto_truncation(const BaseSystem& base, double margin) {
  if (!(margin > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must lie below exp(-P)");
  int e = static_cast<int>(std::ceil(std::log2(1.0 / margin))) + 12;
  e = std::clamp(e, 1, 50);
  int p = 1;
  for (int o = 0; o < base.size(); ++o) p = std::max(p, base.cycle_length(o));
  return static_cast<long long>(p) << e;
}

SeriesState series_state(const Model& model, const AnchorFamily& anchors, const StateSet& target,
                         double s, long long n_max) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  const BaseSystem& base = model.base();
  SeriesState st;
  st.s = s;
  st.u.resize(base.size());
  st.n.assign(base.size(), 0);
  for_each_cycle(base, [&](int start) {
    st.u[start] = series_vector(model, anchors, target, start, s, n_max);
    st.n[start] = n_max;
    int next = start;
    for (int o = base.step_inverse(start); o != start; o = base.step_inverse(o)) {
      st.u[o] = s * (model.weights(o) * (anchor_vector(model, anchors, target, next) + st.u[next]));
      st.n[o] = st.n[next] + 1;
      next = o;
    }
  });
  return st;
}

double power_series(const Model& model, const AnchorFamily& anchors, int omega,
                    const StateSet& target, double s, long long n_max) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  return series_vector(model, anchors, target, omega, s, n_max).sum();
}

QuotientReport lambda_quotient(const Model& model, const AnchorFamily& anchors,
                               const StateSet& target, double P_hat,
                               const std::vector<double>& schedule, long long n_max) {
  const BaseSystem& base = model.base();
  if (schedule.empty()) throw Error(ErrorKind::InvalidArgument, "empty schedule");
  int n = base.size(), J = static_cast<int>(schedule.size());
  QuotientReport rep;
  rep.profile.s = schedule;
  rep.profile.target = target;
  rep.profile.n_max = n_max > 0 ? n_max : auto_truncation(base, 1.0 - schedule.back() * std::exp(P_hat));
  rep.profile.P.assign(n, std::vector<double>(J));
  rep.quotient.assign(n, std::vector<double>(J));
  rep.m.resize(n);
  rep.M.resize(n);
  std::vector<Eigen::RowVectorXd> col(n);
  for (int o = 0; o < n; ++o) {
    col[o] = model.weights(o).colwise().sum();
    rep.m[o] = col[o].minCoeff();
    rep.M[o] = col[o].maxCoeff();
  }
  std::string first_violation;
  for (int j = 0; j < J; ++j) {
    double s = schedule[j];
    SeriesState st = series_state(model, anchors, target, s, rep.profile.n_max);
    for (int o = 0; o < n; ++o) {
      int next = base.step(o);
      double below = st.u[next].sum();
      if (!(below > 0.0))
        throw Error(ErrorKind::HypothesisFail, "power series vanishes at state " + std::to_string(next));
      // numerator carries one more term than the denominator
      double above = s * col[o].dot(anchor_vector(model, anchors, target, next) + st.u[next]);
      rep.profile.P[o][j] = st.u[o].sum();
      rep.quotient[o][j] = above / below;
      ++rep.checks;
      bool lo = s * rep.m[o] * below <= above * (1.0 + rel_slack);
      bool hi = above <= s * rep.M[o] * (below + 1.0) * (1.0 + rel_slack);
      if (!(lo && hi)) {
        ++rep.violations;
        if (first_violation.empty())
          first_violation = "state " + std::to_string(o) + ", s = " + std::to_string(s);
      }
    }
  }
  if (rep.violations > 0)
    throw Error(ErrorKind::SandwichViolation,
                std::to_string(rep.violations) + " quotient bound violations, first at " + first_violation);
  rep.lambda.resize(n);
  for (int o = 0; o < n; ++o) {
    rep.lambda[o] = rep.quotient[o][J - 1];
    if (J >= 2) rep.gap = std::max(rep.gap, std::abs(rep.quotient[o][J - 1] - rep.quotient[o][J - 2]));
  }
  std::vector<double> logs(n);
  for (int o = 0; o < n; ++o) logs[o] = std::log(rep.lambda[o]);
  rep.log_average = base_average(base, logs);
  return rep;
}

double log_Lambda(const BaseSystem& base, const std::vector<double>& lambda, int omega, long long n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be >= 0");
  int p = base.cycle_length(omega);
  double cycle = 0.0;
  int o = omega;
  for (int i = 0; i < p; ++i, o = base.step(o)) cycle += std::log(lambda[o]);
  double out = static_cast<double>(n / p) * cycle;
  o = omega;
  for (long long i = 0; i < n % p; ++i, o = base.step(o)) out += std::log(lambda[o]);
  return out;
}

double CylinderMeasure::operator()(int omega, const Symbols& prefix) const {
  const FiberFunction& f = mass[omega];
  if (static_cast<int>(prefix.size()) > depth)
    throw Error(ErrorKind::DepthUnderflow, "cylinder longer than the measure depth");
  if (static_cast<int>(prefix.size()) == depth) {
    int i = f.index(prefix);
    return i < 0 ? 0.0 : f.values()(i);
  }
  double s = 0.0;
  for (size_t i = 0; i < f.words().size(); ++i)
    if (std::equal(prefix.begin(), prefix.end(), f.words()[i].begin())) s += f.values()(i);
  return s;
}

DualMeasure dual_fixed_point(const Model& model, double tol, long long max_sweeps) {
  const BaseSystem& base = model.base();
  int n = base.size();
  DualMeasure d;
  d.nu.resize(n);
  d.scale.assign(n, 0.0);
  for (int o = 0; o < n; ++o)
    d.nu[o] = Eigen::VectorXd::Constant(model.alphabet(o), 1.0 / model.alphabet(o));
  bool done = false;
  while (d.sweeps < max_sweeps) {
    ++d.sweeps;
    double step = 0.0;
    for_each_cycle(base, [&](int start) {
      int next = start;
      int o = base.step_inverse(start);
      for (int k = 0; k < base.cycle_length(start); ++k) {
        Eigen::VectorXd v = model.weights(o) * d.nu[next];
        double z = v.sum();
        if (!(z > 0.0)) throw Error(ErrorKind::EmptyFiber, "dual image vanishes");
        v /= z;
        step = std::max(step, 0.5 * (v - d.nu[o]).cwiseAbs().sum());
        d.nu[o] = v;
        next = o;
        o = base.step_inverse(o);
      }
    });
    d.step = step;
    if (step < tol) {
      done = true;
      break;
    }
  }
  if (!done) throw Error(ErrorKind::NoConvergence, "dual fixed point did not settle");
  for (int o = 0; o < n; ++o) d.scale[o] = (model.weights(o) * d.nu[base.step(o)]).sum();
  return d;
}

double cylinder_mass(const Model& model, const DualMeasure& dual, int omega, const Symbols& w) {
  if (w.empty()) return 1.0;
  const BaseSystem& base = model.base();
  double m = 1.0;
  int o = omega;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0 || w[i] >= model.alphabet(o))
      throw Error(ErrorKind::InvalidArgument, "symbol outside the alphabet");
    if (i + 1 == w.size()) break;
    int next = base.step(o);
    if (w[i + 1] < 0 || w[i + 1] >= model.alphabet(next))
      throw Error(ErrorKind::InvalidArgument, "symbol outside the alphabet");
    m *= model.weights(o)(w[i], w[i + 1]) / dual.scale[o];
    o = next;
  }
  return m * dual.nu[o](w.back());
}

CylinderMeasure measure_from_dual(const Model& model, const DualMeasure& dual, int depth) {
  CylinderMeasure mu;
  mu.depth = depth;
  for (int o = 0; o < model.base().size(); ++o)
    mu.mass.push_back(FiberFunction::from(model.shift(), o, depth, [&](const Symbols& w) {
      return cylinder_mass(model, dual, o, w);
    }));
  return mu;
}

CylinderMeasure conformal_measure(const Model& model, const AnchorFamily& anchors,
                                  const StateSet& target, double P_hat, int depth,
                                  MeasureMethod method, const ConformalOptions& opt) {
  if (depth < std::max(1, model.potential().depth - 1))
    throw Error(ErrorKind::DepthUnderflow, "measure depth below potential depth - 1");
  if (method == MeasureMethod::Dual)
    return measure_from_dual(model, dual_fixed_point(model, opt.tol, opt.max_sweeps), depth);

  const BaseSystem& base = model.base();
  const RandomShift& shift = model.shift();
  double s = default_schedule(P_hat, opt.J).back();
  long long N = opt.n_max > 0 ? opt.n_max : auto_truncation(base, 1.0 - s * std::exp(P_hat));
  SeriesState st = series_state(model, anchors, target, s, N);
  CylinderMeasure mu;
  mu.depth = depth;
  for (int o = 0; o < base.size(); ++o) {
    std::vector<int> states(depth);
    std::vector<Symbols> xi(depth);
    states[0] = o;
    for (int k = 1; k < depth; ++k) {
      states[k] = base.step(states[k - 1]);
      xi[k] = anchor_point(shift, states[k], anchors.first[states[k]], depth - k).prefix;
    }
    FiberFunction f = FiberFunction::from(shift, o, depth, [&](const Symbols& c) {
      double total = 0.0, w = 1.0, sn = 1.0;
      for (int k = 1; k < depth; ++k) {
        w *= model.weights(states[k - 1])(c[k - 1], c[k]);
        sn *= s;
        if (contains(target, states[k]) && std::equal(xi[k].begin(), xi[k].end(), c.begin() + k))
          total += sn * w;
      }
      return total + sn * w * st.u[states[depth - 1]](c[depth - 1]);
    });
    double z = f.values().sum();
    if (!(z > 0.0)) throw Error(ErrorKind::HypothesisFail, "series measure has zero mass");
    f.values() /= z;
    mu.mass.push_back(std::move(f));
  }
  return mu;
}

double tv_distance(const CylinderMeasure& a, const CylinderMeasure& b) {
  if (a.depth != b.depth || a.mass.size() != b.mass.size())
    throw Error(ErrorKind::InvalidArgument, "measures differ in depth or size");
  double out = 0.0;
  for (size_t o = 0; o < a.mass.size(); ++o)
    out = std::max(out, 0.5 * (a.mass[o].values() - b.mass[o].values()).cwiseAbs().sum());
  return out;
}

double refinement_defect(const CylinderMeasure& fine, const CylinderMeasure& coarse) {
  if (fine.depth < coarse.depth) throw Error(ErrorKind::InvalidArgument, "fine measure is coarser");
  double out = 0.0;
  for (size_t o = 0; o < coarse.mass.size(); ++o) {
    const FiberFunction& f = coarse.mass[o];
    for (size_t i = 0; i < f.words().size(); ++i)
      out = std::max(out, std::abs(f.values()(i) - fine(static_cast<int>(o), f.words()[i])));
  }
  return out;
}

Residual conformality_residual(const Model& model, const CylinderMeasure& mu,
                               const std::vector<double>& lambda, double P_hat) {
  const BaseSystem& base = model.base();
  const Potential& pot = model.potential();
  int d = mu.depth;
  if (d < pot.depth) throw Error(ErrorKind::DepthUnderflow, "measure depth below potential depth");
  Residual res;
  for (int o = 0; o < base.size(); ++o) {
    int next = base.step(o);
    std::map<Symbols, double> image;  // masses of the images T[w]
    const FiberFunction& fn = mu.mass[next];
    for (size_t i = 0; i < fn.words().size(); ++i) {
      Symbols key(fn.words()[i].begin(), fn.words()[i].begin() + (d - 1));
      image[key] += fn.values()(i);
    }
    const FiberFunction& f = mu.mass[o];
    for (size_t i = 0; i < f.words().size(); ++i) {
      const Symbols& w = f.words()[i];
      double lhs = 0.0, phi;
      if (d == 1) {
        for (int c : model.shift().successors(o, w[0])) lhs += image[Symbols{c}];
        phi = pot.phi(o, w[0], 0);
      } else {
        lhs = image[Symbols(w.begin() + 1, w.end())];
        phi = pot.phi(o, w[0], w[1]);
      }
      double rhs = lambda[o] * std::exp(P_hat - phi) * f.values()(i);
      double r = std::abs(lhs - rhs);
      if (r > res.value || res.omega < 0) {
        res.value = r;
        res.omega = o;
        res.word = w;
      }
    }
  }
  return res;
}

EigenData eigenfunction(const Model& model, const CylinderMeasure& mu,
                        const std::vector<double>& lambda, double P_hat, int depth, long long n,
                        long long max_steps) {
  const BaseSystem& base = model.base();
  int N = base.size();
  EigenData e;
  e.lambda = lambda;
  e.P_hat = P_hat;
  e.h1.resize(N);
  for_each_cycle(base, [&](int start) {
    int p = base.cycle_length(start);
    Eigen::VectorXd g = Eigen::VectorXd::Ones(model.alphabet(start));
    Eigen::VectorXd last_start = g;
    long long steps = 0;
    bool done = false;
    while (steps < max_steps) {
      int o = start;
      for (int k = 0; k < p; ++k) {
        g = model.weights(o).transpose() * g;
        g /= g.maxCoeff();
        o = base.step(o);
        e.h1[o] = g;
      }
      steps += p;
      double change = (g - last_start).cwiseAbs().maxCoeff();
      last_start = g;
      if (steps >= n && change < 1e-14) {
        done = true;
        break;
      }
    }
    e.steps = std::max(e.steps, steps);
    if (!done) throw Error(ErrorKind::NoConvergence, "eigenfunction iteration did not settle");
  });
  for (int o = 0; o < N; ++o) {
    double integral = 0.0;
    for (int a = 0; a < model.alphabet(o); ++a) integral += e.h1[o](a) * mu(o, Symbols{a});
    e.h1[o] /= integral;
  }
  e.lambda_re.resize(N);
  for (int o = 0; o < N; ++o) {
    int next = base.step(o);
    Eigen::VectorXd Lh = model.weights(o).transpose() * e.h1[o];
    double integral = 0.0;
    for (int c = 0; c < model.alphabet(next); ++c) integral += Lh(c) * mu(next, Symbols{c});
    e.lambda_re[o] = std::exp(-P_hat) * integral;
    double norm = e.h1[next].cwiseAbs().maxCoeff();
    double scale = std::exp(P_hat);
    e.residual = std::max(e.residual,
                          (Lh - lambda[o] * scale * e.h1[next]).cwiseAbs().maxCoeff() / norm);
    e.residual_re = std::max(e.residual_re,
                             (Lh - e.lambda_re[o] * scale * e.h1[next]).cwiseAbs().maxCoeff() / norm);
  }
  for (int o = 0; o < N; ++o)
    e.h.push_back(FiberFunction::from(model.shift(), o, depth,
                                      [&](const Symbols& w) { return e.h1[o](w[0]); }));
  return e;
}

double gibbs_D(const Model& model, const DualMeasure& dual, int omega) {
  int prev = model.base().step_inverse(omega);
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < model.alphabet(prev); ++b) {
    double m = 0.0;
    for (int c : model.shift().successors(prev, b)) m += dual.nu[omega](c);
    best = std::min(best, m);
  }
  return best;
}

GibbsReport gibbs_report(const Model& model, const BipCertificate& cert, const DualMeasure& dual,
                         const std::vector<double>& lambda, double P_hat, int max_len,
                         long long word_cap) {
  const BaseSystem& base = model.base();
  GibbsReport rep;
  for (int o = 0; o < base.size(); ++o) {
    for (int n = 1; n <= max_len; ++n) {
      int end = advance(base, o, n);
      if (!contains(cert.omega_bi, end)) continue;
      double B = distortion_B(model, end);
      double lower = gibbs_D(model, dual, end) / B, upper = B;
      double shift = log_Lambda(base, lambda, o, n) + n * P_hat;
      for (const Word& w : admissible_words(model.shift(), o, n, word_cap)) {
        double lm = std::log(cylinder_mass(model, dual, o, w.symbols)) + shift;
        GibbsRow row{o,
                     w.symbols,
                     std::exp(lm - phi_sum(model, o, w.symbols, n, Eval::Sup)),
                     std::exp(lm - phi_sum(model, o, w.symbols, n, Eval::Inf)),
                     lower,
                     upper,
                     true};
        row.ok = row.ratio_min >= lower * (1.0 - rel_slack) && row.ratio_max <= upper * (1.0 + rel_slack);
        if (!row.ok) ++rep.violations;
        rep.rows.push_back(std::move(row));
      }
    }
  }
  return rep;
}

RecurrenceReport recurrence_report(const Model& model, const std::vector<double>& lambda,
                                   double P_hat, int a, int n_max) {
  const BaseSystem& base = model.base();
  int N = base.size();
  RecurrenceReport rep;
  rep.min.assign(N, std::numeric_limits<double>::quiet_NaN());
  rep.max.assign(N, std::numeric_limits<double>::quiet_NaN());
  AnchorFamily anchors = make_anchors(model.shift(), a);
  for (int start = 0; start < N; ++start) {
    if (a >= model.alphabet(start)) continue;
    PartitionSequences seq = partition_sequences(model, anchors, start, n_max);
    for (int n = 1; n <= n_max; ++n) {
      int o = advance(base, start, n);
      double lz = seq.logZ[n - 1];
      if (a >= model.alphabet(o) || !std::isfinite(lz)) continue;
      double ratio = std::exp(lz - log_Lambda(base, lambda, start, n) - n * P_hat);
      rep.rows.push_back({o, n, ratio});
      if (std::isnan(rep.min[o])) rep.min[o] = rep.max[o] = ratio;
      rep.min[o] = std::min(rep.min[o], ratio);
      rep.max[o] = std::max(rep.max[o], ratio);
    }
  }
  rep.bounded = !rep.rows.empty();
  for (int o = 0; o < N; ++o)
    if (!std::isnan(rep.min[o]))
      rep.bounded = rep.bounded && rep.min[o] > 0.0 && std::isfinite(rep.max[o]);
  return rep;
}

double fit_rate(const std::vector<int>& n, const std::vector<double>& dev, double floor) {
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < n.size(); ++i)
    if (dev[i] > floor && std::isfinite(dev[i])) pts.emplace_back(n[i], std::log(dev[i]));
  if (pts.size() < 4) return std::numeric_limits<double>::quiet_NaN();
  size_t start = pts.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double k = static_cast<double>(pts.size() - start);
  for (size_t i = start; i < pts.size(); ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
  }
  double den = k * sxx - sx * sx;
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::exp((k * sxy - sx * sy) / den);
}

DecayTable exactness_convergence(const Model& model, const DualMeasure& dual, const EigenData& eig,
                                 const FiberFunction& f, int n_max) {
  const BaseSystem& base = model.base();
  int o = f.omega();
  double integral = 0.0;
  for (size_t i = 0; i < f.words().size(); ++i)
    integral += f.values()(i) * cylinder_mass(model, dual, o, f.words()[i]);
  DecayTable t;
  FiberFunction g = f;
  double scale = std::exp(eig.P_hat);
  for (int n = 1; n <= n_max; ++n) {
    FiberFunction next = ruelle_apply(model, g);
    next.values() /= eig.lambda[o] * scale;
    o = base.step(o);
    double dev = 0.0;
    for (size_t i = 0; i < next.words().size(); ++i) {
      const Symbols& w = next.words()[i];
      dev += std::abs(next.values()(i) - eig.h1[o](w[0]) * integral) * cylinder_mass(model, dual, o, w);
    }
    t.n.push_back(n);
    t.deviation.push_back(dev);
    g = std::move(next);
  }
  t.rate = fit_rate(t.n, t.deviation);
  return t;
}

}  // namespace rtm
