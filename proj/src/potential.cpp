#include "rtm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtm/error.hpp"

namespace rtm {

PotentialSpec PotentialSpec::bernoulli(std::vector<double> p) {
  PotentialSpec s;
  s.kind = Kind::Bernoulli;
  s.p = std::move(p);
  return s;
}

PotentialSpec PotentialSpec::geometric() {
  PotentialSpec s;
  s.kind = Kind::Geometric;
  return s;
}

PotentialSpec PotentialSpec::matrix_log(std::vector<std::vector<double>> m) {
  PotentialSpec s;
  s.kind = Kind::MatrixLog;
  s.matrix = std::move(m);
  return s;
}

PotentialSpec PotentialSpec::table1(std::vector<double> values) {
  PotentialSpec s;
  s.kind = Kind::Table;
  s.p = std::move(values);
  return s;
}

PotentialSpec PotentialSpec::table2(std::vector<std::vector<double>> values) {
  PotentialSpec s;
  s.kind = Kind::Table;
  s.matrix = std::move(values);
  return s;
}

std::string PotentialSpec::name() const {
  switch (kind) {
    case Kind::Zero: return "zero";
    case Kind::Bernoulli: return "bernoulli";
    case Kind::Geometric: return "geometric";
    case Kind::MatrixLog: return "matrix-log";
    case Kind::Table: return "table";
  }
  return "unknown";
}

int geometric_truncation(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0,1)");
  int L = 1;
  while (std::ldexp(1.0, -L) >= eps) ++L;
  return L;
}

Potential make_potential(const RandomShift& shift, const std::vector<PotentialSpec>& specs,
                         int depth, std::vector<double> kappa, double r, double eps_tail) {
  const BaseSystem& base = shift.base();
  int n = base.size();
  if (depth != 1 && depth != 2) throw Error(ErrorKind::InvalidArgument, "depth must be 1 or 2");
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "r must lie in (0,1)");
  if (specs.empty()) throw Error(ErrorKind::InvalidArgument, "no potential given");
  if (kappa.size() == 1) kappa.assign(n, kappa[0]);
  if (static_cast<int>(kappa.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "kappa needs one value or one per state");
  for (double k : kappa)
    if (!(k >= 1.0) || !std::isfinite(k)) throw Error(ErrorKind::InvalidArgument, "kappa must be >= 1");

  Potential pot;
  pot.depth = depth;
  pot.kappa = kappa;
  pot.r = r;
  pot.eps_tail = eps_tail;
  pot.values.resize(n);
  double tail = 0.0;
  for (int o = 0; o < n; ++o) {
    const PotentialSpec& s = specs.size() == 1 ? specs[0] : specs.at(base.label(o));
    int rows = shift.alphabet(o), cols = shift.alphabet(base.step(o));
    bool two = s.kind == PotentialSpec::Kind::MatrixLog ||
               (s.kind == PotentialSpec::Kind::Table && !s.matrix.empty());
    if (two && depth == 1)
      throw Error(ErrorKind::InvalidArgument, "a depth-2 table cannot define a depth-1 potential");
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(rows, depth == 1 ? 1 : cols);
    auto one = [&](int a) -> double {
      switch (s.kind) {
        case PotentialSpec::Kind::Zero: return 0.0;
        case PotentialSpec::Kind::Geometric: return -(a + 1) * std::log(2.0);
        case PotentialSpec::Kind::Bernoulli:
          if (a >= static_cast<int>(s.p.size()) || !(s.p[a] > 0.0))
            throw Error(ErrorKind::InvalidArgument, "bernoulli weights must cover the alphabet and be positive");
          return std::log(s.p[a]);
        case PotentialSpec::Kind::Table:
          if (a >= static_cast<int>(s.p.size()))
            throw Error(ErrorKind::InvalidArgument, "table does not cover the alphabet");
          return s.p[a];
        default: return 0.0;
      }
    };
    for (int a = 0; a < rows; ++a) {
      if (!two) {
        double val = one(a);
        for (int c = 0; c < v.cols(); ++c) v(a, c) = val;
        continue;
      }
      if (a >= static_cast<int>(s.matrix.size()) || static_cast<int>(s.matrix[a].size()) < cols)
        throw Error(ErrorKind::InvalidArgument, "depth-2 table does not cover the alphabet at state " +
                                                    std::to_string(o));
      for (int c = 0; c < cols; ++c) {
        double x = s.matrix[a][c];
        bool adm = shift.allowed(o, a, c);
        if (s.kind == PotentialSpec::Kind::MatrixLog) {
          if (x < 0.0) throw Error(ErrorKind::InvalidArgument, "negative matrix entry");
          if (adm != (x > 0.0))
            throw Error(ErrorKind::InvalidArgument, "matrix signum differs from the adjacency at state " +
                                                        std::to_string(o));
          v(a, c) = adm ? std::log(x) : 0.0;
        } else {
          v(a, c) = adm ? x : 0.0;
        }
        if (adm && !std::isfinite(v(a, c)))
          throw Error(ErrorKind::InvalidArgument, "potential value is not finite");
      }
    }
    pot.values[o] = v;
    if (shift.countable(o)) {
      double t = std::numeric_limits<double>::infinity();
      if (s.kind == PotentialSpec::Kind::Geometric) t = std::ldexp(1.0, -shift.truncation());
      tail = std::max(tail, t);
    }
  }
  pot.tail_mass = tail;
  pot.tail_flag = tail < eps_tail;
  return pot;
}

Model::Model(RandomShift shift, Potential pot) : shift_(std::move(shift)), pot_(std::move(pot)) {
  const BaseSystem& base = shift_.base();
  if (static_cast<int>(pot_.values.size()) != base.size())
    throw Error(ErrorKind::InvalidArgument, "potential and shift differ in size");
  E_.resize(base.size());
  for (int o = 0; o < base.size(); ++o) {
    const auto& adj = shift_.adjacency(o);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(adj.rows(), adj.cols());
    for (int a = 0; a < adj.rows(); ++a)
      for (int c = 0; c < adj.cols(); ++c)
        if (adj(a, c)) e(a, c) = std::exp(pot_.phi(o, a, c));
    E_[o] = e;
  }
}

double variation(const Model& model, int omega, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be >= 0");
  const Potential& pot = model.potential();
  if (n >= pot.depth) return 0.0;
  const auto& adj = model.shift().adjacency(omega);
  double best = 0.0, lo_all = std::numeric_limits<double>::infinity(), hi_all = -lo_all;
  for (int a = 0; a < adj.rows(); ++a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int c = 0; c < adj.cols(); ++c) {
      if (!adj(a, c)) continue;
      double v = pot.phi(omega, a, c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    best = std::max(best, hi - lo);
    lo_all = std::min(lo_all, lo);
    hi_all = std::max(hi_all, hi);
  }
  return n == 0 ? hi_all - lo_all : best;
}

Distortion distortion(const Potential& pot, const BaseSystem& base, int omega, int K_max) {
  Distortion d;
  double r = pot.r;
  if (base.mode() == BaseMode::Cyclic) {
    int p = base.cycle_length(omega);
    double s = 0.0, rk = 1.0;
    for (int k = 1; k <= p; ++k) {
      rk *= r;
      s += pot.kappa[advance(base, omega, -k)] * rk;
    }
    s /= 1.0 - std::pow(r, p);
    d.lower = d.upper = std::exp(s);
    d.closed_form = true;
    return d;
  }
  double s = 0.0, rk = 1.0;
  for (int k = 1; k <= K_max; ++k) {
    rk *= r;
    s += pot.kappa[advance(base, omega, -k)] * rk;
  }
  double kmax = *std::max_element(pot.kappa.begin(), pot.kappa.end());
  d.lower = std::exp(s);
  d.upper = std::exp(s + kmax * std::pow(r, K_max + 1) / (1.0 - r));
  return d;
}

double distortion_B(const Model& model, int omega) {
  return distortion(model.potential(), model.base(), omega).value();
}

double phi_sum(const Model& model, int omega, const Symbols& w, int n, Eval mode,
               const Symbols& tail) {
  const RandomShift& shift = model.shift();
  const Potential& pot = model.potential();
  int len = static_cast<int>(w.size());
  if (n < 0 || n > len) throw Error(ErrorKind::InvalidArgument, "n must lie in [0, len(w)]");
  if (!is_admissible(shift, omega, w)) throw Error(ErrorKind::InvalidArgument, "word is not admissible");
  if (mode == Eval::Exact && len < n + pot.depth - 1)
    throw Error(ErrorKind::InsufficientWordLength, "word too short for an exact Birkhoff sum");
  const BaseSystem& base = shift.base();
  double total = 0.0;
  int o = omega;
  for (int i = 0; i < n; ++i) {
    if (pot.depth == 1) {
      total += pot.phi(o, w[i], 0);
    } else if (i + 1 < len) {
      total += pot.phi(o, w[i], w[i + 1]);
    } else if (mode == Eval::Point) {
      if (tail.empty() || !shift.allowed(o, w[i], tail[0]))
        throw Error(ErrorKind::InvalidArgument, "point continuation is not admissible");
      total += pot.phi(o, w[i], tail[0]);
    } else {
      double best = mode == Eval::Sup ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::infinity();
      for (int c : shift.successors(o, w[i])) {
        double v = pot.phi(o, w[i], c);
        best = mode == Eval::Sup ? std::max(best, v) : std::min(best, v);
      }
      total += best;
    }
    o = base.step(o);
  }
  return total;
}

Summability summability_bounds(const Model& model, int omega) {
  const Eigen::MatrixXd& E = model.weights(omega);
  Eigen::VectorXd col = E.colwise().sum().transpose();
  for (int j = 0; j < col.size(); ++j)
    if (!(col(j) > 0.0))
      throw Error(ErrorKind::EmptyFiber, "symbol " + std::to_string(j) + " has no predecessor");
  Summability s;
  s.m = col.minCoeff();
  s.M = col.maxCoeff();
  s.M_with_tail = s.M;
  if (model.shift().countable(omega)) {
    s.M_with_tail = s.M + model.potential().tail_mass;
    s.tail_certified = model.potential().tail_flag;
  }
  return s;
}

ConditionReport check_conditions(const Model& model, const BipCertificate& cert, int n_check) {
  const BaseSystem& base = model.base();
  const Potential& pot = model.potential();
  ConditionReport rep;
  int n = base.size();
  rep.V1.resize(n);
  rep.holder1 = rep.holder2 = true;
  bool s1 = true, s2 = true;
  double lb = 0.0, lM = 0.0, lm = 0.0;
  for (int o = 0; o < n; ++o) {
    rep.V1[o] = variation(model, o, 1);
    for (int k = 1; k <= n_check; ++k) {
      bool ok = variation(model, o, k) <= pot.kappa[o] * std::pow(pot.r, k) + 1e-12;
      if (!ok) {
        rep.holder1 = false;
        if (k >= 2) rep.holder2 = false;
      }
    }
    Summability s = summability_bounds(model, o);
    s1 = s1 && std::isfinite(s.M) && s.M > 0.0;
    s2 = s2 && s.m > 0.0;
    lb += base.weight(o) * std::log(distortion_B(model, o));
    lM += base.weight(o) * std::log(s.M);
    lm += base.weight(o) * -std::log(s.m);
    if (model.shift().countable(o)) rep.truncation_dependent = true;
  }
  rep.avg_log_B = lb;
  rep.avg_log_M = lM;
  rep.avg_neg_log_m = lm;
  bool finite_B = std::isfinite(lb);
  rep.H1 = rep.holder1 && finite_B;
  rep.H2 = rep.holder2 && finite_B;
  bool v1_ok = true;
  for (int o = 0; o < n; ++o) {
    int next = base.step(o);
    if (contains(cert.omega_bi, next) || contains(cert.omega_bp, next))
      v1_ok = v1_ok && std::isfinite(rep.V1[o]);
  }
  rep.Hstar = rep.H2 && v1_ok;
  rep.S1 = s1 && std::isfinite(lM);
  rep.S2 = s2 && std::isfinite(lm);
  return rep;
}

}  // namespace rtm
