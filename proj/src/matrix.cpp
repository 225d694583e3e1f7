#include "rtm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "rtm/error.hpp"

namespace rtm {

namespace {

// same step and weights, one label per state
BaseSystem relabel(const BaseSystem& base, bool reverse) {
  int n = base.size();
  std::vector<int> step(n), labels(n);
  for (int o = 0; o < n; ++o) {
    step[o] = reverse ? base.step_inverse(o) : base.step(o);
    labels[o] = o;
  }
  return BaseSystem(step, base.weights(), base.mode(), labels);
}

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

// max over rows of (largest / smallest nonzero entry)
double row_ratio_sup(const Eigen::MatrixXd& m) {
  double best = 1.0;
  for (int i = 0; i < m.rows(); ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) > 0.0) {
        lo = std::min(lo, m(i, j));
        hi = std::max(hi, m(i, j));
      }
    if (hi > 0.0) best = std::max(best, hi / lo);
  }
  return best;
}

}  // namespace

MatrixCocycle::MatrixCocycle(BaseSystem base, std::vector<Eigen::MatrixXd> A)
    : base_(std::move(base)), A_(std::move(A)) {
  if (static_cast<int>(A_.size()) != base_.size())
    throw Error(ErrorKind::InvalidArgument, "need one matrix per state");
  for (int o = 0; o < base_.size(); ++o) {
    const Eigen::MatrixXd& m = A_[o];
    if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorKind::InvalidArgument, "empty matrix");
    if (m.cols() != A_[base_.step(o)].rows())
      throw Error(ErrorKind::InvalidArgument,
                  "matrix at state " + std::to_string(o) + " does not chain with its successor");
    if (!m.allFinite() || m.minCoeff() < 0.0)
      throw Error(ErrorKind::InvalidArgument, "matrix entries must be finite and nonnegative");
  }
}

RandomShift signum_shift(const MatrixCocycle& A) {
  std::vector<AdjacencySpec> envs;
  for (int o = 0; o < A.size(); ++o) {
    const Eigen::MatrixXd& m = A.at(o);
    std::vector<std::vector<int>> s(m.rows(), std::vector<int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) s[i][j] = m(i, j) > 0.0 ? 1 : 0;
    envs.push_back(AdjacencySpec::explicit_matrix(std::move(s)));
  }
  return RandomShift(relabel(A.base(), false), std::move(envs));
}

Model cocycle_model(const MatrixCocycle& A) {
  RandomShift shift = signum_shift(A);
  std::vector<PotentialSpec> specs;
  double kappa = 1.0;
  for (int o = 0; o < A.size(); ++o) {
    specs.push_back(PotentialSpec::matrix_log(rows_of(A.at(o))));
    kappa = std::max(kappa, 2.0 * std::log(row_ratio_sup(A.at(o))));
  }
  Potential pot = make_potential(shift, specs, 2, {kappa}, 0.5);
  return Model(std::move(shift), std::move(pot));
}

MatrixCocycle reverse_transpose(const MatrixCocycle& A) {
  const BaseSystem& base = A.base();
  std::vector<Eigen::MatrixXd> out(A.size());
  for (int o = 0; o < A.size(); ++o) out[o] = A.at(base.step_inverse(o)).transpose();
  return MatrixCocycle(relabel(base, true), std::move(out));
}

SummableBipReport check_summable_bip(const MatrixCocycle& A, const BipCertificate& cert) {
  SummableBipReport rep;
  const BaseSystem& base = A.base();
  int n = A.size();
  RandomShift shift = signum_shift(A);
  rep.bip = verify_bip(shift, cert);
  rep.i = rep.bip.ok();
  rep.ii = true;
  rep.iii = true;
  rep.ratio_sup.resize(n);
  rep.col_min.resize(n);
  rep.col_max.resize(n);
  for (int o = 0; o < n; ++o) {
    rep.ratio_sup[o] = row_ratio_sup(A.at(o));
    int next = base.step(o);
    if (contains(cert.omega_bi, next) || contains(cert.omega_bp, next))
      rep.ii = rep.ii && std::isfinite(rep.ratio_sup[o]);
    Eigen::RowVectorXd col = A.at(o).colwise().sum();
    rep.col_min[o] = col.minCoeff();
    rep.col_max[o] = col.maxCoeff();
    rep.iii = rep.iii && rep.col_min[o] > 0.0 && std::isfinite(rep.col_max[o]);
  }
  return rep;
}

PFTriple random_pf(const MatrixCocycle& A, double tol, long long iter_cap) {
  const BaseSystem& base = A.base();
  int n = A.size();
  for (int o = 0; o < n; ++o)
    for (int i = 0; i < A.dim(o); ++i)
      if (A.at(o).row(i).maxCoeff() <= 0.0)
        throw Error(ErrorKind::ZeroRow, "row " + std::to_string(i) + " vanishes at state " + std::to_string(o));
  PFTriple pf;
  pf.lambda.assign(n, 0.0);
  pf.h.resize(n);
  pf.mu.resize(n);
  double stop = std::max(tol * 1e-2, 1e-15);
  for (int start : cycle_starts(base)) {
    int p = base.cycle_length(start);
    Eigen::VectorXd g = Eigen::VectorXd::Ones(A.dim(start)), last = g;
    long long sweeps = 0;
    bool done = false;
    while (sweeps < iter_cap) {
      ++sweeps;
      int o = start;
      for (int k = 0; k < p; ++k) {
        g = A.at(o).transpose() * g;
        double c = g.maxCoeff();
        g /= c;
        pf.lambda[o] = c;
        o = base.step(o);
        pf.h[o] = g;
      }
      double change = (g - last).cwiseAbs().maxCoeff();
      last = g;
      if (change < stop) {
        done = true;
        break;
      }
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(A.dim(start));
    last = v;
    bool done_mu = false;
    while (done && sweeps < 2 * iter_cap) {
      ++sweeps;
      int x = start;
      for (int k = 0; k < p; ++k) {
        int o = base.step_inverse(x);
        v = A.at(o) * v;
        v /= v.maxCoeff();
        pf.mu[o] = v;
        x = o;
      }
      double change = (v - last).cwiseAbs().maxCoeff();
      last = v;
      if (change < stop) {
        done_mu = true;
        break;
      }
    }
    pf.sweeps = std::max(pf.sweeps, sweeps);
    if (!done || !done_mu) throw Error(ErrorKind::NoConvergence, "Perron-Frobenius iteration did not settle");
  }
  for (int o = 0; o < n; ++o) pf.mu[o] /= pf.h[o].dot(pf.mu[o]);
  for (int o = 0; o < n; ++o) {
    int next = base.step(o);
    const Eigen::MatrixXd& m = A.at(o);
    Eigen::VectorXd rh = m.transpose() * pf.h[o] - pf.lambda[o] * pf.h[next];
    pf.residual_h = std::max(pf.residual_h, rh.cwiseAbs().maxCoeff() / pf.h[next].cwiseAbs().maxCoeff());
    Eigen::VectorXd lm = pf.lambda[o] * pf.mu[o];
    Eigen::VectorXd rm = m * pf.mu[next] - lm;
    pf.residual_mu = std::max(pf.residual_mu, rm.cwiseAbs().maxCoeff() / lm.cwiseAbs().maxCoeff());
    pf.residual_norm = std::max(pf.residual_norm, std::abs(pf.h[o].dot(pf.mu[o]) - 1.0));
    if (pf.h[o].minCoeff() <= 0.0 || pf.mu[o].minCoeff() <= 0.0)
      throw Error(ErrorKind::HypothesisFail, "Perron-Frobenius vectors are not strictly positive");
  }
  if (pf.max_residual() > tol)
    throw Error(ErrorKind::NoConvergence,
                "Perron-Frobenius residual " + std::to_string(pf.max_residual()) + " above tolerance");
  return pf;
}

DecayTable rank_one_convergence(const MatrixCocycle& A, const PFTriple& pf, int omega, int i,
                                int n_max) {
  const BaseSystem& base = A.base();
  if (i < 0 || i >= A.dim(omega)) throw Error(ErrorKind::InvalidArgument, "row index out of range");
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(A.dim(omega));
  r(i) = 1.0;
  DecayTable t;
  int o = omega;
  for (int n = 1; n <= n_max; ++n) {
    r = r * A.at(o) / pf.lambda[o];
    o = base.step(o);
    Eigen::VectorXd d = (r.transpose() - pf.mu[omega](i) * pf.h[o]).cwiseAbs();
    t.n.push_back(n);
    t.deviation.push_back(d.dot(pf.mu[o]));
  }
  t.rate = fit_rate(t.n, t.deviation);
  return t;
}

void require_stochastic(const MatrixCocycle& A, double tol) {
  for (int o = 0; o < A.size(); ++o) {
    Eigen::VectorXd rs = A.at(o).rowwise().sum();
    for (int i = 0; i < rs.size(); ++i)
      if (std::abs(rs(i) - 1.0) > tol)
        throw Error(ErrorKind::NotStochastic,
                    "row " + std::to_string(i) + " at state " + std::to_string(o) + " sums to " +
                        std::to_string(rs(i)));
  }
}

namespace {

std::vector<Eigen::VectorXd> stationary_run(const MatrixCocycle& A,
                                            const std::vector<Eigen::VectorXd>& init, double tol,
                                            long long iter_cap, long long& sweeps_out) {
  const BaseSystem& base = A.base();
  std::vector<Eigen::VectorXd> pi(A.size());
  for (int start : cycle_starts(base)) {
    int p = base.cycle_length(start);
    Eigen::VectorXd cur = init[start], last = cur;
    long long sweeps = 0;
    bool done = false;
    while (sweeps < iter_cap) {
      ++sweeps;
      int o = start;
      for (int k = 0; k < p; ++k) {
        cur = A.at(o).transpose() * cur;
        cur /= cur.sum();
        o = base.step(o);
        pi[o] = cur;
      }
      double change = (cur - last).cwiseAbs().sum();
      last = cur;
      if (change < tol) {
        done = true;
        break;
      }
    }
    sweeps_out = std::max(sweeps_out, sweeps);
    if (!done) throw Error(ErrorKind::NoConvergence, "stationary iteration did not settle");
  }
  return pi;
}

}  // namespace

StationaryResult stationary_distribution(const MatrixCocycle& A, double tol, long long iter_cap,
                                         std::uint64_t seed) {
  require_stochastic(A);
  int n = A.size();
  StationaryResult res;
  std::vector<Eigen::VectorXd> uniform(n), random(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(0.05, 1.0);
  for (int o = 0; o < n; ++o) {
    uniform[o] = Eigen::VectorXd::Constant(A.dim(o), 1.0 / A.dim(o));
    random[o].resize(A.dim(o));
    for (int i = 0; i < A.dim(o); ++i) random[o](i) = draw(rng);
    random[o] /= random[o].sum();
  }
  res.pi = stationary_run(A, uniform, std::max(tol * 1e-2, 1e-14), iter_cap, res.sweeps);
  std::vector<Eigen::VectorXd> other = stationary_run(A, random, std::max(tol * 1e-2, 1e-14), iter_cap, res.sweeps);
  for (int o = 0; o < n; ++o) {
    int next = A.base().step(o);
    Eigen::VectorXd r = A.at(o).transpose() * res.pi[o] - res.pi[next];
    res.residual = std::max(res.residual, r.cwiseAbs().sum());
    res.restart_agreement = std::max(res.restart_agreement, (res.pi[o] - other[o]).cwiseAbs().sum());
  }
  if (res.residual > tol)
    throw Error(ErrorKind::NoConvergence, "stationary residual above tolerance");
  return res;
}

DecayTable backward_product_convergence(const MatrixCocycle& A, const StationaryResult& pi,
                                        const std::vector<Eigen::VectorXd>& f, int omega,
                                        int n_max) {
  const BaseSystem& base = A.base();
  if (static_cast<int>(f.size()) != A.size() || f[omega].size() != A.dim(omega))
    throw Error(ErrorKind::InvalidArgument, "f must hold one vector per state");
  double target = f[omega].dot(pi.pi[omega]);
  Eigen::VectorXd g = f[omega];
  DecayTable t;
  int o = omega;
  for (int n = 1; n <= n_max; ++n) {
    o = base.step_inverse(o);
    g = A.at(o) * g;
    t.n.push_back(n);
    t.deviation.push_back(pi.pi[o].dot((g.array() - target).abs().matrix()));
  }
  t.rate = fit_rate(t.n, t.deviation);
  return t;
}

ReversalCheck time_reversal_check(const MatrixCocycle& A, const StationaryResult& pi, int depth) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  const BaseSystem& base = A.base();
  Model rev = cocycle_model(reverse_transpose(A));
  DualMeasure dual = dual_fixed_point(rev, 1e-14);
  ReversalCheck out;
  for (int o = 0; o < A.size(); ++o) {
    for (int len = 1; len <= depth; ++len) {
      for (const Word& w : admissible_words(rev.shift(), o, len)) {
        const Symbols& v = w.symbols;
        double path = 1.0;
        int x = o;
        for (int k = 1; k < len; ++k) {
          x = base.step_inverse(x);
          path *= A.at(x)(v[k], v[k - 1]);
        }
        path *= pi.pi[x](v[len - 1]);
        double err = std::abs(cylinder_mass(rev, dual, o, v) - path);
        ++out.words;
        if (err > out.max_error || out.omega < 0) {
          out.max_error = err;
          out.omega = o;
          out.word = v;
        }
      }
    }
  }
  return out;
}

}  // namespace rtm
