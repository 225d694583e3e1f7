#pragma once

#include <cstdint>
#include <vector>

#include "rtm/spectral.hpp"

namespace rtm {

// Nonnegative matrices A_omega of size l_omega x l_{theta omega}.
class MatrixCocycle {
 public:
  MatrixCocycle(BaseSystem base, std::vector<Eigen::MatrixXd> A);

  const BaseSystem& base() const { return base_; }
  const Eigen::MatrixXd& at(int omega) const { return A_[omega]; }
  int dim(int omega) const { return static_cast<int>(A_[omega].rows()); }
  int size() const { return base_.size(); }

 private:
  BaseSystem base_;
  std::vector<Eigen::MatrixXd> A_;
};

// Shift given by the signum of A, one environment per state.
RandomShift signum_shift(const MatrixCocycle& A);
// Depth-2 potential phi([ij]) = log p_ij on the signum shift.
Model cocycle_model(const MatrixCocycle& A);
// Reverse-time transpose convention: base step theta^-1 and A'_omega = (A_{theta^-1 omega})^T,
// so phi'([ij]) = log p_ji^{theta^-1 omega}.
MatrixCocycle reverse_transpose(const MatrixCocycle& A);

struct SummableBipReport {
  bool i = false, ii = false, iii = false;
  BipReport bip;
  std::vector<double> ratio_sup;  // per state; checked on theta^-1(Omega_bi u Omega_bp)
  std::vector<double> col_min, col_max;
  bool ok() const { return i && ii && iii; }
};

SummableBipReport check_summable_bip(const MatrixCocycle& A, const BipCertificate& cert);

struct PFTriple {
  std::vector<double> lambda;
  std::vector<Eigen::VectorXd> h;   // left vectors
  std::vector<Eigen::VectorXd> mu;  // right vectors
  double residual_h = 0.0;
  double residual_mu = 0.0;
  double residual_norm = 0.0;
  long long sweeps = 0;
  double max_residual() const { return std::max({residual_h, residual_mu, residual_norm}); }
};

PFTriple random_pf(const MatrixCocycle& A, double tol = 1e-12, long long iter_cap = 100000);

DecayTable rank_one_convergence(const MatrixCocycle& A, const PFTriple& pf, int omega, int i,
                                int n_max);

struct StationaryResult {
  std::vector<Eigen::VectorXd> pi;
  double residual = 0.0;           // max_omega |pi_omega A_omega - pi_{theta omega}|_1
  double restart_agreement = 0.0;  // max_omega |pi - pi'|_1 against a seeded random start
  long long sweeps = 0;
};

void require_stochastic(const MatrixCocycle& A, double tol = 1e-12);

StationaryResult stationary_distribution(const MatrixCocycle& A, double tol = 1e-13,
                                         long long iter_cap = 100000, std::uint64_t seed = 1);

// f holds one vector per state; the deviation uses f at omega only.
DecayTable backward_product_convergence(const MatrixCocycle& A, const StationaryResult& pi,
                                        const std::vector<Eigen::VectorXd>& f, int omega,
                                        int n_max);

struct ReversalCheck {
  double max_error = 0.0;
  int omega = -1;
  Symbols word;
  long long words = 0;
};

// Conformal measure of the reversed system against pi and the path formula.
ReversalCheck time_reversal_check(const MatrixCocycle& A, const StationaryResult& pi, int depth);

}  // namespace rtm
