#pragma once

#include <limits>
#include <vector>

#include "rtm/transfer.hpp"

namespace rtm {

// s_j = (1 - 2^-j) exp(-P), j = 1..J
std::vector<double> default_schedule(double P_hat, int J);

// Truncation used when n_max == 0: with margin = 1 - s e^P the tail is
// about exp(-4096).
long long auto_truncation(const BaseSystem& base, double margin);

// u_omega = sum_{1 <= n <= N, theta^n omega in target} s^n E_omega ... E_{theta^{n-1} omega} e_{xi},
// so that P_omega(s) = 1^T u_omega.  Every state gets its own truncation.
struct SeriesState {
  double s = 0.0;
  std::vector<Eigen::VectorXd> u;
  std::vector<long long> n;
};

SeriesState series_state(const Model& model, const AnchorFamily& anchors, const StateSet& target,
                         double s, long long n_max);

double power_series(const Model& model, const AnchorFamily& anchors, int omega,
                    const StateSet& target, double s, long long n_max);

struct PowerSeriesProfile {
  std::vector<double> s;
  std::vector<std::vector<double>> P;  // [state][j]
  long long n_max = 0;
  StateSet target;
};

struct QuotientReport {
  PowerSeriesProfile profile;
  std::vector<std::vector<double>> quotient;  // [state][j]
  std::vector<double> lambda;                 // last schedule point
  std::vector<double> m, M;                   // summability bounds per state
  double gap = 0.0;                           // max_omega |q_J - q_{J-1}|
  int checks = 0;
  int violations = 0;
  double log_average = 0.0;  // base average of log lambda
};

QuotientReport lambda_quotient(const Model& model, const AnchorFamily& anchors,
                               const StateSet& target, double P_hat,
                               const std::vector<double>& schedule, long long n_max = 0);

// log Lambda_n(omega) = sum_{i<n} log lambda(theta^i omega)
double log_Lambda(const BaseSystem& base, const std::vector<double>& lambda, int omega, long long n);

struct CylinderMeasure {
  int depth = 1;
  std::vector<FiberFunction> mass;  // per state
  bool normalized = true;

  // mass of a cylinder of length <= depth
  double operator()(int omega, const Symbols& prefix) const;
  double total(int omega) const { return mass[omega].values().sum(); }
};

// Depth-1 fixed point of the normalized dual operator.
struct DualMeasure {
  std::vector<Eigen::VectorXd> nu;  // per state, sums to one
  std::vector<double> scale;        // 1^T E_omega nu_{theta omega}, approximates lambda e^P
  long long sweeps = 0;
  double step = 0.0;
};

DualMeasure dual_fixed_point(const Model& model, double tol = 1e-10, long long max_sweeps = 100000);
double cylinder_mass(const Model& model, const DualMeasure& dual, int omega, const Symbols& w);

enum class MeasureMethod { Series, Dual };

struct ConformalOptions {
  int J = 30;
  long long n_max = 0;
  double tol = 1e-10;
  long long max_sweeps = 100000;
};

CylinderMeasure conformal_measure(const Model& model, const AnchorFamily& anchors,
                                  const StateSet& target, double P_hat, int depth,
                                  MeasureMethod method,
                                  const ConformalOptions& opt = {});
CylinderMeasure measure_from_dual(const Model& model, const DualMeasure& dual, int depth);

// max over states of the total variation distance
double tv_distance(const CylinderMeasure& a, const CylinderMeasure& b);
// mass of each parent equals the sum over its children
double refinement_defect(const CylinderMeasure& fine, const CylinderMeasure& coarse);

struct Residual {
  double value = 0.0;
  int omega = -1;
  Symbols word;
};

Residual conformality_residual(const Model& model, const CylinderMeasure& mu,
                               const std::vector<double>& lambda, double P_hat);

struct EigenData {
  std::vector<double> lambda;     // as supplied
  std::vector<double> lambda_re;  // from the accumulated normalizations
  std::vector<FiberFunction> h;
  std::vector<Eigen::VectorXd> h1;  // values on 1-cylinders
  double P_hat = 0.0;
  double residual = 0.0;     // with lambda
  double residual_re = 0.0;  // with lambda_re
  long long steps = 0;
  double log_Lambda(const BaseSystem& base, int omega, long long n) const {
    return rtm::log_Lambda(base, lambda, omega, n);
  }
};

EigenData eigenfunction(const Model& model, const CylinderMeasure& mu,
                        const std::vector<double>& lambda, double P_hat, int depth = 1,
                        long long n = 64, long long max_steps = 10000000);

struct GibbsRow {
  int omega;
  Symbols word;
  double ratio_min;
  double ratio_max;
  double lower;
  double upper;
  bool ok;
};

struct GibbsReport {
  std::vector<GibbsRow> rows;
  int violations = 0;
  bool all_pass() const { return violations == 0; }
};

// D_omega = min_b mu_omega(T_{theta^-1 omega}[b])
double gibbs_D(const Model& model, const DualMeasure& dual, int omega);

GibbsReport gibbs_report(const Model& model, const BipCertificate& cert, const DualMeasure& dual,
                         const std::vector<double>& lambda, double P_hat,
                         int max_len, long long word_cap = 1000000);

struct RecurrenceRow {
  int omega;
  int n;
  double ratio;
};

struct RecurrenceReport {
  std::vector<RecurrenceRow> rows;
  std::vector<double> min, max;  // per state, NaN when no admissible n
  bool bounded = false;
};

RecurrenceReport recurrence_report(const Model& model, const std::vector<double>& lambda,
                                   double P_hat, int a, int n_max);

struct DecayTable {
  std::vector<int> n;
  std::vector<double> deviation;
  double rate = std::numeric_limits<double>::quiet_NaN();  // fitted per-step ratio
};

// geometric rate from the points above floor in the second half of the table
double fit_rate(const std::vector<int>& n, const std::vector<double>& dev, double floor = 1e-12);

DecayTable exactness_convergence(const Model& model, const DualMeasure& dual, const EigenData& eig,
                                 const FiberFunction& f, int n_max);

}  // namespace rtm
