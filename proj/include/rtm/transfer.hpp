#pragma once

#include <map>
#include <vector>

#include "rtm/numeric.hpp"
#include "rtm/potential.hpp"

namespace rtm {

// A function on X_omega that is constant on cylinders of length depth.
class FiberFunction {
 public:
  FiberFunction(const RandomShift& shift, int omega, int depth);
  template <class F>
  static FiberFunction from(const RandomShift& shift, int omega, int depth, F f) {
    FiberFunction out(shift, omega, depth);
    for (size_t i = 0; i < out.words_.size(); ++i) out.values_(i) = f(out.words_[i]);
    return out;
  }
  static FiberFunction constant(const RandomShift& shift, int omega, int depth, double c);
  static FiberFunction indicator(const RandomShift& shift, int omega, int depth, const Symbols& prefix);

  int omega() const { return omega_; }
  int depth() const { return depth_; }
  const std::vector<Symbols>& words() const { return words_; }
  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  // value on the cylinder given by the first depth symbols of x
  double at(const Symbols& x) const;
  int index(const Symbols& prefix) const;

 private:
  int omega_, depth_;
  std::vector<Symbols> words_;
  std::map<Symbols, int> index_;
  Eigen::VectorXd values_;
};

FiberFunction ruelle_apply(const Model& model, const FiberFunction& f, int out_depth = 0);

struct AnchorPoint {
  Symbols prefix;
  int preperiod = 0;  // x_{i + period} = x_i for i >= preperiod (in the joint state/symbol sense)
  int period = 0;
};

AnchorPoint anchor_point(const RandomShift& shift, int omega, int a, int length);

// One anchor xi_omega per state: in [a] where a is admissible, else in the
// smallest cylinder.
struct AnchorFamily {
  int a = 0;
  std::vector<int> first;
  bool in_a(int omega) const { return first[omega] == a; }
};

AnchorFamily make_anchors(const RandomShift& shift, int a);

// Log-valued partition functions (neg_inf encodes 0).
double log_gurevic_Z(const Model& model, int omega, int a, int n);
double log_local_preimage_Z(const Model& model, const AnchorFamily& anchors, int omega, int a, int n);
double log_full_preimage_Z(const Model& model, const AnchorFamily& anchors, int omega, int n);
double log_sup_partition_A(const Model& model, int omega, int n);

double gurevic_Z(const Model& model, int omega, int a, int n);
double local_preimage_Z(const Model& model, const AnchorFamily& anchors, int omega, int a, int n);
double full_preimage_Z(const Model& model, const AnchorFamily& anchors, int omega, int n);
double sup_partition_A(const Model& model, int omega, int n);

// All four sequences for n = 1..n_max in one pass; index n-1.
struct PartitionSequences {
  std::vector<double> logZ, logCZa, logCZ, logA;
};

PartitionSequences partition_sequences(const Model& model, const AnchorFamily& anchors, int omega,
                                       int n_max);

struct PressureRow {
  int n;
  bool in_return_set;
  double logZ_over_n;
  double logCZ_over_n;
  double gap;
};

struct PressureEstimate {
  double value = 0.0;        // from the Gurevic sequence
  double value_local = 0.0;  // from the local preimage sequence
  double gap = 0.0;
  double gap_local = 0.0;
  bool below_floor = false;  // estimate below -1e3
  int a = 0;
  int N = 0;
  int omega = 0;
  int lag = 1;
  StateSet omega_star;
  std::vector<PressureRow> rows;
};

struct PressureOptions {
  int n_max = 40;
  int q = 5;
  int mixing_horizon = 64;
  int omega = -1;  // start state; first state of Omega* when negative
  double agree_tol = 1e-8;
};

StateSet omega_star(const RandomShift& shift, int a, int N, int horizon);
PressureEstimate pressure(const Model& model, const AnchorFamily& anchors, int a, int N,
                          const PressureOptions& opt = {});

struct DivergenceTable {
  std::vector<int> n;
  std::vector<double> log_partial;  // log of the partial sum up to n
  double slope = 0.0;               // d log S / d log n over the second half
};

DivergenceTable divergence_diagnostic(const Model& model, const AnchorFamily& anchors, int omega,
                                      const StateSet& target, double s, int n_max);

struct ConnectorConstant {
  double value = 1.0;
  std::vector<Symbols> connectors;
};

// C_omega(a,k): needs k >= alpha_omega and theta^k omega in Omega_bp
ConnectorConstant constant_C(const Model& model, const BipCertificate& cert, int omega, int a,
                             int k, int horizon = 64);
// D_omega(a,k): needs omega in Omega_bi and k >= beta_omega
ConnectorConstant constant_D(const Model& model, const BipCertificate& cert, int omega, int a,
                             int k, int horizon = 64);

struct BoundConstants {
  double C = 1.0;
  double D = 1.0;
};

BoundConstants bound_constants_CD(const Model& model, const BipCertificate& cert, int omega, int a,
                                  int k, int horizon = 64);

}  // namespace rtm
