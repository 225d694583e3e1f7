#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rtm/shift.hpp"

namespace rtm {

// Locally constant potential of depth 1 (phi([a])) or depth 2 (phi([ab])).
struct PotentialSpec {
  enum class Kind { Zero, Bernoulli, Geometric, MatrixLog, Table };
  Kind kind = Kind::Zero;
  std::vector<double> p;                      // bernoulli weights, or depth-1 table
  std::vector<std::vector<double>> matrix;    // matrix-log entries, or depth-2 table

  static PotentialSpec zero() { return {}; }
  static PotentialSpec bernoulli(std::vector<double> p);
  static PotentialSpec geometric();
  static PotentialSpec matrix_log(std::vector<std::vector<double>> m);
  static PotentialSpec table1(std::vector<double> values);
  static PotentialSpec table2(std::vector<std::vector<double>> values);
  std::string name() const;
};

struct Potential {
  int depth = 2;
  // per state: alphabet(omega) x alphabet(theta omega) for depth 2, alphabet(omega) x 1 for depth 1
  std::vector<Eigen::MatrixXd> values;
  std::vector<double> kappa;  // per state, >= 1
  double r = 0.5;
  double eps_tail = 1e-10;
  // certified bound on the mass sum_{b >= L} e^{phi([b])} dropped by truncation
  double tail_mass = 0.0;
  bool tail_flag = true;

  double phi(int omega, int a, int b) const { return depth == 1 ? values[omega](a, 0) : values[omega](a, b); }
};

// kappa may hold one value (used everywhere) or one per state.
Potential make_potential(const RandomShift& shift, const std::vector<PotentialSpec>& specs,
                         int depth, std::vector<double> kappa, double r, double eps_tail = 1e-10);

// smallest truncation level whose geometric tail 2^{-L} is below eps
int geometric_truncation(double eps);

class Model {
 public:
  Model(RandomShift shift, Potential pot);
  const RandomShift& shift() const { return shift_; }
  const BaseSystem& base() const { return shift_.base(); }
  const Potential& potential() const { return pot_; }
  // E(a, c) = alpha_ac(omega) exp(phi([ac]))
  const Eigen::MatrixXd& weights(int omega) const { return E_[omega]; }
  int alphabet(int omega) const { return shift_.alphabet(omega); }

 private:
  RandomShift shift_;
  Potential pot_;
  std::vector<Eigen::MatrixXd> E_;
};

// n = 0 gives the spread of phi over the whole fiber.
double variation(const Model& model, int omega, int n);

struct Distortion {
  double lower = 1.0;   // exp of the partial sum
  double upper = 1.0;   // with the tail bound folded in
  bool closed_form = false;
  double value() const { return upper; }
};

Distortion distortion(const Potential& pot, const BaseSystem& base, int omega, int K_max = 200);
double distortion_B(const Model& model, int omega);

enum class Eval { Sup, Inf, Exact, Point };

// Birkhoff sum phi_n over [w]_omega.  Point mode evaluates at w followed by tail.
double phi_sum(const Model& model, int omega, const Symbols& w, int n, Eval mode,
               const Symbols& tail = {});

struct Summability {
  double m = 0.0;
  double M = 0.0;
  double M_with_tail = 0.0;  // M plus the certified truncation tail
  bool tail_certified = true;
};

Summability summability_bounds(const Model& model, int omega);

struct ConditionReport {
  bool H1 = false, H2 = false, Hstar = false, S1 = false, S2 = false;
  double avg_log_B = 0.0;
  double avg_log_M = 0.0;
  double avg_neg_log_m = 0.0;
  std::vector<double> V1;       // per state
  bool holder1 = false;         // V_n <= kappa r^n for 1 <= n <= n_check
  bool holder2 = false;         // same for 2 <= n <= n_check
  bool truncation_dependent = false;  // countable alphabets: V1 is a lower bound
};

ConditionReport check_conditions(const Model& model, const BipCertificate& cert, int n_check = 8);

}  // namespace rtm
