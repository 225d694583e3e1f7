#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace rtm {

enum class BaseMode { Cyclic, SampledPath };

// Finite realization of (Omega, theta, P).  States are 0..size-1.  In both
// modes theta is the shift by one with wrap, which is a single cycle, so the
// invariant probability is uniform.  A sampled path also carries, for every
// position, the label of the environment realized there.
class BaseSystem {
 public:
  static BaseSystem cyclic(int period);
  static BaseSystem sampled_path(std::vector<int> labels);

  // General bijection with weights; validated (bijection, weights sum to one,
  // weights invariant under the step).
  BaseSystem(std::vector<int> step, std::vector<double> weights, BaseMode mode,
             std::vector<int> labels);

  int size() const { return static_cast<int>(step_.size()); }
  BaseMode mode() const { return mode_; }
  int step(int omega) const { return step_[omega]; }
  int step_inverse(int omega) const { return inverse_[omega]; }
  double weight(int omega) const { return weights_[omega]; }
  const std::vector<double>& weights() const { return weights_; }
  // environment label of a state (identity for cyclic bases)
  int label(int omega) const { return labels_[omega]; }
  const std::vector<int>& labels() const { return labels_; }
  // length of the theta-cycle containing omega
  int cycle_length(int omega) const { return cycle_len_[cycle_of_[omega]]; }
  bool single_cycle() const { return cycle_len_.size() == 1; }

 private:
  std::vector<int> step_, inverse_;
  std::vector<double> weights_;
  BaseMode mode_;
  std::vector<int> labels_;
  std::vector<int> cycle_of_, pos_in_cycle_, cycle_len_;
  std::vector<std::vector<int>> cycles_;

  friend int advance(const BaseSystem&, int, long long);
};

using StateSet = std::vector<int>;  // sorted, unique

int advance(const BaseSystem& system, int omega, long long k);
bool contains(const StateSet& set, int omega);
StateSet all_states(const BaseSystem& system);
// smallest state of every theta-cycle
std::vector<int> cycle_starts(const BaseSystem& system);
double set_weight(const BaseSystem& system, const StateSet& set);

std::vector<int> return_times(const BaseSystem& system, int omega, const StateSet& target,
                              int n_max);

struct Return {
  int eta;
  int omega;
};

Return induced_map(const BaseSystem& system, const StateSet& target, int omega);
Return jump_map(const BaseSystem& system, const StateSet& target, int N, int omega);
// eta_k(omega) by iterating the induced map k times
long long induced_sum(const BaseSystem& system, const StateSet& target, int omega, int k);

double base_average(const BaseSystem& system, const std::function<double(int)>& g);
double base_average(const BaseSystem& system, const std::vector<double>& g);

}  // namespace rtm
