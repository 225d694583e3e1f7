#include "rtm/base.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtm/error.hpp"

namespace rtm {

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoReturn: return "NoReturn";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::TruncationUnsound: return "TruncationUnsound";
    case ErrorKind::InsufficientWordLength: return "InsufficientWordLength";
    case ErrorKind::EmptyFiber: return "EmptyFiber";
    case ErrorKind::DepthUnderflow: return "DepthUnderflow";
    case ErrorKind::AnchorMissing: return "AnchorMissing";
    case ErrorKind::DivergentDiagnostics: return "DivergentDiagnostics";
    case ErrorKind::HypothesisFail: return "HypothesisFail";
    case ErrorKind::NotMixedWithinHorizon: return "NotMixedWithinHorizon";
    case ErrorKind::SandwichViolation: return "SandwichViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UnknownFixture: return "UnknownFixture";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::UnknownFixture:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NotStochastic:
    case ErrorKind::ZeroRow:
    case ErrorKind::EmptyFiber:
      return exit_code::config;
    case ErrorKind::TruncationUnsound:
    case ErrorKind::HypothesisFail:
    case ErrorKind::NotMixedWithinHorizon:
      return exit_code::bip;
    case ErrorKind::NoConvergence:
    case ErrorKind::DivergentDiagnostics:
    case ErrorKind::NoReturn:
      return exit_code::convergence;
    case ErrorKind::SandwichViolation:
      return exit_code::assertion;
    default:
      return exit_code::internal;
  }
}

BaseSystem BaseSystem::cyclic(int period) {
  if (period < 1) throw Error(ErrorKind::InvalidArgument, "period must be >= 1");
  std::vector<int> step(period), labels(period);
  for (int i = 0; i < period; ++i) {
    step[i] = (i + 1) % period;
    labels[i] = i;
  }
  return BaseSystem(step, std::vector<double>(period, 1.0 / period), BaseMode::Cyclic, labels);
}

BaseSystem BaseSystem::sampled_path(std::vector<int> labels) {
  int T = static_cast<int>(labels.size());
  if (T < 1) throw Error(ErrorKind::InvalidArgument, "empty path");
  std::vector<int> step(T);
  for (int i = 0; i < T; ++i) step[i] = (i + 1) % T;
  return BaseSystem(step, std::vector<double>(T, 1.0 / T), BaseMode::SampledPath,
                    std::move(labels));
}

BaseSystem::BaseSystem(std::vector<int> step, std::vector<double> weights, BaseMode mode,
                       std::vector<int> labels)
    : step_(std::move(step)), weights_(std::move(weights)), mode_(mode),
      labels_(std::move(labels)) {
  int n = size();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "base needs at least one state");
  if (static_cast<int>(weights_.size()) != n || static_cast<int>(labels_.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "step, weights and labels differ in size");
  inverse_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    int j = step_[i];
    if (j < 0 || j >= n || inverse_[j] != -1)
      throw Error(ErrorKind::InvalidArgument, "step is not a bijection");
    inverse_[j] = i;
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "weights do not sum to 1");
  for (int i = 0; i < n; ++i)
    if (std::abs(weights_[step_[i]] - weights_[i]) > 1e-12)
      throw Error(ErrorKind::InvalidArgument, "step does not preserve weights");

  cycle_of_.assign(n, -1);
  pos_in_cycle_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (cycle_of_[i] != -1) continue;
    std::vector<int> cyc;
    int c = static_cast<int>(cycles_.size());
    for (int j = i; cycle_of_[j] == -1; j = step_[j]) {
      cycle_of_[j] = c;
      pos_in_cycle_[j] = static_cast<int>(cyc.size());
      cyc.push_back(j);
    }
    cycle_len_.push_back(static_cast<int>(cyc.size()));
    cycles_.push_back(std::move(cyc));
  }
  if (mode_ == BaseMode::Cyclic && cycles_.size() != 1)
    throw Error(ErrorKind::InvalidArgument, "cyclic base must be a single cycle");
}

int advance(const BaseSystem& s, int omega, long long k) {
  if (omega < 0 || omega >= s.size()) throw Error(ErrorKind::InvalidArgument, "state out of range");
  int c = s.cycle_of_[omega];
  long long len = s.cycle_len_[c];
  long long p = (s.pos_in_cycle_[omega] + k) % len;
  if (p < 0) p += len;
  return s.cycles_[c][p];
}

bool contains(const StateSet& set, int omega) {
  return std::binary_search(set.begin(), set.end(), omega);
}

StateSet all_states(const BaseSystem& s) {
  StateSet out(s.size());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

double set_weight(const BaseSystem& s, const StateSet& set) {
  double w = 0.0;
  for (int o : set) w += s.weight(o);
  return w;
}

std::vector<int> return_times(const BaseSystem& s, int omega, const StateSet& target, int n_max) {
  if (target.empty()) throw Error(ErrorKind::InvalidArgument, "empty target");
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  std::vector<int> out;
  int w = omega;
  for (int n = 1; n <= n_max; ++n) {
    w = s.step(w);
    if (contains(target, w)) out.push_back(n);
  }
  return out;
}

Return jump_map(const BaseSystem& s, const StateSet& target, int N, int omega) {
  if (!contains(target, omega)) throw Error(ErrorKind::InvalidArgument, "state not in target");
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  int w = advance(s, omega, N - 1);
  for (int n = N; n <= N + s.size(); ++n) {
    w = s.step(w);
    if (contains(target, w)) return {n, w};
  }
  throw Error(ErrorKind::NoReturn, "no return to target");
}

Return induced_map(const BaseSystem& s, const StateSet& target, int omega) {
  return jump_map(s, target, 1, omega);
}

long long induced_sum(const BaseSystem& s, const StateSet& target, int omega, int k) {
  long long total = 0;
  for (int l = 0; l < k; ++l) {
    Return r = induced_map(s, target, omega);
    total += r.eta;
    omega = r.omega;
  }
  return total;
}

double base_average(const BaseSystem& s, const std::function<double(int)>& g) {
  double total = 0.0;
  for (int o = 0; o < s.size(); ++o) {
    double v = g(o);
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "g is not finite at a state");
    total += v * s.weight(o);
  }
  return total;
}

double base_average(const BaseSystem& s, const std::vector<double>& g) {
  if (static_cast<int>(g.size()) != s.size())
    throw Error(ErrorKind::InvalidArgument, "g has wrong size");
  return base_average(s, [&](int o) { return g[o]; });
}

std::vector<int> cycle_starts(const BaseSystem& system) {
  std::vector<char> seen(system.size(), 0);
  std::vector<int> out;
  for (int o = 0; o < system.size(); ++o) {
    if (seen[o]) continue;
    int x = o;
    do {
      seen[x] = 1;
      x = system.step(x);
    } while (x != o);
    out.push_back(o);
  }
  return out;
}

}  // namespace rtm
