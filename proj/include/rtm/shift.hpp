#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rtm/base.hpp"

namespace rtm {

enum class Generator { Explicit, Full, Band, Golden, Renewal };

// Adjacency rule of one environment.  alphabet == 0 marks a countable
// alphabet, which is cut at the shift's truncation level.
struct AdjacencySpec {
  Generator kind = Generator::Full;
  int alphabet = 2;
  int band = 1;
  std::vector<std::vector<int>> matrix;

  static AdjacencySpec full(int alphabet);
  static AdjacencySpec band_rule(int k, int alphabet);
  static AdjacencySpec golden();
  static AdjacencySpec renewal(int alphabet);
  static AdjacencySpec explicit_matrix(std::vector<std::vector<int>> m);

  bool countable() const { return kind != Generator::Explicit && alphabet == 0; }
  bool allows(int i, int j) const;
  std::string name() const;
  // Whether symbols >= L can break a certificate whose sets lie below L.
  bool tail_images_sound(const std::vector<int>& images) const;
  bool tail_preimages_sound(const std::vector<int>& preimages) const;
};

class RandomShift {
 public:
  // envs is indexed by environment label; a single entry is used everywhere.
  RandomShift(BaseSystem base, std::vector<AdjacencySpec> envs, int truncation = 0);

  const BaseSystem& base() const { return base_; }
  int alphabet(int omega) const { return sizes_[omega]; }
  int max_alphabet() const;
  int truncation() const { return truncation_; }
  bool countable(int omega) const { return spec(omega).countable(); }
  bool any_countable() const;
  const AdjacencySpec& spec(int omega) const;
  // alpha_ij(omega); false when i or j is outside the truncated alphabets
  bool allowed(int omega, int i, int j) const;
  // alphabet(omega) x alphabet(theta omega) 0/1 matrix
  const Eigen::MatrixXi& adjacency(int omega) const { return adj_[omega]; }
  std::vector<int> successors(int omega, int i) const;

 private:
  BaseSystem base_;
  std::vector<AdjacencySpec> envs_;
  int truncation_;
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXi> adj_;
};

using Symbols = std::vector<int>;

struct Word {
  int omega = 0;
  Symbols symbols;
  int size() const { return static_cast<int>(symbols.size()); }
};

constexpr long long default_word_cap = 10'000'000;

bool is_admissible(const RandomShift& shift, int omega, const Symbols& w);
double count_words(const RandomShift& shift, int omega, int n);
std::vector<Word> admissible_words(const RandomShift& shift, int omega, int n,
                                   long long cap = default_word_cap);
std::vector<Word> words_between(const RandomShift& shift, int omega, int n, int a, int b,
                                long long cap = default_word_cap);
StateSet omega_set(const RandomShift& shift, const Symbols& a);

struct MixingTime {
  bool mixed = false;
  int N = 0;        // valid when mixed; certified only up to horizon
  int horizon = 0;
};

// forward: W_n^omega(a,b) nonempty for all N <= n <= horizon with theta^n omega in Omega_b
MixingTime mixing_time(const RandomShift& shift, int omega, int a, int b, int horizon);
// backward: W_n^{theta^-n omega}(c,a) nonempty for all N <= n <= horizon with
// theta^-n omega in Omega_c
MixingTime backward_mixing_time(const RandomShift& shift, int omega, int c, int a, int horizon);

struct BipCertificate {
  StateSet omega_bi;
  std::vector<std::vector<int>> images;     // per state, subset of W^1_omega
  StateSet omega_bp;
  std::vector<std::vector<int>> preimages;  // per state, subset of W^1_{theta^-1 omega}

  std::vector<int> global_bi() const;
  std::vector<int> global_bp() const;
  void validate(const RandomShift& shift) const;
  static BipCertificate uniform(const RandomShift& shift, std::vector<int> images,
                                std::vector<int> preimages);
};

struct BipWitness {
  int omega;
  int a;
};

struct BipReport {
  bool images_ok = false;
  bool preimages_ok = false;
  std::vector<BipWitness> image_failures;
  std::vector<BipWitness> preimage_failures;
  int truncation = 0;
  double weight_bi = 0.0;
  double weight_bp = 0.0;
  bool ok() const { return images_ok && preimages_ok; }
};

BipReport verify_bip(const RandomShift& shift, const BipCertificate& cert);

// Smallest certificate with per-state sets of size <= max_size over the
// truncated alphabet, Omega_bi = Omega_bp = all states; lexicographic tie-break.
std::optional<BipCertificate> search_bip_certificate(const RandomShift& shift, int max_size = 4);

struct AlphaBeta {
  int alpha = 0;
  int beta = 0;
};

AlphaBeta alpha_beta(const RandomShift& shift, const BipCertificate& cert, int omega, int a,
                     int horizon);
int alpha_of(const RandomShift& shift, const BipCertificate& cert, int omega, int a, int horizon);
int beta_of(const RandomShift& shift, const BipCertificate& cert, int omega, int a, int horizon);

}  // namespace rtm
