#include "rtm/shift.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "rtm/error.hpp"

namespace rtm {

AdjacencySpec AdjacencySpec::full(int alphabet) {
  AdjacencySpec s;
  s.kind = Generator::Full;
  s.alphabet = alphabet;
  return s;
}

AdjacencySpec AdjacencySpec::band_rule(int k, int alphabet) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "band width must be >= 1");
  AdjacencySpec s;
  s.kind = Generator::Band;
  s.band = k;
  s.alphabet = alphabet;
  return s;
}

AdjacencySpec AdjacencySpec::golden() {
  AdjacencySpec s;
  s.kind = Generator::Golden;
  s.alphabet = 2;
  return s;
}

AdjacencySpec AdjacencySpec::renewal(int alphabet) {
  AdjacencySpec s;
  s.kind = Generator::Renewal;
  s.alphabet = alphabet;
  return s;
}

AdjacencySpec AdjacencySpec::explicit_matrix(std::vector<std::vector<int>> m) {
  if (m.empty() || m[0].empty()) throw Error(ErrorKind::InvalidArgument, "empty adjacency");
  for (const auto& row : m) {
    if (row.size() != m[0].size()) throw Error(ErrorKind::InvalidArgument, "ragged adjacency");
    for (int v : row)
      if (v != 0 && v != 1) throw Error(ErrorKind::InvalidArgument, "adjacency entries must be 0/1");
  }
  AdjacencySpec s;
  s.kind = Generator::Explicit;
  s.alphabet = static_cast<int>(m.size());
  s.matrix = std::move(m);
  return s;
}

bool AdjacencySpec::allows(int i, int j) const {
  if (i < 0 || j < 0) return false;
  switch (kind) {
    case Generator::Explicit:
      return i < static_cast<int>(matrix.size()) && j < static_cast<int>(matrix[i].size()) &&
             matrix[i][j] == 1;
    case Generator::Full: return true;
    case Generator::Band: return j >= i && j <= i + band;
    case Generator::Golden: return !(i == 1 && j == 1);
    case Generator::Renewal: return i == 0 || j == i - 1;
  }
  return false;
}

std::string AdjacencySpec::name() const {
  switch (kind) {
    case Generator::Explicit: return "explicit";
    case Generator::Full: return "full";
    case Generator::Band: return "band(" + std::to_string(band) + ")";
    case Generator::Golden: return "golden";
    case Generator::Renewal: return "renewal";
  }
  return "unknown";
}

bool AdjacencySpec::tail_images_sound(const std::vector<int>& images) const {
  if (!countable()) return true;
  // a symbol beyond the cut must reach the image set in one step
  return kind == Generator::Full && !images.empty();
}

bool AdjacencySpec::tail_preimages_sound(const std::vector<int>& preimages) const {
  if (!countable()) return true;
  bool has0 = std::find(preimages.begin(), preimages.end(), 0) != preimages.end();
  if (kind == Generator::Full) return !preimages.empty();
  if (kind == Generator::Renewal) return has0;
  return false;
}

RandomShift::RandomShift(BaseSystem base, std::vector<AdjacencySpec> envs, int truncation)
    : base_(std::move(base)), envs_(std::move(envs)), truncation_(truncation) {
  if (envs_.empty()) throw Error(ErrorKind::InvalidArgument, "no environments");
  int n = base_.size();
  for (int o = 0; o < n; ++o)
    if (envs_.size() > 1 && base_.label(o) >= static_cast<int>(envs_.size()))
      throw Error(ErrorKind::InvalidArgument, "state label has no environment");
  sizes_.resize(n);
  for (int o = 0; o < n; ++o) {
    const AdjacencySpec& s = spec(o);
    if (s.countable()) {
      if (truncation_ < 1)
        throw Error(ErrorKind::InvalidArgument, "countable alphabet needs a truncation level");
      sizes_[o] = truncation_;
    } else {
      sizes_[o] = s.alphabet;
      if (s.kind == Generator::Golden) sizes_[o] = 2;
    }
    if (sizes_[o] < 1) throw Error(ErrorKind::InvalidArgument, "alphabet must be nonempty");
  }
  adj_.resize(n);
  for (int o = 0; o < n; ++o) {
    const AdjacencySpec& s = spec(o);
    int rows = sizes_[o], cols = sizes_[base_.step(o)];
    if (s.kind == Generator::Explicit && static_cast<int>(s.matrix[0].size()) != cols)
      throw Error(ErrorKind::InvalidArgument,
                  "adjacency columns do not match the next alphabet at state " + std::to_string(o));
    adj_[o] = Eigen::MatrixXi::Zero(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) adj_[o](i, j) = s.allows(i, j) ? 1 : 0;
      if (adj_[o].row(i).sum() == 0)
        throw Error(ErrorKind::InvalidArgument, "symbol " + std::to_string(i) + " at state " +
                                                    std::to_string(o) + " has no successor");
    }
  }
}

const AdjacencySpec& RandomShift::spec(int omega) const {
  return envs_.size() == 1 ? envs_[0] : envs_[base_.label(omega)];
}

int RandomShift::max_alphabet() const { return *std::max_element(sizes_.begin(), sizes_.end()); }

bool RandomShift::any_countable() const {
  for (int o = 0; o < base_.size(); ++o)
    if (countable(o)) return true;
  return false;
}

bool RandomShift::allowed(int omega, int i, int j) const {
  const auto& m = adj_[omega];
  return i >= 0 && j >= 0 && i < m.rows() && j < m.cols() && m(i, j) == 1;
}

std::vector<int> RandomShift::successors(int omega, int i) const {
  std::vector<int> out;
  const auto& m = adj_[omega];
  if (i < 0 || i >= m.rows()) return out;
  for (int j = 0; j < m.cols(); ++j)
    if (m(i, j)) out.push_back(j);
  return out;
}

bool is_admissible(const RandomShift& shift, int omega, const Symbols& w) {
  if (w.empty()) return true;
  if (w[0] < 0 || w[0] >= shift.alphabet(omega)) return false;
  int o = omega;
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (!shift.allowed(o, w[i], w[i + 1])) return false;
    o = shift.base().step(o);
  }
  return true;
}

double count_words(const RandomShift& shift, int omega, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "word length must be >= 1");
  Eigen::VectorXd c = Eigen::VectorXd::Ones(shift.alphabet(omega));
  int o = omega;
  for (int i = 1; i < n; ++i) {
    c = shift.adjacency(o).cast<double>().transpose() * c;
    o = shift.base().step(o);
  }
  return c.sum();
}

namespace {

void enumerate(const RandomShift& shift, int omega, int n, int first, int last_to,
               std::vector<Word>& out) {
  Symbols w;
  w.reserve(n);
  std::vector<int> states(n);
  states[0] = omega;
  for (int i = 1; i < n; ++i) states[i] = shift.base().step(states[i - 1]);
  int tail_state = n >= 1 ? states[n - 1] : omega;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      if (last_to >= 0 && !shift.allowed(tail_state, w.back(), last_to)) return;
      out.push_back(Word{omega, w});
      return;
    }
    if (i == 0) {
      for (int s = 0; s < shift.alphabet(omega); ++s) {
        if (first >= 0 && s != first) continue;
        w.push_back(s);
        rec(1);
        w.pop_back();
      }
      return;
    }
    for (int s : shift.successors(states[i - 1], w.back())) {
      w.push_back(s);
      rec(i + 1);
      w.pop_back();
    }
  };
  rec(0);
}

}  // namespace

std::vector<Word> admissible_words(const RandomShift& shift, int omega, int n, long long cap) {
  double count = count_words(shift, omega, n);
  if (count > static_cast<double>(cap))
    throw Error(ErrorKind::Overflow, "word count " + std::to_string(count) + " exceeds cap");
  std::vector<Word> out;
  out.reserve(static_cast<size_t>(count));
  enumerate(shift, omega, n, -1, -1, out);
  return out;
}

std::vector<Word> words_between(const RandomShift& shift, int omega, int n, int a, int b,
                                long long cap) {
  if (a < 0 || a >= shift.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "symbol a outside the alphabet");
  int end = advance(shift.base(), omega, n);
  if (b < 0 || b >= shift.alphabet(end))
    throw Error(ErrorKind::InvalidArgument, "symbol b outside the alphabet");
  double count = count_words(shift, omega, n);
  if (count > static_cast<double>(cap))
    throw Error(ErrorKind::Overflow, "word count exceeds cap");
  std::vector<Word> out;
  enumerate(shift, omega, n, a, b, out);
  return out;
}

StateSet omega_set(const RandomShift& shift, const Symbols& a) {
  StateSet out;
  for (int o = 0; o < shift.base().size(); ++o)
    if (is_admissible(shift, o, a)) out.push_back(o);
  return out;
}

namespace {

MixingTime finish(const std::vector<char>& applies, const std::vector<char>& ok, int horizon) {
  int last_fail = 0;
  for (int n = 1; n <= horizon; ++n)
    if (applies[n] && !ok[n]) last_fail = n;
  MixingTime r;
  r.horizon = horizon;
  r.N = last_fail + 1;
  r.mixed = r.N <= horizon;
  return r;
}

}  // namespace

MixingTime mixing_time(const RandomShift& shift, int omega, int a, int b, int horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  if (a < 0 || a >= shift.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "symbol a outside the alphabet");
  const BaseSystem& base = shift.base();
  std::vector<char> applies(horizon + 1, 0), ok(horizon + 1, 0);
  std::vector<char> reach(shift.alphabet(omega), 0);
  reach[a] = 1;
  int prev = omega;  // state of the last symbol of the word
  for (int n = 1; n <= horizon; ++n) {
    int cur = base.step(prev);
    applies[n] = b < shift.alphabet(cur);
    for (int c = 0; c < static_cast<int>(reach.size()) && applies[n]; ++c)
      if (reach[c] && shift.allowed(prev, c, b)) {
        ok[n] = 1;
        break;
      }
    std::vector<char> next(shift.alphabet(cur), 0);
    for (int c = 0; c < static_cast<int>(reach.size()); ++c)
      if (reach[c])
        for (int d : shift.successors(prev, c)) next[d] = 1;
    reach.swap(next);
    prev = cur;
  }
  return finish(applies, ok, horizon);
}

MixingTime backward_mixing_time(const RandomShift& shift, int omega, int c, int a, int horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  if (a < 0 || a >= shift.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "symbol a outside the alphabet");
  const BaseSystem& base = shift.base();
  std::vector<char> applies(horizon + 1, 0), ok(horizon + 1, 0);
  // symbols at theta^{-n} omega that reach a at omega in n steps
  int st = base.step_inverse(omega);
  std::vector<char> back(shift.alphabet(st), 0);
  for (int x = 0; x < shift.alphabet(st); ++x) back[x] = shift.allowed(st, x, a);
  for (int n = 1; n <= horizon; ++n) {
    applies[n] = c < shift.alphabet(st);
    ok[n] = applies[n] && back[c];
    int pst = base.step_inverse(st);
    std::vector<char> prev(shift.alphabet(pst), 0);
    for (int x = 0; x < shift.alphabet(pst); ++x)
      for (int y : shift.successors(pst, x))
        if (back[y]) {
          prev[x] = 1;
          break;
        }
    back.swap(prev);
    st = pst;
  }
  return finish(applies, ok, horizon);
}

namespace {

std::vector<int> union_of(const std::vector<std::vector<int>>& sets) {
  std::set<int> u;
  for (const auto& s : sets) u.insert(s.begin(), s.end());
  return {u.begin(), u.end()};
}

bool covers_images(const RandomShift& shift, int omega, const std::vector<int>& I, int a) {
  int p = shift.base().step_inverse(omega);
  for (int b : I)
    if (shift.allowed(p, a, b)) return true;
  return false;
}

bool covers_preimages(const RandomShift& shift, int omega, const std::vector<int>& I, int a) {
  int p = shift.base().step_inverse(omega);
  for (int b : I)
    if (shift.allowed(p, b, a)) return true;
  return false;
}

}  // namespace

std::vector<int> BipCertificate::global_bi() const { return union_of(images); }
std::vector<int> BipCertificate::global_bp() const { return union_of(preimages); }

void BipCertificate::validate(const RandomShift& shift) const {
  const BaseSystem& base = shift.base();
  int n = base.size();
  if (static_cast<int>(images.size()) != n || static_cast<int>(preimages.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "certificate sets must be given per state");
  if (omega_bi.empty() || omega_bp.empty() || set_weight(base, omega_bi) <= 0.0 ||
      set_weight(base, omega_bp) <= 0.0)
    throw Error(ErrorKind::InvalidArgument, "certificate base sets need positive weight");
  for (int o : omega_bi) {
    if (o < 0 || o >= n) throw Error(ErrorKind::InvalidArgument, "state out of range");
    if (images[o].empty()) throw Error(ErrorKind::InvalidArgument, "empty image set");
    for (int b : images[o])
      if (b < 0 || b >= shift.alphabet(o))
        throw Error(ErrorKind::InvalidArgument, "image symbol outside the alphabet");
  }
  for (int o : omega_bp) {
    if (o < 0 || o >= n) throw Error(ErrorKind::InvalidArgument, "state out of range");
    if (preimages[o].empty()) throw Error(ErrorKind::InvalidArgument, "empty preimage set");
    for (int b : preimages[o])
      if (b < 0 || b >= shift.alphabet(base.step_inverse(o)))
        throw Error(ErrorKind::InvalidArgument, "preimage symbol outside the alphabet");
  }
}

BipCertificate BipCertificate::uniform(const RandomShift& shift, std::vector<int> images,
                                       std::vector<int> preimages) {
  BipCertificate c;
  int n = shift.base().size();
  c.omega_bi = all_states(shift.base());
  c.omega_bp = c.omega_bi;
  c.images.assign(n, images);
  c.preimages.assign(n, preimages);
  return c;
}

BipReport verify_bip(const RandomShift& shift, const BipCertificate& cert) {
  cert.validate(shift);
  const BaseSystem& base = shift.base();
  BipReport r;
  r.truncation = shift.truncation();
  r.weight_bi = set_weight(base, cert.omega_bi);
  r.weight_bp = set_weight(base, cert.omega_bp);
  bool tail_sound = true;
  for (int o : cert.omega_bi) {
    int p = base.step_inverse(o);
    for (int a = 0; a < shift.alphabet(p); ++a)
      if (!covers_images(shift, o, cert.images[o], a)) r.image_failures.push_back({o, a});
    tail_sound = tail_sound && shift.spec(p).tail_images_sound(cert.images[o]);
  }
  for (int o : cert.omega_bp) {
    int p = base.step_inverse(o);
    for (int a = 0; a < shift.alphabet(o); ++a)
      if (!covers_preimages(shift, o, cert.preimages[o], a)) r.preimage_failures.push_back({o, a});
    tail_sound = tail_sound && shift.spec(p).tail_preimages_sound(cert.preimages[o]);
  }
  r.images_ok = r.image_failures.empty();
  r.preimages_ok = r.preimage_failures.empty();
  if (r.ok() && !tail_sound)
    throw Error(ErrorKind::TruncationUnsound,
                "certificate holds below L=" + std::to_string(shift.truncation()) +
                    " but the generator cannot guarantee symbols beyond it");
  return r;
}

namespace {

// smallest lexicographic subset of [0, n) of size <= max_size passing pred
std::optional<std::vector<int>> smallest_subset(int n, int max_size,
                                                const std::function<bool(const std::vector<int>&)>& pred) {
  for (int k = 1; k <= std::min(max_size, n); ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (pred(idx)) return idx;
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<BipCertificate> search_bip_certificate(const RandomShift& shift, int max_size) {
  const BaseSystem& base = shift.base();
  int n = base.size();
  BipCertificate c;
  c.images.assign(n, {});
  c.preimages.assign(n, {});
  for (int o = 0; o < n; ++o) {
    int p = base.step_inverse(o);
    auto img = smallest_subset(shift.alphabet(o), max_size, [&](const std::vector<int>& I) {
      for (int a = 0; a < shift.alphabet(p); ++a)
        if (!covers_images(shift, o, I, a)) return false;
      return true;
    });
    if (img) {
      c.omega_bi.push_back(o);
      c.images[o] = *img;
    }
    auto pre = smallest_subset(shift.alphabet(p), max_size, [&](const std::vector<int>& I) {
      for (int a = 0; a < shift.alphabet(o); ++a)
        if (!covers_preimages(shift, o, I, a)) return false;
      return true;
    });
    if (pre) {
      c.omega_bp.push_back(o);
      c.preimages[o] = *pre;
    }
  }
  if (c.omega_bi.empty() || c.omega_bp.empty()) return std::nullopt;
  return c;
}

int alpha_of(const RandomShift& shift, const BipCertificate& cert, int omega, int a, int horizon) {
  const BaseSystem& base = shift.base();
  if (a < 0 || a >= shift.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "state is not in Omega_a");
  int N = 1;
  for (int c : cert.global_bp()) {
    MixingTime m = mixing_time(shift, omega, a, c, horizon);
    if (!m.mixed)
      throw Error(ErrorKind::NotMixedWithinHorizon, "N_ac not certified for c=" + std::to_string(c));
    N = std::max(N, m.N);
  }
  for (int n = N; n <= N + base.size(); ++n)
    if (contains(cert.omega_bp, advance(base, omega, n))) return n;
  throw Error(ErrorKind::NoReturn, "no return to Omega_bp");
}

int beta_of(const RandomShift& shift, const BipCertificate& cert, int omega, int a, int horizon) {
  const BaseSystem& base = shift.base();
  if (a < 0 || a >= shift.alphabet(omega))
    throw Error(ErrorKind::InvalidArgument, "state is not in Omega_a");
  int N = 1;
  for (int c : cert.global_bi()) {
    MixingTime m = backward_mixing_time(shift, omega, c, a, horizon);
    if (!m.mixed)
      throw Error(ErrorKind::NotMixedWithinHorizon,
                  "backward mixing not certified for c=" + std::to_string(c));
    N = std::max(N, m.N);
  }
  for (int n = N; n <= N + base.size(); ++n)
    if (contains(cert.omega_bi, advance(base, omega, -n))) return n;
  throw Error(ErrorKind::NoReturn, "no return to Omega_bi");
}

AlphaBeta alpha_beta(const RandomShift& shift, const BipCertificate& cert, int omega, int a,
                     int horizon) {
  return {alpha_of(shift, cert, omega, a, horizon), beta_of(shift, cert, omega, a, horizon)};
}

}  // namespace rtm
