#include "thermo/subshift.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "thermo/errors.hpp"

namespace thermo {

namespace {

using BoolMatrix = std::vector<std::uint8_t>;

BoolMatrix bool_product(const BoolMatrix& x, const BoolMatrix& y, int k) {
  BoolMatrix out(x.size(), 0);
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < k; ++l) {
      if (!x[i * k + l]) continue;
      for (int j = 0; j < k; ++j)
        if (y[l * k + j]) out[i * k + j] = 1;
    }
  return out;
}

}  // namespace

void validate_subshift(const TransitionMatrix& A) {
  const int k = static_cast<int>(A.size());
  if (k < 2) throw ValidationError("alphabet size must be at least 2, got " + std::to_string(k));
  BoolMatrix flat(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(A[i].size()) != k)
      throw ValidationError("transition matrix row " + std::to_string(i) + " has " +
                            std::to_string(A[i].size()) + " entries, expected " + std::to_string(k));
    for (int j = 0; j < k; ++j) {
      if (A[i][j] != 0 && A[i][j] != 1)
        throw ValidationError("transition matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not 0/1");
      flat[i * k + j] = static_cast<std::uint8_t>(A[i][j]);
    }
  }
  for (int i = 0; i < k; ++i) {
    bool row = false, col = false;
    for (int j = 0; j < k; ++j) {
      row = row || flat[i * k + j];
      col = col || flat[j * k + i];
    }
    if (!row) throw EmptyRowOrColumn("EmptyRowOrColumn: row " + std::to_string(i) + " has no allowed transition");
    if (!col) throw EmptyRowOrColumn("EmptyRowOrColumn: column " + std::to_string(i) + " has no allowed transition");
  }

  const int max_power = k * k + 1;
  BoolMatrix power = flat;
  for (int p = 1; p <= max_power; ++p) {
    bool positive = true;
    for (auto e : power) positive = positive && e;
    if (positive) return;
    power = bool_product(power, flat, k);
  }
  throw NotIrreducibleAperiodic("NotIrreducibleAperiodic: A^p has a zero entry for every p <= " +
                                std::to_string(max_power));
}

Subshift::Subshift(const TransitionMatrix& A) : k_(static_cast<int>(A.size())) {
  validate_subshift(A);
  A_.resize(static_cast<std::size_t>(k_ * k_));
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) A_[i * k_ + j] = static_cast<std::uint8_t>(A[i][j]);
  preimages_.resize(k_);
  successors_.resize(k_);
  for (int i = 0; i < k_; ++i) symbols_.push_back(i);
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) {
      if (allowed(j, i)) preimages_[i].push_back(j);
      if (allowed(i, j)) successors_[i].push_back(j);
    }
}

Subshift Subshift::full(int k) {
  return Subshift(TransitionMatrix(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 1)));
}

TransitionMatrix Subshift::matrix() const {
  TransitionMatrix out(k_, std::vector<int>(k_));
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) out[i][j] = allowed(i, j) ? 1 : 0;
  return out;
}

const std::vector<int>& Subshift::preimage_symbols(int first) const {
  if (first < 0 || first >= k_) throw ValidationError("symbol " + std::to_string(first) + " out of alphabet");
  return preimages_[first];
}

const std::vector<int>& Subshift::successors(int i) const {
  if (i < 0 || i >= k_) throw ValidationError("symbol " + std::to_string(i) + " out of alphabet");
  return successors_[i];
}

bool Subshift::admissible(std::span<const int> w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0 || w[i] >= k_) return false;
    if (i + 1 < w.size() && (w[i + 1] < 0 || w[i + 1] >= k_ || !allowed(w[i], w[i + 1]))) return false;
  }
  return true;
}

void Subshift::for_each_word(int n, const std::function<void(std::span<const int>)>& visit) const {
  if (n < 1) throw ValidationError("word length must be >= 1");
  Word w(static_cast<std::size_t>(n));
  // iterative DFS; lexicographic because successors_ are ascending
  std::vector<std::size_t> cursor(static_cast<std::size_t>(n), 0);
  int depth = 0;
  while (depth >= 0) {
    const auto& choices = depth == 0 ? symbols_ : successors_[w[depth - 1]];
    if (cursor[depth] >= choices.size()) {
      cursor[depth] = 0;
      --depth;
      if (depth >= 0) ++cursor[depth];
      continue;
    }
    w[depth] = choices[cursor[depth]];
    if (depth + 1 == n) {
      visit(w);
      ++cursor[depth];
    } else {
      ++depth;
    }
  }
}

std::vector<Word> Subshift::admissible_words(int n) const {
  std::vector<Word> out;
  for_each_word(n, [&](std::span<const int> w) { out.emplace_back(w.begin(), w.end()); });
  return out;
}

std::uint64_t Subshift::count_words(int n) const {
  if (n < 1) throw ValidationError("word length must be >= 1");
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> ends(k_, 1);
  for (int step = 1; step < n; ++step) {
    std::vector<std::uint64_t> next(k_, 0);
    for (int i = 0; i < k_; ++i)
      for (int j : successors_[i]) next[j] = (next[j] > cap - ends[i]) ? cap : next[j] + ends[i];
    ends = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto c : ends) total = (total > cap - c) ? cap : total + c;
  return total;
}

WordTable::WordTable(const Subshift& shift, int depth) : depth_(depth), k_(shift.k()) {
  if (depth < 1) throw ValidationError("word depth must be >= 1");
  const double codes = std::pow(static_cast<double>(k_), depth);
  if (codes > static_cast<double>(1 << 26))
    throw TooLarge("word table k^depth = " + std::to_string(codes) + " exceeds 2^26");
  words_ = shift.admissible_words(depth);
  code_to_index_.assign(static_cast<std::size_t>(codes), -1);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::size_t code = 0;
    for (int s : words_[i]) code = code * static_cast<std::size_t>(k_) + static_cast<std::size_t>(s);
    code_to_index_[code] = static_cast<std::int32_t>(i);
  }
}

std::ptrdiff_t WordTable::index_of(std::span<const int> w) const {
  if (static_cast<int>(w.size()) < depth_) return -1;
  std::size_t code = 0;
  for (int i = 0; i < depth_; ++i) {
    if (w[i] < 0 || w[i] >= k_) return -1;
    code = code * static_cast<std::size_t>(k_) + static_cast<std::size_t>(w[i]);
  }
  return code_to_index_[code];
}

ThetaMetric::ThetaMetric(double theta) : theta_(theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0,1)");
}

int common_prefix(std::span<const int> w1, std::span<const int> w2) {
  const std::size_t n = std::min(w1.size(), w2.size());
  std::size_t i = 0;
  while (i < n && w1[i] == w2[i]) ++i;
  return static_cast<int>(i);
}

double ThetaMetric::distance(std::span<const int> w1, std::span<const int> w2) const {
  if (w1.size() != w2.size()) throw ValidationError("d_theta needs words of equal length");
  const int m = common_prefix(w1, w2);
  if (m == static_cast<int>(w1.size())) return 0.0;
  return std::pow(theta_, m);
}

double d_theta(const ThetaMetric& m, std::span<const int> w1, std::span<const int> w2) {
  return m.distance(w1, w2);
}

}  // namespace thermo
