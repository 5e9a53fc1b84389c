#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace thermo {

/// A finite word over {0, ..., k-1}.
using Word = std::vector<int>;

/// 0/1 transition matrix, row-major, entry (i, j) = A[i * k + j].
using TransitionMatrix = std::vector<std::vector<int>>;

/// Throws EmptyRowOrColumn / NotIrreducibleAperiodic / ValidationError.
/// Primitivity is decided by positivity of some A^p with p <= k^2 + 1.
void validate_subshift(const TransitionMatrix& A);

/// One-sided subshift of finite type. Immutable; validated on construction.
class Subshift {
public:
  explicit Subshift(const TransitionMatrix& A);

  static Subshift full(int k);

  int k() const { return k_; }
  bool allowed(int from, int to) const { return A_[static_cast<std::size_t>(from * k_ + to)] != 0; }
  TransitionMatrix matrix() const;

  /// All j with A(j, first) = 1, ascending.
  const std::vector<int>& preimage_symbols(int first) const;
  /// All j with A(i, j) = 1, ascending.
  const std::vector<int>& successors(int i) const;

  bool admissible(std::span<const int> w) const;

  /// Lexicographic enumeration of the admissible words of length n.
  void for_each_word(int n, const std::function<void(std::span<const int>)>& visit) const;
  std::vector<Word> admissible_words(int n) const;

  /// Entry sum of A^{n-1}; saturates at UINT64_MAX.
  std::uint64_t count_words(int n) const;

  bool operator==(const Subshift& other) const { return k_ == other.k_ && A_ == other.A_; }

private:
  int k_;
  std::vector<std::uint8_t> A_;
  std::vector<int> symbols_;
  std::vector<std::vector<int>> preimages_;
  std::vector<std::vector<int>> successors_;
};

/// Dense index of the admissible words of a fixed length, in lexicographic order.
class WordTable {
public:
  WordTable(const Subshift& shift, int depth);

  int depth() const { return depth_; }
  std::size_t size() const { return words_.size(); }
  const Word& word(std::size_t i) const { return words_[i]; }
  const std::vector<Word>& words() const { return words_; }

  /// Index of the admissible word formed by the first depth() symbols of w, or -1.
  std::ptrdiff_t index_of(std::span<const int> w) const;

private:
  int depth_;
  int k_;
  std::vector<Word> words_;
  std::vector<std::int32_t> code_to_index_;
};

/// d_theta(x, y) = theta^(length of common prefix).
class ThetaMetric {
public:
  explicit ThetaMetric(double theta);
  double theta() const { return theta_; }
  double distance(std::span<const int> w1, std::span<const int> w2) const;

private:
  double theta_;
};

/// Free-function form of ThetaMetric::distance.
double d_theta(const ThetaMetric& m, std::span<const int> w1, std::span<const int> w2);

/// Length of the longest common prefix.
int common_prefix(std::span<const int> w1, std::span<const int> w2);

}  // namespace thermo
