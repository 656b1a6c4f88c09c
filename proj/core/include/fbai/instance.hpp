#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fbai {

/// A Bernoulli bandit problem: K >= 2 arm means in [0,1] with a unique
/// maximum.  Immutable once constructed; arms are indexed 0..K-1.
class Instance {
 public:
  /// Throws std::invalid_argument on K < 2, a mean outside [0,1] (or NaN),
  /// or a tied maximum.
  explicit Instance(std::vector<double> means, std::string label = {});

  std::size_t num_arms() const { return means_.size(); }
  std::span<const double> means() const { return means_; }
  double mean(std::size_t arm) const { return means_.at(arm); }
  std::size_t best_arm() const { return best_; }
  const std::string& label() const { return label_; }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::vector<double> means_;
  std::string label_;
  std::size_t best_ = 0;
};

Instance make_instance(std::vector<double> means, std::string label = {});

/// Means relabelled in decreasing order.  perm[i] is the original arm index
/// of sorted position i; ties among suboptimal arms keep ascending original
/// index.
struct SortedInstance {
  std::vector<double> sorted_means;
  std::vector<std::size_t> perm;

  std::size_t num_arms() const { return sorted_means.size(); }

  /// One-based access matching the textbook notation mu_1 > mu_2 >= ... >= mu_K,
  /// extended with mu_{K+1} = 0.
  double mu(std::size_t k) const;

  /// Means back in original arm order.
  std::vector<double> original_means() const;
};

SortedInstance sort_desc(const Instance& inst);

/// Convenience for tests and the CLI: validate then sort.
SortedInstance sorted_instance(std::vector<double> means);

}  // namespace fbai
