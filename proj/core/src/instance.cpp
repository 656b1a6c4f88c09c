#include "fbai/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fbai {

Instance::Instance(std::vector<double> means, std::string label)
    : means_(std::move(means)), label_(std::move(label)) {
  if (means_.size() < 2) {
    throw std::invalid_argument("instance needs at least 2 arms, got " +
                                std::to_string(means_.size()));
  }
  for (std::size_t k = 0; k < means_.size(); ++k) {
    const double m = means_[k];
    if (!(m >= 0.0 && m <= 1.0)) {
      throw std::invalid_argument("mean of arm " + std::to_string(k + 1) +
                                  " is outside [0,1]");
    }
  }
  best_ = static_cast<std::size_t>(
      std::distance(means_.begin(), std::max_element(means_.begin(), means_.end())));
  const auto ties = std::count(means_.begin(), means_.end(), means_[best_]);
  if (ties > 1) {
    throw std::invalid_argument("tied maximum mean: the best arm must be unique");
  }
}

Instance make_instance(std::vector<double> means, std::string label) {
  return Instance(std::move(means), std::move(label));
}

double SortedInstance::mu(std::size_t k) const {
  const std::size_t K = sorted_means.size();
  if (k == K + 1) return 0.0;
  if (k < 1 || k > K + 1) {
    throw std::out_of_range("SortedInstance::mu: index " + std::to_string(k) +
                            " outside 1..K+1");
  }
  return sorted_means[k - 1];
}

std::vector<double> SortedInstance::original_means() const {
  std::vector<double> out(sorted_means.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = sorted_means[i];
  return out;
}

SortedInstance sort_desc(const Instance& inst) {
  const auto means = inst.means();
  SortedInstance s;
  s.perm.resize(means.size());
  std::iota(s.perm.begin(), s.perm.end(), std::size_t{0});
  std::stable_sort(s.perm.begin(), s.perm.end(),
                   [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
  s.sorted_means.reserve(means.size());
  for (std::size_t idx : s.perm) s.sorted_means.push_back(means[idx]);
  return s;
}

SortedInstance sorted_instance(std::vector<double> means) {
  return sort_desc(Instance(std::move(means)));
}

}  // namespace fbai
