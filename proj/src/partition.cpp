// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/partition.hpp"

#include <cmath>

#include "fairdiv/errors.hpp"

namespace fairdiv {

LabelDimension::LabelDimension(std::string name, std::vector<int> labels,
                               int num_parts,
                               std::vector<std::string> part_names)
    : name_(std::move(name)),
      labels_(std::move(labels)),
      num_parts_(num_parts),
      part_names_(std::move(part_names)) {
  if (num_parts_ < 1) {
    throw InputError("dimension '" + name_ + "' must have at least one part");
  }
  if (labels_.empty()) {
    throw InputError("dimension '" + name_ + "' has no labels");
  }
  for (int label : labels_) {
    if (label < 0 || label >= num_parts_) {
      throw InputError("dimension '" + name_ + "' has label " +
                       std::to_string(label) + " outside [0, " +
                       std::to_string(num_parts_) + ")");
    }
  }
  if (part_names_.empty()) {
    for (int p = 0; p < num_parts_; ++p) {
      part_names_.push_back(name_ + std::to_string(p));
    }
  }
  if (static_cast<int>(part_names_.size()) != num_parts_) {
    throw InputError("dimension '" + name_ + "' part name count mismatch");
  }
}

std::vector<std::vector<int>> LabelDimension::part_members() const {
  std::vector<std::vector<int>> members(num_parts_);
  for (int i = 0; i < n(); ++i) {
    members[labels_[i]].push_back(i);
  }
  return members;
}

std::vector<int> LabelDimension::part_sizes() const {
  std::vector<int> sizes(num_parts_, 0);
  for (int label : labels_) ++sizes[label];
  return sizes;
}

std::vector<int> LabelDimension::count_by_part(const Subset& s) const {
  std::vector<int> counts(num_parts_, 0);
  for (int id : s.items) {
    if (id < 0 || id >= n()) {
      throw InputError("subset index " + std::to_string(id) +
                       " out of range for dimension '" + name_ + "'");
    }
    ++counts[labels_[id]];
  }
  return counts;
}

QuotaConstraint::QuotaConstraint(LabelDimension dimension,
                                 std::vector<int> quotas)
    : dimension_(std::move(dimension)), quotas_(std::move(quotas)), k_(0) {
  if (static_cast<int>(quotas_.size()) != dimension_.num_parts()) {
    throw InputError("quota vector length " + std::to_string(quotas_.size()) +
                     " does not match part count " +
                     std::to_string(dimension_.num_parts()));
  }
  const std::vector<int> sizes = dimension_.part_sizes();
  for (int p = 0; p < dimension_.num_parts(); ++p) {
    if (quotas_[p] < 0) {
      throw InputError("quota for part '" + dimension_.part_names()[p] +
                       "' is negative");
    }
    if (quotas_[p] > sizes[p]) {
      throw InfeasibleError("quota " + std::to_string(quotas_[p]) +
                            " for part '" + dimension_.part_names()[p] +
                            "' exceeds part size " + std::to_string(sizes[p]));
    }
    k_ += quotas_[p];
  }
}

bool QuotaConstraint::satisfied_by(const Subset& s) const {
  const std::vector<int> counts = dimension_.count_by_part(s);
  for (int p = 0; p < dimension_.num_parts(); ++p) {
    if (counts[p] != quotas_[p]) return false;
  }
  return true;
}

double fairness_entropy(const Subset& s, const LabelDimension& dim) {
  if (s.empty()) {
    throw InputError("fairness entropy is undefined for an empty subset");
  }
  const std::vector<int> counts = dim.count_by_part(s);
  const double size = static_cast<double>(s.k());
  double entropy = 0.0;
  for (int c : counts) {
    if (c == 0) continue;
    const double share = c / size;
    entropy -= share * std::log2(share);
  }
  return entropy;
}

double effective_diversity(const Subset& s, const LabelDimension& dim) {
  return std::exp2(fairness_entropy(s, dim));
}

LogDet geometric_diversity(const Subset& s, const Kernel& kernel) {
  return log_det_submatrix(kernel, s);
}

bool check_quota(const Subset& s, const QuotaConstraint& quota) {
  return quota.satisfied_by(s);
}

}  // namespace fairdiv
