// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_PARTITION_HPP
#define FAIRDIV_PARTITION_HPP

#include <string>
#include <vector>

#include "fairdiv/kernel.hpp"
#include "fairdiv/subset.hpp"

namespace fairdiv {

// One categorical label per item, inducing a partition into `num_parts`
// parts. Part ids are 0-based; `part_names` is aligned with part ids.
class LabelDimension {
 public:
  LabelDimension(std::string name, std::vector<int> labels, int num_parts,
                 std::vector<std::string> part_names = {});

  const std::string& name() const { return name_; }
  int n() const { return static_cast<int>(labels_.size()); }
  int num_parts() const { return num_parts_; }
  int label(int item) const { return labels_[item]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& part_names() const { return part_names_; }

  // Item ids of each part, ascending.
  std::vector<std::vector<int>> part_members() const;
  std::vector<int> part_sizes() const;

  // Counts of S's items per part.
  std::vector<int> count_by_part(const Subset& s) const;

 private:
  std::string name_;
  std::vector<int> labels_;
  int num_parts_;
  std::vector<std::string> part_names_;
};

// Per-part required counts (k_1, ..., k_p) over one dimension; k = sum k_i.
class QuotaConstraint {
 public:
  // Throws InfeasibleError when some k_i exceeds its part size.
  QuotaConstraint(LabelDimension dimension, std::vector<int> quotas);

  const LabelDimension& dimension() const { return dimension_; }
  const std::vector<int>& quotas() const { return quotas_; }
  int k() const { return k_; }

  bool satisfied_by(const Subset& s) const;

 private:
  LabelDimension dimension_;
  std::vector<int> quotas_;
  int k_;
};

// Shannon entropy (bits) of the subset's part-proportion vector; 0 log 0 = 0.
// Range [0, log2 p]. Throws InputError on empty S.
double fairness_entropy(const Subset& s, const LabelDimension& dim);

// 2^entropy: the effective number of parts, in [1, p].
double effective_diversity(const Subset& s, const LabelDimension& dim);

// ln G(S) = ln det(K_{S,S}).
LogDet geometric_diversity(const Subset& s, const Kernel& kernel);

// True iff |S intersect X_i| = k_i for every part i.
bool check_quota(const Subset& s, const QuotaConstraint& quota);

}  // namespace fairdiv

#endif  // FAIRDIV_PARTITION_HPP
