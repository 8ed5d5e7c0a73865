// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_ORACLE_HPP
#define FAIRDIV_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "fairdiv/kernel.hpp"
#include "fairdiv/partition.hpp"
#include "fairdiv/subset.hpp"

namespace fairdiv {

// Exact distribution over subsets for small instances. Support entries are
// distinct and sorted; probabilities are nonnegative and sum to one.
struct SubsetDistribution {
  std::vector<Subset> support;
  std::vector<double> probabilities;

  std::size_t size() const { return support.size(); }
  // Probability of s, zero when outside the support.
  double probability_of(const Subset& s) const;
};

// Refuses instances whose enumeration would exceed this many subsets.
inline constexpr std::uint64_t kEnumerationCap = 1'000'000;

// All k-subsets weighted by det(K_{S,S}); zero-determinant subsets keep
// probability zero. Throws InputError when C(n,k) exceeds the cap.
SubsetDistribution enumerate_kdpp(const Kernel& kernel, int k);

// Support restricted to quota-satisfying subsets, probabilities still
// proportional to det(K_{S,S}).
SubsetDistribution enumerate_pdpp(const Kernel& kernel,
                                  const QuotaConstraint& quota);

// The product distribution: per-part k_i-DPPs drawn independently.
SubsetDistribution enumerate_kidpp(const Kernel& kernel,
                                   const QuotaConstraint& quota);

// Half the L1 distance between the two distributions over unioned supports.
double tv_distance(const SubsetDistribution& a, const SubsetDistribution& b);

// Frequency-normalized distribution of drawn subsets.
SubsetDistribution empirical_distribution(const std::vector<Subset>& samples);

// Number of k-subsets of n items, saturating at the enumeration cap + 1.
std::uint64_t binomial_capped(int n, int k);

// Lexicographic combination walk; `combo` must hold k ascending indices
// below n. Returns false when no successor exists.
bool next_combination(std::vector<int>& combo, int n);

}  // namespace fairdiv

#endif  // FAIRDIV_ORACLE_HPP
