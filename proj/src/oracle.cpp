// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fairdiv/errors.hpp"

namespace fairdiv {

namespace {

// Normalizes weights given as log values, with singular entries (is_log
// false) pinned to probability zero. Uses log-sum-exp for stability.
std::vector<double> normalize_log_weights(const std::vector<double>& log_w,
                                          const std::vector<char>& finite) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    if (finite[i]) max_log = std::max(max_log, log_w[i]);
  }
  if (!std::isfinite(max_log)) {
    throw InfeasibleError(
        "degenerate kernel under quotas: every candidate subset is singular");
  }
  long double total = 0.0L;
  std::vector<double> probs(log_w.size(), 0.0);
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    if (!finite[i]) continue;
    probs[i] = std::exp(log_w[i] - max_log);
    total += probs[i];
  }
  for (double& p : probs) p = static_cast<double>(p / total);
  return probs;
}

std::vector<std::vector<int>> enumerate_part_combinations(
    const std::vector<int>& members, int k) {
  std::vector<std::vector<int>> out;
  if (k > static_cast<int>(members.size())) return out;
  std::vector<int> combo(k);
  for (int i = 0; i < k; ++i) combo[i] = i;
  const int m = static_cast<int>(members.size());
  if (k == 0) {
    out.push_back({});
    return out;
  }
  do {
    std::vector<int> picked(k);
    for (int i = 0; i < k; ++i) picked[i] = members[combo[i]];
    out.push_back(std::move(picked));
  } while (next_combination(combo, m));
  return out;
}

}  // namespace

double SubsetDistribution::probability_of(const Subset& s) const {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == s) return probabilities[i];
  }
  return 0.0;
}

std::uint64_t binomial_capped(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(kEnumerationCap) * 2.0L) {
      return kEnumerationCap + 1;
    }
  }
  return static_cast<std::uint64_t>(c + 0.5L);
}

bool next_combination(std::vector<int>& combo, int n) {
  const int k = static_cast<int>(combo.size());
  int i = k - 1;
  while (i >= 0 && combo[i] == n - k + i) --i;
  if (i < 0) return false;
  ++combo[i];
  for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
  return true;
}

SubsetDistribution enumerate_kdpp(const Kernel& kernel, int k) {
  const int n = kernel.n();
  if (k < 0 || k > n) {
    throw InputError("cannot enumerate " + std::to_string(k) +
                     "-subsets of " + std::to_string(n) + " items");
  }
  const std::uint64_t count = binomial_capped(n, k);
  if (count > kEnumerationCap) {
    throw InputError("enumeration refused: C(" + std::to_string(n) + "," +
                     std::to_string(k) + ") exceeds the cap of " +
                     std::to_string(kEnumerationCap));
  }

  SubsetDistribution dist;
  std::vector<double> log_w;
  std::vector<char> finite;
  std::vector<int> combo(k);
  for (int i = 0; i < k; ++i) combo[i] = i;
  do {
    const LogDet ld = log_det_submatrix(kernel, std::span<const int>(combo));
    dist.support.push_back(Subset(combo));
    log_w.push_back(ld.value());
    finite.push_back(ld.is_singular() ? 0 : 1);
  } while (k > 0 && next_combination(combo, n));
  dist.probabilities = normalize_log_weights(log_w, finite);
  return dist;
}

SubsetDistribution enumerate_pdpp(const Kernel& kernel,
                                  const QuotaConstraint& quota) {
  const std::vector<std::vector<int>> members =
      quota.dimension().part_members();
  const int p = static_cast<int>(members.size());

  std::uint64_t feasible = 1;
  for (int part = 0; part < p; ++part) {
    const std::uint64_t c = binomial_capped(
        static_cast<int>(members[part].size()), quota.quotas()[part]);
    if (c == 0 || feasible > kEnumerationCap / std::max<std::uint64_t>(c, 1)) {
      feasible = kEnumerationCap + 1;
      break;
    }
    feasible *= c;
  }
  if (feasible > kEnumerationCap) {
    throw InputError("enumeration refused: feasible-set count exceeds the cap");
  }

  // Cross product of per-part combinations.
  std::vector<std::vector<std::vector<int>>> per_part(p);
  for (int part = 0; part < p; ++part) {
    per_part[part] =
        enumerate_part_combinations(members[part], quota.quotas()[part]);
    if (per_part[part].empty()) {
      throw InfeasibleError("quota for part '" +
                            quota.dimension().part_names()[part] +
                            "' is infeasible");
    }
  }

  SubsetDistribution dist;
  std::vector<double> log_w;
  std::vector<char> finite;
  std::vector<std::size_t> cursor(p, 0);
  while (true) {
    std::vector<int> items;
    items.reserve(quota.k());
    for (int part = 0; part < p; ++part) {
      const std::vector<int>& block = per_part[part][cursor[part]];
      items.insert(items.end(), block.begin(), block.end());
    }
    Subset s(std::move(items));
    const LogDet ld = log_det_submatrix(kernel, s);
    dist.support.push_back(std::move(s));
    log_w.push_back(ld.value());
    finite.push_back(ld.is_singular() ? 0 : 1);

    int part = p - 1;
    while (part >= 0 && ++cursor[part] == per_part[part].size()) {
      cursor[part] = 0;
      --part;
    }
    if (part < 0) break;
  }
  dist.probabilities = normalize_log_weights(log_w, finite);
  std::vector<std::size_t> order(dist.support.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist.support[a] < dist.support[b];
  });
  SubsetDistribution sorted;
  for (std::size_t i : order) {
    sorted.support.push_back(std::move(dist.support[i]));
    sorted.probabilities.push_back(dist.probabilities[i]);
  }
  return sorted;
}

SubsetDistribution enumerate_kidpp(const Kernel& kernel,
                                   const QuotaConstraint& quota) {
  const std::vector<std::vector<int>> members =
      quota.dimension().part_members();
  const int p = static_cast<int>(members.size());

  // Normalized per-part distributions.
  std::vector<std::vector<std::vector<int>>> per_part_sets(p);
  std::vector<std::vector<double>> per_part_probs(p);
  std::uint64_t total = 1;
  for (int part = 0; part < p; ++part) {
    per_part_sets[part] =
        enumerate_part_combinations(members[part], quota.quotas()[part]);
    if (per_part_sets[part].empty()) {
      throw InfeasibleError("quota for part '" +
                            quota.dimension().part_names()[part] +
                            "' is infeasible");
    }
    if (total > kEnumerationCap / per_part_sets[part].size()) {
      throw InputError(
          "enumeration refused: feasible-set count exceeds the cap");
    }
    total *= per_part_sets[part].size();

    std::vector<double> log_w;
    std::vector<char> finite;
    for (const std::vector<int>& block : per_part_sets[part]) {
      const LogDet ld =
          log_det_submatrix(kernel, std::span<const int>(block));
      log_w.push_back(ld.value());
      finite.push_back(ld.is_singular() ? 0 : 1);
    }
    try {
      per_part_probs[part] = normalize_log_weights(log_w, finite);
    } catch (const InfeasibleError&) {
      throw InfeasibleError("insufficient rank in part '" +
                            quota.dimension().part_names()[part] +
                            "': every size-" +
                            std::to_string(quota.quotas()[part]) +
                            " block determinant is zero");
    }
  }

  SubsetDistribution dist;
  std::vector<std::size_t> cursor(p, 0);
  while (true) {
    std::vector<int> items;
    items.reserve(quota.k());
    double prob = 1.0;
    for (int part = 0; part < p; ++part) {
      const std::vector<int>& block = per_part_sets[part][cursor[part]];
      items.insert(items.end(), block.begin(), block.end());
      prob *= per_part_probs[part][cursor[part]];
    }
    dist.support.push_back(Subset(std::move(items)));
    dist.probabilities.push_back(prob);

    int part = p - 1;
    while (part >= 0 && ++cursor[part] == per_part_sets[part].size()) {
      cursor[part] = 0;
      --part;
    }
    if (part < 0) break;
  }
  std::vector<std::size_t> order(dist.support.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist.support[a] < dist.support[b];
  });
  SubsetDistribution sorted;
  for (std::size_t i : order) {
    sorted.support.push_back(std::move(dist.support[i]));
    sorted.probabilities.push_back(dist.probabilities[i]);
  }
  return sorted;
}

double tv_distance(const SubsetDistribution& a, const SubsetDistribution& b) {
  std::map<std::vector<int>, double> delta;
  for (std::size_t i = 0; i < a.support.size(); ++i) {
    delta[a.support[i].items] += a.probabilities[i];
  }
  for (std::size_t i = 0; i < b.support.size(); ++i) {
    delta[b.support[i].items] -= b.probabilities[i];
  }
  double sum = 0.0;
  for (const auto& [key, d] : delta) sum += std::abs(d);
  return 0.5 * sum;
}

SubsetDistribution empirical_distribution(const std::vector<Subset>& samples) {
  if (samples.empty()) {
    throw InputError("empirical distribution needs at least one sample");
  }
  std::map<std::vector<int>, std::uint64_t> counts;
  for (const Subset& s : samples) ++counts[s.items];
  SubsetDistribution dist;
  const double total = static_cast<double>(samples.size());
  for (const auto& [items, count] : counts) {
    dist.support.push_back(Subset(items));
    dist.probabilities.push_back(static_cast<double>(count) / total);
  }
  return dist;
}

}  // namespace fairdiv
