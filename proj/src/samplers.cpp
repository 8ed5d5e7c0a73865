// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairdiv/errors.hpp"

namespace fairdiv {

namespace {

constexpr double kPivotRelTol = 1e-12;

// Draws an index from unnormalized nonnegative weights.
int draw_categorical(const Eigen::VectorXd& weights, Rng& rng) {
  const double total = weights.sum();
  double u = rng.uniform01() * total;
  const int n = static_cast<int>(weights.size());
  for (int i = 0; i < n; ++i) {
    u -= weights(i);
    if (u < 0.0) return i;
  }
  // Rounding pushed u past the end; return the last positive-weight index.
  for (int i = n - 1; i >= 0; --i) {
    if (weights(i) > 0.0) return i;
  }
  return n - 1;
}

// Modified Gram-Schmidt on the columns of v. Columns are expected to be
// linearly independent; near-zero remainders are zeroed defensively.
void orthonormalize_columns(Eigen::MatrixXd& v) {
  const int cols = static_cast<int>(v.cols());
  for (int c = 0; c < cols; ++c) {
    for (int prev = 0; prev < c; ++prev) {
      v.col(c) -= v.col(prev).dot(v.col(c)) * v.col(prev);
    }
    const double norm = v.col(c).norm();
    if (norm > 1e-12) {
      v.col(c) /= norm;
    } else {
      v.col(c).setZero();
    }
  }
}

// Selects k eigenvector indices with probability proportional to the
// products of their eigenvalues, via the elementary symmetric recurrence.
// Eigenvalues are scaled by 1/lambda_max first; the selection ratios are
// scale-invariant and the table stays far from overflow.
std::vector<int> select_eigenvector_indices(const KernelSpectrum& spectrum,
                                            int k, Rng& rng) {
  const int n = spectrum.n();
  std::vector<double> scaled(n);
  const double lambda_max = spectrum.eigenvalues(0);
  for (int i = 0; i < n; ++i) {
    scaled[i] = spectrum.eigenvalues(i) / lambda_max;
  }
  const auto table = elementary_symmetric(scaled, k);

  std::vector<int> chosen;
  chosen.reserve(k);
  int remaining = k;
  for (int m = n; m >= 1 && remaining > 0; --m) {
    double take_prob;
    if (m == remaining) {
      take_prob = 1.0;  // every remaining eigenvalue must be taken
    } else {
      const double denom = table[remaining][m];
      if (denom <= 0.0) {
        take_prob = (scaled[m - 1] > 0.0) ? 1.0 : 0.0;
      } else {
        take_prob = scaled[m - 1] * table[remaining - 1][m - 1] / denom;
      }
    }
    if (take_prob >= 1.0 || rng.uniform01() < take_prob) {
      chosen.push_back(m - 1);
      --remaining;
    }
  }
  return chosen;
}

// Projection DPP sampling: draws one item per step with probability
// proportional to the squared row norm, then projects the subspace onto
// the orthogonal complement of the chosen coordinate axis.
Subset sample_projection_dpp(const KernelSpectrum& spectrum,
                             const std::vector<int>& eigenvector_indices,
                             Rng& rng) {
  const int n = spectrum.n();
  const int k = static_cast<int>(eigenvector_indices.size());
  Eigen::MatrixXd v(n, k);
  for (int c = 0; c < k; ++c) {
    v.col(c) = spectrum.eigenvectors.col(eigenvector_indices[c]);
  }

  std::vector<int> picked;
  picked.reserve(k);
  for (int step = k; step >= 1; --step) {
    const Eigen::VectorXd weights = v.leftCols(step).rowwise().squaredNorm();
    const int item = draw_categorical(weights, rng);
    picked.push_back(item);
    if (step == 1) break;

    // Pivot on the column with the largest component in the chosen row.
    int pivot = 0;
    for (int c = 1; c < step; ++c) {
      if (std::abs(v(item, c)) > std::abs(v(item, pivot))) pivot = c;
    }
    v.col(pivot).swap(v.col(step - 1));
    const Eigen::VectorXd pivot_col = v.col(step - 1);
    const double pivot_val = pivot_col(item);
    for (int c = 0; c < step - 1; ++c) {
      v.col(c) -= pivot_col * (v(item, c) / pivot_val);
    }
    Eigen::MatrixXd head = v.leftCols(step - 1);
    orthonormalize_columns(head);
    v.leftCols(step - 1) = head;
  }
  return Subset(std::move(picked));
}

// Position of the r-th item outside the sorted subset.
int nth_complement_element(const std::vector<int>& sorted_items, int r) {
  int j = r;
  for (int s : sorted_items) {
    if (s <= j) {
      ++j;
    } else {
      break;
    }
  }
  return j;
}

}  // namespace

Subset sample_uniform(int n, int k, Rng& rng) {
  if (k < 0 || k > n) {
    throw InputError("cannot draw " + std::to_string(k) + " items from " +
                     std::to_string(n));
  }
  // Floyd's algorithm: k draws, no rejection.
  std::vector<int> picked;
  picked.reserve(k);
  std::vector<char> in_sample(n, 0);
  for (int j = n - k; j < n; ++j) {
    const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (in_sample[t]) {
      in_sample[j] = 1;
      picked.push_back(j);
    } else {
      in_sample[t] = 1;
      picked.push_back(t);
    }
  }
  return Subset(std::move(picked));
}

std::vector<std::vector<double>> elementary_symmetric(
    std::span<const double> eigenvalues, int k) {
  const int n = static_cast<int>(eigenvalues.size());
  std::vector<std::vector<double>> table(
      k + 1, std::vector<double>(n + 1, 0.0));
  for (int m = 0; m <= n; ++m) table[0][m] = 1.0;
  for (int j = 1; j <= k; ++j) {
    for (int m = 1; m <= n; ++m) {
      table[j][m] = table[j][m - 1] + eigenvalues[m - 1] * table[j - 1][m - 1];
    }
  }
  return table;
}

Subset sample_kdpp_exact(const KernelSpectrum& spectrum, int k, Rng& rng) {
  if (k < 0 || k > spectrum.n()) {
    throw InputError("k-DPP size " + std::to_string(k) +
                     " out of range for " + std::to_string(spectrum.n()) +
                     " items");
  }
  if (k == 0) return Subset{};
  if (spectrum.rank() < k) {
    throw InfeasibleError("insufficient rank: kernel rank " +
                          std::to_string(spectrum.rank()) +
                          " is below requested size " + std::to_string(k));
  }
  const std::vector<int> indices = select_eigenvector_indices(spectrum, k, rng);
  return sample_projection_dpp(spectrum, indices, rng);
}

PartitionSpectra make_partition_spectra(const Kernel& kernel,
                                        const LabelDimension& dim) {
  if (dim.n() != kernel.n()) {
    throw InputError("dimension '" + dim.name() + "' labels " +
                     std::to_string(dim.n()) + " items but kernel has " +
                     std::to_string(kernel.n()));
  }
  PartitionSpectra out;
  out.part_members = dim.part_members();
  out.spectra.reserve(out.part_members.size());
  for (const std::vector<int>& members : out.part_members) {
    if (members.empty()) {
      out.spectra.push_back(KernelSpectrum{});
      continue;
    }
    Kernel block = Kernel::from_matrix(kernel.submatrix(members));
    out.spectra.push_back(spectral_decompose(block));
  }
  return out;
}

Subset sample_kidpp(const PartitionSpectra& parts, const QuotaConstraint& quota,
                    Rng& rng) {
  const int p = static_cast<int>(parts.part_members.size());
  std::vector<int> picked;
  picked.reserve(quota.k());
  for (int part = 0; part < p; ++part) {
    const int want = quota.quotas()[part];
    if (want == 0) continue;
    const std::vector<int>& members = parts.part_members[part];
    const std::string& part_name = quota.dimension().part_names()[part];
    if (want > static_cast<int>(members.size())) {
      throw InfeasibleError("part '" + part_name + "' has " +
                            std::to_string(members.size()) +
                            " items, quota asks for " + std::to_string(want));
    }
    const KernelSpectrum& spectrum = parts.spectra[part];
    if (spectrum.rank() < want) {
      throw InfeasibleError("insufficient rank in part '" + part_name +
                            "': block rank " + std::to_string(spectrum.rank()) +
                            " is below quota " + std::to_string(want));
    }
    const Subset local = sample_kdpp_exact(spectrum, want, rng);
    for (int id : local.items) picked.push_back(members[id]);
  }
  return Subset(std::move(picked));
}

Subset sample_kidpp(const Kernel& kernel, const QuotaConstraint& quota,
                    Rng& rng) {
  const PartitionSpectra parts =
      make_partition_spectra(kernel, quota.dimension());
  return sample_kidpp(parts, quota, rng);
}

Subset greedy_warm_start(const Kernel& kernel, const QuotaConstraint& quota) {
  const LabelDimension& dim = quota.dimension();
  if (dim.n() != kernel.n()) {
    throw InputError("quota dimension covers " + std::to_string(dim.n()) +
                     " items but kernel has " + std::to_string(kernel.n()));
  }
  const int n = kernel.n();
  const int k = quota.k();
  const double tol =
      kPivotRelTol * std::max(kernel.matrix().diagonal().maxCoeff(), 0.0);

  std::vector<int> remaining_quota = quota.quotas();
  std::vector<char> chosen_mask(n, 0);
  std::vector<int> chosen;
  chosen.reserve(k);

  // Incremental Cholesky gains: gain[j] is the Schur-complement diagonal of
  // item j against the chosen set; factor_rows[j] holds L^{-1} K_{S,j}.
  Eigen::VectorXd gain = kernel.matrix().diagonal();
  Eigen::MatrixXd factor_rows(n, k);
  bool degenerate = false;

  for (int step = 0; step < k; ++step) {
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (chosen_mask[j] || remaining_quota[dim.label(j)] == 0) continue;
      if (best == -1 || gain(j) > gain(best)) best = j;  // ties keep lowest id
    }
    if (best == -1) {
      throw InfeasibleError("quota cannot be filled: no admissible items left");
    }

    if (!degenerate && gain(best) <= tol) {
      degenerate = true;  // every admissible item closes the volume
    }

    if (degenerate) {
      // Recompute Schur-complement diagonals against the rank-revealing
      // factorization of the current selection and take the largest.
      PivotedCholesky chol = pivoted_cholesky(kernel.submatrix(chosen));
      best = -1;
      double best_gain = 0.0;
      for (int j = 0; j < n; ++j) {
        if (chosen_mask[j] || remaining_quota[dim.label(j)] == 0) continue;
        Eigen::VectorXd rhs(chol.rank);
        for (int r = 0; r < chol.rank; ++r) {
          rhs(r) = kernel(chosen[chol.perm[r]], j);
        }
        chol.factor.topLeftCorner(chol.rank, chol.rank)
            .triangularView<Eigen::Lower>()
            .solveInPlace(rhs);
        const double residual = kernel(j, j) - rhs.squaredNorm();
        if (best == -1 || residual > best_gain) {
          best = j;
          best_gain = residual;
        }
      }
      chosen_mask[best] = 1;
      --remaining_quota[dim.label(best)];
      chosen.push_back(best);
      continue;
    }

    // Fast path: extend every candidate's factor row by the new pivot.
    const double pivot = std::sqrt(gain(best));
    for (int j = 0; j < n; ++j) {
      if (chosen_mask[j] || j == best) continue;
      double cross = kernel(best, j);
      for (int t = 0; t < step; ++t) {
        cross -= factor_rows(best, t) * factor_rows(j, t);
      }
      const double e = cross / pivot;
      factor_rows(j, step) = e;
      gain(j) -= e * e;
    }
    factor_rows(best, step) = pivot;
    chosen_mask[best] = 1;
    --remaining_quota[dim.label(best)];
    chosen.push_back(best);
  }
  return Subset(std::move(chosen));
}

ChainState make_chain_state(const Kernel& kernel, Subset start) {
  ChainState state;
  state.logdet = log_det_submatrix(kernel, start);
  state.current = std::move(start);
  state.step_count = 0;
  return state;
}

ChainState mcmc_step(ChainState state, const Kernel& kernel,
                     const QuotaConstraint& quota, Rng& rng) {
  const int n = kernel.n();
  const int k = state.current.k();
  ++state.step_count;
  if (k == 0 || k == n) return state;  // no swap exists

  const int i_pos = static_cast<int>(rng.below(k));
  const int j_rank = static_cast<int>(rng.below(n - k));
  const int removed = state.current.items[i_pos];
  const int inserted = nth_complement_element(state.current.items, j_rank);

  // Constraint rejection happens before the lazy coin flip.
  const LabelDimension& dim = quota.dimension();
  if (dim.label(removed) != dim.label(inserted)) {
    return state;  // per-part counts would change
  }

  std::vector<int> proposal = state.current.items;
  proposal.erase(std::find(proposal.begin(), proposal.end(), removed));
  proposal.insert(std::upper_bound(proposal.begin(), proposal.end(), inserted),
                  inserted);
  // Indices are valid by construction; skip the public-API validation.
  const PivotedCholesky chol =
      pivoted_cholesky(kernel.submatrix(std::span<const int>(proposal)));
  const LogDet proposal_logdet =
      chol.rank < static_cast<int>(proposal.size())
          ? LogDet::singular()
          : LogDet::finite(chol.log_det);

  double ratio;  // min{1, det(K_T)/det(K_S)}
  if (proposal_logdet.is_singular()) {
    ratio = 0.0;
  } else if (state.logdet.is_singular()) {
    ratio = 1.0;  // escaping a zero-volume state
  } else {
    ratio = std::min(1.0, std::exp(proposal_logdet.value() -
                                   state.logdet.value()));
  }
  if (rng.uniform01() < 0.5 * ratio) {
    state.current.items = std::move(proposal);
    state.logdet = proposal_logdet;
  }
  return state;
}

long default_mixing_steps(int n, int k, double multiplier) {
  const double steps = multiplier * static_cast<double>(k) *
                       static_cast<double>(n - k);
  return std::max(1L, static_cast<long>(steps));
}

Subset sample_pdpp_mcmc(const Kernel& kernel, const QuotaConstraint& quota,
                        long iterations, Rng& rng) {
  ChainState state =
      make_chain_state(kernel, greedy_warm_start(kernel, quota));
  if (state.logdet.is_singular() && state.current.k() > 0) {
    throw InfeasibleError(
        "degenerate kernel under quotas: greedy warm start is singular");
  }
  for (long step = 0; step < iterations; ++step) {
    state = mcmc_step(std::move(state), kernel, quota, rng);
  }
  return state.current;
}

}  // namespace fairdiv
