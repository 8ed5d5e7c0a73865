// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_SAMPLERS_HPP
#define FAIRDIV_SAMPLERS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "fairdiv/kernel.hpp"
#include "fairdiv/partition.hpp"
#include "fairdiv/rng.hpp"
#include "fairdiv/subset.hpp"

namespace fairdiv {

// Metropolis swap-chain state. The cached log-determinant always equals
// log_det_submatrix(K, current) for the kernel the chain runs on.
struct ChainState {
  Subset current;
  LogDet logdet = LogDet::singular();
  long step_count = 0;
};

// Uniformly random k-subset of {0, ..., n-1}.
Subset sample_uniform(int n, int k, Rng& rng);

// Table of elementary symmetric polynomials over eigenvalue prefixes:
// table[j][m] = e_j(lambda_1 .. lambda_m) for j in 0..k, m in 0..n.
std::vector<std::vector<double>> elementary_symmetric(
    std::span<const double> eigenvalues, int k);

// Exact k-DPP draw: eigenvector subset selection through elementary
// symmetric ratios, then orthogonal projection sampling. Throws
// InfeasibleError when the spectrum's rank is below k.
Subset sample_kdpp_exact(const KernelSpectrum& spectrum, int k, Rng& rng);

// Per-part spectra of the principal blocks induced by a dimension; lets
// callers amortize the eigendecompositions across many k_i-DPP draws.
struct PartitionSpectra {
  std::vector<std::vector<int>> part_members;  // global ids per part
  std::vector<KernelSpectrum> spectra;         // aligned with parts
};

PartitionSpectra make_partition_spectra(const Kernel& kernel,
                                        const LabelDimension& dim);

// Independent k_i-DPP inside each part, union of the draws.
Subset sample_kidpp(const PartitionSpectra& parts,
                    const QuotaConstraint& quota, Rng& rng);
Subset sample_kidpp(const Kernel& kernel, const QuotaConstraint& quota,
                    Rng& rng);

// Greedy incremental log-determinant maximization under the quota; ties
// break toward the lowest item id. When every admissible item would make
// the set singular, falls back to the largest Schur-complement diagonal.
Subset greedy_warm_start(const Kernel& kernel, const QuotaConstraint& quota);

ChainState make_chain_state(const Kernel& kernel, Subset start);

// One lazy Metropolis swap: pick i in S and j outside S uniformly; reject
// outright if the swap breaks the quota, otherwise move with probability
// (1/2) min{1, det(K_T)/det(K_S)} computed in log space.
ChainState mcmc_step(ChainState state, const Kernel& kernel,
                     const QuotaConstraint& quota, Rng& rng);

// Default burn-in budget: multiplier * k * (n - k), floor of 1.
long default_mixing_steps(int n, int k, double multiplier = 20.0);

// Greedy warm start followed by `iterations` swap steps; the returned
// subset always satisfies the quota. Throws InfeasibleError when the warm
// start cannot reach a nonsingular state.
Subset sample_pdpp_mcmc(const Kernel& kernel, const QuotaConstraint& quota,
                        long iterations, Rng& rng);

}  // namespace fairdiv

#endif  // FAIRDIV_SAMPLERS_HPP
