// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_DATASETS_HPP
#define FAIRDIV_DATASETS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairdiv/kernel.hpp"
#include "fairdiv/partition.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

// Feature matrix plus the label dimensions that partition it. When at least
// two base dimensions exist, their joint product dimension is derived and
// appended (name "<a>_x_<b>", parts = observed label tuples).
class LabeledDataset {
 public:
  LabeledDataset(FeatureMatrix features, std::vector<LabelDimension> dimensions,
                 std::string provenance);

  int n() const { return features_.n(); }
  const FeatureMatrix& features() const { return features_; }
  const std::vector<LabelDimension>& dimensions() const { return dimensions_; }
  const std::string& provenance() const { return provenance_; }

  bool has_dimension(const std::string& name) const;
  const LabelDimension& dimension(const std::string& name) const;

 private:
  FeatureMatrix features_;
  std::vector<LabelDimension> dimensions_;
  std::string provenance_;
};

// Configuration of the synthetic generator. Cells are the cross product of
// gender and profession parts; cell index = gender * num_professions +
// profession. Cell centers are distinct coordinate-block vectors: every
// center carries `shared_mass` on a common block, `separation` on its
// gender block and `separation` on its profession block, so both factors
// contribute separable feature structure. Items are nonnegative
// perturbations of their cell center (noise clamped at zero), then
// row-normalized.
struct SyntheticConfig {
  std::vector<int> cell_counts;  // size num_genders * num_professions
  int num_genders = 2;
  int num_professions = 2;
  int feature_dim = 32;
  double spread = 0.3;
  double separation = 1.0;
  // Per-factor overrides of `separation`; negative means "use separation".
  // Zero makes that factor invisible in feature space (labels only).
  double gender_separation = -1.0;
  double profession_separation = -1.0;
  double shared_mass = 0.6;
  std::vector<double> cell_spread_scale;      // optional, defaults to all ones
  // Optional per-cell multiplier on the factor-block center mass; zero
  // leaves a cell with no exclusive directions beyond the shared block.
  std::vector<double> cell_separation_scale;  // optional, defaults to all ones
  // Optional coarse relabeling of the profession factor: entry q is the
  // emitted profession label of generator slot q. Lets many feature slots
  // (directions) share one measured profession. Default: identity.
  std::vector<int> profession_labels;
  std::uint64_t seed = 1;
  RowNormalization normalization = RowNormalization::kL2;

  void validate() const;  // throws InputError
  int total_items() const;
  double effective_gender_separation() const;
  double effective_profession_separation() const;
};

LabeledDataset generate_synthetic(const SyntheticConfig& config);

// Keeps every item outside `part`, uniformly subsamples `part` so that its
// share of the output equals target_fraction (nearest integer count, at
// least one item). Relative order is preserved; every dimension is
// re-indexed consistently.
LabeledDataset bias_subsample(const LabeledDataset& dataset,
                              const std::string& dimension_name, int part,
                              double target_fraction, Rng& rng);

// Features CSV: one item per row, comma-separated nonnegative reals, equal
// row lengths, optional header (detected as a non-numeric first row).
// Labels CSV: aligned rows, one column per label dimension; a header is
// detected when the file has exactly one more row than the features file.
LabeledDataset load_dataset(const std::string& features_path,
                            const std::string& labels_path);

// Writes the dataset back out; labels get a header with dimension names,
// derived product dimensions are not written (they are re-derived on load).
void save_dataset(const LabeledDataset& dataset,
                  const std::string& features_path,
                  const std::string& labels_path);

}  // namespace fairdiv

#endif  // FAIRDIV_DATASETS_HPP
