// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_EXPERIMENTS_HPP
#define FAIRDIV_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairdiv/datasets.hpp"
#include "fairdiv/kernel.hpp"
#include "fairdiv/partition.hpp"
#include "fairdiv/samplers.hpp"
#include "fairdiv/subset.hpp"

namespace fairdiv {

enum class SamplerKind { kUnif, kKdpp, kKidpp, kPdpp };

const char* sampler_name(SamplerKind kind);
SamplerKind sampler_from_name(const std::string& name);

struct ExperimentConfig {
  int experiment = 1;  // 1 | 2 | 3

  // Dataset source: file paths win when both are set.
  std::optional<SyntheticConfig> synthetic;
  std::string features_path;
  std::string labels_path;

  std::vector<int> k_grid = {4, 8, 12, 16, 20};             // experiments 1-2
  std::vector<double> bias_grid = {0.1, 0.2, 0.3, 0.4, 0.5};  // experiment 3
  int bias_k = 12;                                            // experiment 3
  std::string biased_part = "male";                           // experiment 3

  int repetitions = 100;
  std::vector<SamplerKind> samplers = {SamplerKind::kUnif, SamplerKind::kKdpp,
                                       SamplerKind::kKidpp,
                                       SamplerKind::kPdpp};
  std::string constrained_dimension = "gender";
  std::string measured_dimension;  // empty: constrained (exp1) / product (2-3)
  double mixing_multiplier = 20.0;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  bool record_timing = true;

  void validate() const;
};

struct ResultRecord {
  int experiment = 0;
  SamplerKind sampler = SamplerKind::kUnif;
  double x_value = 0.0;  // k for experiments 1-2, bias fraction for 3
  int repetition = 0;
  Subset subset;
  double entropy_bits = 0.0;
  double effective_diversity = 0.0;
  LogDet ln_g = LogDet::singular();
  double seconds = 0.0;
};

// A cell that could not produce a draw (e.g. quota infeasible at extreme
// bias); the run records it and continues.
struct CellError {
  SamplerKind sampler = SamplerKind::kUnif;
  double x_value = 0.0;
  int repetition = 0;
  std::string message;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRecord> records;
  std::vector<CellError> errors;
};

struct SummaryRow {
  SamplerKind sampler = SamplerKind::kUnif;
  double x_value = 0.0;
  std::string metric;  // entropy_bits | effective_diversity | ln_G
  double mean_value = 0.0;
  double sem = 0.0;
  // One-sided paired p-values for "this sampler > other", keyed by the
  // other sampler's name, in config order.
  std::vector<std::pair<std::string, double>> p_vs;
  int singular_count = 0;  // ln_G draws excluded from the mean
};

// Dataset selected by the config (generated or loaded).
LabeledDataset experiment_dataset(const ExperimentConfig& config);

// The per-repetition biased dataset Experiment 3 uses; deterministic in
// (config, x_index, repetition), independent of the sampler.
LabeledDataset experiment3_biased_dataset(const ExperimentConfig& config,
                                          const LabeledDataset& base,
                                          int x_index, double bias,
                                          int repetition);

// Seed for one (sampler, x, repetition) cell.
std::uint64_t cell_seed(const ExperimentConfig& config, SamplerKind sampler,
                        int x_index, int repetition);

ExperimentResult run_experiment_1(const ExperimentConfig& config);
ExperimentResult run_experiment_2(const ExperimentConfig& config);
ExperimentResult run_experiment_3(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<SummaryRow> summarize(const ExperimentResult& result);

// Writes records.csv, subsets.csv, summary.csv, manifest.txt and one SVG
// line plot per metric into config.output_dir.
void emit_outputs(const ExperimentResult& result,
                  const std::vector<SummaryRow>& summary);

// JSON config handling. Overlay semantics: fields present in the JSON text
// replace the current values (the config file wins over flags).
void apply_json_overlay(ExperimentConfig& config, const std::string& json_text);
void apply_json_overlay(SyntheticConfig& config, const std::string& json_text);
std::string to_json(const ExperimentConfig& config);
std::string to_json(const SyntheticConfig& config);

std::string read_text_file(const std::string& path);

}  // namespace fairdiv

#endif  // FAIRDIV_EXPERIMENTS_HPP
