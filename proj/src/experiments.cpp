// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fairdiv/errors.hpp"
#include "fairdiv/hashing.hpp"
#include "fairdiv/plot.hpp"
#include "fairdiv/stats.hpp"

namespace fairdiv {

namespace {

using nlohmann::json;

// Seed-stream tags: samplers get 1..4, the per-repetition dataset stream of
// Experiment 3 gets its own tag so every sampler sees the same biased data.
constexpr std::uint64_t kDatasetStreamTag = 1000;

std::uint64_t sampler_tag(SamplerKind kind) {
  return static_cast<std::uint64_t>(kind) + 1;
}

const std::vector<std::string> kMetrics = {"entropy_bits",
                                           "effective_diversity", "ln_G"};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

RowNormalization normalization_from_string(const std::string& s) {
  if (s == "l2") return RowNormalization::kL2;
  if (s == "l1") return RowNormalization::kL1;
  if (s == "none") return RowNormalization::kNone;
  throw InputError("unknown normalization '" + s + "' (expected l2|l1|none)");
}

std::string normalization_to_string(RowNormalization mode) {
  switch (mode) {
    case RowNormalization::kL2:
      return "l2";
    case RowNormalization::kL1:
      return "l1";
    case RowNormalization::kNone:
      return "none";
  }
  return "l2";
}

bool wants(const ExperimentConfig& cfg, SamplerKind kind) {
  return std::find(cfg.samplers.begin(), cfg.samplers.end(), kind) !=
         cfg.samplers.end();
}

std::string resolve_measured_name(const ExperimentConfig& cfg,
                                  const LabeledDataset& dataset) {
  if (!cfg.measured_dimension.empty()) return cfg.measured_dimension;
  if (cfg.experiment == 1) return cfg.constrained_dimension;
  for (auto it = dataset.dimensions().rbegin();
       it != dataset.dimensions().rend(); ++it) {
    if (it->name().find("_x_") != std::string::npos) return it->name();
  }
  throw InputError(
      "dataset has no product dimension; set measured_dimension explicitly");
}

int resolve_part(const LabelDimension& dim, const std::string& part_name) {
  for (int p = 0; p < dim.num_parts(); ++p) {
    if (dim.part_names()[p] == part_name) return p;
  }
  throw InputError("dimension '" + dim.name() + "' has no part named '" +
                   part_name + "'");
}

struct DatasetContext {
  const LabeledDataset* dataset = nullptr;
  Kernel kernel;
  std::optional<KernelSpectrum> spectrum;
  std::optional<PartitionSpectra> parts;

  DatasetContext(const ExperimentConfig& cfg, const LabeledDataset& ds,
                 RowNormalization mode)
      : dataset(&ds), kernel(build_gram_kernel(ds.features(), mode)) {
    if (wants(cfg, SamplerKind::kKdpp)) {
      spectrum = spectral_decompose(kernel);
    }
    if (wants(cfg, SamplerKind::kKidpp)) {
      parts = make_partition_spectra(
          kernel, ds.dimension(cfg.constrained_dimension));
    }
  }
};

Subset draw_one(SamplerKind kind, const DatasetContext& ctx,
                const QuotaConstraint* quota, int k, long mixing_steps,
                Rng& rng) {
  switch (kind) {
    case SamplerKind::kUnif:
      return sample_uniform(ctx.dataset->n(), k, rng);
    case SamplerKind::kKdpp:
      return sample_kdpp_exact(*ctx.spectrum, k, rng);
    case SamplerKind::kKidpp:
      return sample_kidpp(*ctx.parts, *quota, rng);
    case SamplerKind::kPdpp:
      return sample_pdpp_mcmc(ctx.kernel, *quota, mixing_steps, rng);
  }
  throw InputError("unknown sampler");
}

bool is_constrained(SamplerKind kind) {
  return kind == SamplerKind::kKidpp || kind == SamplerKind::kPdpp;
}

ResultRecord make_record(const ExperimentConfig& cfg, SamplerKind kind,
                         double x, int repetition, Subset subset,
                         const DatasetContext& ctx,
                         const LabelDimension& measured, double seconds) {
  ResultRecord r;
  r.experiment = cfg.experiment;
  r.sampler = kind;
  r.x_value = x;
  r.repetition = repetition;
  r.entropy_bits = fairness_entropy(subset, measured);
  r.effective_diversity = std::exp2(r.entropy_bits);
  r.ln_g = log_det_submatrix(ctx.kernel, subset);
  r.seconds = seconds;
  r.subset = std::move(subset);
  return r;
}

RowNormalization config_normalization(const ExperimentConfig& cfg) {
  return cfg.synthetic ? cfg.synthetic->normalization : RowNormalization::kL2;
}

class DrawTimer {
 public:
  explicit DrawTimer(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  double seconds() const {
    if (!enabled_) return 0.0;
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double>(elapsed).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

ExperimentResult run_grid_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  LabeledDataset dataset = experiment_dataset(cfg);
  const LabelDimension& constrained =
      dataset.dimension(cfg.constrained_dimension);
  if (constrained.num_parts() != 2) {
    throw InputError("constrained dimension '" + constrained.name() +
                     "' must have exactly 2 parts, has " +
                     std::to_string(constrained.num_parts()));
  }
  const LabelDimension& measured =
      dataset.dimension(resolve_measured_name(cfg, dataset));
  if (cfg.experiment == 2 && measured.num_parts() != 4) {
    throw InputError("experiment 2 measures fairness over a 4-part dimension; '" +
                     measured.name() + "' has " +
                     std::to_string(measured.num_parts()));
  }

  DatasetContext ctx(cfg, dataset, config_normalization(cfg));
  ExperimentResult result;
  result.config = cfg;

  for (std::size_t xi = 0; xi < cfg.k_grid.size(); ++xi) {
    const int k = cfg.k_grid[xi];
    if (k > dataset.n()) {
      throw InputError("k = " + std::to_string(k) + " exceeds dataset size " +
                       std::to_string(dataset.n()));
    }
    std::optional<QuotaConstraint> quota;
    if (wants(cfg, SamplerKind::kKidpp) || wants(cfg, SamplerKind::kPdpp)) {
      quota.emplace(constrained, std::vector<int>{k / 2, k / 2});
    }
    const long mixing_steps =
        default_mixing_steps(dataset.n(), k, cfg.mixing_multiplier);

    for (SamplerKind kind : cfg.samplers) {
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        Rng rng(cell_seed(cfg, kind, static_cast<int>(xi), rep));
        DrawTimer timer(cfg.record_timing);
        Subset subset = draw_one(kind, ctx, quota ? &*quota : nullptr, k,
                                 mixing_steps, rng);
        const double seconds = timer.seconds();
        if (is_constrained(kind) && !check_quota(subset, *quota)) {
          throw std::logic_error("constrained sampler violated its quota");
        }
        result.records.push_back(make_record(cfg, kind, k, rep,
                                             std::move(subset), ctx, measured,
                                             seconds));
      }
    }
  }
  return result;
}

}  // namespace

const char* sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kUnif:
      return "unif";
    case SamplerKind::kKdpp:
      return "kdpp";
    case SamplerKind::kKidpp:
      return "kidpp";
    case SamplerKind::kPdpp:
      return "pdpp";
  }
  return "unknown";
}

SamplerKind sampler_from_name(const std::string& name) {
  if (name == "unif") return SamplerKind::kUnif;
  if (name == "kdpp") return SamplerKind::kKdpp;
  if (name == "kidpp") return SamplerKind::kKidpp;
  if (name == "pdpp") return SamplerKind::kPdpp;
  throw InputError("unknown sampler '" + name +
                   "' (expected unif|kdpp|kidpp|pdpp)");
}

void ExperimentConfig::validate() const {
  if (experiment < 1 || experiment > 3) {
    throw InputError("experiment must be 1, 2 or 3");
  }
  if (repetitions < 2) {
    throw InputError("repetitions must be at least 2 for the SEM");
  }
  if (samplers.empty()) throw InputError("sampler list is empty");
  for (std::size_t i = 0; i < samplers.size(); ++i) {
    for (std::size_t j = i + 1; j < samplers.size(); ++j) {
      if (samplers[i] == samplers[j]) {
        throw InputError("sampler list repeats '" +
                         std::string(sampler_name(samplers[i])) + "'");
      }
    }
  }
  if (!(mixing_multiplier > 0.0)) {
    throw InputError("mixing_multiplier must be positive");
  }
  if (!synthetic && (features_path.empty() || labels_path.empty())) {
    throw InputError("config needs a synthetic block or feature/label paths");
  }
  if (synthetic) synthetic->validate();

  if (experiment == 3) {
    if (bias_grid.empty()) throw InputError("bias grid is empty");
    for (double b : bias_grid) {
      if (!(b > 0.0) || b > 0.5) {
        throw InputError("bias fractions must lie in (0, 0.5]");
      }
    }
    if (bias_k < 2 || bias_k % 2 != 0) {
      throw InputError("bias_k must be even and at least 2 for 50/50 quotas");
    }
  } else {
    if (k_grid.empty()) throw InputError("k grid is empty");
    for (int k : k_grid) {
      if (k < 2 || k % 2 != 0) {
        throw InputError("k = " + std::to_string(k) +
                         " is not even; 50/50 quotas are undefined");
      }
    }
  }
}

LabeledDataset experiment_dataset(const ExperimentConfig& config) {
  if (!config.features_path.empty() && !config.labels_path.empty()) {
    return load_dataset(config.features_path, config.labels_path);
  }
  if (config.synthetic) return generate_synthetic(*config.synthetic);
  throw InputError("config needs a synthetic block or feature/label paths");
}

LabeledDataset experiment3_biased_dataset(const ExperimentConfig& config,
                                          const LabeledDataset& base,
                                          int x_index, double bias,
                                          int repetition) {
  const LabelDimension& constrained =
      base.dimension(config.constrained_dimension);
  const int part = resolve_part(constrained, config.biased_part);
  Rng rng(Rng::derive(config.master_seed,
                      {3, kDatasetStreamTag, static_cast<std::uint64_t>(x_index),
                       static_cast<std::uint64_t>(repetition)}));
  return bias_subsample(base, config.constrained_dimension, part, bias, rng);
}

std::uint64_t cell_seed(const ExperimentConfig& config, SamplerKind sampler,
                        int x_index, int repetition) {
  return Rng::derive(config.master_seed,
                     {static_cast<std::uint64_t>(config.experiment),
                      sampler_tag(sampler),
                      static_cast<std::uint64_t>(x_index),
                      static_cast<std::uint64_t>(repetition)});
}

ExperimentResult run_experiment_1(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.experiment = 1;
  return run_grid_experiment(cfg);
}

ExperimentResult run_experiment_2(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.experiment = 2;
  return run_grid_experiment(cfg);
}

ExperimentResult run_experiment_3(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.experiment = 3;
  cfg.validate();

  LabeledDataset base = experiment_dataset(cfg);
  const LabelDimension& base_constrained =
      base.dimension(cfg.constrained_dimension);
  if (base_constrained.num_parts() != 2) {
    throw InputError("constrained dimension '" + base_constrained.name() +
                     "' must have exactly 2 parts");
  }
  resolve_part(base_constrained, cfg.biased_part);  // fail fast on bad names

  const int k = cfg.bias_k;
  ExperimentResult result;
  result.config = cfg;

  for (std::size_t xi = 0; xi < cfg.bias_grid.size(); ++xi) {
    const double bias = cfg.bias_grid[xi];
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const LabeledDataset dataset = experiment3_biased_dataset(
          cfg, base, static_cast<int>(xi), bias, rep);
      const LabelDimension& constrained =
          dataset.dimension(cfg.constrained_dimension);
      const LabelDimension& measured =
          dataset.dimension(resolve_measured_name(cfg, dataset));
      if (k > dataset.n()) {
        throw InputError("bias_k = " + std::to_string(k) +
                         " exceeds biased dataset size " +
                         std::to_string(dataset.n()));
      }
      DatasetContext ctx(cfg, dataset, config_normalization(cfg));
      const long mixing_steps =
          default_mixing_steps(dataset.n(), k, cfg.mixing_multiplier);

      for (SamplerKind kind : cfg.samplers) {
        Rng rng(cell_seed(cfg, kind, static_cast<int>(xi), rep));
        try {
          std::optional<QuotaConstraint> quota;
          if (is_constrained(kind)) {
            quota.emplace(constrained, std::vector<int>{k / 2, k / 2});
          }
          DrawTimer timer(cfg.record_timing);
          Subset subset = draw_one(kind, ctx, quota ? &*quota : nullptr, k,
                                   mixing_steps, rng);
          const double seconds = timer.seconds();
          if (is_constrained(kind) && !check_quota(subset, *quota)) {
            throw std::logic_error("constrained sampler violated its quota");
          }
          result.records.push_back(make_record(cfg, kind, bias, rep,
                                               std::move(subset), ctx,
                                               measured, seconds));
        } catch (const InfeasibleError& e) {
          result.errors.push_back(
              {kind, bias, rep, e.what()});
        }
      }
    }
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case 1:
      return run_experiment_1(config);
    case 2:
      return run_experiment_2(config);
    case 3:
      return run_experiment_3(config);
    default:
      throw InputError("experiment must be 1, 2 or 3");
  }
}

std::vector<SummaryRow> summarize(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;

  std::vector<double> xs;
  if (cfg.experiment == 3) {
    xs.assign(cfg.bias_grid.begin(), cfg.bias_grid.end());
  } else {
    for (int k : cfg.k_grid) xs.push_back(static_cast<double>(k));
  }

  // cell[(sampler, x)][rep] -> record index + 1 (0 = missing).
  std::map<std::pair<int, double>, std::vector<std::size_t>> cells;
  for (std::size_t idx = 0; idx < result.records.size(); ++idx) {
    const ResultRecord& r = result.records[idx];
    auto& cell = cells[{static_cast<int>(r.sampler), r.x_value}];
    if (static_cast<int>(cell.size()) < cfg.repetitions) {
      cell.resize(cfg.repetitions, 0);
    }
    cell[r.repetition] = idx + 1;
  }

  const auto metric_value = [&](const ResultRecord& r,
                                const std::string& metric) {
    if (metric == "entropy_bits") return r.entropy_bits;
    if (metric == "effective_diversity") return r.effective_diversity;
    return r.ln_g.value();  // -inf when singular
  };

  std::vector<SummaryRow> rows;
  for (SamplerKind kind : cfg.samplers) {
    for (double x : xs) {
      const auto cell_it = cells.find({static_cast<int>(kind), x});
      for (const std::string& metric : kMetrics) {
        SummaryRow row;
        row.sampler = kind;
        row.x_value = x;
        row.metric = metric;

        std::vector<double> values;
        if (cell_it != cells.end()) {
          for (std::size_t ref : cell_it->second) {
            if (ref == 0) continue;
            const double v = metric_value(result.records[ref - 1], metric);
            if (metric == "ln_G" && !std::isfinite(v)) {
              ++row.singular_count;
              continue;
            }
            values.push_back(v);
          }
        }
        if (values.empty()) {
          row.mean_value = std::numeric_limits<double>::quiet_NaN();
          row.sem = std::numeric_limits<double>::quiet_NaN();
        } else if (values.size() == 1) {
          row.mean_value = values[0];
          row.sem = 0.0;
        } else {
          row.mean_value = mean(values);
          row.sem = standard_error(values);
        }

        for (SamplerKind other : cfg.samplers) {
          if (other == kind) continue;
          const auto other_it = cells.find({static_cast<int>(other), x});
          std::vector<double> a;
          std::vector<double> b;
          if (cell_it != cells.end() && other_it != cells.end()) {
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
              const std::size_t ra = rep < static_cast<int>(cell_it->second.size())
                                         ? cell_it->second[rep]
                                         : 0;
              const std::size_t rb =
                  rep < static_cast<int>(other_it->second.size())
                      ? other_it->second[rep]
                      : 0;
              if (ra == 0 || rb == 0) continue;  // unpaired repetition
              const double va = metric_value(result.records[ra - 1], metric);
              const double vb = metric_value(result.records[rb - 1], metric);
              if (!std::isfinite(va) || !std::isfinite(vb)) continue;
              a.push_back(va);
              b.push_back(vb);
            }
          }
          const double p = a.size() >= 2
                               ? paired_one_sided_t_test(a, b)
                               : std::numeric_limits<double>::quiet_NaN();
          row.p_vs.emplace_back(sampler_name(other), p);
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void emit_outputs(const ExperimentResult& result,
                  const std::vector<SummaryRow>& summary) {
  namespace fs = std::filesystem;
  const ExperimentConfig& cfg = result.config;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + cfg.output_dir + "': " +
                  ec.message());
  }
  const auto path = [&](const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
  };

  {
    std::ofstream out(path("records.csv"));
    if (!out) throw IoError("cannot open records.csv for writing");
    out << "experiment,sampler,x_value,repetition,entropy_bits,"
           "effective_diversity,ln_G,singular_flag,seconds\n";
    for (const ResultRecord& r : result.records) {
      out << r.experiment << ',' << sampler_name(r.sampler) << ','
          << format_double(r.x_value) << ',' << r.repetition << ','
          << format_double(r.entropy_bits) << ','
          << format_double(r.effective_diversity) << ','
          << (r.ln_g.is_singular() ? "-inf" : format_double(r.ln_g.value()))
          << ',' << (r.ln_g.is_singular() ? 1 : 0) << ','
          << format_double(r.seconds) << '\n';
    }
    if (!out.flush()) throw IoError("failed writing records.csv");
  }

  {
    std::ofstream out(path("subsets.csv"));
    if (!out) throw IoError("cannot open subsets.csv for writing");
    out << "experiment,sampler,x_value,repetition,items\n";
    for (const ResultRecord& r : result.records) {
      out << r.experiment << ',' << sampler_name(r.sampler) << ','
          << format_double(r.x_value) << ',' << r.repetition << ',';
      for (std::size_t i = 0; i < r.subset.items.size(); ++i) {
        if (i > 0) out << ' ';
        out << r.subset.items[i];
      }
      out << '\n';
    }
    if (!out.flush()) throw IoError("failed writing subsets.csv");
  }

  {
    std::ofstream out(path("summary.csv"));
    if (!out) throw IoError("cannot open summary.csv for writing");
    out << "sampler,x_value,metric,mean,sem";
    for (SamplerKind kind : cfg.samplers) {
      out << ",p_vs_" << sampler_name(kind);
    }
    out << ",singular_count\n";
    for (const SummaryRow& row : summary) {
      out << sampler_name(row.sampler) << ',' << format_double(row.x_value)
          << ',' << row.metric << ',' << format_double(row.mean_value) << ','
          << format_double(row.sem);
      for (SamplerKind kind : cfg.samplers) {
        out << ',';
        if (kind == row.sampler) continue;  // no self-comparison
        for (const auto& [name, p] : row.p_vs) {
          if (name == sampler_name(kind)) {
            out << format_double(p);
            break;
          }
        }
      }
      out << ',' << row.singular_count << '\n';
    }
    if (!out.flush()) throw IoError("failed writing summary.csv");
  }

  {
    std::ofstream out(path("manifest.txt"));
    if (!out) throw IoError("cannot open manifest.txt for writing");
    out << "tool=fairdiv 0.1.0\n";
    out << "experiment=" << cfg.experiment << '\n';
    out << "master_seed=" << cfg.master_seed << '\n';
    out << "repetitions=" << cfg.repetitions << '\n';
    out << "samplers=";
    for (std::size_t i = 0; i < cfg.samplers.size(); ++i) {
      if (i > 0) out << ',';
      out << sampler_name(cfg.samplers[i]);
    }
    out << '\n';
    out << "constrained_dimension=" << cfg.constrained_dimension << '\n';
    out << "measured_dimension=" << cfg.measured_dimension << '\n';
    if (cfg.experiment == 3) {
      out << "bias_grid=";
      for (std::size_t i = 0; i < cfg.bias_grid.size(); ++i) {
        if (i > 0) out << ',';
        out << format_double(cfg.bias_grid[i]);
      }
      out << '\n';
      out << "bias_k=" << cfg.bias_k << '\n';
      out << "biased_part=" << cfg.biased_part << '\n';
    } else {
      out << "k_grid=";
      for (std::size_t i = 0; i < cfg.k_grid.size(); ++i) {
        if (i > 0) out << ',';
        out << cfg.k_grid[i];
      }
      out << '\n';
    }
    out << "mixing_multiplier=" << format_double(cfg.mixing_multiplier)
        << '\n';
    out << "record_timing=" << (cfg.record_timing ? 1 : 0) << '\n';
    if (!cfg.features_path.empty() && !cfg.labels_path.empty()) {
      out << "dataset=files\n";
      out << "features_path=" << cfg.features_path << '\n';
      out << "labels_path=" << cfg.labels_path << '\n';
      out << "input_hash="
          << git_blob_sha1(read_text_file(cfg.features_path) +
                           read_text_file(cfg.labels_path))
          << '\n';
    } else {
      out << "dataset=synthetic\n";
      out << "input_hash=" << git_blob_sha1(to_json(*cfg.synthetic)) << '\n';
    }
    // Echo the config without the output path so two runs of the same
    // experiment into different directories produce identical manifests.
    ExperimentConfig echo = cfg;
    echo.output_dir.clear();
    out << "config=" << to_json(echo) << '\n';
    out << "cell_errors=" << result.errors.size() << '\n';
    for (const CellError& e : result.errors) {
      out << "cell_error=" << sampler_name(e.sampler) << ','
          << format_double(e.x_value) << ',' << e.repetition << ','
          << e.message << '\n';
    }
    if (!out.flush()) throw IoError("failed writing manifest.txt");
  }

  const std::string x_label = cfg.experiment == 3 ? "bias fraction" : "k";
  const std::map<std::string, std::string> y_labels = {
      {"entropy_bits", "fairness entropy (bits)"},
      {"effective_diversity", "effective diversity"},
      {"ln_G", "ln G"}};
  for (const std::string& metric : kMetrics) {
    std::vector<PlotSeries> series;
    for (SamplerKind kind : cfg.samplers) {
      PlotSeries s;
      s.name = sampler_name(kind);
      for (const SummaryRow& row : summary) {
        if (row.sampler != kind || row.metric != metric) continue;
        s.points.push_back({row.x_value, row.mean_value, row.sem});
      }
      series.push_back(std::move(s));
    }
    write_line_plot_svg(path("plot_" + metric + ".svg"),
                        "Experiment " + std::to_string(cfg.experiment),
                        x_label, y_labels.at(metric), series);
  }
}

namespace {

void overlay_synthetic(SyntheticConfig& cfg, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "cell_counts") {
      cfg.cell_counts = value.get<std::vector<int>>();
    } else if (key == "num_genders") {
      cfg.num_genders = value.get<int>();
    } else if (key == "num_professions") {
      cfg.num_professions = value.get<int>();
    } else if (key == "feature_dim") {
      cfg.feature_dim = value.get<int>();
    } else if (key == "spread") {
      cfg.spread = value.get<double>();
    } else if (key == "separation") {
      cfg.separation = value.get<double>();
    } else if (key == "gender_separation") {
      cfg.gender_separation = value.get<double>();
    } else if (key == "profession_separation") {
      cfg.profession_separation = value.get<double>();
    } else if (key == "shared_mass") {
      cfg.shared_mass = value.get<double>();
    } else if (key == "cell_spread_scale") {
      cfg.cell_spread_scale = value.get<std::vector<double>>();
    } else if (key == "cell_separation_scale") {
      cfg.cell_separation_scale = value.get<std::vector<double>>();
    } else if (key == "profession_labels") {
      cfg.profession_labels = value.get<std::vector<int>>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "normalization") {
      cfg.normalization = normalization_from_string(value.get<std::string>());
    } else {
      throw InputError("unknown synthetic config key '" + key + "'");
    }
  }
}

json synthetic_to_json(const SyntheticConfig& cfg) {
  json j;
  j["cell_counts"] = cfg.cell_counts;
  j["num_genders"] = cfg.num_genders;
  j["num_professions"] = cfg.num_professions;
  j["feature_dim"] = cfg.feature_dim;
  j["spread"] = cfg.spread;
  j["separation"] = cfg.separation;
  if (cfg.gender_separation >= 0.0) {
    j["gender_separation"] = cfg.gender_separation;
  }
  if (cfg.profession_separation >= 0.0) {
    j["profession_separation"] = cfg.profession_separation;
  }
  j["shared_mass"] = cfg.shared_mass;
  if (!cfg.cell_spread_scale.empty()) {
    j["cell_spread_scale"] = cfg.cell_spread_scale;
  }
  if (!cfg.cell_separation_scale.empty()) {
    j["cell_separation_scale"] = cfg.cell_separation_scale;
  }
  if (!cfg.profession_labels.empty()) {
    j["profession_labels"] = cfg.profession_labels;
  }
  j["seed"] = cfg.seed;
  j["normalization"] = normalization_to_string(cfg.normalization);
  return j;
}

}  // namespace

void apply_json_overlay(ExperimentConfig& config, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") {
      config.experiment = value.get<int>();
    } else if (key == "synthetic") {
      if (!config.synthetic) config.synthetic.emplace();
      overlay_synthetic(*config.synthetic, value);
    } else if (key == "features_path") {
      config.features_path = value.get<std::string>();
    } else if (key == "labels_path") {
      config.labels_path = value.get<std::string>();
    } else if (key == "k_grid") {
      config.k_grid = value.get<std::vector<int>>();
    } else if (key == "bias_grid") {
      config.bias_grid = value.get<std::vector<double>>();
    } else if (key == "bias_k") {
      config.bias_k = value.get<int>();
    } else if (key == "biased_part") {
      config.biased_part = value.get<std::string>();
    } else if (key == "repetitions") {
      config.repetitions = value.get<int>();
    } else if (key == "samplers") {
      config.samplers.clear();
      for (const auto& name : value) {
        config.samplers.push_back(sampler_from_name(name.get<std::string>()));
      }
    } else if (key == "constrained_dimension") {
      config.constrained_dimension = value.get<std::string>();
    } else if (key == "measured_dimension") {
      config.measured_dimension = value.get<std::string>();
    } else if (key == "mixing_multiplier") {
      config.mixing_multiplier = value.get<double>();
    } else if (key == "master_seed") {
      config.master_seed = value.get<std::uint64_t>();
    } else if (key == "output_dir") {
      config.output_dir = value.get<std::string>();
    } else if (key == "record_timing") {
      config.record_timing = value.get<bool>();
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
}

void apply_json_overlay(SyntheticConfig& config, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  overlay_synthetic(config, j);
}

std::string to_json(const ExperimentConfig& config) {
  json j;
  j["experiment"] = config.experiment;
  if (config.synthetic) j["synthetic"] = synthetic_to_json(*config.synthetic);
  if (!config.features_path.empty()) j["features_path"] = config.features_path;
  if (!config.labels_path.empty()) j["labels_path"] = config.labels_path;
  if (config.experiment == 3) {
    j["bias_grid"] = config.bias_grid;
    j["bias_k"] = config.bias_k;
    j["biased_part"] = config.biased_part;
  } else {
    j["k_grid"] = config.k_grid;
  }
  j["repetitions"] = config.repetitions;
  std::vector<std::string> names;
  for (SamplerKind kind : config.samplers) names.push_back(sampler_name(kind));
  j["samplers"] = names;
  j["constrained_dimension"] = config.constrained_dimension;
  j["measured_dimension"] = config.measured_dimension;
  j["mixing_multiplier"] = config.mixing_multiplier;
  j["master_seed"] = config.master_seed;
  j["output_dir"] = config.output_dir;
  j["record_timing"] = config.record_timing;
  return j.dump();
}

std::string to_json(const SyntheticConfig& config) {
  return synthetic_to_json(config).dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fairdiv
