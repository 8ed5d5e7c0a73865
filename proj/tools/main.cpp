// Apache License, Version 2.0, refer to LICENSE.txt
//
// Experiment CLI. Subcommands: generate, exp1, exp2, exp3, sample, validate.
// Exit codes: 0 success, 2 config error, 3 infeasible quota, 4 I/O error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fairdiv/datasets.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/experiments.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/samplers.hpp"

using namespace fairdiv;

namespace {

struct GenerateArgs {
  std::string out_dir = "data";
  std::string config_path;
  int count_per_cell = 40;
  std::vector<int> cell_counts;
  int genders = 2;
  int professions = 2;
  int dim = 32;
  double spread = 0.3;
  double separation = 1.0;
  double gender_separation = -1.0;
  double profession_separation = -1.0;
  double shared_mass = 0.5;
  std::vector<double> spread_scale;
  std::vector<double> separation_scale;
  std::uint64_t seed = 1;
};

struct ExperimentArgs {
  std::string config_path;
  std::string gen_config_path;
  ExperimentConfig cfg;
  std::vector<std::string> sampler_names;
  bool no_timing = false;
};

struct SampleArgs {
  std::string features;
  std::string labels;
  std::string gen_config_path;
  std::string sampler = "pdpp";
  int k = 10;
  std::string quota_dim = "gender";
  std::vector<int> quotas;
  std::uint64_t seed = 1;
  double mixing_multiplier = 20.0;
};

struct ValidateArgs {
  std::uint64_t seed = 1;
  int draws = 50000;
  int chains = 20000;
};

SyntheticConfig synthetic_from_args(const GenerateArgs& args) {
  SyntheticConfig cfg;
  cfg.num_genders = args.genders;
  cfg.num_professions = args.professions;
  cfg.cell_counts = args.cell_counts;
  if (cfg.cell_counts.empty()) {
    cfg.cell_counts.assign(args.genders * args.professions,
                           args.count_per_cell);
  }
  cfg.feature_dim = args.dim;
  cfg.spread = args.spread;
  cfg.separation = args.separation;
  cfg.gender_separation = args.gender_separation;
  cfg.profession_separation = args.profession_separation;
  cfg.shared_mass = args.shared_mass;
  cfg.cell_spread_scale = args.spread_scale;
  cfg.cell_separation_scale = args.separation_scale;
  cfg.seed = args.seed;
  if (!args.config_path.empty()) {
    apply_json_overlay(cfg, read_text_file(args.config_path));
  }
  return cfg;
}

int run_generate(const GenerateArgs& args) {
  const SyntheticConfig cfg = synthetic_from_args(args);
  const LabeledDataset dataset = generate_synthetic(cfg);
  std::filesystem::create_directories(args.out_dir);
  const auto out = std::filesystem::path(args.out_dir);
  save_dataset(dataset, (out / "features.csv").string(),
               (out / "labels.csv").string());
  std::ofstream provenance(out / "generation.json");
  if (!provenance) throw IoError("cannot write generation.json");
  provenance << to_json(cfg) << "\n";
  std::cout << "wrote " << dataset.n() << " items to " << args.out_dir
            << " (features.csv, labels.csv, generation.json)\n";
  return 0;
}

int run_experiment_command(ExperimentArgs& args, int experiment) {
  args.cfg.experiment = experiment;
  if (!args.sampler_names.empty()) {
    args.cfg.samplers.clear();
    for (const std::string& name : args.sampler_names) {
      args.cfg.samplers.push_back(sampler_from_name(name));
    }
  }
  if (args.no_timing) args.cfg.record_timing = false;
  if (!args.gen_config_path.empty()) {
    if (!args.cfg.synthetic) args.cfg.synthetic.emplace();
    apply_json_overlay(*args.cfg.synthetic,
                       read_text_file(args.gen_config_path));
  }
  // The config file wins over any flag it sets.
  if (!args.config_path.empty()) {
    apply_json_overlay(args.cfg, read_text_file(args.config_path));
  }
  const ExperimentResult result = run_experiment(args.cfg);
  emit_outputs(result, summarize(result));
  std::cout << "experiment " << experiment << ": " << result.records.size()
            << " draws";
  if (!result.errors.empty()) {
    std::cout << ", " << result.errors.size() << " infeasible cells";
  }
  std::cout << "; outputs in " << args.cfg.output_dir << "\n";
  return 0;
}

int run_sample(const SampleArgs& args) {
  LabeledDataset dataset = [&] {
    if (!args.features.empty() && !args.labels.empty()) {
      return load_dataset(args.features, args.labels);
    }
    if (!args.gen_config_path.empty()) {
      SyntheticConfig cfg;
      apply_json_overlay(cfg, read_text_file(args.gen_config_path));
      return generate_synthetic(cfg);
    }
    throw InputError("sample needs --features/--labels or --gen-config");
  }();

  const Kernel kernel = build_gram_kernel(dataset.features());
  Rng rng(args.seed);
  const SamplerKind kind = sampler_from_name(args.sampler);

  Subset subset;
  if (kind == SamplerKind::kUnif) {
    subset = sample_uniform(dataset.n(), args.k, rng);
  } else if (kind == SamplerKind::kKdpp) {
    subset = sample_kdpp_exact(spectral_decompose(kernel), args.k, rng);
  } else {
    const LabelDimension& dim = dataset.dimension(args.quota_dim);
    std::vector<int> quotas = args.quotas;
    if (quotas.empty()) {
      if (args.k % dim.num_parts() != 0) {
        throw InputError("k is not divisible by the part count; pass --quotas");
      }
      quotas.assign(dim.num_parts(), args.k / dim.num_parts());
    }
    const QuotaConstraint quota(dim, quotas);
    if (kind == SamplerKind::kKidpp) {
      subset = sample_kidpp(kernel, quota, rng);
    } else {
      const long steps = default_mixing_steps(dataset.n(), quota.k(),
                                              args.mixing_multiplier);
      subset = sample_pdpp_mcmc(kernel, quota, steps, rng);
    }
  }

  std::cout << "items:";
  for (int id : subset.items) std::cout << ' ' << id;
  std::cout << "\n";
  for (const LabelDimension& dim : dataset.dimensions()) {
    std::cout << dim.name() << ": H = " << fairness_entropy(subset, dim)
              << " bits, effective diversity = "
              << effective_diversity(subset, dim) << "\n";
  }
  const LogDet ld = geometric_diversity(subset, kernel);
  std::cout << "ln G = ";
  if (ld.is_singular()) {
    std::cout << "-inf (singular)\n";
  } else {
    std::cout << ld.value() << "\n";
  }
  return 0;
}

int run_validate(const ValidateArgs& args) {
  bool ok = true;
  const auto report = [&](const std::string& name, double value,
                          double threshold) {
    const bool pass = value < threshold;
    ok = ok && pass;
    std::cout << (pass ? "ok  " : "FAIL") << " " << name << " = " << value
              << " (threshold " << threshold << ")\n";
  };

  {
    Rng feature_rng(Rng::derive(args.seed, {1}));
    Eigen::MatrixXd rows(8, 6);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 6; ++j) rows(i, j) = 0.05 + feature_rng.uniform01();
    }
    const Kernel kernel = build_gram_kernel(FeatureMatrix::create(rows));
    const KernelSpectrum spectrum = spectral_decompose(kernel);
    Rng rng(Rng::derive(args.seed, {2}));
    std::vector<Subset> draws;
    draws.reserve(args.draws);
    for (int i = 0; i < args.draws; ++i) {
      draws.push_back(sample_kdpp_exact(spectrum, 3, rng));
    }
    report("kdpp exact sampler TV vs enumeration",
           tv_distance(empirical_distribution(draws),
                       enumerate_kdpp(kernel, 3)),
           0.02);
  }
  {
    Rng feature_rng(Rng::derive(args.seed, {3}));
    Eigen::MatrixXd rows(10, 7);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 7; ++j) rows(i, j) = 0.05 + feature_rng.uniform01();
    }
    const Kernel kernel = build_gram_kernel(FeatureMatrix::create(rows));
    std::vector<int> labels(10, 0);
    for (int i = 5; i < 10; ++i) labels[i] = 1;
    const QuotaConstraint quota(LabelDimension("gender", labels, 2), {2, 2});
    const long burn_in = default_mixing_steps(10, 4);
    Rng rng(Rng::derive(args.seed, {4}));
    std::vector<Subset> draws;
    draws.reserve(args.chains);
    for (int i = 0; i < args.chains; ++i) {
      draws.push_back(sample_pdpp_mcmc(kernel, quota, burn_in, rng));
    }
    report("pdpp mcmc TV vs enumeration",
           tv_distance(empirical_distribution(draws),
                       enumerate_pdpp(kernel, quota)),
           0.05);

    // Conditioned k-DPP must equal the P-DPP enumeration.
    const SubsetDistribution pdpp = enumerate_pdpp(kernel, quota);
    const SubsetDistribution kdpp = enumerate_kdpp(kernel, 4);
    double feasible_mass = 0.0;
    for (std::size_t i = 0; i < kdpp.size(); ++i) {
      if (check_quota(kdpp.support[i], quota)) {
        feasible_mass += kdpp.probabilities[i];
      }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < kdpp.size(); ++i) {
      const double conditioned = check_quota(kdpp.support[i], quota)
                                     ? kdpp.probabilities[i] / feasible_mass
                                     : 0.0;
      worst = std::max(
          worst, std::abs(conditioned - pdpp.probability_of(kdpp.support[i])));
    }
    report("conditioned kdpp vs pdpp max gap", worst, 1e-10);

    Rng rng_ki(Rng::derive(args.seed, {5}));
    std::vector<Subset> ki_draws;
    ki_draws.reserve(args.draws);
    const PartitionSpectra parts =
        make_partition_spectra(kernel, quota.dimension());
    for (int i = 0; i < args.draws; ++i) {
      ki_draws.push_back(sample_kidpp(parts, quota, rng_ki));
    }
    report("kidpp sampler TV vs product enumeration",
           tv_distance(empirical_distribution(ki_draws),
                       enumerate_kidpp(kernel, quota)),
           0.02);
  }
  std::cout << (ok ? "validate: all checks passed\n"
                   : "validate: some checks FAILED\n");
  return ok ? 0 : 1;
}

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "JSON config; values in it override flags");
  cmd->add_option("--gen-config", args.gen_config_path,
                  "JSON synthetic-generator config");
  cmd->add_option("--features", args.cfg.features_path, "features CSV path");
  cmd->add_option("--labels", args.cfg.labels_path, "labels CSV path");
  cmd->add_option("--out", args.cfg.output_dir, "output directory");
  cmd->add_option("--reps", args.cfg.repetitions, "repetitions per cell");
  cmd->add_option("--seed", args.cfg.master_seed, "master seed");
  cmd->add_option("--k-grid", args.cfg.k_grid, "sample sizes")->delimiter(',');
  cmd->add_option("--bias-grid", args.cfg.bias_grid,
                  "bias fractions (experiment 3)")
      ->delimiter(',');
  cmd->add_option("--bias-k", args.cfg.bias_k, "sample size (experiment 3)");
  cmd->add_option("--biased-part", args.cfg.biased_part,
                  "part to subsample (experiment 3)");
  cmd->add_option("--samplers", args.sampler_names,
                  "subset of unif,kdpp,kidpp,pdpp")
      ->delimiter(',');
  cmd->add_option("--constrained-dim", args.cfg.constrained_dimension,
                  "dimension carrying the quotas");
  cmd->add_option("--measured-dim", args.cfg.measured_dimension,
                  "dimension fairness is measured on");
  cmd->add_option("--mixing", args.cfg.mixing_multiplier,
                  "burn-in multiplier: steps = m * k * (n - k)");
  cmd->add_flag("--no-timing", args.no_timing,
                "write zero wall-clock columns (byte-stable outputs)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fair and diverse subset sampling experiments"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "write a synthetic labeled dataset to disk");
  generate->add_option("--out", gen.out_dir, "output directory");
  generate->add_option("--config", gen.config_path,
                       "JSON generator config; overrides flags");
  generate->add_option("--count-per-cell", gen.count_per_cell,
                       "items per (gender, profession) cell");
  generate->add_option("--cell-counts", gen.cell_counts,
                       "explicit per-cell counts")
      ->delimiter(',');
  generate->add_option("--genders", gen.genders, "gender part count");
  generate->add_option("--professions", gen.professions,
                       "profession part count");
  generate->add_option("--dim", gen.dim, "feature dimension");
  generate->add_option("--spread", gen.spread, "within-cell noise scale");
  generate->add_option("--separation", gen.separation,
                       "between-cell center distance");
  generate->add_option("--gender-separation", gen.gender_separation,
                       "gender-block center distance (default: separation)");
  generate->add_option("--profession-separation", gen.profession_separation,
                       "profession-block distance (default: separation)");
  generate->add_option("--shared-mass", gen.shared_mass,
                       "mass on the shared coordinate block");
  generate->add_option("--spread-scale", gen.spread_scale,
                       "per-cell spread multipliers")
      ->delimiter(',');
  generate->add_option("--separation-scale", gen.separation_scale,
                       "per-cell separation multipliers")
      ->delimiter(',');
  generate->add_option("--seed", gen.seed, "generator seed");

  ExperimentArgs exp_args[3];
  CLI::App* exp_cmds[3];
  exp_cmds[0] = app.add_subcommand("exp1", "perfect-fairness experiment");
  exp_cmds[1] = app.add_subcommand("exp2", "hidden-attributes experiment");
  exp_cmds[2] = app.add_subcommand("exp3", "biased-dataset experiment");
  for (int i = 0; i < 3; ++i) add_experiment_flags(exp_cmds[i], exp_args[i]);

  SampleArgs sample;
  CLI::App* sample_cmd = app.add_subcommand("sample", "draw one subset");
  sample_cmd->add_option("--features", sample.features, "features CSV path");
  sample_cmd->add_option("--labels", sample.labels, "labels CSV path");
  sample_cmd->add_option("--gen-config", sample.gen_config_path,
                         "JSON synthetic-generator config");
  sample_cmd->add_option("--sampler", sample.sampler,
                         "unif | kdpp | kidpp | pdpp");
  sample_cmd->add_option("--k", sample.k, "subset size");
  sample_cmd->add_option("--quota-dim", sample.quota_dim,
                         "dimension carrying the quotas");
  sample_cmd->add_option("--quotas", sample.quotas, "per-part counts")
      ->delimiter(',');
  sample_cmd->add_option("--seed", sample.seed, "random seed");
  sample_cmd->add_option("--mixing", sample.mixing_multiplier,
                         "burn-in multiplier for pdpp");

  ValidateArgs validate;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "run the sampler-vs-oracle battery");
  validate_cmd->add_option("--seed", validate.seed, "random seed");
  validate_cmd->add_option("--draws", validate.draws,
                           "draws for the exact samplers");
  validate_cmd->add_option("--chains", validate.chains,
                           "independent chains for pdpp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    for (int i = 0; i < 3; ++i) {
      if (exp_cmds[i]->parsed()) {
        return run_experiment_command(exp_args[i], i + 1);
      }
    }
    if (sample_cmd->parsed()) return run_sample(sample);
    if (validate_cmd->parsed()) return run_validate(validate);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible quota: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
