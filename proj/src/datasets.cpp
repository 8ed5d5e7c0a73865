// Apache License, Version 2.0, refer to LICENSE.txt

#include "fairdiv/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "fairdiv/errors.hpp"
#include "fairdiv/samplers.hpp"

namespace fairdiv {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace.
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& token, double* out) {
  if (token.empty()) return false;
  char* tail = nullptr;
  const double value = std::strtod(token.c_str(), &tail);
  if (tail != token.c_str() + token.size()) return false;
  *out = value;
  return true;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Joint label over all base dimensions with canonical mixed-radix part ids,
// so ids stay stable when items are removed.
LabelDimension derive_product(const std::vector<LabelDimension>& base) {
  std::string name;
  int parts = 1;
  for (std::size_t d = 0; d < base.size(); ++d) {
    if (d > 0) name += "_x_";
    name += base[d].name();
    parts *= base[d].num_parts();
  }
  const int n = base.front().n();
  std::vector<int> labels(n, 0);
  for (int i = 0; i < n; ++i) {
    int id = 0;
    for (const LabelDimension& dim : base) {
      id = id * dim.num_parts() + dim.label(i);
    }
    labels[i] = id;
  }
  std::vector<std::string> part_names(parts);
  for (int id = 0; id < parts; ++id) {
    int rest = id;
    std::vector<int> digits(base.size());
    for (int d = static_cast<int>(base.size()) - 1; d >= 0; --d) {
      digits[d] = rest % base[d].num_parts();
      rest /= base[d].num_parts();
    }
    std::string pname;
    for (std::size_t d = 0; d < base.size(); ++d) {
      if (d > 0) pname += "_";
      pname += base[d].part_names()[digits[d]];
    }
    part_names[id] = pname;
  }
  return LabelDimension(name, std::move(labels), parts, std::move(part_names));
}

}  // namespace

LabeledDataset::LabeledDataset(FeatureMatrix features,
                               std::vector<LabelDimension> dimensions,
                               std::string provenance)
    : features_(std::move(features)),
      dimensions_(std::move(dimensions)),
      provenance_(std::move(provenance)) {
  if (dimensions_.empty()) {
    throw InputError("dataset needs at least one label dimension");
  }
  for (const LabelDimension& dim : dimensions_) {
    if (dim.n() != features_.n()) {
      throw InputError("dimension '" + dim.name() + "' labels " +
                       std::to_string(dim.n()) + " items but features have " +
                       std::to_string(features_.n()));
    }
  }
  if (dimensions_.size() >= 2) {
    dimensions_.push_back(derive_product(dimensions_));
  }
}

bool LabeledDataset::has_dimension(const std::string& name) const {
  for (const LabelDimension& dim : dimensions_) {
    if (dim.name() == name) return true;
  }
  return false;
}

const LabelDimension& LabeledDataset::dimension(const std::string& name) const {
  for (const LabelDimension& dim : dimensions_) {
    if (dim.name() == name) return dim;
  }
  throw InputError("dataset has no dimension named '" + name + "'");
}

void SyntheticConfig::validate() const {
  if (num_genders < 1 || num_professions < 1) {
    throw InputError("synthetic config needs at least one part per factor");
  }
  const int cells = num_genders * num_professions;
  if (static_cast<int>(cell_counts.size()) != cells) {
    throw InputError("synthetic config has " +
                     std::to_string(cell_counts.size()) +
                     " cell counts, expected " + std::to_string(cells));
  }
  for (int c : cell_counts) {
    if (c < 1) throw InputError("every cell count must be at least 1");
  }
  if (!cell_spread_scale.empty() &&
      static_cast<int>(cell_spread_scale.size()) != cells) {
    throw InputError("cell_spread_scale must be empty or one entry per cell");
  }
  for (double s : cell_spread_scale) {
    if (!(s > 0.0)) throw InputError("cell spread scales must be positive");
  }
  if (!cell_separation_scale.empty() &&
      static_cast<int>(cell_separation_scale.size()) != cells) {
    throw InputError(
        "cell_separation_scale must be empty or one entry per cell");
  }
  for (double s : cell_separation_scale) {
    if (s < 0.0) throw InputError("cell separation scales must be nonnegative");
  }
  if (!profession_labels.empty()) {
    if (static_cast<int>(profession_labels.size()) != num_professions) {
      throw InputError("profession_labels must map every generator slot");
    }
    const int parts =
        *std::max_element(profession_labels.begin(), profession_labels.end()) +
        1;
    std::vector<char> seen(parts, 0);
    for (int label : profession_labels) {
      if (label < 0) throw InputError("profession labels must be nonnegative");
      seen[label] = 1;
    }
    for (int p = 0; p < parts; ++p) {
      if (!seen[p]) {
        throw InputError("profession labels must cover 0..max without gaps");
      }
    }
  }
  if (!(spread > 0.0)) throw InputError("spread must be positive");
  if (separation < 0.0) throw InputError("separation must be nonnegative");
  if (shared_mass < 0.0) throw InputError("shared_mass must be nonnegative");
  const int blocks = 1 + num_genders + num_professions;
  if (feature_dim < blocks) {
    throw InputError("feature_dim must be at least " + std::to_string(blocks) +
                     " to give every factor its own coordinate block");
  }
}

int SyntheticConfig::total_items() const {
  int n = 0;
  for (int c : cell_counts) n += c;
  return n;
}

double SyntheticConfig::effective_gender_separation() const {
  return gender_separation >= 0.0 ? gender_separation : separation;
}

double SyntheticConfig::effective_profession_separation() const {
  return profession_separation >= 0.0 ? profession_separation : separation;
}

LabeledDataset generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  const int genders = config.num_genders;
  const int professions = config.num_professions;
  const int d = config.feature_dim;
  const int n = config.total_items();

  // Coordinate blocks: [shared | gender_0 .. | profession_0 ..]; the shared
  // block absorbs the remainder of the division.
  const int blocks = 1 + genders + professions;
  const int block = d / blocks;
  const int shared = block + d % blocks;
  const auto gender_offset = [&](int g) { return shared + g * block; };
  const auto profession_offset = [&](int q) {
    return shared + genders * block + q * block;
  };

  Eigen::MatrixXd rows(n, d);
  std::vector<int> gender_labels(n);
  std::vector<int> profession_labels(n);
  Rng rng(config.seed);

  int item = 0;
  for (int g = 0; g < genders; ++g) {
    for (int q = 0; q < professions; ++q) {
      const int cell = g * professions + q;
      const double scale = config.cell_spread_scale.empty()
                               ? 1.0
                               : config.cell_spread_scale[cell];
      const double sep_scale = config.cell_separation_scale.empty()
                                   ? 1.0
                                   : config.cell_separation_scale[cell];
      Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
      center.segment(0, shared).setConstant(config.shared_mass);
      center.segment(gender_offset(g), block)
          .setConstant(sep_scale * config.effective_gender_separation());
      center.segment(profession_offset(q), block)
          .setConstant(sep_scale * config.effective_profession_separation());

      for (int i = 0; i < config.cell_counts[cell]; ++i, ++item) {
        double norm_sq = 0.0;
        do {
          norm_sq = 0.0;
          for (int c = 0; c < d; ++c) {
            const double v = std::max(
                0.0, center(c) + config.spread * scale * rng.normal());
            rows(item, c) = v;
            norm_sq += v * v;
          }
        } while (norm_sq <= 0.0);
        gender_labels[item] = g;
        profession_labels[item] = config.profession_labels.empty()
                                      ? q
                                      : config.profession_labels[q];
      }
    }
  }

  // Normalize rows up front so the stored features match the kernel policy.
  for (int i = 0; i < n; ++i) {
    double norm = 1.0;
    if (config.normalization == RowNormalization::kL2) {
      norm = rows.row(i).norm();
    } else if (config.normalization == RowNormalization::kL1) {
      norm = rows.row(i).lpNorm<1>();
    }
    rows.row(i) /= norm;
  }

  std::vector<std::string> gender_names;
  if (genders == 2) {
    gender_names = {"male", "female"};
  } else {
    for (int g = 0; g < genders; ++g) {
      gender_names.push_back("g" + std::to_string(g));
    }
  }
  const int profession_parts =
      config.profession_labels.empty()
          ? professions
          : *std::max_element(config.profession_labels.begin(),
                              config.profession_labels.end()) +
                1;
  std::vector<std::string> profession_names;
  if (profession_parts == 2) {
    profession_names = {"scientist", "artist"};
  } else if (profession_parts == 1) {
    profession_names = {"scientist"};
  } else {
    for (int q = 0; q < profession_parts; ++q) {
      profession_names.push_back("p" + std::to_string(q));
    }
  }

  std::vector<LabelDimension> dims;
  dims.emplace_back("gender", std::move(gender_labels), genders,
                    std::move(gender_names));
  dims.emplace_back("profession", std::move(profession_labels),
                    profession_parts, std::move(profession_names));
  return LabeledDataset(FeatureMatrix::create(std::move(rows)),
                        std::move(dims), "synthetic");
}

LabeledDataset bias_subsample(const LabeledDataset& dataset,
                              const std::string& dimension_name, int part,
                              double target_fraction, Rng& rng) {
  const LabelDimension& dim = dataset.dimension(dimension_name);
  if (part < 0 || part >= dim.num_parts()) {
    throw InputError("dimension '" + dimension_name + "' has no part " +
                     std::to_string(part));
  }
  if (!(target_fraction > 0.0) || target_fraction > 1.0) {
    throw InputError("target fraction must be in (0, 1]");
  }

  std::vector<int> in_part;
  std::vector<char> keep(dataset.n(), 0);
  int others = 0;
  for (int i = 0; i < dataset.n(); ++i) {
    if (dim.label(i) == part) {
      in_part.push_back(i);
    } else {
      keep[i] = 1;
      ++others;
    }
  }

  int retained;
  if (others == 0) {
    retained = static_cast<int>(in_part.size());  // trivially all of the part
  } else if (target_fraction >= 1.0) {
    throw InputError("target fraction 1 is infeasible while other parts hold " +
                     std::to_string(others) + " items");
  } else {
    const double wanted =
        others * target_fraction / (1.0 - target_fraction);
    retained = std::max(1, static_cast<int>(std::llround(wanted)));
    if (retained > static_cast<int>(in_part.size())) {
      throw InputError("target fraction " + std::to_string(target_fraction) +
                       " needs " + std::to_string(retained) + " items of '" +
                       dim.part_names()[part] + "' but only " +
                       std::to_string(in_part.size()) + " exist");
    }
  }

  const Subset chosen =
      sample_uniform(static_cast<int>(in_part.size()), retained, rng);
  for (int pos : chosen.items) keep[in_part[pos]] = 1;

  std::vector<int> old_ids;
  for (int i = 0; i < dataset.n(); ++i) {
    if (keep[i]) old_ids.push_back(i);
  }

  const int m = static_cast<int>(old_ids.size());
  Eigen::MatrixXd rows(m, dataset.features().d());
  for (int i = 0; i < m; ++i) {
    rows.row(i) = dataset.features().values().row(old_ids[i]);
  }

  // Rebuild from base dimensions; the product is re-derived with the same
  // canonical part ids.
  std::vector<LabelDimension> dims;
  for (const LabelDimension& source : dataset.dimensions()) {
    if (source.name().find("_x_") != std::string::npos) continue;
    std::vector<int> labels(m);
    for (int i = 0; i < m; ++i) labels[i] = source.label(old_ids[i]);
    dims.emplace_back(source.name(), std::move(labels), source.num_parts(),
                      source.part_names());
  }
  return LabeledDataset(FeatureMatrix::create(std::move(rows)),
                        std::move(dims),
                        dataset.provenance() + ";biased");
}

LabeledDataset load_dataset(const std::string& features_path,
                            const std::string& labels_path) {
  const std::vector<std::string> feature_lines = read_lines(features_path);
  if (feature_lines.empty()) {
    throw InputError("features file '" + features_path + "' is empty");
  }

  // A non-numeric first row is a header.
  std::size_t first_row = 0;
  {
    double ignored;
    for (const std::string& token : split_csv_line(feature_lines[0])) {
      if (!parse_double(token, &ignored)) {
        first_row = 1;
        break;
      }
    }
  }
  const int n = static_cast<int>(feature_lines.size() - first_row);
  if (n == 0) {
    throw InputError("features file '" + features_path + "' has a header but "
                     "no data rows");
  }

  std::vector<std::vector<double>> parsed;
  parsed.reserve(n);
  std::size_t width = 0;
  for (std::size_t r = first_row; r < feature_lines.size(); ++r) {
    const std::vector<std::string> fields = split_csv_line(feature_lines[r]);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& token : fields) {
      double value;
      if (!parse_double(token, &value)) {
        throw InputError("features file '" + features_path + "' line " +
                         std::to_string(r + 1) + ": '" + token +
                         "' is not a number");
      }
      row.push_back(value);
    }
    if (parsed.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw InputError("features file '" + features_path + "' line " +
                       std::to_string(r + 1) + " has " +
                       std::to_string(row.size()) + " columns, expected " +
                       std::to_string(width));
    }
    parsed.push_back(std::move(row));
  }

  Eigen::MatrixXd values(n, static_cast<int>(width));
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) values(i, j) = parsed[i][j];
  }

  const std::vector<std::string> label_lines = read_lines(labels_path);
  std::size_t label_first = 0;
  std::vector<std::string> dim_names;
  if (static_cast<int>(label_lines.size()) == n + 1) {
    label_first = 1;
    dim_names = split_csv_line(label_lines[0]);
  } else if (static_cast<int>(label_lines.size()) != n) {
    throw InputError("labels file '" + labels_path + "' has " +
                     std::to_string(label_lines.size()) +
                     " rows but features file '" + features_path + "' has " +
                     std::to_string(n) + " rows");
  }

  const std::size_t columns = split_csv_line(label_lines[label_first]).size();
  if (dim_names.empty()) {
    for (std::size_t c = 0; c < columns; ++c) {
      dim_names.push_back("label" + std::to_string(c));
    }
  }
  if (dim_names.size() != columns) {
    throw InputError("labels file '" + labels_path + "' header has " +
                     std::to_string(dim_names.size()) + " names but rows have " +
                     std::to_string(columns) + " columns");
  }

  // Map every column's values to part ids in file order.
  std::vector<std::vector<int>> labels(columns, std::vector<int>(n));
  std::vector<std::vector<std::string>> part_names(columns);
  std::vector<std::map<std::string, int>> id_of(columns);
  for (int i = 0; i < n; ++i) {
    const std::vector<std::string> fields =
        split_csv_line(label_lines[label_first + i]);
    if (fields.size() != columns) {
      throw InputError("labels file '" + labels_path + "' line " +
                       std::to_string(label_first + i + 1) + " has " +
                       std::to_string(fields.size()) + " columns, expected " +
                       std::to_string(columns));
    }
    for (std::size_t c = 0; c < columns; ++c) {
      auto [it, inserted] = id_of[c].try_emplace(
          fields[c], static_cast<int>(part_names[c].size()));
      if (inserted) part_names[c].push_back(fields[c]);
      labels[c][i] = it->second;
    }
  }

  std::vector<LabelDimension> dims;
  for (std::size_t c = 0; c < columns; ++c) {
    dims.emplace_back(dim_names[c], std::move(labels[c]),
                      static_cast<int>(part_names[c].size()),
                      std::move(part_names[c]));
  }
  return LabeledDataset(FeatureMatrix::create(std::move(values)),
                        std::move(dims), features_path + ";" + labels_path);
}

void save_dataset(const LabeledDataset& dataset,
                  const std::string& features_path,
                  const std::string& labels_path) {
  std::ofstream features(features_path);
  if (!features) {
    throw IoError("cannot open '" + features_path + "' for writing");
  }
  const Eigen::MatrixXd& values = dataset.features().values();
  for (int i = 0; i < dataset.n(); ++i) {
    for (int j = 0; j < dataset.features().d(); ++j) {
      if (j > 0) features << ',';
      features << format_double(values(i, j));
    }
    features << '\n';
  }
  if (!features.flush()) {
    throw IoError("failed writing '" + features_path + "'");
  }

  std::vector<const LabelDimension*> base;
  for (const LabelDimension& dim : dataset.dimensions()) {
    if (dim.name().find("_x_") == std::string::npos) base.push_back(&dim);
  }

  std::ofstream labels(labels_path);
  if (!labels) throw IoError("cannot open '" + labels_path + "' for writing");
  for (std::size_t c = 0; c < base.size(); ++c) {
    if (c > 0) labels << ',';
    labels << base[c]->name();
  }
  labels << '\n';
  for (int i = 0; i < dataset.n(); ++i) {
    for (std::size_t c = 0; c < base.size(); ++c) {
      if (c > 0) labels << ',';
      labels << base[c]->part_names()[base[c]->label(i)];
    }
    labels << '\n';
  }
  if (!labels.flush()) throw IoError("failed writing '" + labels_path + "'");
}

}  // namespace fairdiv
