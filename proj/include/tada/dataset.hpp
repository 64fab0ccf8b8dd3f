#pragma once

// Tabular datasets with numeric/categorical features and +/-1 labels,
// CSV ingestion, stratified folds and label noise.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tada {

enum class FeatureKind { numeric, categorical };

struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<double> numeric;           // kind == numeric
  std::vector<int> codes;                // kind == categorical; index into categories
  std::vector<std::string> categories;   // sorted, distinct

  std::size_t category_count() const noexcept { return categories.size(); }
  bool operator==(const Column&) const = default;
};

/// Immutable once built. Labels are -1/+1; `label_names` holds the original
/// values mapped to -1 and +1 respectively.
class Dataset {
 public:
  Dataset() = default;
  /// Validates shapes and labels (both classes present is not required
  /// here; see `require_both_classes`).
  Dataset(std::vector<Column> columns, std::vector<int> labels, std::string label_column,
          std::pair<std::string, std::string> label_names);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t feature_count() const noexcept { return columns_.size(); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t k) const { return columns_[k]; }
  std::span<const int> labels() const noexcept { return labels_; }
  int label(std::size_t row) const { return labels_[row]; }
  const std::string& label_column() const noexcept { return label_column_; }
  const std::pair<std::string, std::string>& label_names() const noexcept {
    return label_names_;
  }

  std::size_t count_label(int y) const;
  void require_both_classes() const;

  /// Rows in the given order; categorical dictionaries are shared so
  /// hypotheses trained on one subset evaluate on another.
  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_labels(std::vector<int> labels) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<Column> columns_;
  std::vector<int> labels_;
  std::string label_column_;
  std::pair<std::string, std::string> label_names_;
};

/// `label_column` is a header name or "last".
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column = "last");
Dataset parse_csv(const std::string& text, const std::string& label_column = "last");

/// Writes features in column order followed by the label column.
void write_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv(const Dataset& data);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<Fold> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed);

struct NoisyDataset {
  Dataset data;
  std::vector<std::size_t> flipped;  // rows whose label was flipped
};

NoisyDataset inject_label_noise(const Dataset& data, double eta, std::uint64_t seed);

}  // namespace tada
