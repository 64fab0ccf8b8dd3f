#include "tada/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "tada/errors.hpp"
#include "tada/rng.hpp"

namespace tada {

namespace {

using Table = std::vector<std::vector<std::string>>;

// RFC-4180 records: quoted fields may contain separators, doubled quotes and
// line breaks; both LF and CRLF terminate records.
Table parse_records(const std::string& text) {
  Table rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t line = 1;
  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_row = [&] {
    end_cell();
    const bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (cell_started) {
          throw Error(ErrorCode::parse,
                      "stray quote inside an unquoted cell on line " + std::to_string(line));
        }
        quoted = true;
        cell_started = true;
        break;
      case ',': end_cell(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_row();
        ++line;
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::parse, "unterminated quoted cell");
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  return rows;
}

bool parse_real(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::string format_real(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Column build_column(std::string name, const Table& rows, std::size_t col) {
  Column out;
  out.name = std::move(name);
  std::vector<double> numeric;
  numeric.reserve(rows.size() - 1);
  bool is_numeric = true;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    double x = 0.0;
    if (!parse_real(rows[r][col], x)) {
      is_numeric = false;
      break;
    }
    numeric.push_back(x);
  }
  if (is_numeric) {
    out.kind = FeatureKind::numeric;
    out.numeric = std::move(numeric);
    return out;
  }
  out.kind = FeatureKind::categorical;
  std::set<std::string> distinct;
  for (std::size_t r = 1; r < rows.size(); ++r) distinct.insert(rows[r][col]);
  if (distinct.size() < 2) {
    throw Error(ErrorCode::parse, "categorical column '" + out.name + "' has a single value");
  }
  out.categories.assign(distinct.begin(), distinct.end());
  out.codes.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto it = std::lower_bound(out.categories.begin(), out.categories.end(), rows[r][col]);
    out.codes.push_back(static_cast<int>(it - out.categories.begin()));
  }
  return out;
}

}  // namespace

Dataset::Dataset(std::vector<Column> columns, std::vector<int> labels, std::string label_column,
                 std::pair<std::string, std::string> label_names)
    : columns_(std::move(columns)),
      labels_(std::move(labels)),
      label_column_(std::move(label_column)),
      label_names_(std::move(label_names)) {
  for (const int y : labels_) {
    if (y != 1 && y != -1) throw Error(ErrorCode::invalid_argument, "labels must be -1 or +1");
  }
  for (const Column& c : columns_) {
    if (c.kind == FeatureKind::numeric) {
      if (c.numeric.size() != labels_.size() || !c.codes.empty()) {
        throw Error(ErrorCode::invalid_argument, "column '" + c.name + "' has the wrong length");
      }
      for (const double x : c.numeric) {
        if (!std::isfinite(x)) {
          throw Error(ErrorCode::invalid_argument, "column '" + c.name + "' has a non-finite value");
        }
      }
    } else {
      if (c.codes.size() != labels_.size() || !c.numeric.empty()) {
        throw Error(ErrorCode::invalid_argument, "column '" + c.name + "' has the wrong length");
      }
      for (const int code : c.codes) {
        if (code < 0 || static_cast<std::size_t>(code) >= c.categories.size()) {
          throw Error(ErrorCode::invalid_argument, "column '" + c.name + "' has a bad category code");
        }
      }
    }
  }
}

std::size_t Dataset::count_label(int y) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

void Dataset::require_both_classes() const {
  if (count_label(1) == 0 || count_label(-1) == 0) {
    throw Error(ErrorCode::single_class, "both classes must be present");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const Column& c : columns_) {
    Column out;
    out.name = c.name;
    out.kind = c.kind;
    out.categories = c.categories;
    if (c.kind == FeatureKind::numeric) {
      out.numeric.reserve(rows.size());
      for (const std::size_t r : rows) out.numeric.push_back(c.numeric.at(r));
    } else {
      out.codes.reserve(rows.size());
      for (const std::size_t r : rows) out.codes.push_back(c.codes.at(r));
    }
    cols.push_back(std::move(out));
  }
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (const std::size_t r : rows) labels.push_back(labels_.at(r));
  return Dataset(std::move(cols), std::move(labels), label_column_, label_names_);
}

Dataset Dataset::with_labels(std::vector<int> labels) const {
  if (labels.size() != labels_.size()) {
    throw Error(ErrorCode::invalid_argument, "label vector has the wrong length");
  }
  return Dataset(columns_, std::move(labels), label_column_, label_names_);
}

Dataset parse_csv(const std::string& text, const std::string& label_column) {
  const Table rows = parse_records(text);
  if (rows.empty()) throw Error(ErrorCode::parse, "empty CSV (a header row is required)");
  const std::vector<std::string>& header = rows[0];
  if (header.size() < 2) throw Error(ErrorCode::parse, "CSV needs at least two columns");
  if (rows.size() < 2) throw Error(ErrorCode::parse, "CSV has no data rows");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw Error(ErrorCode::parse, "record " + std::to_string(r) + " has " +
                                        std::to_string(rows[r].size()) + " cells, expected " +
                                        std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (rows[r][c].empty()) {
        throw Error(ErrorCode::parse, "missing cell in record " + std::to_string(r) +
                                          ", column '" + header[c] + "'");
      }
    }
  }

  std::size_t label_idx = header.size() - 1;
  if (label_column != "last") {
    const auto n = std::count(header.begin(), header.end(), label_column);
    if (n != 1) {
      throw Error(ErrorCode::parse, n == 0 ? "no column named '" + label_column + "'"
                                           : "column name '" + label_column + "' is ambiguous");
    }
    label_idx = static_cast<std::size_t>(
        std::find(header.begin(), header.end(), label_column) - header.begin());
  }

  std::set<std::string> label_values;
  for (std::size_t r = 1; r < rows.size(); ++r) label_values.insert(rows[r][label_idx]);
  if (label_values.size() != 2) {
    throw Error(label_values.size() < 2 ? ErrorCode::single_class : ErrorCode::parse,
                "label column must have exactly two values, found " +
                    std::to_string(label_values.size()));
  }
  const std::string& neg = *label_values.begin();
  const std::string& pos = *label_values.rbegin();
  std::vector<int> labels;
  labels.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) labels.push_back(rows[r][label_idx] == neg ? -1 : 1);

  std::vector<Column> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) columns.push_back(build_column(header[c], rows, c));
  }
  return Dataset(std::move(columns), std::move(labels), header[label_idx], {neg, pos});
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), label_column);
}

std::string to_csv(const Dataset& data) {
  std::string out;
  for (const Column& c : data.columns()) {
    out += quote_if_needed(c.name);
    out += ',';
  }
  out += quote_if_needed(data.label_column());
  out += '\n';
  const std::string neg = quote_if_needed(data.label_names().first);
  const std::string pos = quote_if_needed(data.label_names().second);
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (const Column& c : data.columns()) {
      out += c.kind == FeatureKind::numeric ? format_real(c.numeric[r])
                                            : quote_if_needed(c.categories[c.codes[r]]);
      out += ',';
    }
    out += data.label(r) < 0 ? neg : pos;
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << to_csv(data);
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::vector<Fold> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "need at least two folds");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.label(i) > 0 ? 1 : 0].push_back(i);
  for (const auto& members : by_class) {
    if (members.size() < k) {
      throw Error(ErrorCode::invalid_argument,
                  "a class has fewer examples than folds (" + std::to_string(members.size()) +
                      " < " + std::to_string(k) + ")");
    }
  }
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::folds)}));
  std::vector<std::size_t> fold_of(data.size());
  // One counter across both classes keeps fold sizes within one example.
  std::size_t counter = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (const std::size_t i : members) fold_of[i] = counter++ % k;
  }
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (fold_of[i] == f ? folds[f].test : folds[f].train).push_back(i);
    }
  }
  return folds;
}

NoisyDataset inject_label_noise(const Dataset& data, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "noise rate must lie in [0, 1)");
  }
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::noise)}));
  std::vector<int> labels(data.labels().begin(), data.labels().end());
  std::vector<std::size_t> flipped;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (rng.bernoulli(eta)) {
      labels[i] = -labels[i];
      flipped.push_back(i);
    }
  }
  return {data.with_labels(std::move(labels)), std::move(flipped)};
}

}  // namespace tada
