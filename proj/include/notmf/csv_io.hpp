#ifndef NOTMF_CSV_IO_HPP
#define NOTMF_CSV_IO_HPP

#include <string>
#include <vector>

#include "notmf/masked_matrix.hpp"

namespace notmf {

// A MaskedMatrix plus the labels carried by its CSV representation.
struct Dataset {
  MaskedMatrix matrix;
  std::vector<std::string> row_labels;  // series identifiers, size N
  std::vector<std::string> col_labels;  // time labels, size T

  Dataset(MaskedMatrix m, std::vector<std::string> rows, std::vector<std::string> cols)
      : matrix(std::move(m)), row_labels(std::move(rows)), col_labels(std::move(cols)) {}
};

// Layout: first row is "corner,time labels...", first column holds series
// identifiers, body cells are values. Empty cells and nan are always missing;
// a numeric 0 is missing only when zero_as_missing is set. Numbers are parsed
// and emitted in shortest round-trip decimal form, so emit(load(f)) is stable.
Dataset load_csv(const std::string& path, bool zero_as_missing);

void save_csv(const Dataset& dataset, const std::string& path);

// Canonical number formatting used by every CSV/report writer.
std::string format_double(double value);

// Label helpers for synthesized datasets and forecast emission.
std::vector<std::string> default_row_labels(Eigen::Index n);
std::vector<std::string> default_col_labels(Eigen::Index t, Eigen::Index start = 0);

}  // namespace notmf

#endif
