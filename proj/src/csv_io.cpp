#include "notmf/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "notmf/errors.hpp"

namespace notmf {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

bool is_missing_token(const std::string& cell) {
  if (cell.empty()) return true;
  return cell == "nan" || cell == "NaN" || cell == "NAN";
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                     ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw NumericalError("failed to format value");
  }
  return std::string(buffer, ptr);
}

Dataset load_csv(const std::string& path, bool zero_as_missing) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) {
    throw ParseError("'" + path + "': missing header row or data rows");
  }

  const std::vector<std::string> header = split_line(lines[0]);
  if (header.size() < 2) {
    throw ParseError("'" + path + "': header must hold a corner cell and time labels");
  }
  const std::size_t t_len = header.size() - 1;
  std::vector<std::string> col_labels(header.begin() + 1, header.end());

  const std::size_t n = lines.size() - 1;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t_len));
  MaskArray mask(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t_len));
  std::vector<std::string> row_labels;
  row_labels.reserve(n);

  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t file_row = r + 2;  // 1-based, after the header
    const std::vector<std::string> cells = split_line(lines[r + 1]);
    if (cells.size() != t_len + 1) {
      throw ParseError("'" + path + "': row " + std::to_string(file_row) + " has " +
                       std::to_string(cells.size() - 1) + " cells, expected " +
                       std::to_string(t_len));
    }
    row_labels.push_back(cells[0]);
    for (std::size_t c = 0; c < t_len; ++c) {
      const std::string& cell = cells[c + 1];
      const Eigen::Index i = static_cast<Eigen::Index>(r);
      const Eigen::Index t = static_cast<Eigen::Index>(c);
      if (is_missing_token(cell)) {
        values(i, t) = 0.0;
        mask(i, t) = false;
        continue;
      }
      const double value = parse_cell(cell, file_row, c + 2);
      if (std::isnan(value)) {
        values(i, t) = 0.0;
        mask(i, t) = false;
      } else if (zero_as_missing && value == 0.0) {
        values(i, t) = 0.0;
        mask(i, t) = false;
      } else {
        values(i, t) = value;
        mask(i, t) = true;
      }
    }
  }
  return Dataset(MaskedMatrix(std::move(values), std::move(mask)), std::move(row_labels),
                 std::move(col_labels));
}

void save_csv(const Dataset& dataset, const std::string& path) {
  const MaskedMatrix& m = dataset.matrix;
  if (dataset.row_labels.size() != static_cast<std::size_t>(m.rows()) ||
      dataset.col_labels.size() != static_cast<std::size_t>(m.cols())) {
    throw DimensionError("label count does not match matrix shape");
  }
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write '" + path + "'");
  }
  out << "series";
  for (const std::string& label : dataset.col_labels) {
    out << ',' << label;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << dataset.row_labels[static_cast<std::size_t>(i)];
    for (Eigen::Index t = 0; t < m.cols(); ++t) {
      out << ',';
      if (m.mask()(i, t)) {
        out << format_double(m.values()(i, t));
      }
    }
    out << '\n';
  }
  if (!out) {
    throw ParseError("write failed for '" + path + "'");
  }
}

std::vector<std::string> default_row_labels(Eigen::Index n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    labels.push_back("s" + std::to_string(i + 1));
  }
  return labels;
}

std::vector<std::string> default_col_labels(Eigen::Index t, Eigen::Index start) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(t));
  for (Eigen::Index c = 0; c < t; ++c) {
    labels.push_back("t" + std::to_string(start + c + 1));
  }
  return labels;
}

}  // namespace notmf
