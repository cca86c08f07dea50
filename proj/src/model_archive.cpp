#include "notmf/model_archive.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "notmf/errors.hpp"

namespace notmf {

namespace {

constexpr char kMagic[8] = {'N', 'O', 'T', 'M', 'F', 'B', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw ParseError("'" + path + "': truncated model archive");
  }
  return value;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  write_pod<std::int64_t>(out, m.rows());
  write_pod<std::int64_t>(out, m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      write_pod<double>(out, m(r, c));
    }
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& path) {
  const auto rows = read_pod<std::int64_t>(in, path);
  const auto cols = read_pod<std::int64_t>(in, path);
  if (rows < 0 || cols < 0 || (rows > 0 && cols > (1LL << 40) / rows)) {
    throw ParseError("'" + path + "': implausible matrix shape in archive");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = read_pod<double>(in, path);
    }
  }
  return m;
}

}  // namespace

void save_model(const FactorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot write '" + path + "'");
  }
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod<std::int32_t>(out, model.config.rank);
  write_pod<std::int32_t>(out, model.config.order);
  write_pod<std::int32_t>(out, model.config.season);
  write_pod<double>(out, model.config.lambda);
  write_pod<double>(out, model.config.rho);
  write_pod<std::int32_t>(out, model.config.outer_iters);
  write_pod<std::int32_t>(out, model.config.cg_iters);
  write_pod<double>(out, model.config.cg_tol);
  write_pod<std::int32_t>(out, static_cast<std::int32_t>(model.config.variant));
  write_pod<std::uint64_t>(out, model.config.seed);
  write_pod<std::uint8_t>(out, model.config.standardize ? 1 : 0);
  write_pod<std::uint8_t>(out, model.coeffs.diagonal ? 1 : 0);
  write_matrix(out, model.w);
  write_matrix(out, model.x);
  write_matrix(out, model.coeffs.stacked);
  write_pod<std::uint64_t>(out, model.objective_trace.size());
  for (double v : model.objective_trace) {
    write_pod<double>(out, v);
  }
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(model.row_offset.size()));
  for (Eigen::Index i = 0; i < model.row_offset.size(); ++i) {
    write_pod<double>(out, model.row_offset(i));
  }
  for (Eigen::Index i = 0; i < model.row_scale.size(); ++i) {
    write_pod<double>(out, model.row_scale(i));
  }
  if (!out) {
    throw ParseError("write failed for '" + path + "'");
  }
}

FactorModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("'" + path + "' is not a model archive");
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw ParseError("'" + path + "': unsupported archive version " + std::to_string(version));
  }
  FactorModel model;
  model.config.rank = read_pod<std::int32_t>(in, path);
  model.config.order = read_pod<std::int32_t>(in, path);
  model.config.season = read_pod<std::int32_t>(in, path);
  model.config.lambda = read_pod<double>(in, path);
  model.config.rho = read_pod<double>(in, path);
  model.config.outer_iters = read_pod<std::int32_t>(in, path);
  model.config.cg_iters = read_pod<std::int32_t>(in, path);
  model.config.cg_tol = read_pod<double>(in, path);
  model.config.variant = static_cast<Variant>(read_pod<std::int32_t>(in, path));
  model.config.seed = read_pod<std::uint64_t>(in, path);
  model.config.standardize = read_pod<std::uint8_t>(in, path) != 0;
  const bool diagonal = read_pod<std::uint8_t>(in, path) != 0;
  model.w = read_matrix(in, path);
  model.x = read_matrix(in, path);
  model.coeffs.stacked = read_matrix(in, path);
  model.coeffs.order = model.config.order;
  model.coeffs.diagonal = diagonal;
  const auto trace_len = read_pod<std::uint64_t>(in, path);
  model.objective_trace.resize(trace_len);
  for (std::uint64_t i = 0; i < trace_len; ++i) {
    model.objective_trace[i] = read_pod<double>(in, path);
  }
  const auto std_len = read_pod<std::uint64_t>(in, path);
  model.row_offset.resize(static_cast<Eigen::Index>(std_len));
  model.row_scale.resize(static_cast<Eigen::Index>(std_len));
  for (std::uint64_t i = 0; i < std_len; ++i) {
    model.row_offset(static_cast<Eigen::Index>(i)) = read_pod<double>(in, path);
  }
  for (std::uint64_t i = 0; i < std_len; ++i) {
    model.row_scale(static_cast<Eigen::Index>(i)) = read_pod<double>(in, path);
  }
  return model;
}

}  // namespace notmf
