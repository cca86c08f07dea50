#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "notmf/csv_io.hpp"
#include "notmf/errors.hpp"
#include "notmf/eval.hpp"
#include "notmf/model.hpp"
#include "notmf/model_archive.hpp"
#include "notmf/rng.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("notmf_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  out << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("load_csv parses labels, values and missing cells") {
  TempDir dir;
  const std::string path = dir.file("data.csv");
  write_file(path, "series,t1,t2,t3\nalpha,1.5,,3\nbeta,0,2.25,4.5\n");
  const notmf::Dataset data = notmf::load_csv(path, false);
  CHECK(data.matrix.rows() == 2);
  CHECK(data.matrix.cols() == 3);
  CHECK(data.matrix.observed_count() == 5);
  CHECK(data.row_labels[0] == "alpha");
  CHECK(data.col_labels[2] == "t3");
  CHECK(data.matrix.values()(0, 0) == 1.5);
  CHECK_FALSE(data.matrix.mask()(0, 1));
  CHECK(data.matrix.mask()(1, 0));

  const notmf::Dataset zero_missing = notmf::load_csv(path, true);
  CHECK_FALSE(zero_missing.matrix.mask()(1, 0));
  CHECK(zero_missing.matrix.observed_count() == 4);
}

TEST_CASE("nan tokens are always missing") {
  TempDir dir;
  const std::string path = dir.file("nans.csv");
  write_file(path, "series,t1,t2,t3\na,nan,NaN,1\nb,2,nan,3\n");
  const notmf::Dataset data = notmf::load_csv(path, false);
  CHECK(data.matrix.observed_count() == 3);
  CHECK_FALSE(data.matrix.mask()(0, 0));
  CHECK_FALSE(data.matrix.mask()(0, 1));
  CHECK(data.matrix.mask()(0, 2));
}

TEST_CASE("load_csv failure modes carry locations") {
  TempDir dir;
  const std::string empty = dir.file("empty.csv");
  write_file(empty, "");
  CHECK_THROWS_AS(notmf::load_csv(empty, false), notmf::ParseError);

  const std::string header_only = dir.file("header.csv");
  write_file(header_only, "series,t1\n");
  CHECK_THROWS_AS(notmf::load_csv(header_only, false), notmf::ParseError);

  const std::string ragged = dir.file("ragged.csv");
  write_file(ragged, "series,t1,t2\na,1,2\nb,3\n");
  try {
    notmf::load_csv(ragged, false);
    FAIL("expected ragged-row error");
  } catch (const notmf::ParseError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }

  const std::string bad_cell = dir.file("bad.csv");
  write_file(bad_cell, "series,t1,t2\na,1,2\nb,3,oops\n");
  try {
    notmf::load_csv(bad_cell, false);
    FAIL("expected non-numeric cell error");
  } catch (const notmf::ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("oops") != std::string::npos);
    CHECK(what.find("row 3") != std::string::npos);
  }

  CHECK_THROWS_AS(notmf::load_csv(dir.file("does_not_exist.csv"), false), notmf::ParseError);
}

TEST_CASE("csv round trip is exact and emission is canonical") {
  TempDir dir;
  notmf::Rng rng(501);
  const Eigen::Index n = 5, t = 7;
  Eigen::MatrixXd values = oracles::random_matrix(rng, n, t, 13.7);
  values(2, 3) = 1.0 / 3.0;
  values(4, 6) = 1e-17;
  const notmf::MaskArray mask = oracles::random_mask(rng, n, t, 0.8);
  const notmf::Dataset original(notmf::MaskedMatrix(values, mask),
                                notmf::default_row_labels(n), notmf::default_col_labels(t));

  const std::string first = dir.file("first.csv");
  notmf::save_csv(original, first);
  const notmf::Dataset loaded = notmf::load_csv(first, false);
  CHECK(loaded.matrix.values() == original.matrix.values());
  CHECK((loaded.matrix.mask() == original.matrix.mask()).all());
  CHECK(loaded.row_labels == original.row_labels);
  CHECK(loaded.col_labels == original.col_labels);

  const std::string second = dir.file("second.csv");
  notmf::save_csv(loaded, second);
  CHECK(read_file(first) == read_file(second));
}

TEST_CASE("format_double round-trips random doubles") {
  notmf::Rng rng(503);
  for (int rep = 0; rep < 200; ++rep) {
    const double value = std::ldexp(rng.normal(), static_cast<int>(rng.next_u64() % 40) - 20);
    const std::string text = notmf::format_double(value);
    CHECK(std::stod(text) == value);
  }
}

TEST_CASE("model archive round-trips bit-exactly") {
  TempDir dir;
  notmf::SyntheticSpec spec;
  spec.n_series = 12;
  spec.n_steps = 80;
  spec.true_rank = 3;
  spec.true_season = 6;
  spec.true_order = 1;
  spec.missing_rate = 0.4;
  spec.seed = 3;
  const notmf::MaskedMatrix y = notmf::make_synthetic(spec).masked;
  notmf::ModelConfig config;
  config.rank = 4;
  config.order = 2;
  config.season = 6;
  config.rho = 1.5;
  config.lambda = 0.7;
  config.outer_iters = 5;
  config.standardize = true;
  config.seed = 19;
  const notmf::FactorModel model = notmf::fit(y, config);

  const std::string path = dir.file("model.bin");
  notmf::save_model(model, path);
  const notmf::FactorModel loaded = notmf::load_model(path);
  CHECK(loaded.w == model.w);
  CHECK(loaded.x == model.x);
  CHECK(loaded.coeffs.stacked == model.coeffs.stacked);
  CHECK(loaded.coeffs.order == model.coeffs.order);
  CHECK(loaded.coeffs.diagonal == model.coeffs.diagonal);
  CHECK(loaded.objective_trace == model.objective_trace);
  CHECK(loaded.row_offset == model.row_offset);
  CHECK(loaded.row_scale == model.row_scale);
  CHECK(loaded.config.rank == model.config.rank);
  CHECK(loaded.config.lambda == model.config.lambda);
  CHECK(loaded.config.seed == model.config.seed);
  CHECK(loaded.config.standardize == model.config.standardize);
  CHECK(notmf::variant_name(loaded.config.variant) == notmf::variant_name(model.config.variant));

  // saving the loaded model reproduces the file byte for byte
  const std::string path2 = dir.file("model2.bin");
  notmf::save_model(loaded, path2);
  CHECK(read_file(path) == read_file(path2));

  // a corrupted magic is rejected
  const std::string bad = dir.file("bad.bin");
  write_file(bad, "definitely not a model archive");
  CHECK_THROWS_AS(notmf::load_model(bad), notmf::ParseError);
}
