#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "skewlab/cli.hpp"
#include "skewlab/config.hpp"
#include "skewlab/dataset_io.hpp"
#include "skewlab/ingest.hpp"
#include "skewlab/svg.hpp"
#include "support.hpp"

using namespace skewlab;
using skewlab::testing::error_code;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("skewlab_test_" + name + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

// 2x2 images for the given labels; pixel (r, c) of image k is 100 k + 10 r + c.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> idx_fixture(const std::vector<int>& labels) {
  std::vector<std::uint8_t> img, lab;
  put_be32(img, kIdxImageMagic);
  put_be32(img, static_cast<std::uint32_t>(labels.size()));
  put_be32(img, 2);
  put_be32(img, 2);
  for (std::size_t k = 0; k < labels.size(); ++k)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) img.push_back(static_cast<std::uint8_t>(100 * k + 10 * r + c));
  put_be32(lab, kIdxLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) lab.push_back(static_cast<std::uint8_t>(l));
  return {img, lab};
}

}  // namespace

TEST_CASE("double formatting round-trips") {
  for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23})
    CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(parse_double(" +2.5 ") == 2.5);
  CHECK(error_code([] { parse_double("1.0x"); }) == ErrorCode::ParseError);
}

TEST_CASE("dataset files round-trip") {
  const auto dir = scratch_dir("dataset");
  GenSpec s;
  s.n = 20;
  s.p = 0.75;
  s.B = 2.0;
  s.seed = 5;
  s.exact_counts = false;
  const auto d = gen_2dim(s);
  save_dataset(d, dir / "d.csv");
  CHECK(fs::exists(dir / "d.meta"));
  CHECK(load_dataset(dir / "d.csv") == d);

  std::ifstream in(dir / "d.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "label,sp0,inv0");

  SUBCASE("without a sidecar the scale is inferred") {
    fs::remove(dir / "d.meta");
    const auto back = load_dataset(dir / "d.csv");
    CHECK(back.sp_scale() == 2.0);
    CHECK(back.sp_two_valued());
    CHECK(back.points() == d.points());
  }
  SUBCASE("malformed rows are rejected") {
    std::ofstream(dir / "bad.csv") << "label,sp0,inv0\n2,1,1\n";
    CHECK(error_code([&] { load_dataset(dir / "bad.csv"); }).has_value());
    std::ofstream(dir / "short.csv") << "label,sp0,inv0\n1,1\n";
    CHECK(error_code([&] { load_dataset(dir / "short.csv"); }) == ErrorCode::ParseError);
  }
  fs::remove_all(dir);
}

TEST_CASE("idx parsing") {
  const auto [img, lab] = idx_fixture({3, 7});
  const auto raw = parse_idx_bytes(img, lab);
  CHECK(raw.rows == 2);
  CHECK(raw.cols == 2);
  REQUIRE(raw.images.size() == 2);
  CHECK(raw.images[1] == std::vector<std::uint8_t>{100, 101, 110, 111});
  CHECK(raw.labels == std::vector<int>{3, 7});

  const auto inv = binarize_labels(raw);
  CHECK(inv[0].y == 1);
  CHECK(inv[1].y == -1);
  CHECK(inv[1].x(3) == doctest::Approx(111.0 / 255.0));

  SUBCASE("bad magic") {
    auto broken = img;
    broken[3] = 0x01;
    CHECK(error_code([&] { parse_idx_bytes(broken, lab); }) == ErrorCode::BadMagic);
  }
  SUBCASE("truncated payload") {
    auto cut = img;
    cut.pop_back();
    CHECK(error_code([&] { parse_idx_bytes(cut, lab); }) == ErrorCode::TruncatedFile);
  }
  SUBCASE("count mismatch") {
    const auto [img3, lab3] = idx_fixture({1, 2, 3});
    CHECK(error_code([&] { parse_idx_bytes(img3, lab); }) == ErrorCode::CountMismatch);
  }
  SUBCASE("files on disk") {
    const auto dir = scratch_dir("idx");
    std::ofstream(dir / "img", std::ios::binary).write(reinterpret_cast<const char*>(img.data()), img.size());
    std::ofstream(dir / "lab", std::ios::binary).write(reinterpret_cast<const char*>(lab.data()), lab.size());
    CHECK(parse_idx(dir / "img", dir / "lab").labels == raw.labels);
    fs::remove_all(dir);
  }
}

TEST_CASE("tabular csv") {
  const std::string text = "a,label,b,c\n0,1,10,5\n2,0,20,5\n4,-1,30,5\n";
  const auto t = parse_csv_tabular(text, "label", true);
  REQUIRE(t.points.size() == 3);
  CHECK(t.feature_names == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.points[0].y == 1);
  CHECK(t.points[1].y == -1);
  CHECK(t.points[2].y == -1);
  CHECK(t.points[0].x(0) == -1.0);
  CHECK(t.points[1].x(1) == 0.0);
  CHECK(t.points[2].x(1) == 1.0);
  CHECK(t.points[1].x(2) == 0.0);
  CHECK(t.ranges[1] == std::pair{10.0, 30.0});
  CHECK(t.warnings.size() == 1);

  const auto raw = parse_csv_tabular(text, "label", false);
  CHECK(raw.points[2].x(1) == 30.0);
  CHECK(error_code([&] { parse_csv_tabular(text, "y", true); }) == ErrorCode::ParseError);
  CHECK(error_code([] { parse_csv_tabular("a,label\n1,2\n", "label", true); }) == ErrorCode::ParseError);
}

TEST_CASE("config parsing") {
  const std::string text = R"(# sweep over p
kind = "dynamics"
out = "runs/a"

[generator]
name = "2dim"
n = 64

[dynamics]
loss = "logistic"
mode = "discrete"
lr = 1e-3
checkpoints = [
  1, 10,   # trailing comment
  100,
]

[sweep]
p = [0.5, 0.9]
seeds = [1, 2]
)";
  const auto tables = parse_config(text);
  CHECK(tables.at("").at("kind").as_string() == "dynamics");
  CHECK(tables.at("dynamics").at("checkpoints").as_doubles() == std::vector<double>{1, 10, 100});

  const auto cfg = experiment_from_tables(tables);
  CHECK(cfg.kind == "dynamics");
  CHECK(cfg.out == fs::path("runs/a"));
  CHECK(cfg.generator.spec.n == 64);
  CHECK(cfg.dynamics.spec.loss == Loss::Logistic);
  CHECK(cfg.dynamics.spec.mode == DynMode::Discrete);
  CHECK(cfg.dynamics.spec.lr == 1e-3);
  CHECK(cfg.sweep.p == std::vector<double>{0.5, 0.9});
  CHECK(cfg.sweep.seeds == std::vector<std::uint64_t>{1, 2});

  CHECK(error_code([] { experiment_from_tables(parse_config("[generator]\nbogus = 1\n")); }) ==
        ErrorCode::ParseError);
  CHECK(error_code([] { parse_config("[a]\nx = \"open\n"); }) == ErrorCode::ParseError);
  CHECK(error_code([] { parse_config("x = [1, 2\n"); }) == ErrorCode::ParseError);
  CHECK(error_code([] { parse_config("x = 1\nx = 2\n"); }).has_value());
}

TEST_CASE("svg output") {
  SvgChart c;
  c.title = "a < b";
  c.log_x = true;
  c.series.push_back({"s", {0.0, 1.0, 10.0, 100.0}, {1.0, 2.0, NAN, 3.0}});
  const auto svg = render_svg(c);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("a &lt; b") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg == render_svg(c));
}

TEST_CASE("cli writes a dataset and rejects bad input") {
  const auto dir = scratch_dir("cli");
  std::ostringstream out, err;
  const int rc = run_cli({"gen", "--generator", "2dim", "--n", "8", "--p", "0.75", "--out", dir.string()}, out, err);
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "manifest.txt"));
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir)) found = found || e.path().extension() == ".csv";
  CHECK(found);

  std::ostringstream o2, e2;
  CHECK(run_cli({"gen", "--generator", "nope", "--out", dir.string()}, o2, e2) != 0);
  CHECK((o2.str() + e2.str()).find("unknown generator") != std::string::npos);
  std::ostringstream o3, e3;
  CHECK(run_cli({"frobnicate"}, o3, e3) != 0);
  fs::remove_all(dir);
}
