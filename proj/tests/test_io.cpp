#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <slitlab/io.hpp>
#include <slitlab/types.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace slitlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "slitlab_io_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("fmt round-trips doubles") {
  for (double v : {1.0 / 3.0, 0.005, -2.718281828459045e-7, 19.7392088021787})
    CHECK(std::strtod(io::fmt(v).c_str(), nullptr) == v);
  CHECK(io::fmt(0.5) == "0.5");
}

TEST_CASE("csv writing: header, rows, atomicity, determinism") {
  const fs::path dir = scratch();
  const std::string path = (dir / "table.csv").string();
  io::write_csv(path, {"a", "b"}, {{"1", "2"}, {io::fmt(0.25), ""}});
  CHECK(slurp(path) == "a,b\n1,2\n0.25,\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));

  io::write_csv(path, {"a", "b"}, {{"1", "2"}, {io::fmt(0.25), ""}});
  CHECK(slurp(path) == "a,b\n1,2\n0.25,\n");  // byte-identical rewrite

  CHECK_THROWS_AS(io::write_csv(path, {}, {}), ConfigError);
  CHECK_THROWS_AS(io::write_csv(path, {"a"}, {{"1", "2"}}), ConfigError);
  CHECK_THROWS_AS(
      io::write_text((dir / "no_dir" / "x.csv").string(), "x"), ConfigError);
}

TEST_CASE("svg plots carry polylines and labels") {
  const fs::path dir = scratch();
  const std::string path = (dir / "plot.svg").string();
  io::Series s;
  s.x = {0.1, 0.2, 0.4};
  s.y = {1.0, 2.0, 1.5};
  s.label = "branch 0";
  io::write_svg_lines(path, {s}, "eigenvalues");
  const std::string svg = slurp(path);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("eigenvalues") != std::string::npos);
  CHECK(svg.find("branch 0") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK_THROWS_AS(io::write_svg_lines(path, {}, "empty"), ConfigError);
}

TEST_CASE("manifest is flat key=value text") {
  const fs::path dir = scratch();
  const std::string path = (dir / "manifest.txt").string();
  io::write_manifest(path, {{"tool", "slitlab"}, {"k", "5"}});
  CHECK(slurp(path) == "tool=slitlab\nk=5\n");
}
