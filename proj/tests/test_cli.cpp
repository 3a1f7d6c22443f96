#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd =
      std::string(SLITLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "slitlab_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    if (line.size() && line.back() == ',') row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

fs::path write_slit_square(const fs::path& dir) {
  const fs::path p = dir / "domain.txt";
  std::ofstream os(p);
  os << "outer.kind=rectangle\nouter.a=1\nouter.b=1\n"
     << "outer_bc.all=dirichlet\nchart_r0=0.24\n"
     << "slit.0.cx=0.5\nslit.0.cy=0.5\nslit.0.t=0.125\n"
     << "slit.0.bc=dirichlet\n";
  return p;
}

}  // namespace

TEST_CASE("mathieu table: row count, small-h ground value, reproducibility") {
  const fs::path dir = fresh_dir("mathieu");
  REQUIRE(run("--out " + dir.string() + " mathieu --h 0.1 --modes 5") == 0);
  const auto rows = read_csv(dir / "mathieu.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"i", "h", "b", "class"});
  const double b0 = std::strtod(rows[1][2].c_str(), nullptr);
  CHECK(b0 / 0.01 > 0.45);
  CHECK(b0 / 0.01 < 0.55);
  CHECK(fs::exists(dir / "manifest.txt"));

  const std::string first = slurp(dir / "mathieu.csv");
  REQUIRE(run("--out " + dir.string() + " mathieu --h 0.1 --modes 5") == 0);
  CHECK(slurp(dir / "mathieu.csv") == first);
}

TEST_CASE("fem-solve writes a spectrum and an optional mesh dump") {
  const fs::path dir = fresh_dir("fem");
  const fs::path dom = write_slit_square(dir);
  REQUIRE(run("--out " + dir.string() + " fem-solve --domain " + dom.string() +
              " --resolution 16 --k 3 --dump-mesh") == 0);
  const auto rows = read_csv(dir / "spectrum.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"k", "E", "residual"});
  const double e0 = std::strtod(rows[1][1].c_str(), nullptr);
  CHECK(e0 > 19.7);  // above the unslit square ground state
  CHECK(fs::exists(dir / "mesh.txt"));
}

TEST_CASE("track with a single-point grid leaves the overlap column empty") {
  const fs::path dir = fresh_dir("track1");
  const fs::path dom = write_slit_square(dir);
  REQUIRE(run("--out " + dir.string() + " track --domain " + dom.string() +
              " --resolution 16 --t-grid 0.125 --k 2") == 0);
  const auto rows = read_csv(dir / "branches.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][3] == "");
  CHECK(rows[2][3] == "");
  CHECK_FALSE(fs::exists(dir / "fits.csv"));
}

TEST_CASE("track over a grid writes branches, fits, and a plot") {
  const fs::path dir = fresh_dir("track4");
  const fs::path dom = write_slit_square(dir);
  REQUIRE(run("--out " + dir.string() + " track --domain " + dom.string() +
              " --resolution 16 --t-grid 0.125,0.0625,0.03125,0.015625"
              " --k 2") == 0);
  const auto rows = read_csv(dir / "branches.csv");
  REQUIRE(rows.size() == 9);
  for (size_t i = 3; i < rows.size(); ++i)
    CHECK(std::strtod(rows[i][3].c_str(), nullptr) > 0.9);
  CHECK(fs::exists(dir / "fits.csv"));
  CHECK(fs::exists(dir / "branches.svg"));
}

TEST_CASE("symmetry-check reports merged-spectrum agreement") {
  const fs::path dir = fresh_dir("sym");
  REQUIRE(run("--out " + dir.string() +
              " symmetry-check --slit-t 0.2 --slit-bc neumann"
              " --resolution 16 --lambda 60") == 0);
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("max_rel_diff=") != std::string::npos);
  CHECK(fs::exists(dir / "symmetry.csv"));
}

TEST_CASE("error paths: malformed domain exits 2 without artifacts") {
  const fs::path dir = fresh_dir("bad");
  const fs::path dom = dir / "broken.txt";
  std::ofstream(dom) << "outer.kind=dodecahedron\n";
  CHECK(run("--out " + dir.string() + " fem-solve --domain " + dom.string()) ==
        2);
  CHECK_FALSE(fs::exists(dir / "spectrum.csv"));
  CHECK_FALSE(fs::exists(dir / "manifest.txt"));

  CHECK(run("--out " + dir.string() + " fem-solve --domain /nonexistent") ==
        2);
  CHECK(run("nonsense-subcommand") == 2);
  CHECK(run("mathieu") == 2);  // missing required --h
}
