#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "msd/design_io.hpp"
#include "support.hpp"

using msd::testing::cli;
using msd::testing::data_path;
using msd::testing::ma_lines;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("msd_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("usage errors exit nonzero") {
  CHECK(cli({}).code != 0);
  CHECK(cli({"search", "--structure", "8/4"}).code == 2);
  CHECK(cli({"search", "--structure", "8/4", "--n", "x"}).code != 0);
  CHECK(cli({"evaluate", "--structure", "8"}).code != 0);
  CHECK(cli({"search", "--structure", "8/4", "--class-table", data_path("oa16_latin.txt"), "--n", "5"}).code == 2);
  const auto r = cli({"search", "--structure", "8/4", "--n", "5", "--q-gb", "9"});
  CHECK(r.code != 0);
  CHECK(r.err.find("q") != std::string::npos);
}

TEST_CASE("the oracle refuses oversized spaces") {
  const auto r = cli({"oracle", "--structure", "8/4", "--n", "13"});
  CHECK(r.code == 1);
  CHECK(r.err.find("search space") != std::string::npos);
}

TEST_CASE("search bundle round-trips through evaluate") {
  const auto dir = scratch("bundle");
  const auto r = cli({"search", "--structure", "2/8", "--n", "5", "--S", "10", "--T", "10", "--seed", "4", "--trace",
                      "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"design.csv", "design_key.txt", "report.txt", "report.json", "metadata.json", "trace.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  const auto d = msd::load_design((dir / "design.csv").string());
  CHECK(d.rows == 16);
  CHECK(d.cols() == 5);
  const auto e = cli({"evaluate", "--structure", "2/8", "--design", (dir / "design.csv").string()});
  REQUIRE(e.code == 0);
  CHECK(ma_lines(e.out) == ma_lines(r.out));
  fs::remove_all(dir);
}

TEST_CASE("nonregular bundle round-trips through evaluate") {
  const auto dir = scratch("nonregular");
  const auto r = cli({"search", "--mode", "nonregular", "--structure", "8", "--n", "5", "--S", "10", "--T", "10",
                      "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto e = cli({"evaluate", "--structure", "8", "--design", (dir / "design.csv").string()});
  CHECK(ma_lines(e.out) == ma_lines(r.out));
  fs::remove_all(dir);
}

TEST_CASE("same seed, same report") {
  const std::vector<std::string> args{"search", "--structure", "8/4", "--n", "9", "--S", "10", "--T", "10", "--seed", "7"};
  CHECK(cli(args).out == cli(args).out);
}

TEST_CASE("config files are overridden by flags") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.json");
    f << R"({"structure": "8/4", "n": 5, "S": 5, "T": 5, "seed": 3})";
  }
  const auto a = cli({"search", "--config", (dir / "c.json").string()});
  REQUIRE(a.code == 0);
  CHECK(a.out.find("structure: {U, B, E}") != std::string::npos);
  const auto b = cli({"search", "--config", (dir / "c.json").string(), "--structure", "2/8"});
  REQUIRE(b.code == 0);
  CHECK(b.out.find("structure: {U, B, E}") != std::string::npos);
  CHECK(a.out != b.out);
  fs::remove_all(dir);
}

TEST_CASE("the smallest complete factorial") {
  const auto r = cli({"search", "--structure", "4", "--n", "2", "--S", "1", "--T", "1"});
  REQUIRE(r.code == 0);
  CHECK(ma_lines(r.out) == std::vector<std::string>{"G1-MA {0, 0}"});
  const auto o = cli({"oracle", "--structure", "4", "--n", "2"});
  REQUIRE(o.code == 0);
  CHECK(ma_lines(o.out) == ma_lines(r.out));
}

TEST_CASE("evaluate selects G labels and prints the table") {
  const auto r = cli({"evaluate", "--class-table", data_path("oa16_latin.txt"), "--design", data_path("d4star.csv"),
                      "--G", "3,5", "--table"});
  REQUIRE(r.code == 0);
  CHECK(ma_lines(r.out) ==
        std::vector<std::string>{"G3-MA {1.75, 2, 4.5, 5, 1.75, 0}", "G5-MA {1.75, 9, 4.5, 9, 1.75, 1}"});
  CHECK(r.out.find("k\tU") != std::string::npos);
  CHECK(cli({"evaluate", "--class-table", data_path("oa16_latin.txt"), "--design", data_path("d4star.csv"), "--G", "9"})
            .code == 2);
}

TEST_CASE("ambiguous orders are searched one by one") {
  const auto r = cli({"search", "--mode", "nonregular", "--class-table", data_path("oa16_latin.txt"), "--n", "4",
                      "--S", "5", "--T", "3"});
  REQUIRE(r.code == 0);
  std::size_t orders = 0;
  for (std::size_t p = r.out.find("order:"); p != std::string::npos; p = r.out.find("order:", p + 1)) ++orders;
  CHECK(orders == 6);
}

TEST_CASE("crossed nonregular mode keeps the fixed blends") {
  const auto dir = scratch("crossed");
  const auto r = cli({"search", "--mode", "nonregular", "--structure", "(4x7)", "--fixed-design",
                      data_path("fish_blends.csv"), "--searched-side", "rows", "--searched-names", "z1,z2,z3",
                      "--criterion", "G1", "--S", "10", "--T", "5", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto d = msd::load_design((dir / "design.csv").string());
  REQUIRE(d.rows == 28);
  const auto x1 = static_cast<std::size_t>(std::find(d.names.begin(), d.names.end(), "x1") - d.names.begin());
  REQUIRE(x1 + 2 < d.cols());
  for (std::size_t row = 0; row < d.rows; ++row)
    CHECK_FALSE((d.at(row, x1) == -1 && d.at(row, x1 + 1) == -1 && d.at(row, x1 + 2) == -1));
  fs::remove_all(dir);
}
