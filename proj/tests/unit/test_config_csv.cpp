#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "chanstab/commands.hpp"
#include "chanstab/config.hpp"
#include "chanstab/csv.hpp"

using namespace chanstab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "chanstab_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Config, DefaultsWhenEmpty) {
  const Config c = parse_config("");
  EXPECT_EQ(c.grid.n, 64);
  EXPECT_EQ(c.physics.nu, std::vector<double>{1e-3});
  EXPECT_EQ(c.physics.k, std::vector<int>{1});
  EXPECT_EQ(c.simulation.K, 16);
  EXPECT_EQ(c.bisection.tol, 0.05);
  EXPECT_EQ(c.mu_for(0), 1e-3);
  EXPECT_EQ(c.physics.kind, OperatorKind::advection_diffusion);
}

TEST(Config, ParsesAllSections) {
  const Config c = parse_config(R"(
[grid]
n = 32
[physics]
nu = [1e-2, 1e-3]
mu = [2e-2, 2e-3]
k = [1, 2]
kind = "orr_sommerfeld"
[sweep]
lambda_min = -1.5
lambda_max = 2
samples = 51
os_bounds = false
[simulation]
K = 8
dt = 0.01
horizon = 20
seed = 12345678901234
shape = "single_mode"
mode = 2
[bisection]
lo = 1e-5
hi = 0.5
tol = 0.01
oracle = "synthetic"
synthetic_gamma = 0.5
[bootstrap]
input = "runs/a"
)");
  EXPECT_EQ(c.grid.n, 32);
  EXPECT_EQ(c.physics.nu.size(), 2u);
  EXPECT_EQ(c.mu_for(1), 2e-3);
  EXPECT_EQ(c.physics.kind, OperatorKind::orr_sommerfeld);
  EXPECT_EQ(c.coefficients(OperatorKind::orr_sommerfeld), c.physics.nu);
  EXPECT_EQ(c.coefficients(OperatorKind::advection_diffusion), c.physics.mu);
  EXPECT_EQ(*c.sweep.lambda_min, -1.5);
  EXPECT_EQ(*c.sweep.lambda_max, 2.0);
  EXPECT_FALSE(c.sweep.os_bounds);
  EXPECT_EQ(c.simulation.seed, 12345678901234ull);
  EXPECT_EQ(c.simulation.shape, "single_mode");
  EXPECT_EQ(c.bisection.oracle, "synthetic");
  EXPECT_EQ(c.bootstrap.input, "runs/a");
  EXPECT_EQ(c.to_json()["simulation"]["K"], 8);
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config("[grid]\nn = 32\ncolour = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("[grid]\nn = = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("[nonsense]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid]\nn = \"many\"\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics]\nnu = []\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics]\nnu = [-1e-3]\n"), ConfigError);
  EXPECT_THROW(parse_config("[physics]\nnu = [1e-3, 1e-4]\nmu = [1e-3, 1e-4, 1e-5]\n"), ConfigError);
  EXPECT_NO_THROW(parse_config("[physics]\nnu = [1e-3, 1e-4]\nmu = [1e-3]\n"));
  EXPECT_THROW(parse_config("[physics]\nkind = \"laminar\"\n"), ConfigError);
  EXPECT_THROW(parse_config("[bisection]\noracle = \"crystal_ball\"\n"), ConfigError);
  EXPECT_THROW(parse_config("[simulation]\nshape = \"blob\"\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/file.toml"), ConfigError);
}

TEST(Csv, FormatsRealsExactly) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(2.0), "2");
  EXPECT_EQ(format_real(NAN), "nan");
  EXPECT_EQ(format_real(-INFINITY), "-inf");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, EscapesFields) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, RoundTrip) {
  const fs::path dir = scratch("csv");
  const std::string path = (dir / "t.csv").string();
  CsvWriter w(path, {"name", "value", "count"});
  w.row({std::string("x,y"), 0.1, 3LL});
  w.row({std::string("q\"uote"), -2.5e-300, -7LL});
  w.close();
  const CsvTable t = read_csv(path);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][t.column("name")], "x,y");
  EXPECT_EQ(std::stod(t.rows[0][t.column("value")]), 0.1);
  EXPECT_EQ(t.rows[1][0], "q\"uote");
  EXPECT_EQ(t.rows[1][2], "-7");
  EXPECT_THROW(t.column("missing"), std::runtime_error);

  std::ifstream raw(path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.substr(0, 17), "name,value,count\n");
}

TEST(Csv, RowWidthIsChecked) {
  const fs::path dir = scratch("csv_width");
  CsvWriter w((dir / "t.csv").string(), {"a", "b"});
  EXPECT_THROW(w.row({1.0}), std::logic_error);
}

TEST(GitBlobSha1, MatchesGitHashObject) {
  // `printf 'hello\n' | git hash-object --stdin`
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

}  // namespace
