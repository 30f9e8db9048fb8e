#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "brint/parallel.hpp"
#include "cli_support.hpp"
#include "commands.hpp"

using namespace brint;
using namespace brint::cli;

namespace {

std::string read_file(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Command& find(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw std::runtime_error("no command " + name);
}

std::string run(const std::string& name, const std::map<std::string, std::string>& flags, Exec exec) {
  const Command& c = find(name);
  Params p(c.params, flags, nullptr);
  return c.run(p, RngSpec{1, 0, 0}, exec).table.text();
}

}  // namespace

TEST_CASE("ini parsing") {
  std::istringstream in("# comment\nd = 5\n\n[capacity]\nR = 2 ; trailing\n[vacancy]\nR = 9\n");
  const auto f = parse_ini(in, "a.ini", "capacity");
  CHECK(f.entries.at("d").value == "5");
  CHECK(f.entries.at("R").value == "2");
  CHECK(f.entries.at("R").line == 5);

  std::istringstream dup("d = 3\nd = 4\n");
  CHECK_THROWS_WITH_AS(parse_ini(dup, "b.ini", "x"), doctest::Contains("b.ini:2"), ConfigError);
  std::istringstream junk("d 3\n");
  CHECK_THROWS_WITH_AS(parse_ini(junk, "c.ini", "x"), doctest::Contains("c.ini:1"), ConfigError);
  CHECK_THROWS_AS(load_ini("/nonexistent/file.ini", "x"), ConfigError);
}

TEST_CASE("parameter precedence and validation") {
  const std::vector<ParamSpec> specs{{"d", "3", ""}, {"R", "1", ""}, {"list", "1,2,3", ""}, {"on", "false", ""}};
  std::istringstream in("d = 5\nR = 2\n");
  const auto f = parse_ini(in, "p.ini", "x");
  Params p(specs, {{"R", "4"}}, &f);
  CHECK(p.integer("d") == 5);
  CHECK(p.real("R") == 4.0);
  CHECK(p.reals("list") == std::vector<double>{1, 2, 3});
  CHECK_FALSE(p.flag("on"));
  const auto res = p.resolved();
  REQUIRE(res.size() == 4);
  CHECK(res[0].first == "d");

  std::istringstream bad("zz = 1\n");
  const auto fb = parse_ini(bad, "q.ini", "x");
  CHECK_THROWS_WITH_AS(Params(specs, {}, &fb), doctest::Contains("q.ini:1"), ConfigError);
  std::istringstream badv("d = three\n");
  const auto fv = parse_ini(badv, "r.ini", "x");
  Params pv(specs, {}, &fv);
  CHECK_THROWS_WITH_AS(pv.integer("d"), doctest::Contains("r.ini:1"), ConfigError);
  Params pn(specs, {{"R", "-x"}}, nullptr);
  CHECK_THROWS_WITH_AS(pn.real("R"), doctest::Contains("--R"), ConfigError);
}

TEST_CASE("formatting and atomic output") {
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(std::optional<double>{}) == "NA");
  CsvTable t({"a", "b"});
  t.add({"1", "2"});
  CHECK(t.text() == "a,b\n1,2\n");
  CHECK_THROWS(t.add({"1"}));

  const auto dir = std::filesystem::temp_directory_path() / "brint_cli_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "x.csv").string();
  atomic_write(path, "hello\n");
  CHECK(read_file(path) == "hello\n");
  for (const auto& e : std::filesystem::directory_iterator(dir))
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);

  const std::vector<ParamSpec> specs{{"d", "3", ""}};
  Params p(specs, {}, nullptr);
  commit(path, t, RunInfo{"test", "0", 7, 1, std::chrono::steady_clock::now()}, p, {{"extra", "1"}});
  CHECK(read_file(path) == "a,b\n1,2\n");
  const std::string meta = read_file(path + ".meta");
  CHECK(meta.find("master_seed = 7") != std::string::npos);
  CHECK(meta.find("param.d = 3") != std::string::npos);
  CHECK(meta.find("extra = 1") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("subcommands are deterministic") {
  CHECK(commands().size() == 10);
  const std::map<std::string, std::map<std::string, std::string>> small{
      {"capacity", {{"walkers", "5000"}}},
      {"renewal", {{"replicas", "200"}, {"t", "5,10"}}},
      {"renorm", {{"task", "spreadout"}, {"n", "2"}, {"samples", "20"}}},
      {"convolution", {{"x", "2,4"}}},
      {"vacancy", {{"replicas", "30"}, {"walkers", "5000"}}},
      {"percolation-scan", {{"L", "3"}, {"replicas", "100"}, {"alphas", "0,1,2"}, {"walkers", "5000"}}},
  };
  for (const auto& [name, flags] : small) {
    const std::string a = run(name, flags, Exec::serial);
    const std::string b = run(name, flags, Exec::serial);
    set_num_threads(2);
    const std::string c = run(name, flags, Exec::parallel);
    set_num_threads(1);
    CHECK_MESSAGE(a == b, name);
    CHECK_MESSAGE(a == c, name);
  }
  const std::string scan = run("percolation-scan", {{"L", "3"}, {"replicas", "100"}, {"alphas", "0"}, {"walkers", "5000"}}, Exec::serial);
  CHECK(scan.find("\n0,3,vacant_annulus,100,100,1,") != std::string::npos);
  const std::string cap = run("capacity", {{"walkers", "100000"}}, Exec::serial);
  CHECK(cap.find("ball,3,1,mc_hitting,6.2") != std::string::npos);
}
