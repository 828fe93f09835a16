#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run
{
  int code;
  std::string output;
};

Run run(const std::string& args)
{
  const std::string cmd = std::string(SMALLJUMP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    out.append(buf.data(), got);
  const int status = pclose(pipe);
  return { WIFEXITED(status) ? WEXITSTATUS(status) : -1, out };
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

struct TempDir
{
  fs::path path;
  TempDir()
  {
    path = fs::temp_directory_path() / ("smalljump_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::size_t data_lines(const std::string& text)
{
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#')
      ++n;
  return n;
}

} // namespace

TEST_CASE("cli sample is deterministic and writes metadata")
{
  TempDir dir;
  const auto a = run("sample --alpha 1 --n 100 --seed 42 --out " + (dir / "a.csv"));
  const auto b = run("sample --alpha 1 --n 100 --seed 42 --out " + (dir / "b.csv"));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const auto text = slurp(dir / "a.csv");
  CHECK(text == slurp(dir / "b.csv"));
  CHECK(data_lines(text) == 101);
  CHECK(text.find("# seed=42") != std::string::npos);
  CHECK(fs::exists(dir / "a.csv.meta.json"));
}

TEST_CASE("cli records the default truncation for tempered samples")
{
  TempDir dir;
  REQUIRE(run("sample --alpha 0.7 --A 1 --n 20 --out " + (dir / "t.csv")).code == 0);
  CHECK(slurp(dir / "t.csv").find("# trunc_eta=0.001") != std::string::npos);
}

TEST_CASE("cli validation errors exit with code 2")
{
  TempDir dir;
  const auto gauss = run("estimate --kind gaussian-noise --sigma 0 --n 200 --out " + (dir / "e.csv"));
  CHECK(gauss.code == 2);
  CHECK(gauss.output.find("known-noise") != std::string::npos);
  const auto alpha = run("sample --alpha 2.5 --out " + (dir / "s.csv"));
  CHECK(alpha.code == 2);
  CHECK(alpha.output.find("alpha") != std::string::npos);
  const auto table = run("table T9");
  CHECK(table.code == 2);
  for (const char* id : { "T1", "T2", "T3", "T4" })
    CHECK(table.output.find(id) != std::string::npos);
  CHECK(run("no-such-command").code == 2);
}

TEST_CASE("cli config file")
{
  TempDir dir;
  {
    std::ofstream cfg(dir / "c.json");
    cfg << R"({ "alpha": 1.1, "n": 30, "seed": 5 })";
  }
  REQUIRE(run("sample --config " + (dir / "c.json") + " --out " + (dir / "c.csv")).code == 0);
  const auto text = slurp(dir / "c.csv");
  CHECK(text.find("# alpha=1.1") != std::string::npos);
  CHECK(text.find("# seed=5") != std::string::npos);
  CHECK(data_lines(text) == 31);
  // flags override the file
  REQUIRE(run("sample --config " + (dir / "c.json") + " --n 12 --out " + (dir / "d.csv")).code == 0);
  CHECK(data_lines(slurp(dir / "d.csv")) == 13);
  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({ "alpha": 1.1, "colour": 3, "size": 2 })";
  }
  const auto bad = run("sample --config " + (dir / "bad.json") + " --out " + (dir / "x.csv"));
  CHECK(bad.code == 2);
  CHECK(bad.output.find("colour") != std::string::npos);
  CHECK(bad.output.find("size") != std::string::npos);
}

TEST_CASE("cli bounds")
{
  // P = Q = 1/2, α = 1 gives M = 1 and λ = 1; log n = 8 puts m* at π
  const auto r = run("bounds --P 0.5 --Q 0.5 --alpha 1 --delta 1 --n 2981");
  REQUIRE(r.code == 0);
  CHECK(r.output.find("m* = 3.14") != std::string::npos);
  const auto u = run("bounds --alpha 0.7 --delta 1 --n 5");
  CHECK(u.code == 0);
  CHECK(u.output.find("m* undefined") != std::string::npos);
}

TEST_CASE("cli estimate writes an estimate and a selection trace")
{
  TempDir dir;
  const auto known = run("estimate --alpha 1.1 --delta 0.1 --n 500 --seed 3 --benchmark-ell 60 --x-points 128 --out " +
                         (dir / "k.csv"));
  REQUIRE(known.code == 0);
  CHECK(known.output.find("m_hat") != std::string::npos);
  CHECK(fs::exists(dir / "k.trace.csv"));
  const auto direct = run("estimate --kind direct --alpha 1.1 --delta 0.1 --n 500 --seed 3 --benchmark-ell 60 "
                          "--x-points 128 --out " + (dir / "d.csv"));
  REQUIRE(direct.code == 0);
  const auto k = slurp(dir / "k.csv");
  const auto d = slurp(dir / "d.csv");
  CHECK(k != d);
  CHECK(data_lines(k) == data_lines(d));
  CHECK(direct.output.find("relative L2 risk") != std::string::npos);
  CHECK(k.find("# rel_l2=") != std::string::npos);
}
