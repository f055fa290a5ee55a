#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(ANONSTEG_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("anonsteg_test_" + name);
}

}  // namespace

TEST_CASE("encode-decode succeeds and reports the key size") {
  RunResult r = run("encode-decode --seed 11 --ell 16 --d 4");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("\"roundtrip_ok\": true") != std::string::npos);
  REQUIRE(r.out.find("dk_bits") != std::string::npos);
}

TEST_CASE("encode-decode reports are byte-identical for a fixed seed") {
  RunResult a = run("encode-decode --seed 99 --ell 16 --d 4");
  RunResult b = run("encode-decode --seed 99 --ell 16 --d 4");
  RunResult c = run("encode-decode --seed 100 --ell 16 --d 4");
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out == b.out);
  REQUIRE(a.out != c.out);
}

TEST_CASE("decode-only mode works from files and rejects corrupted transcripts") {
  auto tpath = temp_file("t.bin");
  auto kpath = temp_file("dk.bin");
  RunResult enc = run("encode-decode --seed 12 --ell 16 --d 4 --transcript-out " +
                      tpath.string() + " --dk-out " + kpath.string());
  REQUIRE(enc.exit_code == 0);

  RunResult dec = run("encode-decode --transcript-in " + tpath.string() + " --dk-in " +
                      kpath.string());
  REQUIRE(dec.exit_code == 0);
  REQUIRE(dec.out.find("\"decoded\": true") != std::string::npos);

  // flip one documented byte: decoding must fail with a nonzero exit
  {
    std::fstream f(tpath, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    char c;
    f.seekg(-1, std::ios::end);
    f.get(c);
    f.seekp(-1, std::ios::end);
    f.put(char(c ^ 0x01));
  }
  RunResult bad = run("encode-decode --transcript-in " + tpath.string() + " --dk-in " +
                      kpath.string());
  REQUIRE(bad.exit_code != 0);
  REQUIRE(bad.out.find("\"decoded\": false") != std::string::npos);
  std::filesystem::remove(tpath);
  std::filesystem::remove(kpath);
}

TEST_CASE("validation failures exit with code 2") {
  REQUIRE(run("detect --scheme bogus").exit_code == 2);
  REQUIRE(run("encode-decode --ell 0").exit_code == 2);
  REQUIRE(run("sweep --d-list 4 --s-list 0 --eps-list 0.5").exit_code == 2);
}

TEST_CASE("an overrunning sample formula refuses with code 3") {
  REQUIRE(run("detect --scheme direct --ell 32 --d 6 --games 2 --epsilon 0.5").exit_code == 3);
}

TEST_CASE("detect emits rates with intervals and per-game records") {
  auto gpath = temp_file("games.jsonl");
  RunResult r = run("detect --scheme reset-example --ell 8 --d 10 --games 25 --exact-profile "
                    "--epsilon 25 --seed 4 --games-out " +
                    gpath.string());
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("wilson_lo") != std::string::npos);
  REQUIRE(r.out.find("\"detector\"") != std::string::npos);
  REQUIRE(r.out.find("\"baseline\"") != std::string::npos);
  std::ifstream f(gpath);
  REQUIRE(f.good());
  int lines = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++lines;
  REQUIRE(lines == 25);
  std::filesystem::remove(gpath);
}

TEST_CASE("detect with jobs is deterministic given the seed") {
  std::string base =
      "detect --scheme null --ell 8 --msg-bits 8 --d 6 --games 30 --exact-profile --seed 21";
  RunResult serial = run(base + " --jobs 1");
  RunResult parallel = run(base + " --jobs 2");
  REQUIRE(serial.exit_code == 0);
  REQUIRE(serial.out == parallel.out);
}

TEST_CASE("null-scheme tournaments hover near uniform guessing") {
  RunResult r = run(
      "detect --scheme null --ell 8 --msg-bits 8 --d 6 --n 4 --games 400 --exact-profile "
      "--seed 31");
  REQUIRE(r.exit_code == 0);
  auto pos = r.out.find("\"detector\"");
  REQUIRE(pos != std::string::npos);
  auto rate_pos = r.out.find("\"rate\":", pos);
  double rate = std::stod(r.out.substr(rate_pos + 7));
  REQUIRE(rate > 0.25 - 3 * 0.0217);
  REQUIRE(rate < 0.25 + 3 * 0.0217);
}

TEST_CASE("sweep emits one CSV row per cell, reproducibly") {
  std::string args =
      "sweep --scheme null --ell 8 --d-list 4,6 --s-list 0,4 --eps-list 0.5 --msg-list 8 "
      "--games 10 --exact-profile --seed 5";
  RunResult a = run(args);
  RunResult b = run(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(a.out == b.out);
  int rows = 0;
  for (size_t pos = 0; (pos = a.out.find("\n1,null,", pos)) != std::string::npos; ++pos) ++rows;
  REQUIRE(rows == 4);
}

TEST_CASE("self-check subcommands succeed") {
  REQUIRE(run("vc-test --vc merkle --L 16 --block-bits 64 --seed 2").exit_code == 0);
  REQUIRE(run("vc-test --vc ssb --L 4 --block-bits 12 --sel-bits 13 --seed 2").exit_code == 0);
  REQUIRE(run("he-test --he transparent --lambda 128 --d 8").exit_code == 0);
  REQUIRE(run("he-test --he onehot --lambda 24 --d 4").exit_code == 0);
}

TEST_CASE("config file values override conflicting flags") {
  auto cpath = temp_file("config.json");
  {
    std::ofstream f(cpath);
    f << "{\"ell\": 24, \"seed\": 77}\n";
  }
  RunResult r = run("encode-decode --ell 16 --seed 1 --d 4 --config " + cpath.string());
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.out.find("\"ell\": 24") != std::string::npos);
  REQUIRE(r.out.find("\"seed\": 77") != std::string::npos);
  std::filesystem::remove(cpath);
}
