#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "microlocal/config.hpp"
#include "microlocal/error.hpp"
#include "microlocal/manifest.hpp"

using namespace microlocal;

TEST_CASE("config parsing") {
  const auto c = Config::parse_text(
      "top = 1\n"
      "# comment\n"
      "[grid]\n"
      "dim = 2   # trailing\n"
      "extent = 6.5\n"
      "\n"
      "[scan]\n"
      "freqs = 8, 16 ,32\n"
      "flag = true\n");
  CHECK(c.get_int("", "top") == 1);
  CHECK(c.get_int("grid", "dim") == 2);
  CHECK(c.get_real("grid", "extent") == 6.5);
  CHECK(c.get_real("grid", "missing", 3.0) == 3.0);
  CHECK(c.get_ints("scan", "freqs") == std::vector<int>{8, 16, 32});
  CHECK(c.get_bool("scan", "flag", false));
  CHECK_THROWS_AS(c.get("grid", "missing"), Error);
  CHECK_THROWS_AS(c.get_int("grid", "extent"), Error);
  CHECK_THROWS_AS(c.get_real_in("grid", "extent", 0.0, 0.0, 1.0), Error);
  CHECK_NOTHROW(c.restrict_to({{"", {"top"}}, {"grid", {"dim", "extent"}}, {"scan", {"freqs", "flag"}}}));
  CHECK_THROWS_AS(c.restrict_to({{"", {"top"}}, {"grid", {"dim"}}, {"scan", {"freqs", "flag"}}}), Error);
  CHECK_THROWS_AS(c.restrict_to({{"", {"top"}}, {"grid", {"dim", "extent"}}}), Error);
}

TEST_CASE("malformed configs") {
  CHECK_THROWS_AS(Config::parse_text("[grid\n"), Error);
  CHECK_THROWS_AS(Config::parse_text("novalue\n"), Error);
  CHECK_THROWS_AS(Config::parse_text("a = 1\na = 2\n"), Error);
  CHECK_THROWS_AS(parse_real("1.5x", "v"), Error);
  CHECK_THROWS_AS(parse_int("", "v"), Error);
  CHECK(split_list(" a, b ,c ") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("paths resolve against the config directory") {
  const auto dir = std::filesystem::temp_directory_path() / "microlocal_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "member.bin") << "x";
  std::ofstream(dir / "run.cfg") << "[input]\nfield = member.bin\nmissing = nope.bin\n";
  const auto c = Config::load((dir / "run.cfg").string());
  CHECK(std::filesystem::equivalent(c.get_path("input", "field"), dir / "member.bin"));
  CHECK_THROWS_AS(c.get_path("input", "missing"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("hashes") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
