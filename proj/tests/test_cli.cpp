#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// stdout only; stderr is folded in when `with_stderr` is set
Run run(const std::string& args, bool with_stderr = false) {
  const std::string cmd = std::string("\"") + PFOCUS_CLI + "\" " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data(const char* name) { return std::string("\"") + PFOCUS_DATA + "/" + name + "\""; }

}  // namespace

TEST_CASE("classify") {
  auto r = run("classify --spec " + data("ff_focus.json"), true);
  CHECK(r.status == 0);
  CHECK(r.out.find("type: FF") != std::string::npos);

  r = run("classify --spec " + data("pp_contact.json"));
  CHECK(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["type"] == "PP");
  CHECK(j.contains("validated_radius"));

  r = run("classify --spec " + data("sliding.json"), true);
  CHECK(r.status == 1);
  CHECK(r.out.find("invalid: crossing condition fails at x=") != std::string::npos);

  r = run("classify --spec /nonexistent/spec.json");
  CHECK(r.status == 2);
}

TEST_CASE("dim-seq and orbit") {
  auto r = run("dim-seq --alpha 1");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["estimate"]["value"].get<double>() - 0.5) <= 0.02);

  r = run("orbit --k 2");
  REQUIRE(r.status == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["estimate"]["value"].get<double>() - 0.5) <= 0.03);
  CHECK(j["estimate"]["predicted"] == 0.5);

  CHECK(run("dim-seq --alpha 1 --delta-min 1e-3 --delta-max 1e-2").status == 2);
  CHECK(run("dim-seq").status == 2);
}

TEST_CASE("jets") {
  auto r = run("jets normal-form --f \"-t + t^2\"");
  REQUIRE(r.status == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["kind"] == "reversing-noninvolution");
  CHECK(j["k"] == 1);
  CHECK(j["a_low"]["degree"] == 3);
  CHECK(j["a_low"]["value"] == "-2");

  r = run("jets compose --f \"t + t^2\" --g \"t - t^2\" --order 3");
  REQUIRE(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["result"]["text"] == "t - 2*t^3");

  r = run("jets inverse --f \"2t\"");
  CHECK(nlohmann::json::parse(r.out)["result"]["text"] == "1/2*t");

  r = run("jets displacement --f \"t - 3t^4\"");
  j = nlohmann::json::parse(r.out);
  CHECK(j["k"] == 4);
  CHECK(j["c"] == "-3");

  CHECK(run("jets inverse --f \"1 + t\"").status == 2);
  CHECK(run("jets inverse --f \"t^2\"").status == 2);
}

TEST_CASE("return-map on glued centers") {
  auto r = run("return-map --spec " + data("centers.json"));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["center_like"] == true);
  for (const auto& s : j["samples"]) CHECK(std::abs(s["displacement"].get<double>()) <= 1e-9);
}

TEST_CASE("realize and infeasible verify") {
  auto r = run("realize --type fp --k 1 --n 3");
  REQUIRE(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["metadata"]["expected_type"] == "FP");

  r = run("verify --type fp --k 1 --n 5", true);
  CHECK(r.status == 3);
  CHECK(r.out.find("n above 3") != std::string::npos);

  CHECK(run("verify --type ff --k1 1 --k2 1").status == 2);
  CHECK(run("verify --type zz --k 3").status == 2);
  CHECK(run("bogus").status == 2);
}

TEST_CASE("environment overrides and no partial output") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("pfocus_cli_test_" + std::to_string(::getpid()));
  const std::string cmd = "PFOCUS_TURNS=0 \"" + std::string(PFOCUS_CLI) + "\" verify --type ff --k1 1 --k2 1 --k 3 --out \"" +
                          dir.string() + "\" >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(st) == 2);
  CHECK_FALSE(fs::exists(dir));
}
