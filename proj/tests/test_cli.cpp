#include "support.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <fstream>

using namespace cmech;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(CMECH_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string scratch(const std::string& name, const std::string& text) {
  const std::string path = "cli_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("analyze") {
  const Run r = cli("analyze");
  REQUIRE(r.status == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["analysis"] == "analyze");
  CHECK(j["results"]["chain"]["constraints"].size() == 2);
  CHECK(j["results"]["dirac_brackets"]["q2"]["q3"] == "-2");
  CHECK(cli("analyze").out == r.out);

  const Run free = cli("analyze --model " CMECH_MODEL_DIR "/free_particle.model");
  REQUIRE(free.status == 0);
  CHECK(Json::parse(free.out)["results"]["chain"]["constraints"].empty());

  const Run text = cli("analyze --format text");
  CHECK(text.status == 0);
  CHECK(text.out.find("engine:") != std::string::npos);
}

TEST_CASE("other analyses") {
  const Run hj = cli("hj");
  REQUIRE(hj.status == 0);
  CHECK(Json::parse(hj.out)["results"]["dirac_equivalence"]["full_match"] == true);
  CHECK(cli("embed").status == 0);
  CHECK(cli("brst").status == 0);
  CHECK(cli("embed --extended " CMECH_MODEL_DIR "/nhcs_extended.model").status == 0);
  // A gauge list of the wrong length is an analysis error.
  CHECK(cli("brst --gauge q1").status == 1);
}

TEST_CASE("simulate") {
  const Run csv = cli("simulate --t1 0.01 --dt 0.005 --ic q1=1,q2=2,q3=1,p1=1,p3=2 --csv -");
  REQUIRE(csv.status == 0);
  CHECK(csv.out.rfind("t,q1,q2,q3,p1,p2,p3,res1,res2\n", 0) == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 4);
  CHECK(cli("simulate --t1 0.01 --dt 0.005 --ic q1=1,q2=2,q3=1,p1=1,p3=2 --csv -").out == csv.out);

  const Run summary = cli("simulate --t1 0.1 --dt 0.01 --ic q1=1,q2=2,q3=1,p1=1,p3=2");
  REQUIRE(summary.status == 0);
  const Json j = Json::parse(summary.out);
  CHECK(j["results"]["steps"] == 10);

  CHECK(cli("simulate --dt 0").status == 2);
  CHECK(cli("simulate --t1 -1").status == 2);
  CHECK(cli("simulate --ic q9=1").status == 2);
  CHECK(cli("simulate --ic q1").status == 2);
  CHECK(cli("simulate --eom dirac --t1 0.01").status == 0);
  CHECK(cli("simulate --model " CMECH_MODEL_DIR "/nhcs_extended.model").status == 1);
}

TEST_CASE("usage and model errors") {
  CHECK(cli("").status == 2);
  CHECK(cli("frobnicate").status == 2);
  CHECK(cli("analyze --format yaml").status == 2);
  CHECK(cli("analyze --model /nonexistent/model").status == 2);
  CHECK(cli("analyze --model " + scratch("cubic.model", "coords q\nlagrangian: d(q)^3\n")).status == 2);
  CHECK(cli("analyze --model " + scratch("broken.model", "coords q\nlagrangian: (q\n")).status == 2);
  CHECK(cli("analyze --model " + scratch("inconsistent.model", "coords q1 q2\nlagrangian: 1/2*d(q2)^2 - q1\n")).status == 1);
  CHECK(cli("--help").status == 0);
}

TEST_CASE("verify-paper") {
  const Run r = cli("verify-paper");
  CHECK(r.status == 1);
  for (int i = 1; i <= 9; ++i) CHECK(r.out.find("criterion  " + std::to_string(i) + ": PASS") != std::string::npos);
  CHECK(r.out.find("criterion 10: FAIL") != std::string::npos);
  const Run j = cli("verify-paper --format json");
  CHECK(j.status == 1);
  CHECK(Json::parse(j.out)["results"]["criteria"].size() == 10);
}
