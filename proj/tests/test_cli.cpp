#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sicyig/cli.hpp"
#include "sicyig/parallel.hpp"
#include "sicyig/report.hpp"

using namespace sicyig;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// The manifest is the last JSON line on stderr when --out is not given.
json manifest_of(const Run& r) {
  std::istringstream ss(r.err);
  std::string line, last;
  while (std::getline(ss, line))
    if (!line.empty() && line.front() == '{') last = line;
  REQUIRE_FALSE(last.empty());
  return json::parse(last);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sicyig_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("unknown flags exit 1 with usage") {
  const Run r = run({"snr", "--bogus"});
  CHECK(r.code == cli::exit_validation);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == cli::exit_validation);
  CHECK(run({"--help"}).code == cli::exit_ok);
}

TEST_CASE("deer-fit on a header-only trace reports insufficient points") {
  const fs::path p = scratch("empty.csv");
  report::write_file(p.string(), "td_us,V_unitless\n");
  const Run r = run({"deer-fit", p.string()});
  CHECK(r.code == cli::exit_validation);
  CHECK(r.err.find("insufficient points") != std::string::npos);
  CHECK(manifest_of(r)["exit_code"] == 1);
  fs::remove(p);
}

TEST_CASE("deer-sim output feeds deer-fit") {
  const fs::path dir = scratch("deer");
  const Run sim = run({"--out", dir.string(), "deer-sim", "--dx", "9"});
  REQUIRE(sim.code == cli::exit_ok);
  REQUIRE(fs::exists(dir / "deer_trace.csv"));
  REQUIRE(fs::exists(dir / "manifest.json"));
  const Run fit = run({"deer-fit", (dir / "deer_trace.csv").string()});
  REQUIRE(fit.code == cli::exit_ok);
  const json j = json::parse(fit.out);
  CHECK(j["dx_nm"].get<double>() == doctest::Approx(9.0).epsilon(0.02));
  fs::remove_all(dir);
}

TEST_CASE("snr writes unit-suffixed JSON and a manifest") {
  const Run r = run({"snr"});
  REQUIRE(r.code == cli::exit_ok);
  const json j = json::parse(r.out);
  CHECK(j.contains("r_opt_unitless"));
  CHECK(j.contains("t_total_s"));
  const json m = manifest_of(r);
  CHECK(m["subcommand"] == "snr");
  CHECK(m["exit_code"] == 0);
  CHECK(m.contains("toolkit_version"));
  CHECK(run({"--format", "csv", "snr"}).code == cli::exit_validation);
}

TEST_CASE("manifest is written to the output directory") {
  const fs::path dir = scratch("manifest");
  const Run r = run({"--out", dir.string(), "--seed", "5", "yield"});
  REQUIRE(r.code == cli::exit_ok);
  std::ifstream in(dir / "manifest.json");
  const json m = json::parse(in);
  CHECK(m["seed"] == 5);
  CHECK(m["output_paths"].size() == 1);
  CHECK(fs::exists(m["output_paths"][0].get<std::string>()));
  fs::remove_all(dir);
}

TEST_CASE("bad config exits 1 and still emits a manifest") {
  const fs::path p = scratch("bad.json");
  report::write_file(p.string(), R"({"schema_version": 1, "probe_depth_nm": 150.0})");
  const Run r = run({"--config", p.string(), "snr"});
  CHECK(r.code == cli::exit_validation);
  CHECK(manifest_of(r)["exit_code"] == 1);
  fs::remove(p);
}

TEST_CASE("outputs do not depend on the thread count") {
  const unsigned before = parallel::thread_count();
  const Run a = run({"--threads", "1", "swr"});
  const Run b = run({"--threads", "4", "swr"});
  const Run c = run({"--threads", "1", "deer-sim", "--shell-product"});
  const Run d = run({"--threads", "3", "deer-sim", "--shell-product"});
  parallel::set_thread_count(before);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(c.out == d.out);
}

TEST_CASE("yield reproduces the device histogram") {
  const Run r = run({"yield"});
  REQUIRE(r.code == cli::exit_ok);
  const json j = json::parse(r.out);
  CHECK(j["histogram"][0]["rounded_count"] == 37);
  CHECK(j["usable_rounded_count"] == 5);
  CHECK(run({"yield", "--window", "bad"}).code == cli::exit_validation);
}

TEST_CASE("defaults subcommand matches the bundled config") {
  const Run r = run({"defaults"});
  REQUIRE(r.code == cli::exit_ok);
  std::ifstream in(std::string(SICYIG_TEST_DATA) + "/configs/paper-defaults.json", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(r.out == ss.str());
}

TEST_CASE("reproduce rejects unknown rows") {
  CHECK(run({"reproduce", "--rows", "no-such-row"}).code == cli::exit_validation);
  const Run r = run({"--config", "paper-defaults", "reproduce", "--rows", "snr"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out.rfind("claim_id", 0) == 0);
}
