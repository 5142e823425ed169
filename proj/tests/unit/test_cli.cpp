#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "funnel/data/tabular.hpp"
#include "funnel/models/checkpoint.hpp"
#include "oracles.hpp"

using namespace funnel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "funnel_cli_test.log";
  const std::string cmd = std::string(FUNNEL_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

struct Workspace {
  fs::path dir = fs::temp_directory_path() / "funnel_cli_ws";
  Workspace() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

/// Identity-model checkpoint over `dims` features without standardization.
void write_identity_checkpoint(const std::string& path, std::size_t dims) {
  const models::BuiltModel m = models::build_model(models::ModelSpec::from_json({{"kind", "identity"}}), dims, 0);
  models::save_checkpoint(path, models::make_checkpoint(m));
}

}  // namespace

TEST_CASE("usage errors") {
  Run r = run_cli("frobnicate");
  CHECK(r.code == 2);
  CHECK(r.out.find("train") != std::string::npos);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("eval --checkpoint").code == 2);
  CHECK(run_cli("sample --checkpoint /nonexistent/model.ckpt --out x.csv").code == 2);
}

TEST_CASE("eval of the identity model on standard normal data") {
  Workspace ws;
  const std::size_t dims = 4;
  write_identity_checkpoint(ws / "id.ckpt", dims);
  diff::Tensor x(diff::Shape{20000, dims});
  const auto draws = oracle::normal_draws(x.size(), 3);
  std::copy(draws.begin(), draws.end(), x.values().begin());
  data::write_csv(ws / "normal.csv", x);

  const Run r = run_cli("eval --checkpoint " + (ws / "id.ckpt") + " --data " + (ws / "normal.csv") + " --out " +
                        (ws / "report.json"));
  REQUIRE(r.code == 0);
  const json report = read_json(ws / "report.json");
  CHECK(report.at("dataset") == "normal");
  const double nats = report.at("nats").get<double>();
  // E[log N(x)] = -(1 + ln 2 pi) / 2 per dimension.
  const double expected = -0.5 * (1.0 + std::log(2.0 * std::numbers::pi)) * dims;
  CHECK(std::abs(nats - expected) < 0.05);
  CHECK(report.at("ks").get<double>() < 0.02);
  CHECK(report.at("bpd").get<double>() == doctest::Approx(-nats / (dims * std::log(2.0))).epsilon(1e-12));
  CHECK(report.at("files").size() == 2);

  const Run again = run_cli("eval --checkpoint " + (ws / "id.ckpt") + " --data " + (ws / "normal.csv") + " --out " +
                            (ws / "report2.json"));
  CHECK(read_json(ws / "report2.json") == report);

  const Run bad = run_cli("eval --checkpoint " + (ws / "normal.csv") + " --data " + (ws / "normal.csv") + " --out " +
                          (ws / "r.json"));
  CHECK(bad.code == 1);
  CHECK(bad.out.find("error") != std::string::npos);
}

TEST_CASE("samples at temperature 0.5") {
  Workspace ws;
  write_identity_checkpoint(ws / "id.ckpt", 2);
  const Run r = run_cli("sample --checkpoint " + (ws / "id.ckpt") + " --n 20000 --temperature 0.5 --seed 4 --out " +
                        (ws / "s.csv"));
  REQUIRE(r.code == 0);
  const diff::Tensor s = data::read_csv(ws / "s.csv");
  CHECK(s.shape() == diff::Shape{20000, 2});
  const std::vector<double> v(s.values().begin(), s.values().end());
  CHECK(oracle::variance(v) == doctest::Approx(0.25).epsilon(0.05));

  // Exported CSVs round-trip through the reader at full precision.
  data::write_csv(ws / "copy.csv", s);
  CHECK(data::read_csv(ws / "copy.csv") == s);
}

TEST_CASE("train then encode") {
  Workspace ws;
  {
    std::ofstream cfg(ws / "fc.json");
    cfg << json{{"batch_size", 64},
                {"total_steps", 40},
                {"validation_interval", 20},
                {"dataset", {{"kind", "four_circles"}, {"n", 1000}}},
                {"model", {{"kind", "affine"}, {"flow_steps", 2}, {"hidden_features", 8}}}}
               .dump();
  }
  const Run t = run_cli("train --config " + (ws / "fc.json"));
  REQUIRE(t.code == 0);
  CHECK(fs::exists(ws / "fc_run/model.ckpt"));
  CHECK(fs::exists(ws / "fc_run/metrics.csv"));

  data::write_csv(ws / "pts.csv", data::four_circles(500, 9));
  const Run l = run_cli("latent --checkpoint " + (ws / "fc_run/model.ckpt") + " --data " + (ws / "pts.csv") +
                        " --out " + (ws / "z.csv"));
  REQUIRE(l.code == 0);
  const json summary = read_json(ws / "z.csv.json");
  CHECK(summary.at("rows") == 500);
  CHECK(summary.at("latent_dim") == 2);
  CHECK(data::read_csv(ws / "z.csv").shape() == diff::Shape{500, 2});

  {
    std::ofstream cfg(ws / "bad.json");
    cfg << R"({"dataset": {"kind": "four_circles", "n": 100}, "epochs": 3})";
  }
  CHECK(run_cli("train --config " + (ws / "bad.json")).code == 1);
}
