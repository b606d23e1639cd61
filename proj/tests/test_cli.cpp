#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qxlab/runconfig.hpp"

namespace fs = std::filesystem;
namespace qc = qxlab::cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    const auto tick =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() / ("qxlab_cli_test_" + std::to_string(tick));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = std::string(QXLAB_CLI_PATH) + " " + args + " > " +
                          stdout_path + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<nlohmann::json> ndjson(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("list parsing") {
  CHECK(qc::parse_int_list("64,128") == std::vector<int>{64, 128});
  CHECK(qc::parse_int_list("1..5") == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(qc::parse_int_list("8,16..18") == std::vector<int>{8, 16, 17, 18});
  CHECK_THROWS_AS(qc::parse_int_list(""), std::invalid_argument);
  CHECK_THROWS_AS(qc::parse_int_list("5..1"), std::invalid_argument);
  CHECK_THROWS_AS(qc::parse_int_list("a,b"), std::invalid_argument);
  CHECK_THROWS_AS(qc::parse_seed_list("-3"), std::invalid_argument);
}

TEST_CASE("csv escaping (RFC 4180)") {
  CHECK(qc::csv_escape("plain") == "plain");
  CHECK(qc::csv_escape("a,b") == "\"a,b\"");
  CHECK(qc::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(qc::csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("record writer formats") {
  std::ostringstream json_out;
  qc::RecordWriter jw(json_out, qc::Format::json, true);
  jw.write({{"a", 1}, {"b", "x,y"}});
  CHECK(json_out.str() == "{\"a\":1,\"b\":\"x,y\"}\n");

  std::ostringstream csv_out;
  qc::RecordWriter cw(csv_out, qc::Format::csv, true);
  cw.write({{"a", 1}, {"b", "x,y"}});
  cw.write({{"a", 2}, {"b", "z"}});
  CHECK(csv_out.str() == "a,b\r\n1,\"x,y\"\r\n2,z\r\n");
}

TEST_CASE("qe subcommand exit codes") {
  TempDir dir;

  std::ofstream(dir.file("paper.json"))
      << "{\"summands\": ["
         "{\"kind\": \"matrix\", \"dim\": 1, \"weight\": \"1/2\"},"
         "{\"kind\": \"matrix\", \"dim\": 1, \"weight\": \"1/3\"},"
         "{\"kind\": \"matrix\", \"dim\": 1, \"weight\": \"1/6\"}]}";
  CHECK(run_cli("qe " + dir.file("paper.json") + " --deterministic",
                dir.file("out1.json")) == 3);
  const auto recs = ndjson(slurp(dir.file("out1.json")));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0]["qe"] == false);
  CHECK(recs[0]["obstruction"] == "weight_relation");
  CHECK(recs[0]["witness_sum"] == "0");
  CHECK(recs[0]["witness"].size() == 3);

  std::ofstream(dir.file("m5.json"))
      << "{\"summands\": [{\"kind\": \"matrix\", \"dim\": 5, \"weight\": \"1\"}]}";
  CHECK(run_cli("qe " + dir.file("m5.json"), dir.file("out2.json")) == 0);

  std::ofstream(dir.file("bad.json")) << "{\"summands\": oops";
  CHECK(run_cli("qe " + dir.file("bad.json"), dir.file("out3.json")) == 2);
  CHECK(run_cli("qe " + dir.file("missing.json"), dir.file("out4.json")) == 2);
}

TEST_CASE("gap subcommand") {
  TempDir dir;
  const std::string args =
      "gap --d 2 --n 6 --seeds 1,2 --max-iter 4000 --deterministic";
  CHECK(run_cli(args, dir.file("a.json")) == 0);
  const auto recs = ndjson(slurp(dir.file("a.json")));
  REQUIRE(recs.size() == 3);  // two runs plus a summary
  CHECK(recs[0]["n"] == 6);
  CHECK(recs[0]["d"] == 2);
  CHECK(recs[0].contains("lambda2"));
  CHECK(recs[0].contains("epsilon"));
  CHECK(recs[2]["summary"] == true);
  CHECK(recs[2]["runs"] == 2);

  // byte-identical reruns under --deterministic
  CHECK(run_cli(args, dir.file("b.json")) == 0);
  CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));

  // n = 1 has an empty restricted space
  CHECK(run_cli("gap --d 2 --n 1 --seeds 1", dir.file("c.json")) == 2);
  // config errors
  CHECK(run_cli("gap --d 2 --seeds 1", dir.file("d.json")) == 2);
  CHECK(run_cli("gap --d 2 --n 4 --seeds 1 --format yaml", dir.file("e.json")) ==
        2);
}

TEST_CASE("gap subcommand csv") {
  TempDir dir;
  CHECK(run_cli("gap --d 2 --n 5 --seeds 3 --max-iter 2000 --deterministic "
                "--format csv",
                dir.file("a.csv")) == 0);
  const std::string text = slurp(dir.file("a.csv"));
  CHECK(text.rfind("n,d,seed,lambda2,epsilon,C,iterations,residual,certified",
                   0) == 0);
}

TEST_CASE("separation subcommand") {
  TempDir dir;
  // tiny n: runs complete but certification is not required to succeed
  CHECK(run_cli("separation --n 6 --seeds 1,2 --max-iter 3000 --b12-trials 4 "
                "--spot-trials 5 --min-certified 0 --deterministic",
                dir.file("s.json")) == 0);
  const auto recs = ndjson(slurp(dir.file("s.json")));
  REQUIRE(recs.size() == 3);
  for (int i = 0; i < 2; ++i) {
    CHECK(recs[i].contains("x_epsilon"));
    CHECK(recs[i].contains("y_epsilon"));
    CHECK(recs[i].contains("b12_epsilon"));
    CHECK(recs[i].contains("u34_dist2"));
    CHECK(recs[i].contains("psi_x_lower"));
    CHECK(recs[i].contains("psi_y_upper"));
    CHECK(recs[i].contains("certified"));
  }
  CHECK(recs[2]["summary"] == true);

  // an impossible certification bar exits 4
  CHECK(run_cli("separation --n 4 --seeds 1 --max-iter 200 --b12-trials 2 "
                "--spot-trials 2 --min-certified 1.0 --cert-residual-tol 1e-30",
                dir.file("t.json")) == 4);
}

TEST_CASE("sample and expander-check round trip") {
  TempDir dir;
  CHECK(run_cli("sample --n 8 --d 2 --seed 7 --stem " + dir.file("tup") +
                    " --deterministic",
                dir.file("m.json")) == 0);
  const auto recs = ndjson(slurp(dir.file("m.json")));
  REQUIRE(recs.size() == 1);
  const std::string manifest = recs[0]["manifest"].get<std::string>();
  CHECK(fs::exists(manifest));

  CHECK(run_cli("expander-check --manifest " + manifest +
                    " --max-iter 4000 --deterministic",
                dir.file("e.json")) == 0);
  const auto erecs = ndjson(slurp(dir.file("e.json")));
  REQUIRE(erecs.size() == 1);
  CHECK(erecs[0]["n"] == 8);
  CHECK(erecs[0]["d"] == 2);
  CHECK(erecs[0]["epsilon"].get<double>() > 0.0);

  CHECK(run_cli("expander-check --manifest " + dir.file("nope.json"),
                dir.file("f.json")) == 2);
}

TEST_CASE("genericity subcommand") {
  TempDir dir;
  CHECK(run_cli("genericity --k 1 --trials 50 --seed 3 --deterministic",
                dir.file("g.json")) == 0);
  const auto recs = ndjson(slurp(dir.file("g.json")));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0]["fraction"] == 1.0);
  CHECK(recs[0]["trials"] == 50);

  CHECK(run_cli("genericity --k 3 --trials 10 --mode nonsense",
                dir.file("h.json")) == 2);
}

TEST_CASE("jobs settings") {
  TempDir dir;
  // worker pool size must not affect the records
  const std::string base =
      "gap --d 2 --n 5,6 --seeds 1,2 --max-iter 1000 --deterministic";
  CHECK(run_cli(base + " --jobs 1", dir.file("j1.json")) == 0);
  CHECK(run_cli(base + " --jobs 2", dir.file("j2.json")) == 0);
  CHECK(slurp(dir.file("j1.json")) == slurp(dir.file("j2.json")));

  setenv("QXLAB_JOBS", "3", 1);
  CHECK(qc::default_jobs() == 3);
  unsetenv("QXLAB_JOBS");
  CHECK(qc::default_jobs() == 1);
}

TEST_CASE("moments subcommand") {
  TempDir dir;
  CHECK(run_cli("moments --n 8 --seed 4 --word \"1,2,1*,2*\" --word \"1,2\" "
                "--deterministic --format csv",
                dir.file("m.csv")) == 0);
  const std::string text = slurp(dir.file("m.csv"));
  CHECK(text.rfind("n,seed,word,tr_x_abs,tr_y_abs,diff_abs", 0) == 0);
  // the {1,2} word has equal traces on both sides
  CHECK(text.find("\"1,2\"") != std::string::npos);

  CHECK(run_cli("moments --n 8 --seed 4 --word \"1,1*\"", dir.file("bad.csv")) ==
        2);
}

TEST_CASE("concentration subcommand") {
  TempDir dir;
  CHECK(run_cli("concentration --word \"\" --n 4,8 --trials 30 --seed 2 "
                "--deterministic --format csv",
                dir.file("c.csv")) == 0);
  const std::string text = slurp(dir.file("c.csv"));
  CHECK(text.rfind("n,word,trials,sample_std", 0) == 0);
  CHECK(text.find("4,,30,0.0") != std::string::npos);

  CHECK(run_cli("concentration --word \"1,1*\" --n 4 --trials 30",
                dir.file("d.csv")) == 2);
}
