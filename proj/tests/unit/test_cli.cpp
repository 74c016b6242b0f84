#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "powl/log_io.hpp"
#include "powl/model_io.hpp"
#include "pnml_reader.hpp"

namespace fs = std::filesystem;
using powl2::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("powl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    write("log.csv",
          "case_id,activity,timestamp\n"
          "1,register,1\n1,check,2\n1,pay,3\n"
          "2,register,1\n2,pay,2\n2,check,3\n"
          "3,register,1\n3,reject,2\n");
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }

  std::string read(const std::string& name) const {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  Result run(std::vector<std::string> args) const {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
  }
};

}  // namespace

TEST_F(CliTest, DiscoverWritesModelAndManifest) {
  auto r = run({"discover", "--input", path("log.csv"), "--noise-threshold", "0.2", "--out", path("m.json"), "--dot",
                path("m.dot")});
  ASSERT_EQ(r.code, 0) << r.err;
  powl2::ActivityTable table;
  EXPECT_NO_THROW(powl2::deserialize_model(read("m.json"), table));
  EXPECT_EQ(read("m.dot").rfind("digraph", 0), 0u);
  auto manifest = nlohmann::json::parse(read("m.json.manifest.json"));
  EXPECT_EQ(manifest["command"], "discover");
  EXPECT_DOUBLE_EQ(manifest["flags"]["noise_threshold"].get<double>(), 0.2);
  EXPECT_EQ(manifest["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(manifest["outputs"].size(), 2u);
}

TEST_F(CliTest, SameInputsGiveIdenticalOutputs) {
  ASSERT_EQ(run({"discover", "--input", path("log.csv"), "--out", path("a.json"), "--manifest", path("run.json")}).code, 0);
  auto first_model = read("a.json"), first_manifest = read("run.json");
  ASSERT_EQ(run({"discover", "--input", path("log.csv"), "--out", path("a.json"), "--manifest", path("run.json"),
                 "--threads", "3"})
                .code,
            0);
  EXPECT_EQ(read("a.json"), first_model);
  EXPECT_EQ(read("run.json"), first_manifest);
}

TEST_F(CliTest, DiscoverThenConformFits) {
  ASSERT_EQ(run({"discover", "--input", path("log.csv"), "--out", path("m.json")}).code, 0);
  auto r = run({"conform", "--log", path("log.csv"), "--model", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto report = nlohmann::json::parse(r.out);
  EXPECT_EQ(report["fitness"].get<double>(), 1.0);
  EXPECT_TRUE(report.contains("precision"));
  EXPECT_TRUE(report.contains("f_score"));
  EXPECT_EQ(report["per_trace"].size(), 3u);
}

TEST_F(CliTest, ConvertFormatsAndSoundness) {
  ASSERT_EQ(run({"discover", "--input", path("log.csv"), "--out", path("m.json")}).code, 0);
  auto r = run({"convert", "--model", path("m.json"), "--out", path("net.pnml"), "--soundness"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["soundness"], "sound");
  auto net = powl2::fixtures::read_pnml(read("net.pnml"));
  EXPECT_FALSE(net.transitions.empty());
  auto dot = run({"convert", "--model", path("m.json"), "--format", "dot"});
  ASSERT_EQ(dot.code, 0);
  EXPECT_EQ(dot.out.rfind("digraph", 0), 0u);
}

TEST_F(CliTest, InconclusiveSoundnessExitCode) {
  write("wide.json", R"({"type":"partial_order","order":[],"children":[
    {"type":"activity","label":"a"},{"type":"activity","label":"b"},{"type":"activity","label":"c"},
    {"type":"activity","label":"d"}]})");
  auto r = run({"convert", "--model", path("wide.json"), "--out", path("n.pnml"), "--soundness", "--max-markings", "10"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(nlohmann::json::parse(r.out)["soundness"], "inconclusive");
}

TEST_F(CliTest, EnumerateAndSample) {
  write("seq.json", R"({"type":"loop","do":{"type":"activity","label":"a"},"redo":{"type":"activity","label":"b"}})");
  auto r = run({"enumerate", "--model", path("seq.json"), "--max-len", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["truncated"], true);
  EXPECT_EQ(j["traces"], nlohmann::json::parse(R"([["a"],["a","b","a"]])"));

  ASSERT_EQ(run({"sample", "--model", path("seq.json"), "--out", path("s.xes"), "--traces", "5", "--seed", "3"}).code, 0);
  ASSERT_EQ(run({"sample", "--model", path("seq.json"), "--out", path("s.csv"), "--traces", "5", "--seed", "3"}).code, 0);
  powl2::ActivityTable t1, t2;
  auto xes = powl2::read_log_file(path("s.xes"), t1, powl2::LogFormat::kXes);
  auto csv = powl2::read_log_file(path("s.csv"), t2, powl2::LogFormat::kCsv);
  EXPECT_EQ(xes.total(), 5u);
  EXPECT_EQ(xes, csv);
}

TEST_F(CliTest, StatsJson) {
  auto r = run({"stats", "--input", path("log.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["traces"], 3);
  EXPECT_EQ(j["starts"], nlohmann::json({"register"}));
  EXPECT_EQ(j["ends"], nlohmann::json({"check", "pay", "reject"}));
}

TEST_F(CliTest, ExitCodes) {
  auto unknown = run({"discover", "--bogus"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"discover", "--input", path("missing.xes"), "--out", path("x.json")}).code, 1);
  write("bad.xes", "<log><trace>");
  EXPECT_EQ(run({"discover", "--input", path("bad.xes"), "--out", path("x.json")}).code, 1);
  EXPECT_EQ(run({"discover", "--input", path("log.csv"), "--out", path("x.json"), "--noise-threshold", "2"}).code, 2);
  write("bad.json", R"({"type":"gadget"})");
  EXPECT_EQ(run({"enumerate", "--model", path("bad.json")}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}
