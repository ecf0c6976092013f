// Copyright 2026 The ctxclean Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctxclean/pipeline.h"

#include <gtest/gtest.h>
#include <unistd.h>

#include <sstream>
#include <thread>

#include "test_util.h"

namespace ctxclean {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("ctxclean_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args, const std::atomic<bool>* stop = nullptr) {
  args.insert(args.begin(), "ctxclean");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err, stop);
  return {code, out.str(), err.str()};
}

std::string iot(const std::string& name) { return testing::data_path("iot/" + name).string(); }

constexpr const char* kSmallContext =
    "@prefix cx: <https://ctxclean.dev/vocab#> .\n"
    "@prefix ex: <https://ctxclean.dev/iot#> .\n"
    "ex:ds18b20_1 cx:mapsToColumn \"temp_in_1\" ; cx:hasMetadata ex:m .\n"
    "ex:m cx:metadataType \"min\" ; cx:metadataValue -55 .\n";

TEST(Settings, ParsesCommentsAndResolvesPaths) {
  const auto settings = Settings::parse("# c\n data = x.csv \nseed=3\n\nout=/abs/out\nhealth=a,b,c\nhealth=d,e,f\n", "/base");
  EXPECT_EQ(settings.get("data"), "/base/x.csv");
  EXPECT_EQ(settings.get("out"), "/abs/out");
  EXPECT_EQ(settings.get("seed"), "3");
  EXPECT_EQ(settings.all("health").size(), 2u);
  EXPECT_FALSE(settings.get("context"));
}

TEST(Settings, MissingEqualsIsConfigError) { EXPECT_THROW(Settings::parse("seed 3\n"), ConfigError); }

TEST(MakeRunConfig, ReadsEveryKey) {
  const auto config = make_run_config(Settings::parse(
      "seed=7\ntolerance=2.5\nrepair-mode=delete\npoll-seconds=0.5\ndetectors=null, capability\n"
      "type.t=number\nbind.ex:s=t\ntimestamp.ex:d=ts\nsensor-id-column=s\ndevice-id-column=d\n"
      "health=ex:d,2026-03-01T00:00:00,2026-03-01T01:00:00\n"
      "inject.rate.typo=0.1\ninject.rate.outlier=0.2\ninject.outlier-mode=doubled_range\ninject.columns=a, b\n"));
  EXPECT_EQ(config.seed, 7u);
  EXPECT_EQ(config.injection.seed, 7u);
  EXPECT_EQ(config.tolerance, 2.5);
  EXPECT_EQ(config.repair_mode, RepairMode::kDelete);
  EXPECT_EQ(config.poll_seconds, 0.5);
  EXPECT_EQ(config.enabled_detectors, (std::set<std::string>{"null", "capability"}));
  EXPECT_EQ(config.column_types.at("t"), ColumnType::kNumber);
  EXPECT_EQ(config.injection.rates.at(ErrorCategory::kTypo), 0.1);
  EXPECT_EQ(config.injection.outlier_mode, OutlierMode::kDoubledRange);
  EXPECT_EQ(config.injection.target_columns, (std::vector<std::string>{"a", "b"}));

  TripleGraph graph;
  graph.set_prefix("ex", "http://ex#");
  const auto dataset = dataset_config(config, graph);
  EXPECT_EQ(dataset.column_bindings.at("http://ex#s"), "t");
  EXPECT_EQ(dataset.timestamp_bindings.at("http://ex#d"), "ts");
  EXPECT_EQ(dataset.colocation_tolerance, 2.5);
  ASSERT_EQ(dataset.health_ranges.size(), 1u);
  EXPECT_EQ(dataset.health_ranges[0].device, "http://ex#d");
}

TEST(MakeRunConfig, Rejections) {
  for (const char* text : {"sede=1\n", "seed=-1\n", "repair-mode=fix\n", "poll-seconds=0\n", "tolerance=-1\n",
                           "type.a=float\n", "inject.rate.smudge=0.1\n", "health=a,b\n"}) {
    EXPECT_THROW(make_run_config(Settings::parse(text)), ConfigError) << text;
  }
}

TEST(ExtractOfds, IotFixtureListsLocality) {
  TempDir dir("extract");
  const auto run = cli({"extract-ofds", "--context", iot("context.ttl"), "--out", dir.path().string()});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_NE(run.out.find("locality:https://ctxclean.dev/iot#ds18b20_1->https://ctxclean.dev/iot#Room1\tlocality\t"),
            std::string::npos);
  EXPECT_NE(run.out.find("17 dependencies\n"), std::string::npos);
  EXPECT_EQ(read_file(dir / "ofds.txt"), run.out);
}

TEST(ExtractOfds, EmptyGraph) {
  TempDir dir("extract_empty");
  write_file(dir / "empty.ttl", "");
  const auto run = cli({"extract-ofds", "--context", (dir / "empty.ttl").string()});
  EXPECT_EQ(run.code, 0);
  EXPECT_EQ(run.out, "0 dependencies\n");
}

TEST(ExtractOfds, MalformedContext) {
  TempDir dir("extract_bad");
  write_file(dir / "bad.ttl", "@prefix ex: <http://ex#> .\nex:s ex:p\n");
  const auto run = cli({"extract-ofds", "--context", (dir / "bad.ttl").string()});
  EXPECT_EQ(run.code, 2);
  EXPECT_NE(run.err.find("line "), std::string::npos);
  EXPECT_NE(run.err.find("column "), std::string::npos);
}

TEST(Cli, UsageAndConfigErrorsExitOne) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"clean", "--bogus"}).code, 1);
  EXPECT_EQ(cli({"clean", "--context", iot("context.ttl")}).code, 1);  // data and out missing
  EXPECT_EQ(cli({"extract-ofds", "--context", "/nonexistent/context.ttl"}).code, 1);
  EXPECT_EQ(cli({"clean", "--config", iot("readings.conf"), "--repair-mode", "fix"}).code, 1);
}

TEST(Cli, DataErrorsExitTwo) {
  TempDir dir("data_error");
  write_file(dir / "bad.csv", "ts_in_1,ts_main\nnot-a-time,2026-03-01T00:00:00\n");
  const auto run = cli({"clean", "--config", iot("readings.conf"), "--data", (dir / "bad.csv").string(), "--out",
                        dir.path().string()});
  EXPECT_EQ(run.code, 2) << run.err;
}

TEST(Clean, CleanFixtureIsUntouched) {
  TempDir dir("clean_fixture");
  const auto run = cli({"clean", "--config", iot("readings.conf"), "--out", dir.path().string()});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(read_file(dir / "cleaned.csv"), read_file(iot("readings.csv")));
  EXPECT_EQ(read_file(dir / "findings.csv"), "row,column,detector,dependency_id,reason\n");
  EXPECT_EQ(read_file(dir / "repairs.csv"), "row,column,old,new,strategy\n");
}

TEST(Clean, FaultySensorValue) {
  TempDir dir("clean_faulty");
  write_file(dir / "context.ttl", kSmallContext);
  write_file(dir / "data.csv", "temp_in_1\n21.5\n-128\n22.0\n");
  write_file(dir / "run.conf", "context=context.ttl\ndata=data.csv\nout=out\ntype.temp_in_1=number\n");
  const auto run = cli({"clean", "--config", (dir / "run.conf").string()});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(read_file(dir / "out/findings.csv"),
            "row,column,detector,dependency_id,reason\n"
            "1,temp_in_1,capability,capability:https://ctxclean.dev/iot#ds18b20_1:min=-55,below minimum -55\n");
  EXPECT_EQ(read_file(dir / "out/repairs.csv"), "row,column,old,new,strategy\n1,temp_in_1,-128,21.5,median\n");

  const auto deleted = cli({"clean", "--config", (dir / "run.conf").string(), "--repair-mode", "delete"});
  ASSERT_EQ(deleted.code, 0) << deleted.err;
  EXPECT_EQ(read_file(dir / "out/cleaned.csv"), "temp_in_1\n21.5\n\"\"\n22.0\n");
  EXPECT_EQ(load_csv(read_file(dir / "out/cleaned.csv"), DatasetConfig{}).at(1, 0), std::nullopt);
}

TEST(Clean, DetectorToggle) {
  TempDir dir("clean_toggle");
  write_file(dir / "context.ttl", kSmallContext);
  write_file(dir / "data.csv", "temp_in_1\n21.5\n-128\n\"\"\n");
  write_file(dir / "run.conf", "context=context.ttl\ndata=data.csv\nout=out\ntype.temp_in_1=number\ndetectors=null\n");
  ASSERT_EQ(cli({"clean", "--config", (dir / "run.conf").string()}).code, 0);
  const auto findings = read_findings_csv(read_file(dir / "out/findings.csv"));
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings.begin()->detector, "null");
}

TEST(Clean, ByteIdenticalReruns) {
  TempDir dir("clean_twice");
  const auto out = dir.path().string();
  ASSERT_EQ(cli({"inject", "--config", iot("readings.conf"), "--out", out}).code, 0);
  const auto dirty = (dir / "dirty.csv").string();
  std::vector<std::string> first;
  for (int i = 0; i < 2; ++i) {
    ASSERT_EQ(cli({"clean", "--config", iot("readings.conf"), "--data", dirty, "--out", out}).code, 0);
    std::vector<std::string> files;
    for (const char* name : {"cleaned.csv", "findings.csv", "repairs.csv"}) files.push_back(read_file(dir / name));
    if (i == 0) {
      first = files;
    } else {
      EXPECT_EQ(files, first);
    }
  }
}

TEST(Inject, WritesOutputsAndEchoesSeed) {
  TempDir a("inject_a"), b("inject_b");
  const auto run = cli({"inject", "--config", iot("readings.conf"), "--seed", "5", "--out", a.path().string()});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_NE(run.out.find("seed=5\n"), std::string::npos);
  EXPECT_NE(read_file(a / "injection.txt").find("generator=mt19937_64/v1"), std::string::npos);
  ASSERT_EQ(cli({"inject", "--config", iot("readings.conf"), "--seed", "5", "--out", b.path().string()}).code, 0);
  EXPECT_EQ(read_file(a / "dirty.csv"), read_file(b / "dirty.csv"));
  EXPECT_EQ(read_file(a / "ground_truth.csv"), read_file(b / "ground_truth.csv"));
}

TEST(Evaluate, WritesReport) {
  TempDir dir("evaluate");
  const auto out = dir.path().string();
  ASSERT_EQ(cli({"inject", "--config", iot("readings.conf"), "--out", out}).code, 0);
  ASSERT_EQ(cli({"clean", "--config", iot("readings.conf"), "--data", (dir / "dirty.csv").string(), "--out", out}).code, 0);
  const auto run = cli({"evaluate", "--config", iot("readings.conf"), "--out", out});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_NE(run.out.find("precision="), std::string::npos);
  const auto report = read_file(dir / "eval.json");
  EXPECT_NE(report.find("\"repair_recall\""), std::string::npos);
  EXPECT_EQ(cli({"evaluate", "--out", (dir / "missing").string()}).code, 1);
}

// Watch-mode scaffolding: a copy of the IoT fixture in a scratch directory.
struct WatchFixture {
  TempDir dir{"watch"};
  RunConfig config;
  std::string original;

  WatchFixture() {
    original = read_file(iot("context.ttl"));
    write_file(dir / "context.ttl", original);
    auto settings = Settings::parse(read_file(iot("readings.conf")), testing::data_path("iot"));
    settings.set("context", (dir / "context.ttl").string());
    settings.set("out", (dir / "out").string());
    config = make_run_config(settings);
    config.poll_seconds = 0.05;
  }

  std::string relocated() const {
    std::string text = original;
    const std::string from = "ex:deployment_2 cx:atLocation ex:Room1 .";
    text.replace(text.find(from), from.size(), "ex:deployment_2 cx:atLocation ex:Room2 .");
    return text;
  }
};

// Two rows where the co-located sensors disagree by more than the tolerance.
void write_disagreeing_data(const WatchFixture& f) {
  std::string csv = read_file(iot("readings.csv"));
  std::istringstream in(csv);
  std::string header, row, out;
  std::getline(in, header);
  out = header + "\n";
  for (int i = 0; std::getline(in, row); ++i) {
    if (i == 10 || i == 20) row = row.substr(0, row.rfind(',')) + ",40.0";
    out += row + "\n";
  }
  write_file(f.dir / "readings.csv", out);
}

std::size_t colocation_findings(const CleanResult& result) {
  std::size_t n = 0;
  for (const auto& finding : result.report) n += finding.detector == detector::kColocation;
  return n;
}

TEST(Watch, NoChangeNoRefresh) {
  WatchFixture f;
  std::ostringstream log;
  ContextWatcher watcher(f.config, log);
  watcher.start();
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(watcher.poll_once());
  EXPECT_EQ(watcher.refresh_count(), 0u);
  EXPECT_EQ(log.str().find("refresh"), std::string::npos);
}

TEST(Watch, RelocationMatchesColdRestart) {
  WatchFixture f;
  write_disagreeing_data(f);
  f.config.data_path = f.dir / "readings.csv";
  std::ostringstream log;
  ContextWatcher watcher(f.config, log);
  watcher.start();
  EXPECT_EQ(colocation_findings(watcher.last_result()), 4u);

  write_file(f.dir / "context.ttl", f.relocated());
  ASSERT_TRUE(watcher.poll_once());
  EXPECT_NE(log.str().find("refresh 1: 2 change events"), std::string::npos) << log.str();
  EXPECT_EQ(colocation_findings(watcher.last_result()), 0u);

  std::ostringstream cold_log;
  const auto cold = cmd_clean(f.config, cold_log);
  EXPECT_EQ(watcher.dependencies(), cold.dependencies);
  EXPECT_EQ(watcher.last_result().report, cold.report);
  EXPECT_EQ(watcher.last_result().plan, cold.plan);
  EXPECT_EQ(watcher.last_result().cleaned, cold.cleaned);

  // Moving back restores the findings.
  write_file(f.dir / "context.ttl", f.original);
  ASSERT_TRUE(watcher.poll_once());
  EXPECT_EQ(colocation_findings(watcher.last_result()), 4u);
}

TEST(Watch, CorruptContextKeepsPriorDependencies) {
  WatchFixture f;
  std::ostringstream log;
  ContextWatcher watcher(f.config, log);
  watcher.start();
  const auto before = watcher.dependencies();
  write_file(f.dir / "context.ttl", f.original + "\nex:broken cx:attachedTo\n");
  EXPECT_FALSE(watcher.poll_once());
  EXPECT_NE(log.str().find("warning: context update rejected"), std::string::npos);
  EXPECT_EQ(watcher.dependencies(), before);
  // A later valid edit is picked up against the last good graph.
  write_file(f.dir / "context.ttl", f.relocated());
  EXPECT_TRUE(watcher.poll_once());
  EXPECT_EQ(watcher.dependencies(), extract_all(parse_context(f.relocated())));
}

TEST(Watch, StopsOnSignalFlag) {
  WatchFixture f;
  std::atomic<bool> stop{false};
  std::thread runner([&] {
    const auto run = cli({"watch", "--config", iot("readings.conf"), "--context", (f.dir / "context.ttl").string(),
                          "--out", (f.dir / "out").string(), "--poll-seconds", "0.05"},
                         &stop);
    EXPECT_EQ(run.code, 0) << run.err;
    EXPECT_NE(run.err.find("refresh 1:"), std::string::npos) << run.err;
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  write_file(f.dir / "context.ttl", f.relocated());
  std::this_thread::sleep_for(std::chrono::milliseconds(500));
  stop = true;
  runner.join();
}

}  // namespace
}  // namespace ctxclean
