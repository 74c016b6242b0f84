#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "powl/conformance.hpp"
#include "powl/discovery.hpp"
#include "powl/error.hpp"
#include "powl/language.hpp"
#include "powl/log_io.hpp"
#include "powl/model_io.hpp"
#include "powl/sampling.hpp"
#include "powl/wfnet.hpp"

#ifndef POWL_VERSION
#define POWL_VERSION "0.0.0"
#endif

namespace powl2::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw InputError("cannot write '" + path.string() + "'");
  }
}

unsigned default_threads() {
  const char* env = std::getenv("POWL_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  unsigned long n = std::strtoul(env, &end, 10);
  if (*end != '\0' || n == 0 || n > 1024) throw ContractError("POWL_THREADS must be a positive integer");
  return static_cast<unsigned>(n);
}

struct LogOptions {
  std::string path;
  std::string format = "auto";
  CsvConfig csv;

  void attach(CLI::App& app, const std::string& flag) {
    app.add_option(flag, path, "Event log (XES or CSV)")->required();
    app.add_option("--log-format", format, "Log format")
        ->check(CLI::IsMember({"auto", "xes", "csv"}))
        ->capture_default_str();
    app.add_option("--case-column", csv.case_column, "CSV case id column")->capture_default_str();
    app.add_option("--activity-column", csv.activity_column, "CSV activity column")->capture_default_str();
    app.add_option("--timestamp-column", csv.timestamp_column, "CSV timestamp column")->capture_default_str();
  }

  LogFormat resolved() const {
    if (format == "xes") return LogFormat::kXes;
    if (format == "csv") return LogFormat::kCsv;
    return guess_log_format(path);
  }

  EventLog load(ActivityTable& activities, std::string* bytes_out = nullptr) const {
    std::string bytes = read_file(path);
    std::istringstream in(bytes);
    EventLog log = resolved() == LogFormat::kCsv ? parse_csv(in, activities, csv) : parse_xes(in, activities);
    if (bytes_out) *bytes_out = std::move(bytes);
    return log;
  }
};

struct LimitOptions {
  std::size_t max_markings = NetLimits{}.max_markings;
  long long max_time_ms = NetLimits{}.max_time.count();

  void attach(CLI::App& app) {
    app.add_option("--max-markings", max_markings, "State-space marking limit")->capture_default_str();
    app.add_option("--max-time-ms", max_time_ms, "State-space time limit in milliseconds")->capture_default_str();
  }

  NetLimits limits() const {
    if (max_markings == 0 || max_time_ms <= 0) throw ContractError("state-space limits must be positive");
    return {max_markings, std::chrono::milliseconds(max_time_ms)};
  }
};

json label_set(const std::set<ActivityId>& ids, const ActivityTable& activities) {
  std::vector<std::string> labels;
  for (ActivityId a : ids) labels.push_back(activities.label(a));
  std::sort(labels.begin(), labels.end());
  return labels;
}

json stats_json(const EventLog& log, const LogStats& stats, const ActivityTable& activities) {
  json j;
  j["traces"] = log.total();
  j["variants"] = log.variant_count();
  j["events"] = log.event_count();
  j["empty_traces"] = stats.empty_traces;
  j["alphabet"] = label_set(stats.alphabet, activities);
  j["starts"] = label_set(stats.starts, activities);
  j["ends"] = label_set(stats.ends, activities);
  std::map<std::string, std::uint64_t> start_freq, end_freq;
  for (auto [a, n] : stats.start_freq) start_freq[activities.label(a)] = n;
  for (auto [a, n] : stats.end_freq) end_freq[activities.label(a)] = n;
  j["start_freq"] = start_freq;
  j["end_freq"] = end_freq;
  std::vector<std::tuple<std::string, std::string, Count>> dfg;
  for (const auto& [edge, n] : stats.dfg) dfg.emplace_back(activities.label(edge.first), activities.label(edge.second), n);
  std::sort(dfg.begin(), dfg.end());
  j["dfg"] = json::array();
  for (const auto& [from, to, n] : dfg) j["dfg"].push_back({{"from", from}, {"to", to}, {"count", n}});
  return j;
}

NodePtr load_model(const std::string& path, ActivityTable& activities, std::string* bytes_out = nullptr) {
  std::string bytes = read_file(path);
  NodePtr model = deserialize_model(bytes, activities);
  auto violations = validate_model(*model);
  if (!violations.empty()) {
    throw SchemaError("invalid model at " + violations.front().path + ": " + violations.front().message);
  }
  if (bytes_out) *bytes_out = std::move(bytes);
  return model;
}

void emit(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
  } else {
    write_file(path, bytes);
  }
}

std::string verdict_json(const SoundnessVerdict& v) {
  json j;
  switch (v.status) {
    case SoundnessVerdict::Status::kSound: j["soundness"] = "sound"; break;
    case SoundnessVerdict::Status::kUnsound: j["soundness"] = "unsound"; break;
    case SoundnessVerdict::Status::kInconclusive: j["soundness"] = "inconclusive"; break;
  }
  j["reason"] = v.reason;
  j["markings"] = v.markings;
  return j.dump(2) + "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"POWL 2.0 process discovery, conversion and conformance", "powl"};
  app.set_version_flag("--version", std::string(POWL_VERSION));
  app.require_subcommand(1);
  int exit_code = kOk;

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Print log statistics as JSON");
  LogOptions stats_log;
  double stats_threshold = 0.0;
  stats_log.attach(*stats_cmd, "--input");
  stats_cmd->add_option("--noise-threshold", stats_threshold, "Apply DFG noise filtering first")->capture_default_str();

  // discover
  auto* discover_cmd = app.add_subcommand("discover", "Mine a POWL model from a log");
  LogOptions discover_log;
  DiscoveryConfig discover_config;
  std::string discover_out, discover_dot, discover_manifest;
  bool no_reduce = false, no_manifest = false;
  unsigned discover_threads = 0;
  discover_log.attach(*discover_cmd, "--input");
  discover_cmd->add_option("--noise-threshold", discover_config.noise_threshold, "DFG noise filter threshold in [0,1]")
      ->capture_default_str();
  discover_cmd->add_option("--out", discover_out, "Model JSON output path")->required();
  discover_cmd->add_option("--dot", discover_dot, "Also write a DOT rendering");
  discover_cmd->add_flag("--no-reduce", no_reduce, "Skip the reduction rules");
  discover_cmd->add_option("--threads", discover_threads, "Worker threads (default: POWL_THREADS or 1)");
  discover_cmd->add_option("--manifest", discover_manifest, "Run manifest path (default: <out>.manifest.json)");
  discover_cmd->add_flag("--no-manifest", no_manifest, "Do not write a run manifest");

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "Convert a POWL model to a workflow net");
  std::string convert_model, convert_out, convert_format = "pnml";
  bool convert_soundness = false;
  LimitOptions convert_limits;
  convert_cmd->add_option("--model", convert_model, "Model JSON")->required();
  convert_cmd->add_option("--out", convert_out, "Output path (default: stdout)");
  convert_cmd->add_option("--format", convert_format, "Net format")
      ->check(CLI::IsMember({"pnml", "dot"}))
      ->capture_default_str();
  convert_cmd->add_flag("--soundness", convert_soundness, "Check soundness and print the verdict");
  convert_limits.attach(*convert_cmd);

  // conform
  auto* conform_cmd = app.add_subcommand("conform", "Fitness, precision and f-score of a model on a log");
  LogOptions conform_log;
  std::string conform_model, conform_out;
  unsigned conform_threads = 0;
  LimitOptions conform_limits;
  conform_log.attach(*conform_cmd, "--log");
  conform_cmd->add_option("--model", conform_model, "Model JSON")->required();
  conform_cmd->add_option("--out", conform_out, "Report path (default: stdout)");
  conform_cmd->add_option("--threads", conform_threads, "Worker threads (default: POWL_THREADS or 1)");
  conform_limits.attach(*conform_cmd);

  // enumerate
  auto* enumerate_cmd = app.add_subcommand("enumerate", "Print the bounded language of a model");
  std::string enumerate_model;
  EnumerationBounds bounds;
  enumerate_cmd->add_option("--model", enumerate_model, "Model JSON")->required();
  enumerate_cmd->add_option("--max-len", bounds.max_len, "Longest trace")->capture_default_str();
  enumerate_cmd->add_option("--max-loop-unroll", bounds.max_loop_unroll, "Redo executions per loop")
      ->capture_default_str();

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Generate a log by simulating a model");
  std::string sample_model, sample_out, sample_format = "auto";
  SamplingOptions sampling;
  sample_cmd->add_option("--model", sample_model, "Model JSON")->required();
  sample_cmd->add_option("--out", sample_out, "Log output path")->required();
  sample_cmd->add_option("--format", sample_format, "Log format")
      ->check(CLI::IsMember({"auto", "xes", "csv"}))
      ->capture_default_str();
  sample_cmd->add_option("--traces", sampling.traces, "Number of traces")->capture_default_str();
  sample_cmd->add_option("--seed", sampling.seed, "Random seed")->capture_default_str();
  sample_cmd->add_option("--p-redo", sampling.p_redo, "Probability of another loop iteration")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kUsageError;
  }

  try {
    ActivityTable activities;
    if (stats_cmd->parsed()) {
      EventLog log = stats_log.load(activities);
      LogStats stats = filter_noise(log_stats(log), stats_threshold);
      out << stats_json(log, stats, activities).dump(2) << "\n";
    } else if (discover_cmd->parsed()) {
      discover_config.apply_reductions = !no_reduce;
      discover_config.threads = discover_threads ? discover_threads : default_threads();
      std::string input_bytes;
      EventLog log = discover_log.load(activities, &input_bytes);
      NodePtr model = discover(log, discover_config);
      const std::string model_json = serialize_model(*model, activities);
      write_file(discover_out, model_json);

      RunManifest manifest("discover", POWL_VERSION);
      manifest.flag("noise_threshold", discover_config.noise_threshold);
      manifest.flag("reduce", discover_config.apply_reductions);
      manifest.flag("log_format", discover_log.resolved() == LogFormat::kCsv ? "csv" : "xes");
      manifest.input(discover_log.path, input_bytes);
      manifest.output(discover_out, model_json);
      if (!discover_dot.empty()) {
        const std::string dot = export_model_dot(*model, activities);
        write_file(discover_dot, dot);
        manifest.output(discover_dot, dot);
      }
      if (!no_manifest) {
        write_file(discover_manifest.empty() ? discover_out + ".manifest.json" : discover_manifest, manifest.dump());
      }
    } else if (convert_cmd->parsed()) {
      NodePtr model = load_model(convert_model, activities);
      const WfNet net = powl_to_wfnet(*model);
      const auto limits = convert_limits.limits();
      emit(convert_out, export_net(net, activities, convert_format == "dot" ? NetFormat::kDot : NetFormat::kPnml), out);
      if (convert_soundness) {
        auto verdict = check_soundness(net, limits);
        (convert_out.empty() ? err : out) << verdict_json(verdict);
        if (verdict.status == SoundnessVerdict::Status::kInconclusive) exit_code = kInconclusive;
      }
    } else if (conform_cmd->parsed()) {
      const auto limits = conform_limits.limits();
      NodePtr model = load_model(conform_model, activities);
      EventLog log = conform_log.load(activities);
      unsigned threads = conform_threads ? conform_threads : default_threads();
      auto report = evaluate(log, *model, limits, threads);
      emit(conform_out, report_to_json(report, activities), out);
      if (report.limit_hit) exit_code = kInconclusive;
    } else if (enumerate_cmd->parsed()) {
      if (bounds.max_len == 0) throw ContractError("--max-len must be positive");
      NodePtr model = load_model(enumerate_model, activities);
      TraceSet language = enumerate_language(*model, bounds);
      std::vector<std::vector<std::string>> traces;
      for (const auto& t : language.traces) {
        std::vector<std::string> labels;
        for (ActivityId a : t) labels.push_back(activities.label(a));
        traces.push_back(std::move(labels));
      }
      std::sort(traces.begin(), traces.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
      });
      json j;
      j["truncated"] = language.truncated;
      j["traces"] = traces;
      out << j.dump(2) << "\n";
    } else if (sample_cmd->parsed()) {
      if (sampling.traces == 0) throw ContractError("--traces must be positive");
      NodePtr model = load_model(sample_model, activities);
      EventLog log = sample_traces(*model, sampling);
      bool csv = sample_format == "csv" || (sample_format == "auto" && guess_log_format(sample_out) == LogFormat::kCsv);
      std::ostringstream buf;
      if (csv) {
        write_csv(buf, log, activities);
      } else {
        write_xes(buf, log, activities);
      }
      write_file(sample_out, buf.str());
    }
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return exit_code;
}

}  // namespace powl2::cli
