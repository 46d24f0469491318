#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dnsasm/baseline_ar.hpp"
#include "dnsasm/coldstart.hpp"
#include "dnsasm/detector.hpp"
#include "dnsasm/evalharness.hpp"
#include "dnsasm/ingest.hpp"
#include "dnsasm/report.hpp"
#include "dnsasm/synth.hpp"

namespace dnsasm::cli {

namespace {

/// Rejected flag values that CLI11 validators cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or unusable input data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}' for reading", path));
  return in;
}

// "-" selects the standard output stream passed to run().
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path == "-" || path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw DataError(fmt::format("cannot open '{}' for writing", path));
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }
  void finish(const std::string& what) {
    stream_->flush();
    if (!*stream_) throw DataError(fmt::format("failed writing {}", what));
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

struct DetectorFlags {
  DetectorConfig cfg;
  std::size_t stride = 0;  // 0: same as h
};

void add_detector_options(CLI::App* app, DetectorFlags& f) {
  app->add_option("--k", f.cfg.k, "Pattern length in minutes")->check(CLI::Range(1, 100000));
  app->add_option("--h", f.cfg.h, "Observed window length in minutes")->check(CLI::Range(1, 100000));
  app->add_option("--lookback", f.cfg.lookback, "History length in minutes (must be >= k + h)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  app->add_option("--epsilon", f.cfg.epsilon,
                  "Epsilon in [0,1): log base 10-epsilon for error_threshold, scales alpha")
      ->check(CLI::Range(0.0, 0.999999));
  app->add_option("--cos-threshold", f.cfg.cos_threshold,
                  "Cosine similarity below this value counts as dissimilar, in (0,1]")
      ->check(CLI::Range(1e-12, 1.0));
  app->add_option("--score-threshold", f.cfg.score_threshold,
                  "Report minutes whose feature score (A=1, B=2, C=4) exceeds this")
      ->check(CLI::Range(0, 7));
  app->add_option("--stride", f.stride, "Minutes between evaluations (0 = same as h)");
  app->add_option("--cold-start-factor", f.cfg.cold_start_factor,
                  "Cold start flags when mean(E) >= factor * max(mean(P), 1)")
      ->check(CLI::PositiveNumber);
  app->add_option("--restart-multiple", f.cfg.restart_multiple,
                  "Incremental matcher restarts when the grown pattern reaches this multiple of k")
      ->check(CLI::Range(1.000001, 1e6));
  app->add_option("--threshold-floor", f.cfg.threshold_floor, "Lower clamp for error_threshold")
      ->check(CLI::NonNegativeNumber);
}

DetectorConfig finalize(const DetectorFlags& f) {
  DetectorConfig cfg = f.cfg;
  cfg.stride = f.stride == 0 ? cfg.h : f.stride;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

AttackSpec parse_attack(const std::string& text) {
  // START:DURATION:MULT:FEATURES[:HOST]
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 4 || parts.size() > 5) {
    throw UsageError(fmt::format("--attack '{}' must be START:DURATION:MULT:FEATURES[:HOST]", text));
  }
  try {
    AttackSpec a;
    a.start_minute = std::stoll(parts[0]);
    a.duration_minutes = std::stoll(parts[1]);
    a.magnitude = std::stod(parts[2]);
    a.targets.clear();
    for (const char c : parts[3]) a.targets.push_back(parse_feature(c));
    if (parts.size() == 5) a.target_host = std::stoul(parts[4]);
    return a;
  } catch (const std::exception& e) {
    throw UsageError(fmt::format("--attack '{}': {}", text, e.what()));
  }
}

std::vector<MinuteSeries> load_series_files(const std::vector<std::string>& paths) {
  std::vector<MinuteSeries> all;
  for (const auto& path : paths) {
    auto in = open_in(path);
    auto part = parse_series(in);
    for (auto& s : part) all.push_back(std::move(s));
  }
  return all;
}

SeriesMap load_events_as_series(const std::string& path, IpKeying keying) {
  auto in = open_in(path);
  EventReader reader(in);
  FeatureAggregator agg(keying);
  DnsEventRecord rec;
  while (reader.next(rec)) agg.add(rec);
  return agg.finish();
}

IpSide parse_side(const std::string& s) { return s == "src" ? IpSide::src : IpSide::dst; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate string matching anomaly detector for per-minute DNS traffic"};
  app.name(args.empty() ? "dnsasm" : std::filesystem::path(args[0]).filename().string());
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  // "-h" would clash with the --h horizon flag.
  app.set_help_flag("--help", "Print this help message and exit");

  // gen
  SynthProfile profile = SynthProfile::default_profile();
  std::vector<std::string> attack_specs;
  bool no_attacks = false;
  std::string events_out = "events.csv";
  std::string truth_out = "truth.csv";
  auto* gen = app.add_subcommand("gen", "Generate a synthetic events CSV and ground-truth CSV");
  gen->add_option("--days", profile.days, "Days of traffic")->check(CLI::Range(1, 3650));
  gen->add_option("--seed", profile.seed, "Random seed");
  gen->add_option("--high-rate", profile.high_rate, "Packets per hour in the busy window")
      ->check(CLI::PositiveNumber);
  gen->add_option("--low-rate", profile.low_rate, "Packets per hour outside the busy window")
      ->check(CLI::PositiveNumber);
  gen->add_option("--high-start-hour", profile.high_start_hour, "Busy window start hour")
      ->check(CLI::Range(0, 24));
  gen->add_option("--high-end-hour", profile.high_end_hour, "Busy window end hour (exclusive)")
      ->check(CLI::Range(0, 24));
  gen->add_option("--noise", profile.noise_fraction, "Uniform multiplicative noise fraction")
      ->check(CLI::Range(0.0, 0.999999));
  gen->add_option("--attack", attack_specs,
                  "Attack START:DURATION:MULT:FEATURES[:HOST], minutes from the start; repeatable "
                  "(default: the canned attacks that fit in --days)");
  gen->add_flag("--no-attacks", no_attacks, "Generate clean traffic");
  gen->add_option("--events-out", events_out, "Events CSV path");
  gen->add_option("--truth-out", truth_out, "Ground-truth CSV path");

  // ingest
  std::string ingest_events;
  std::string ingest_out = "-";
  std::string ingest_dir;
  std::string ingest_feature = "all";
  std::string b_key = "dst";
  std::string c_key = "src";
  auto* ingest = app.add_subcommand("ingest", "Aggregate an events CSV into per-minute series CSVs");
  ingest->add_option("--events", ingest_events, "Events CSV")->required();
  ingest->add_option("--out", ingest_out, "Series CSV holding every series ('-' for stdout)");
  ingest->add_option("--out-dir", ingest_dir, "Write one series CSV per series into this directory");
  ingest->add_option("--feature", ingest_feature, "A, B, C or all")
      ->check(CLI::IsMember({"A", "B", "C", "all"}));
  ingest->add_option("--b-key", b_key, "Address feature B is keyed on")
      ->check(CLI::IsMember({"src", "dst"}));
  ingest->add_option("--c-key", c_key, "Address feature C is keyed on")
      ->check(CLI::IsMember({"src", "dst"}));

  // detect
  DetectorFlags detect_flags;
  std::vector<std::string> detect_series_paths;
  std::string detect_events;
  std::string detect_method = "asm";
  std::string report_path = "-";
  std::string report_format = "json";
  std::string windows_path;
  auto* detect = app.add_subcommand("detect", "Flag anomalous windows and report anomaly events");
  detect->add_option("--series", detect_series_paths, "Series CSV file(s)");
  detect->add_option("--events", detect_events, "Events CSV (aggregated on the fly)");
  detect->add_option("--method", detect_method, "asm or ar")->check(CLI::IsMember({"asm", "ar"}));
  detect->add_option("--report", report_path, "Report path ('-' for stdout)");
  detect->add_option("--format", report_format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  detect->add_option("--emit-windows", windows_path, "Also write per-window flags CSV here");
  add_detector_options(detect, detect_flags);

  // eval
  std::string eval_report;
  std::string eval_truth;
  std::int64_t eval_window = 10;
  std::optional<std::int64_t> timeline_start;
  std::optional<std::int64_t> timeline_end;
  std::string eval_format = "json";
  std::string eval_out = "-";
  auto* eval = app.add_subcommand("eval", "Score a JSON report against ground truth");
  eval->add_option("--report", eval_report, "Report JSON from detect")->required();
  eval->add_option("--truth", eval_truth, "Ground-truth CSV")->required();
  eval->add_option("--window", eval_window, "Tile size in minutes for true negatives")
      ->check(CLI::Range(1, 1000000));
  eval->add_option("--timeline-start", timeline_start,
                   "First epoch minute of the timeline (default: earliest interval)");
  eval->add_option("--timeline-end", timeline_end,
                   "Last epoch minute of the timeline (default: latest interval)");
  eval->add_option("--format", eval_format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  eval->add_option("--out", eval_out, "Output path ('-' for stdout)");

  // sweep
  DetectorFlags sweep_flags;
  std::string sweep_events;
  std::string sweep_truth;
  int sweep_days = 10;
  std::uint64_t sweep_seed = 7;
  std::vector<double> sweep_lookbacks(std::begin(kDefaultLookbackDays), std::end(kDefaultLookbackDays));
  std::vector<int> sweep_scores{4, 5};
  std::vector<std::string> sweep_methods{"asm", "ar"};
  std::string sweep_out = "-";
  bool sweep_serial = false;
  auto* sw = app.add_subcommand("sweep", "Evaluate methods over a grid of lookbacks and score thresholds");
  sw->add_option("--events", sweep_events, "Events CSV (default: generate the synthetic profile)");
  sw->add_option("--truth", sweep_truth, "Ground-truth CSV, required with --events");
  sw->add_option("--days", sweep_days, "Days of synthetic traffic when no --events is given")
      ->check(CLI::Range(1, 3650));
  sw->add_option("--seed", sweep_seed, "Seed for synthetic traffic");
  sw->add_option("--lookbacks", sweep_lookbacks, "Lookback lengths in days")->delimiter(',');
  sw->add_option("--scores", sweep_scores, "Score thresholds (strictly greater than)")->delimiter(',');
  sw->add_option("--methods", sweep_methods, "Methods to compare")
      ->delimiter(',')
      ->check(CLI::IsMember({"asm", "ar"}));
  sw->add_option("--out", sweep_out, "Sweep CSV path ('-' for stdout)");
  sw->add_flag("--serial", sweep_serial, "Run cells on the serial reference path");
  add_detector_options(sw, sweep_flags);

  // expect
  ColdStartParams cs;
  std::string cs_mode = "lower";
  std::optional<std::int64_t> denom_exp;
  std::int64_t mc_trials = 0;
  std::uint64_t mc_seed = 7;
  auto* expect = app.add_subcommand("expect", "Expected number of approximate occurrences in history");
  expect->add_option("--l", cs.l, "History length");
  expect->add_option("--k", cs.k, "Pattern length");
  expect->add_option("--d", cs.d, "Digits per letter (alphabet of 10^d)");
  expect->add_option("--alpha", cs.alpha, "Per-element tolerance");
  expect->add_option("--beta", cs.beta, "Total tolerance");
  expect->add_option("--mode", cs_mode, "Choice count: lower or ie (inclusion-exclusion)")
      ->check(CLI::IsMember({"lower", "ie", "inclusion_exclusion"}));
  expect->add_option("--denominator-exponent", denom_exp,
                     "Divide the alignment count by 10^this (default: 2k)");
  expect->add_option("--monte-carlo", mc_trials, "Also estimate by simulation with this many trials")
      ->check(CLI::NonNegativeNumber);
  expect->add_option("--seed", mc_seed, "Seed for --monte-carlo");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("dnsasm");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (no_attacks) {
        profile.attacks.clear();
      } else if (!attack_specs.empty()) {
        profile.attacks.clear();
        for (const auto& s : attack_specs) profile.attacks.push_back(parse_attack(s));
      } else {
        profile.attacks = SynthProfile::default_profile(profile.days).attacks;
      }
      try {
        profile.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      Output ev(events_out, out);
      write_events_header(*ev);
      generate(profile, [&ev](const DnsEventRecord& r) { write_event(*ev, r); });
      ev.finish("events");
      Output tr(truth_out, out);
      write_ground_truth(*tr, ground_truth(profile));
      tr.finish("ground truth");
      return kExitOk;
    }

    if (ingest->parsed()) {
      const IpKeying keying{parse_side(b_key), parse_side(c_key)};
      SeriesMap all = load_events_as_series(ingest_events, keying);
      if (ingest_feature != "all") {
        const FeatureKind f = parse_feature(ingest_feature[0]);
        std::erase_if(all, [f](const auto& kv) { return kv.first.feature != f; });
      }
      if (!ingest_dir.empty()) {
        std::filesystem::create_directories(ingest_dir);
        for (const auto& [key, s] : all) {
          std::string name = key.to_string();
          std::ranges::replace(name, ':', '_');
          Output o((std::filesystem::path(ingest_dir) / (name + ".csv")).string(), out);
          write_series(*o, s);
          o.finish(name);
        }
        return kExitOk;
      }
      Output o(ingest_out, out);
      bool header = true;
      for (const auto& [key, s] : all) {
        write_series(*o, s, header);
        header = false;
      }
      if (header) *o << kSeriesHeader << '\n';
      o.finish("series");
      return kExitOk;
    }

    if (detect->parsed()) {
      const DetectorConfig cfg = finalize(detect_flags);
      if (detect_series_paths.empty() == detect_events.empty()) {
        throw UsageError("detect needs exactly one of --series or --events");
      }
      SeriesMap series;
      if (!detect_events.empty()) {
        series = load_events_as_series(detect_events, {});
      } else {
        for (auto& s : load_series_files(detect_series_paths)) {
          const SeriesKey key = s.key();
          if (!series.emplace(key, std::move(s)).second) {
            throw DataError(fmt::format("series {} appears more than once", key.to_string()));
          }
        }
      }
      if (series.empty()) throw DataError("no series to analyse");
      const auto detections = detect_all(series, cfg, parse_method(detect_method));
      const auto events = score_aggregate(detections, cfg.score_threshold);
      Output rep(report_path, out);
      if (report_format == "json") {
        write_report_json(*rep, events);
      } else {
        write_report_csv(*rep, events);
      }
      rep.finish("report");
      if (!windows_path.empty()) {
        Output w(windows_path, out);
        write_windows_csv(*w, detections);
        w.finish("windows");
      }
      return kExitOk;
    }

    if (eval->parsed()) {
      auto rin = open_in(eval_report);
      const auto events = parse_report_json(rin);
      auto tin = open_in(eval_truth);
      const auto truth = parse_ground_truth(tin);
      MinuteRange timeline;
      bool any = false;
      auto extend = [&](std::int64_t a, std::int64_t b) {
        timeline.first = any ? std::min(timeline.first, a) : a;
        timeline.last = any ? std::max(timeline.last, b) : b;
        any = true;
      };
      for (const auto& e : events) extend(e.start_minute, e.end_minute);
      for (const auto& g : truth) extend(g.start_minute, g.end_minute);
      if (timeline_start) timeline.first = *timeline_start;
      if (timeline_end) timeline.last = *timeline_end;
      if (any && timeline.last < timeline.first) throw UsageError("timeline end precedes its start");
      const ConfusionCounts c = confusion(events, truth, timeline, eval_window);
      Output o(eval_out, out);
      if (eval_format == "json") {
        write_metrics_json(*o, c, metrics(c));
      } else {
        write_metrics_csv(*o, c, metrics(c));
      }
      o.finish("metrics");
      return kExitOk;
    }

    if (sw->parsed()) {
      SweepConfig sc;
      sc.detector = finalize(sweep_flags);
      sc.methods.clear();
      for (const auto& m : sweep_methods) sc.methods.push_back(parse_method(m));
      try {
        sc.lookbacks = lookback_minutes(sweep_lookbacks);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      for (const std::size_t lb : sc.lookbacks) {
        if (lb < sc.detector.k + sc.detector.h) {
          throw UsageError(fmt::format("lookback of {} minutes is shorter than k + h", lb));
        }
      }
      sc.score_thresholds = sweep_scores;
      SeriesMap series;
      std::vector<GroundTruthInterval> truth;
      if (!sweep_events.empty()) {
        if (sweep_truth.empty()) throw UsageError("--events needs --truth");
        series = load_events_as_series(sweep_events, {});
        auto tin = open_in(sweep_truth);
        truth = parse_ground_truth(tin);
      } else {
        SynthProfile p = SynthProfile::default_profile(sweep_days);
        p.seed = sweep_seed;
        series = generate_series(p);
        truth = ground_truth(p);
      }
      if (series.empty()) throw DataError("no series to analyse");
      const auto rows = sweep(series, truth, sc, sweep_serial ? Execution::serial : Execution::parallel);
      Output o(sweep_out, out);
      write_sweep_csv(*o, rows);
      o.finish("sweep");
      return kExitOk;
    }

    if (expect->parsed()) {
      cs.denominator_exponent = denom_exp;
      try {
        cs.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const CountMode mode = cs_mode == "lower" ? CountMode::lower : CountMode::inclusion_exclusion;
      out << format_decimal(expected_matches_exact(cs, mode), 4) << '\n';
      if (mc_trials > 0) {
        const auto mc = monte_carlo_matches(cs, mc_trials, mc_seed);
        out << fmt::format("monte_carlo mean={:.6f} se={:.6f} trials={}\n", mc.mean,
                           mc.standard_error, mc.trials);
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace dnsasm::cli
