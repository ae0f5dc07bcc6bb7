#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "yarbus/errors.hpp"
#include "yarbus/runner.hpp"

namespace {

using namespace yarbus;

struct CliOptions {
  RunConfig cfg;
  std::string slu = "live";
  std::string mask = "11111";
  std::string tracker = "yarbus";
  int schedule = 2;
  std::string input;  // score: tracker output to re-score
  bool verbose = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opt, bool needs_dataset) {
  cmd->add_option("--dataset-root", opt.cfg.dataset_root, "directory containing the session directories")
      ->required(needs_dataset);
  cmd->add_option("--flist", opt.cfg.flist, "manifest with one session path per line")->required();
  cmd->add_option("--ontology", opt.cfg.ontology_path, "ontology file")->required();
  cmd->add_option("--slu", opt.slu, "SLU source: live, oracle, or an override file path");
  cmd->add_option("--mask", opt.mask, "5-bit rule mask, leftmost = rule 0");
  cmd->add_option("--theta", opt.cfg.theta, "pruning threshold in [0,1); 0 disables pruning");
  cmd->add_option("--tracker", opt.tracker, "yarbus, tophyp or focus");
  cmd->add_option("--schedule", opt.schedule, "scoring schedule: 1 (all turns) or 2 (after evidence)")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--jobs", opt.cfg.jobs, "parallel sessions");
  cmd->add_option("--dataset-name", opt.cfg.dataset_name, "dataset field of the output document");
  cmd->add_option("--focus-k", opt.cfg.focus_top_k, "joint hypotheses kept by the focus tracker");
  cmd->add_flag("--baseline-skip-this", [&opt](std::int64_t) { opt.cfg.baseline_resolve_this = false; },
                "baselines consume the SLU without reference resolution");
  cmd->add_flag("--verbose", opt.verbose, "print diagnostics to stderr");
}

void finish_options(CliOptions& opt) {
  opt.cfg.mask = RuleMask::parse(opt.mask);
  opt.cfg.tracker = parse_tracker(opt.tracker);
  opt.cfg.schedule = opt.schedule == 1 ? Schedule::all_turns : Schedule::after_evidence;
  if (opt.slu == "live") {
    opt.cfg.slu = SluSourceKind::live;
  } else if (opt.slu == "oracle") {
    opt.cfg.slu = SluSourceKind::oracle;
  } else {
    opt.cfg.slu = SluSourceKind::file;
    opt.cfg.slu_file = opt.slu;
  }
}

void print_reports(const RunConfig& cfg, const std::vector<MetricsReport>& reports) {
  if (reports.empty()) {
    std::cout << "no labels found; tracking only\n";
    return;
  }
  std::cout << metrics_csv_header();
  for (const auto& r : reports) std::cout << metrics_csv_row(cfg, r);
}

void print_diagnostics(const RunResult& result, bool verbose) {
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (!verbose) return;
  std::cerr << "wall-seconds: " << result.wall_seconds << "\n"
            << "out-of-ontology values discarded: " << result.stats.extract.out_of_ontology << "\n"
            << "unresolvable this-pairs dropped: " << result.stats.preprocess.odd_this_pairs << "\n"
            << "max |raw slu total - 1|: " << result.stats.max_raw_slu_total_error << "\n"
            << "ontology values merged by canonicalization: " << result.ontology_values_merged
            << "\n"
            << "sessions with user-acts semantics: " << result.sessions_with_user_acts_semantics
            << "\n";
}

int cmd_track(CliOptions& opt) {
  RunResult result = run_track(opt.cfg);
  print_reports(opt.cfg, result.reports);
  print_diagnostics(result, opt.verbose);
  return result.warnings.empty() ? 0 : 1;
}

int cmd_ablate(CliOptions& opt) {
  const auto rows = run_ablate(opt.cfg);
  const std::string csv = ablate_csv(rows);
  if (!opt.cfg.report_csv_path.empty()) {
    std::ofstream os(opt.cfg.report_csv_path);
    if (!os) throw IoError("cannot open for writing: " + opt.cfg.report_csv_path);
    os << csv;
  }
  std::cout << csv;
  return 0;
}

int cmd_score(CliOptions& opt) {
  std::vector<RocPoint> roc;
  const MetricsReport report = run_score(opt.input, opt.cfg, &roc);
  std::cout << metrics_csv_header() << metrics_csv_row(opt.cfg, report);
  if (!opt.cfg.roc_csv_path.empty()) {
    std::ofstream os(opt.cfg.roc_csv_path);
    if (!os) throw IoError("cannot open for writing: " + opt.cfg.roc_csv_path);
    os << roc_csv(roc);
  }
  return 0;
}

int cmd_stats(CliOptions& opt) {
  const StatsResult stats = run_stats(opt.cfg);
  const std::string csv = stats_csv(stats);
  if (!opt.cfg.report_csv_path.empty()) {
    std::ofstream os(opt.cfg.report_csv_path);
    if (!os) throw IoError("cannot open for writing: " + opt.cfg.report_csv_path);
    os << csv;
  }
  std::cout << csv << "max belief size: " << stats.max_size << "\n";
  for (const auto& w : stats.warnings) std::cerr << "warning: " << w << "\n";
  return stats.warnings.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint-goal belief tracker for slot-filling dialog logs"};
  app.require_subcommand(1);

  CliOptions opt;

  CLI::App* track = app.add_subcommand("track", "run a tracker over a dataset and score it");
  add_common_options(track, opt, true);
  track->add_option("--out", opt.cfg.out_path, "tracker output JSON path");
  track->add_option("--report", opt.cfg.report_path, "metrics report JSON path");
  track->add_option("--report-csv", opt.cfg.report_csv_path, "metrics report CSV path");
  track->add_option("--roc-csv", opt.cfg.roc_csv_path, "correct-accept/false-accept curve CSV path");
  track->add_flag("--emit-wall-time", opt.cfg.emit_wall_time,
                  "write the measured wall time into the output document");

  CLI::App* ablate = app.add_subcommand("ablate", "score every one of the 32 rule masks");
  add_common_options(ablate, opt, true);
  ablate->add_option("--report-csv", opt.cfg.report_csv_path, "ablation CSV path");

  CLI::App* score = app.add_subcommand("score", "re-score an existing tracker output file");
  add_common_options(score, opt, true);
  score->add_option("--input", opt.input, "tracker output JSON to score")->required();
  score->add_option("--roc-csv", opt.cfg.roc_csv_path, "correct-accept/false-accept curve CSV path");

  CLI::App* stats = app.add_subcommand("stats", "belief-size histogram after pruning");
  add_common_options(stats, opt, true);
  stats->add_option("--report-csv", opt.cfg.report_csv_path, "histogram CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    finish_options(opt);
    if (track->parsed()) return cmd_track(opt);
    if (ablate->parsed()) return cmd_ablate(opt);
    if (score->parsed()) return cmd_score(opt);
    if (stats->parsed()) return cmd_stats(opt);
    return 1;
  } catch (const yarbus::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
