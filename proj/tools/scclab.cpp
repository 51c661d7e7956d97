#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scclab/common.hpp"
#include "scclab/config.hpp"
#include "scclab/experiments.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::string experiment;
  std::string out = "results.jsonl";
  std::uint64_t seed = 1;
  int workers = 1;
};

void add_run_flags(CLI::App* app, RunArgs& a) {
  app->add_option("--config", a.config, "key = value config file");
  app->add_option("--seed", a.seed, "base seed");
  app->add_option("--workers", a.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", a.out, "JSON-lines results file (appended)");
}

int run(const RunArgs& a) {
  scclab::Config cfg = a.config.empty() ? scclab::Config{} : scclab::Config::load(a.config);
  std::vector<std::string> names;
  if (a.experiment == "all")
    names = scclab::experiment_names();
  else if (!scclab::is_experiment(a.experiment))
    throw scclab::ConfigError("unknown experiment: " + a.experiment);
  else
    names = {a.experiment};

  scclab::RunContext ctx;
  ctx.seed = a.seed;
  ctx.workers = a.workers;
  auto parent = std::filesystem::path(a.out).parent_path();
  ctx.out_dir = parent.empty() ? "." : parent.string();
  if (!parent.empty()) std::filesystem::create_directories(parent);

  bool ok = true;
  for (const auto& name : names) {
    std::cerr << "running " << name << "\n";
    scclab::ResultRecord r = scclab::run_experiment(name, cfg, ctx);
    scclab::append_result(a.out, r);
    for (const auto& c : r.criteria)
      std::cout << (c.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << c.detail << "\n";
    for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}

int report(const std::string& in, const std::string& markdown, const std::string& csv) {
  std::vector<scclab::ResultRecord> records;
  if (std::ifstream is(in); is) records = scclab::read_results(is);
  else std::cerr << "no results at " << in << ", reporting every criterion as NOT RUN\n";
  scclab::Report rep = scclab::make_report(records);
  if (markdown.empty()) {
    rep.write_markdown(std::cout);
  } else {
    std::ofstream os(markdown);
    rep.write_markdown(os);
  }
  if (!csv.empty()) {
    std::ofstream os(csv);
    scclab::Report::write_series_csv(os, records);
  }
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scclab: desk-scale experiments on statistical convexity"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run one experiment, or all of them");
  add_run_flags(run_cmd, run_args);
  run_cmd->add_option("--experiment", run_args.experiment, "experiment name or 'all'")->required();

  // one subcommand per experiment as a shorthand for run --experiment NAME
  std::vector<RunArgs> per(scclab::experiment_names().size());
  std::vector<CLI::App*> exp_cmds;
  for (std::size_t i = 0; i < per.size(); ++i) {
    const auto& name = scclab::experiment_names()[i];
    per[i].experiment = name;
    auto* c = app.add_subcommand(name, "run " + name);
    add_run_flags(c, per[i]);
    exp_cmds.push_back(c);
  }

  std::string in = "results.jsonl", markdown, csv;
  auto* rep_cmd = app.add_subcommand("report", "aggregate results into a markdown summary");
  rep_cmd->add_option("--out", in, "JSON-lines results file");
  rep_cmd->add_option("--markdown", markdown, "write the summary here instead of stdout");
  rep_cmd->add_option("--csv", csv, "write plot data here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*rep_cmd) return report(in, markdown, csv);
    for (std::size_t i = 0; i < exp_cmds.size(); ++i)
      if (*exp_cmds[i]) return run(per[i]);
  } catch (const scclab::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
