#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hetsim/harness.hpp"

using namespace hetsim;

namespace {

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::domain: return 3;
    case ErrorCategory::contract: return 4;
    case ErrorCategory::io: return 5;
    case ErrorCategory::internal: return 6;
  }
  return 1;
}

void print_error(const std::string& category, const std::string& message) {
  std::cerr << "{\"error\":{\"category\":\"" << category << "\",\"message\":\""
            << message << "\"}}\n";
}

struct CommonOpts {
  std::string preset = "desk";
  std::string config_path;
  std::string seeds;
  std::string out_dir;
  double horizon_s = 0.0;
};

harness::ScenarioConfig load_config(const CommonOpts& opts) {
  harness::ScenarioConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path, std::ios::binary);
    require(in.good(), ErrorCategory::io, "cannot open config: " + opts.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    cfg = harness::ScenarioConfig::from_json_text(buf.str());
  } else {
    cfg = harness::ScenarioConfig::preset(opts.preset);
  }
  if (!opts.seeds.empty()) {
    cfg.experiment.seeds.clear();
    std::stringstream ss(opts.seeds);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) cfg.experiment.seeds.push_back(std::stoull(tok));
    }
  }
  if (!opts.out_dir.empty()) cfg.experiment.out_dir = opts.out_dir;
  if (opts.horizon_s > 0.0) cfg.experiment.horizon_s = opts.horizon_s;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--preset", opts.preset, "built-in preset: table1 | desk")
      ->default_val("desk");
  cmd->add_option("--config", opts.config_path, "scenario config file (JSON)");
  cmd->add_option("--seeds", opts.seeds, "comma-separated seed list");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--horizon", opts.horizon_s, "simulation horizon in seconds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetsim: flow-level HetNet simulator with a self-optimizing "
               "small-cell offset controller and EMF exposure accounting"};
  app.require_subcommand(1);

  CommonOpts single_opts, sweep_opts, son_opts;
  double single_cio = -2.0;
  std::string sweep_cios;
  std::string validate_path;
  std::string report_dir;

  CLI::App* single = app.add_subcommand("single", "one sweep point, one or more seeds");
  add_common(single, single_opts);
  single->add_option("--cio", single_cio, "uniform CIO (dB) applied to all SCs");

  CLI::App* sweep = app.add_subcommand("sweep", "baseline CIO sweep, SON disabled");
  add_common(sweep, sweep_opts);
  sweep->add_option("--cios", sweep_cios, "comma-separated CIO values (dB)");

  CLI::App* son = app.add_subcommand("son", "self-optimized run vs the fixed baseline");
  add_common(son, son_opts);

  CLI::App* validate = app.add_subcommand("validate-config", "parse + check a config file");
  validate->add_option("--config", validate_path, "scenario config file (JSON)")->required();

  CLI::App* report = app.add_subcommand("report", "verify a campaign directory's manifest");
  report->add_option("--out", report_dir, "campaign output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (single->parsed()) {
      harness::ScenarioConfig cfg = load_config(single_opts);
      cfg.experiment.mode = "single";
      harness::CampaignResult result =
          harness::run_baseline_sweep(cfg, {single_cio}, cfg.experiment.seeds);
      result.mode = "single";
      const harness::Manifest m = harness::emit_reports(result, cfg.experiment.out_dir);
      std::cout << "single: " << result.runs.size() << " runs, campaign_hash "
                << m.campaign_hash << "\n";
    } else if (sweep->parsed()) {
      harness::ScenarioConfig cfg = load_config(sweep_opts);
      cfg.experiment.mode = "sweep";
      std::vector<double> cios = cfg.experiment.cio_list_db;
      if (!sweep_cios.empty()) {
        cios.clear();
        std::stringstream ss(sweep_cios);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          if (!tok.empty()) cios.push_back(std::stod(tok));
        }
      }
      harness::CampaignResult result = harness::run_baseline_sweep(cfg, cios,
                                                                   cfg.experiment.seeds);
      const harness::Manifest m = harness::emit_reports(result, cfg.experiment.out_dir);
      std::cout << "sweep: " << result.runs.size() << " runs, campaign_hash "
                << m.campaign_hash << "\n";
    } else if (son->parsed()) {
      harness::ScenarioConfig cfg = load_config(son_opts);
      cfg.experiment.mode = "son";
      harness::CampaignResult result = harness::run_son_campaign(cfg, cfg.experiment.seeds);
      const harness::Manifest m = harness::emit_reports(result, cfg.experiment.out_dir);
      std::cout << "son: " << result.runs.size() << " runs, campaign_hash " << m.campaign_hash
                << "\n";
    } else if (validate->parsed()) {
      std::ifstream in(validate_path, std::ios::binary);
      require(in.good(), ErrorCategory::io, "cannot open config: " + validate_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      harness::ScenarioConfig cfg = harness::ScenarioConfig::from_json_text(buf.str());
      std::cout << cfg.to_json_text();
    } else if (report->parsed()) {
      std::string err;
      if (!harness::verify_manifest(report_dir, &err)) {
        print_error("io", "manifest verification failed: " + err);
        return exit_code(ErrorCategory::io);
      }
      const harness::Manifest m = harness::read_manifest(report_dir);
      std::cout << "manifest ok: " << m.files.size() << " files, campaign_hash "
                << m.campaign_hash << "\n";
      std::ifstream sum(std::filesystem::path(report_dir) / "summary.txt");
      if (sum.good()) std::cout << sum.rdbuf();
    }
  } catch (const SimError& e) {
    print_error(error_category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return exit_code(ErrorCategory::internal);
  }
  return 0;
}
