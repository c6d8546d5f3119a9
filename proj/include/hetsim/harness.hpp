#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetsim/analytic.hpp"
#include "hetsim/exposure.hpp"
#include "hetsim/flowsim.hpp"
#include "hetsim/netmodel.hpp"
#include "hetsim/radio.hpp"
#include "hetsim/son.hpp"

namespace hetsim::harness {

struct ExperimentConfig {
  std::string mode = "single";  // single | sweep | son
  std::vector<double> cio_list_db = {-2.0, 2.0, 6.0, 10.0};
  double horizon_s = 1800.0;
  double initial_cio_db = -2.0;
  double baseline_cio_db = -2.0;  // gain denominator (first sweep point)
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = "out";
};

struct ScenarioConfig {
  netmodel::DeploymentConfig deployment;
  radio::RadioConfig radio;
  flowsim::TrafficConfig traffic;
  flowsim::SimConfig sim;
  exposure::ExposureParams exposure;
  son::SonParams son;
  flowsim::AnalyticConfig analytic;
  ExperimentConfig experiment;

  void validate() const;
  std::string to_json_text() const;  // canonical (sorted keys, 2-space indent)
  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig preset(const std::string& name);  // "table1" | "desk"
};

// Post-warmup aggregates of one run, per cell and per macro/SC group.
struct CellAggregate {
  CellId cell = 0;
  double mean_ul_load = 0.0;
  double mean_dl_load = 0.0;
  int outage_obs = 0;
  int outage_below = 0;
  double mean_active_users = 0.0;
  int windows = 0;

  std::optional<double> outage() const {
    if (outage_obs == 0) return std::nullopt;
    return static_cast<double>(outage_below) / outage_obs;
  }
};

struct GroupAggregate {
  double mean_ul_load = 0.0;
  double mean_dl_load = 0.0;
  std::optional<double> outage;       // observation-weighted
  std::optional<double> mean_ftt_ul_s;  // over post-warmup departures
  std::optional<double> mean_ftt_dl_s;
  std::optional<double> f_ul;
  std::optional<double> f_dl;
  std::optional<double> f_total;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::string point;   // "cio_-2" etc., or "son" / "baseline"
  double cio_db = 0.0; // sweep value, or the initial CIO for SON runs
  bool failed = false;
  std::string error;
  flowsim::SimulationTrace trace;
  exposure::ExposureReport report;
  std::vector<son::SonIterationRecord> son_history;
  son::Verdict verdict = son::Verdict::running;
};

std::vector<CellAggregate> cell_aggregates(const flowsim::SimulationTrace& trace);
GroupAggregate group_aggregate(const flowsim::SimulationTrace& trace,
                               const netmodel::NetworkLayout& layout,
                               std::optional<exposure::CellGroup> group);
// Time-averaged UL Tx power (dBm) of post-warmup UL flows, for the CCDF.
std::vector<double> ul_power_samples_dbm(const flowsim::SimulationTrace& trace,
                                         const netmodel::NetworkLayout& layout);

struct CampaignResult {
  ScenarioConfig config;
  std::string mode;
  std::vector<RunResult> runs;       // point-major, seed-minor
  std::vector<RunResult> baselines;  // SON mode: per-seed baseline runs
  std::vector<exposure::GainReport> gains;  // SON mode: per seed, vs baseline
};

RunResult run_single(const ScenarioConfig& config, const netmodel::NetworkLayout& layout,
                     double cio_db, std::uint64_t seed, bool son_enabled);

CampaignResult run_baseline_sweep(const ScenarioConfig& config,
                                  const std::vector<double>& cio_values,
                                  const std::vector<std::uint64_t>& seeds);
CampaignResult run_son_campaign(const ScenarioConfig& config,
                                const std::vector<std::uint64_t>& seeds);

struct ManifestEntry {
  std::string path;  // relative to the out dir
  std::uint64_t bytes = 0;
  std::string fnv1a64;
};

struct Manifest {
  std::vector<ManifestEntry> files;  // sorted by path
  std::string campaign_hash;
};

Manifest emit_reports(const CampaignResult& result, const std::filesystem::path& out_dir);
Manifest read_manifest(const std::filesystem::path& out_dir);
bool verify_manifest(const std::filesystem::path& out_dir, std::string* error = nullptr);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// Runs jobs 0..n-1 on a small pool (HETSIM_THREADS overrides the width).
void parallel_jobs(int n_jobs, const std::function<void(int)>& job);

}  // namespace hetsim::harness
