#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hetsim/common.hpp"
#include "hetsim/netmodel.hpp"
#include "hetsim/rng.hpp"

namespace hetsim::son {

struct SonParams {
  double epsilon = 2.0;     // dB step per unit drift
  double theta_bar = 0.05;  // outage constraint
  double cio_min_db = -2.0;
  double cio_max_db = 12.0;
  int convergence_window = 20;
  double tol_offset_db = 0.5;
  double tol_outage = 0.01;
};

enum class DriftBranch { load_balance, constraint };

inline const char* drift_branch_name(DriftBranch b) {
  return b == DriftBranch::load_balance ? "load_balance" : "constraint";
}

struct DriftValue {
  double value = 0.0;  // in [-1, 1]
  DriftBranch branch = DriftBranch::load_balance;
};

// h_s: macro/SC UL load difference while outage is below the target,
// constraint restoration otherwise (equality included).
DriftValue drift(double macro_ul_load, double sc_ul_load, double sc_outage, double theta_bar);

// One SC's windowed measurements; nullopt = no-measurement signal.
struct ScMeasurement {
  std::optional<double> ul_load;
  std::optional<double> outage;
  std::optional<double> macro_ul_load;  // broadcast by the parent macro
};

struct SonIterationRecord {
  int iteration = 0;
  bool skipped = false;  // macro load missing: offsets held
  Eigen::VectorXd offsets;
  Eigen::VectorXd drift;
  std::vector<DriftBranch> branch;
  Eigen::VectorXd sc_ul_load;
  Eigen::VectorXd macro_ul_load;
  Eigen::VectorXd outage;
  double lyapunov = 0.0;
};

class SonState {
 public:
  SonState(netmodel::PowerOffsetVector offsets, SonParams params)
      : offsets_(std::move(offsets)), params_(params) {
    require(params_.epsilon > 0.0, ErrorCategory::config, "SonState: epsilon must be > 0");
    require(params_.theta_bar > 0.0 && params_.theta_bar < 1.0, ErrorCategory::config,
            "SonState: theta_bar must lie in (0,1)");
  }

  const netmodel::PowerOffsetVector& offsets() const { return offsets_; }
  netmodel::PowerOffsetVector& offsets() { return offsets_; }
  const SonParams& params() const { return params_; }
  int iteration() const { return iteration_; }
  const std::vector<SonIterationRecord>& history() const { return history_; }

  friend SonIterationRecord& son_step(SonState& state,
                                      const std::vector<ScMeasurement>& measurements);

 private:
  netmodel::PowerOffsetVector offsets_;
  SonParams params_;
  int iteration_ = 0;
  std::vector<SonIterationRecord> history_;
};

// Projected stochastic iteration: offset <- project(offset + eps*drift) per
// SC. A missing macro broadcast skips the whole iteration (recorded); an SC
// whose own load is unmeasured holds its offset; an SC with measured load but
// no outage observations is treated as outage 0.
SonIterationRecord& son_step(SonState& state, const std::vector<ScMeasurement>& measurements);

// V(P) = max_s 1{theta_s > theta_bar} * ||P|| * (theta_s - theta_bar)^2.
double lyapunov(const netmodel::PowerOffsetVector& offsets, std::span<const double> outages,
                double theta_bar);

enum class Verdict { converged, running, oscillating };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converged: return "CONVERGED";
    case Verdict::running: return "RUNNING";
    case Verdict::oscillating: return "OSCILLATING";
  }
  return "RUNNING";
}

Verdict convergence_check(const std::vector<SonIterationRecord>& history, int window,
                          double tol_offset_db, double tol_outage, double theta_bar);

// Per-SC KPIs at a given offset vector, as needed by the drift; the callback
// contract of the hull oracle.
struct KpiPoint {
  Eigen::VectorXd macro_ul_load;
  Eigen::VectorXd sc_ul_load;
  Eigen::VectorXd sc_outage;
};
using KpiFn = std::function<KpiPoint(const netmodel::PowerOffsetVector&)>;

struct HullInterval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double v, double tol = 1e-12) const { return v >= lo - tol && v <= hi + tol; }
};

// Numerical g_s(P): interval hull of h_s over perturbations within a
// shrinking sequence of radii gamma, gamma/2, gamma/4 (the smallest radius
// wins); the sample set always contains the center point P.
std::vector<HullInterval> hull_oracle(const netmodel::PowerOffsetVector& offsets,
                                      const KpiFn& kpi_fn, double theta_bar, double gamma_db,
                                      int n_samples, std::uint64_t seed = 0,
                                      int n_levels = 3);

}  // namespace hetsim::son
