#include "hetsim/son.hpp"

#include <algorithm>
#include <cmath>

namespace hetsim::son {

DriftValue drift(double macro_ul_load, double sc_ul_load, double sc_outage, double theta_bar) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(in_unit(macro_ul_load) && in_unit(sc_ul_load) && in_unit(sc_outage) &&
              in_unit(theta_bar),
          ErrorCategory::domain, "drift: inputs must lie in [0,1]");
  if (sc_outage < theta_bar) {
    return {macro_ul_load - sc_ul_load, DriftBranch::load_balance};
  }
  return {theta_bar - sc_outage, DriftBranch::constraint};
}

SonIterationRecord& son_step(SonState& state, const std::vector<ScMeasurement>& measurements) {
  const int n = state.offsets_.n_entries();
  require(static_cast<int>(measurements.size()) == n, ErrorCategory::contract,
          "son_step: one measurement per SC expected");

  SonIterationRecord rec;
  rec.iteration = state.iteration_;
  rec.offsets = state.offsets_.entries();
  rec.drift = Eigen::VectorXd::Zero(n);
  rec.branch.assign(n, DriftBranch::load_balance);
  rec.sc_ul_load = Eigen::VectorXd::Zero(n);
  rec.macro_ul_load = Eigen::VectorXd::Zero(n);
  rec.outage = Eigen::VectorXd::Zero(n);

  const bool macro_missing = std::any_of(measurements.begin(), measurements.end(),
                                         [](const ScMeasurement& m) { return !m.macro_ul_load; });
  if (macro_missing) {
    rec.skipped = true;  // the algorithm requires the macro load broadcast
  } else {
    for (int s = 0; s < n; ++s) {
      const ScMeasurement& m = measurements[s];
      rec.macro_ul_load(s) = *m.macro_ul_load;
      if (!m.ul_load) continue;  // no-measurement: hold this SC's offset
      const double outage = m.outage.value_or(0.0);
      const DriftValue h = drift(*m.macro_ul_load, *m.ul_load, outage, state.params_.theta_bar);
      rec.drift(s) = h.value;
      rec.branch[s] = h.branch;
      rec.sc_ul_load(s) = *m.ul_load;
      rec.outage(s) = outage;
      state.offsets_.set_entry(s, state.offsets_.entry(s) + state.params_.epsilon * h.value);
    }
  }

  std::vector<double> outages(rec.outage.data(), rec.outage.data() + n);
  rec.lyapunov = lyapunov(state.offsets_, outages, state.params_.theta_bar);
  state.iteration_ += 1;
  state.history_.push_back(std::move(rec));
  return state.history_.back();
}

double lyapunov(const netmodel::PowerOffsetVector& offsets, std::span<const double> outages,
                double theta_bar) {
  const double norm = offsets.norm();
  double v = 0.0;
  for (double theta : outages) {
    if (theta > theta_bar) {
      v = std::max(v, norm * (theta - theta_bar) * (theta - theta_bar));
    }
  }
  return v;
}

Verdict convergence_check(const std::vector<SonIterationRecord>& history, int window,
                          double tol_offset_db, double tol_outage, double theta_bar) {
  const int n_hist = static_cast<int>(history.size());
  if (n_hist < window || window < 2) return Verdict::running;
  const int begin = n_hist - window;
  const int n_sc = static_cast<int>(history.back().offsets.size());

  bool offsets_stable = true;
  bool outage_ok = true;
  for (int s = 0; s < n_sc && (offsets_stable || outage_ok); ++s) {
    double lo = history[begin].offsets(s);
    double hi = lo;
    for (int t = begin; t < n_hist; ++t) {
      lo = std::min(lo, history[t].offsets(s));
      hi = std::max(hi, history[t].offsets(s));
      if (history[t].outage(s) > theta_bar + tol_outage) outage_ok = false;
    }
    if (hi - lo > tol_offset_db) offsets_stable = false;
  }
  if (offsets_stable && outage_ok) return Verdict::converged;

  // 2-cycle: offsets revisit every other iteration while consecutive
  // iterations move beyond tolerance.
  bool two_cycle = true;
  for (int t = begin + 2; t < n_hist && two_cycle; ++t) {
    if ((history[t].offsets - history[t - 2].offsets).cwiseAbs().maxCoeff() > tol_offset_db) {
      two_cycle = false;
    }
  }
  if (two_cycle) {
    double max_step = 0.0;
    for (int t = begin + 1; t < n_hist; ++t) {
      max_step =
          std::max(max_step, (history[t].offsets - history[t - 1].offsets).cwiseAbs().maxCoeff());
    }
    if (max_step > tol_offset_db) return Verdict::oscillating;
  }
  return Verdict::running;
}

std::vector<HullInterval> hull_oracle(const netmodel::PowerOffsetVector& offsets,
                                      const KpiFn& kpi_fn, double theta_bar, double gamma_db,
                                      int n_samples, std::uint64_t seed, int n_levels) {
  require(n_samples >= 2, ErrorCategory::config, "hull_oracle: need at least 2 samples");
  require(gamma_db > 0.0, ErrorCategory::config, "hull_oracle: gamma must be positive");
  const int n = offsets.n_entries();

  auto drift_at = [&](const netmodel::PowerOffsetVector& p) {
    const KpiPoint k = kpi_fn(p);
    Eigen::VectorXd h(n);
    for (int s = 0; s < n; ++s) {
      h(s) = drift(k.macro_ul_load(s), k.sc_ul_load(s), k.sc_outage(s), theta_bar).value;
    }
    return h;
  };

  std::vector<HullInterval> interval(n);
  SeededRng rng(seed, 0x47a11ULL);
  double gamma = gamma_db;
  for (int level = 0; level < n_levels; ++level, gamma *= 0.5) {
    // ||P' - P|| < gamma includes P itself, so the center is always sampled.
    Eigen::VectorXd h0 = drift_at(offsets);
    for (int s = 0; s < n; ++s) interval[s] = {h0(s), h0(s)};
    for (int i = 1; i < n_samples; ++i) {
      // Uniform direction scaled to a radius < gamma.
      Eigen::VectorXd dir(n);
      for (int s = 0; s < n; ++s) dir(s) = rng.normal(0.0, 1.0);
      const double len = dir.norm();
      if (len == 0.0) continue;
      const double radius = gamma * std::pow(rng.uniform(), 1.0 / n) * 0.999;
      netmodel::PowerOffsetVector perturbed = offsets;
      for (int s = 0; s < n; ++s) {
        perturbed.set_entry(s, offsets.entry(s) + dir(s) / len * radius);
      }
      const Eigen::VectorXd h = drift_at(perturbed);
      for (int s = 0; s < n; ++s) {
        interval[s].lo = std::min(interval[s].lo, h(s));
        interval[s].hi = std::max(interval[s].hi, h(s));
      }
    }
  }
  return interval;  // smallest-gamma level
}

}  // namespace hetsim::son
