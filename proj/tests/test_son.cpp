#include <doctest.h>

#include <cmath>

#include "hetsim/netmodel.hpp"
#include "hetsim/rng.hpp"
#include "hetsim/son.hpp"

using namespace hetsim;
using namespace hetsim::son;

namespace {

netmodel::PowerOffsetVector offsets_of(int n, double cio) {
  return netmodel::PowerOffsetVector(n, cio, -2.0, 12.0, 46.0, 30.0);
}

SonState make_state(int n, double cio, SonParams params = {}) {
  return SonState(offsets_of(n, cio), params);
}

std::vector<ScMeasurement> measured(std::vector<double> macro, std::vector<double> sc,
                                    std::vector<double> outage) {
  std::vector<ScMeasurement> ms(sc.size());
  for (std::size_t i = 0; i < sc.size(); ++i) {
    ms[i].macro_ul_load = macro[i];
    ms[i].ul_load = sc[i];
    ms[i].outage = outage[i];
  }
  return ms;
}

}  // namespace

TEST_SUITE_BEGIN("son");

TEST_CASE("drift: both branches and the boundary") {
  const DriftValue a = drift(0.8, 0.3, 0.02, 0.05);
  CHECK(a.value == doctest::Approx(0.5));
  CHECK(a.branch == DriftBranch::load_balance);

  const DriftValue b = drift(0.8, 0.3, 0.10, 0.05);
  CHECK(b.value == doctest::Approx(-0.05));
  CHECK(b.branch == DriftBranch::constraint);

  // equality goes to the constraint branch with value 0
  const DriftValue c = drift(0.8, 0.3, 0.05, 0.05);
  CHECK(c.value == doctest::Approx(0.0));
  CHECK(c.branch == DriftBranch::constraint);
}

TEST_CASE("drift: domain validation and range bound") {
  CHECK_THROWS_AS(drift(1.2, 0.3, 0.0, 0.05), SimError);
  CHECK_THROWS_AS(drift(0.5, -0.1, 0.0, 0.05), SimError);
  SeededRng rng(3);
  for (int i = 0; i < 500; ++i) {
    const DriftValue d = drift(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(0.01, 0.99));
    CHECK(std::abs(d.value) <= 1.0);
  }
}

TEST_CASE("drift: constraint attraction is strictly negative above theta_bar") {
  SeededRng rng(9);
  for (int i = 0; i < 200; ++i) {
    const double theta_bar = rng.uniform(0.01, 0.5);
    const double outage = theta_bar + rng.uniform(1e-6, 0.5);
    const DriftValue d = drift(rng.uniform(), rng.uniform(), std::min(outage, 1.0), theta_bar);
    CHECK(d.value < 0.0);
    CHECK(d.branch == DriftBranch::constraint);
  }
}

TEST_CASE("son_step: basic update, projection, fixed point") {
  SonParams params;
  params.epsilon = 2.0;
  SonState st = make_state(2, 4.0, params);

  // drift +0.5 on SC 0: 4 + 2*0.5 = 5
  son_step(st, measured({0.8, 0.8}, {0.3, 0.8}, {0.02, 0.02}));
  CHECK(st.offsets().entry(0) == doctest::Approx(5.0));
  CHECK(st.offsets().entry(1) == doctest::Approx(4.0));  // drift 0: fixed point
  CHECK(st.iteration() == 1);
  CHECK(st.history().size() == 1);

  // projection clamps at the upper bound
  SonState hi = make_state(1, 11.5, params);
  son_step(hi, measured({1.0}, {0.0}, {0.0}));
  CHECK(hi.offsets().entry(0) == doctest::Approx(12.0));
}

TEST_CASE("son_step: missing macro broadcast skips the iteration") {
  SonState st = make_state(2, 4.0);
  std::vector<ScMeasurement> ms = measured({0.8, 0.8}, {0.3, 0.3}, {0.0, 0.0});
  ms[1].macro_ul_load.reset();
  const SonIterationRecord& rec = son_step(st, ms);
  CHECK(rec.skipped);
  CHECK(st.offsets().entry(0) == doctest::Approx(4.0));
  CHECK(st.iteration() == 1);  // history appended once per iteration
}

TEST_CASE("son_step: SC without a load measurement holds its offset") {
  SonState st = make_state(2, 4.0);
  std::vector<ScMeasurement> ms = measured({0.8, 0.8}, {0.3, 0.3}, {0.0, 0.0});
  ms[0].ul_load.reset();
  son_step(st, ms);
  CHECK(st.offsets().entry(0) == doctest::Approx(4.0));
  CHECK(st.offsets().entry(1) > 4.0);
}

TEST_CASE("son_step: measured load with no outage observations counts as outage 0") {
  SonState st = make_state(1, 0.0);
  std::vector<ScMeasurement> ms(1);
  ms[0].macro_ul_load = 0.9;
  ms[0].ul_load = 0.1;
  const SonIterationRecord& rec = son_step(st, ms);
  CHECK(rec.branch[0] == DriftBranch::load_balance);
  CHECK(st.offsets().entry(0) == doctest::Approx(0.0 + 2.0 * 0.8));
}

TEST_CASE("lyapunov: zero inside the constraint set, arithmetic outside") {
  const auto p10 = offsets_of(2, 12.0);  // ||P|| > 0
  CHECK(lyapunov(p10, std::vector<double>{0.01, 0.05}, 0.05) == 0.0);

  // single SC, ||P|| = 10, theta 0.15 vs 0.05 -> 10 * 0.01 = 0.1
  const auto single = offsets_of(1, 10.0);
  CHECK(lyapunov(single, std::vector<double>{0.15}, 0.05) == doctest::Approx(0.1));
}

TEST_CASE("lyapunov: satisfying SCs never contribute") {
  const auto p = offsets_of(3, 6.0);
  const double v1 = lyapunov(p, std::vector<double>{0.2, 0.0, 0.0}, 0.05);
  const double v2 = lyapunov(p, std::vector<double>{0.2, 0.04, 0.049}, 0.05);
  CHECK(v1 == v2);
}

TEST_CASE("convergence_check: constant history converges") {
  SonParams params;
  SonState st = make_state(2, 6.0, params);
  for (int i = 0; i < 25; ++i) {
    son_step(st, measured({0.5, 0.5}, {0.5, 0.5}, {0.0, 0.0}));  // drift 0
  }
  CHECK(convergence_check(st.history(), 20, 0.5, 0.01, 0.05) == Verdict::converged);
}

TEST_CASE("convergence_check: short history keeps running") {
  SonState st = make_state(1, 6.0);
  for (int i = 0; i < 5; ++i) son_step(st, measured({0.5}, {0.5}, {0.0}));
  CHECK(convergence_check(st.history(), 20, 0.5, 0.01, 0.05) == Verdict::running);
}

TEST_CASE("convergence_check: alternating offsets oscillate") {
  SonParams params;
  params.epsilon = 2.0;
  SonState st = make_state(1, 6.0, params);
  for (int i = 0; i < 30; ++i) {
    // drift +-0.5 alternately: a clean 2-cycle with 1 dB steps
    if (i % 2 == 0) {
      son_step(st, measured({0.6}, {0.1}, {0.0}));
    } else {
      son_step(st, measured({0.1}, {0.6}, {0.0}));
    }
  }
  CHECK(convergence_check(st.history(), 20, 0.5, 0.01, 0.05) == Verdict::oscillating);
}

TEST_CASE("convergence_check: stable offsets with violating outage keep running") {
  SonState st = make_state(1, 12.0);
  for (int i = 0; i < 25; ++i) {
    std::vector<ScMeasurement> ms(1);
    ms[0].macro_ul_load = 0.5;
    ms[0].ul_load = 0.5;
    ms[0].outage = 0.062;  // above theta_bar + tol
    son_step(st, ms);
  }
  CHECK(convergence_check(st.history(), 20, 0.5, 0.01, 0.05) == Verdict::running);
}

TEST_CASE("hull_oracle: constant kpi_fn collapses to a point") {
  const auto offsets = offsets_of(2, 5.0);
  KpiFn fn = [](const netmodel::PowerOffsetVector& p) {
    KpiPoint k;
    const int n = p.n_entries();
    k.macro_ul_load = Eigen::VectorXd::Constant(n, 0.7);
    k.sc_ul_load = Eigen::VectorXd::Constant(n, 0.2);
    k.sc_outage = Eigen::VectorXd::Constant(n, 0.0);
    return k;
  };
  const auto hull = hull_oracle(offsets, fn, 0.05, 1.0, 16, 1);
  for (const auto& iv : hull) {
    CHECK(iv.width() == doctest::Approx(0.0));
    CHECK(iv.contains(0.5));
  }
  CHECK_THROWS_AS(hull_oracle(offsets, fn, 0.05, 1.0, 1, 1), SimError);
}

TEST_CASE("hull_oracle: discontinuity point spans both branches and contains h") {
  // Outage switches across entry(0) = 6: below -> 0.0, at/above -> 0.2.
  const double theta_bar = 0.05;
  KpiFn fn = [](const netmodel::PowerOffsetVector& p) {
    KpiPoint k;
    const int n = p.n_entries();
    k.macro_ul_load = Eigen::VectorXd::Constant(n, 0.7);
    k.sc_ul_load = Eigen::VectorXd::Constant(n, 0.2);
    k.sc_outage = Eigen::VectorXd::Constant(n, p.entry(0) >= 6.0 ? 0.2 : 0.0);
    return k;
  };
  const auto at = offsets_of(1, 6.0);
  const auto hull = hull_oracle(at, fn, theta_bar, 0.5, 64, 2);
  // h at the point itself: constraint branch, 0.05 - 0.2 = -0.15
  CHECK(hull[0].contains(-0.15));
  // the load-balance value 0.5 is approached from below the discontinuity
  CHECK(hull[0].hi == doctest::Approx(0.5));
  CHECK(hull[0].lo == doctest::Approx(-0.15));

  // on a continuity region the interval collapses
  const auto off_point = offsets_of(1, 3.0);
  const auto narrow = hull_oracle(off_point, fn, theta_bar, 0.5, 64, 2);
  CHECK(narrow[0].width() == doctest::Approx(0.0));
  CHECK(narrow[0].contains(0.5));
}

TEST_SUITE_END();
