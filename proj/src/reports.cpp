#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hetsim/csv.hpp"
#include "hetsim/harness.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace hetsim::harness {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCategory::io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string s = buf.str();
  return fnv1a64(s.data(), s.size());
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Emitter {
  fs::path root;
  std::vector<ManifestEntry> entries;

  void write(const std::string& rel, const std::string& content) {
    const fs::path p = root / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    require(out.good(), ErrorCategory::io, "cannot write " + p.string());
    out << content;
    out.close();
    require(out.good(), ErrorCategory::io, "short write to " + p.string());
    entries.push_back({rel, content.size(), hex64(fnv1a64(content.data(), content.size()))});
  }
};

struct SeriesStats {
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
};

SeriesStats stats(const std::vector<double>& xs) {
  SeriesStats s;
  s.n = static_cast<int>(xs.size());
  if (s.n == 0) return s;
  for (double x : xs) s.mean += x;
  s.mean /= s.n;
  if (s.n > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / (s.n - 1));
  }
  return s;
}

std::vector<double> collect(const std::vector<std::optional<double>>& xs) {
  std::vector<double> out;
  for (const auto& x : xs) {
    if (x) out.push_back(*x);
  }
  return out;
}

std::string kpi_windows_csv(const flowsim::SimulationTrace& trace) {
  std::ostringstream os;
  os << "time_s,cell_id,ul_load,dl_load,outage,mean_ftt_ul_s,mean_ftt_dl_s,active_users\n";
  for (const auto& w : trace.windows) {
    for (const auto& k : w.cells) {
      csv::Row(os)
          .field(w.t_start)
          .field(k.cell)
          .field(k.ul_load)
          .field(k.dl_load)
          .field(k.outage)
          .field(k.mean_ftt_ul_s)
          .field(k.mean_ftt_dl_s)
          .field(k.active_users);
    }
  }
  return os.str();
}

std::string flows_csv(const flowsim::SimulationTrace& trace) {
  std::ostringstream os;
  os << "arrival_s,departure_s,direction,bits,mean_tx_power_w,flow_id,cell_id\n";
  for (const auto& f : trace.flows) {
    csv::Row row(os);
    row.field(f.arrival_s);
    if (f.done) {
      row.field(f.departure_s);
    } else {
      row.field("");
    }
    row.field(direction_name(f.direction))
        .field(f.volume_bits)
        .field(f.mean_tx_power_w(trace.horizon_s))
        .field(static_cast<long long>(f.id))
        .field(f.serving_cell);
  }
  return os.str();
}

std::string exposure_csv(const exposure::ExposureReport& report,
                         const exposure::GainReport* gains) {
  std::ostringstream os;
  os << "component,cell_group,value_w_per_kg,gain_percent\n";
  auto emit_group = [&](const std::string& name, const exposure::ExposureValues& v,
                        const exposure::GainValues* g) {
    csv::Row(os).field("f_ul").field(name).field(v.f_ul).field(g ? g->f_ul : std::nullopt);
    csv::Row(os).field("f_dl").field(name).field(v.f_dl).field(g ? g->f_dl : std::nullopt);
    csv::Row(os).field("f_total").field(name).field(v.f_total).field(g ? g->f_total
                                                                       : std::nullopt);
  };
  emit_group("all", report.all, gains ? &gains->all : nullptr);
  emit_group("macro", report.macro, gains ? &gains->macro : nullptr);
  emit_group("sc", report.sc, gains ? &gains->sc : nullptr);
  return os.str();
}

std::string son_trace_csv(const RunResult& run, const netmodel::NetworkLayout& layout) {
  std::ostringstream os;
  os << "iteration,sc_id,offset_dbm,drift,branch,ul_load_sc,ul_load_macro,outage,V,skipped\n";
  for (const auto& rec : run.son_history) {
    for (int s = 0; s < rec.offsets.size(); ++s) {
      csv::Row(os)
          .field(rec.iteration)
          .field(layout.sc_cell_id(s))
          .field(layout.config.sc_pilot_dbm + rec.offsets(s))
          .field(rec.drift(s))
          .field(rec.skipped ? "skipped" : son::drift_branch_name(rec.branch[s]))
          .field(rec.sc_ul_load(s))
          .field(rec.macro_ul_load(s))
          .field(rec.outage(s))
          .field(rec.lyapunov)
          .field(rec.skipped ? 1 : 0);
    }
  }
  return os.str();
}

constexpr double kCcdfMinDbm = -45.0;
constexpr double kCcdfMaxDbm = 25.0;
constexpr double kCcdfStepDb = 0.5;

std::vector<double> ccdf_curve(const std::vector<double>& samples_dbm) {
  const int n_points = static_cast<int>((kCcdfMaxDbm - kCcdfMinDbm) / kCcdfStepDb) + 1;
  std::vector<double> curve(n_points, 0.0);
  if (samples_dbm.empty()) return curve;
  for (int i = 0; i < n_points; ++i) {
    const double x = kCcdfMinDbm + i * kCcdfStepDb;
    int above = 0;
    for (double s : samples_dbm) {
      if (s > x) ++above;
    }
    curve[i] = static_cast<double>(above) / samples_dbm.size();
  }
  return curve;
}

int converged_at(const RunResult& run, const son::SonParams& p) {
  const int n = static_cast<int>(run.son_history.size());
  for (int end = p.convergence_window; end <= n; ++end) {
    std::vector<son::SonIterationRecord> prefix(run.son_history.begin(),
                                                run.son_history.begin() + end);
    if (son::convergence_check(prefix, p.convergence_window, p.tol_offset_db, p.tol_outage,
                               p.theta_bar) == son::Verdict::converged) {
      return end - 1;
    }
  }
  return -1;
}

}  // namespace

Manifest emit_reports(const CampaignResult& result, const fs::path& out_dir) {
  Emitter em{out_dir, {}};

  const bool empty = result.runs.empty();
  if (!empty) {
    // The stored scenario describes the campaign, not where it landed; keep
    // manifests identical across output directories.
    harness::ScenarioConfig stored = result.config;
    stored.experiment.out_dir.clear();
    em.write("config.json", stored.to_json_text());
    const netmodel::NetworkLayout layout = netmodel::build_layout(result.config.deployment);

    auto emit_run = [&](const RunResult& run) {
      const std::string dir = "runs/" + run.point + "/seed_" + std::to_string(run.seed) + "/";
      if (run.failed) {
        em.write(dir + "error.txt", "category=run_failed\n" + run.error + "\n");
        return;
      }
      em.write(dir + "kpi_windows.csv", kpi_windows_csv(run.trace));
      em.write(dir + "flows.csv", flows_csv(run.trace));
      const exposure::GainReport* g = nullptr;
      exposure::GainReport gain_storage;
      if (result.mode == "son" && run.point == "son") {
        for (std::size_t i = 0; i < result.runs.size(); ++i) {
          if (&result.runs[i] == &run && i < result.gains.size()) {
            gain_storage = result.gains[i];
            g = &gain_storage;
          }
        }
      }
      em.write(dir + "exposure.csv", exposure_csv(run.report, g));
      if (!run.son_history.empty()) {
        em.write(dir + "son_trace.csv", son_trace_csv(run, layout));
      }
    };
    for (const auto& run : result.runs) emit_run(run);
    for (const auto& run : result.baselines) emit_run(run);

    // Coverage map at the configured initial offsets (single mode only; the
    // map is per-seed identical modulo shadowing, so use the first seed).
    if (result.mode == "single" && !result.runs.empty() && !result.runs.front().failed) {
      netmodel::ShadowingField shadow(hash_mix(result.runs.front().seed, 0x5ad0ULL),
                                      layout.config.shadowing_sigma_db);
      netmodel::GainTable gains(layout, &shadow);
      netmodel::PowerOffsetVector offsets(
          layout.n_small_cells(), result.runs.front().cio_db, result.config.son.cio_min_db,
          result.config.son.cio_max_db, layout.config.macro_pilot_dbm,
          layout.config.sc_pilot_dbm);
      const Eigen::ArrayXXi map = netmodel::coverage_map(offsets, layout, gains);
      std::ostringstream csv_os;
      netmodel::write_coverage_csv(map, layout, csv_os);
      em.write("coverage_map.csv", csv_os.str());
      std::ostringstream pgm_os;
      netmodel::write_coverage_pgm(map, pgm_os);
      em.write("coverage_map.pgm", pgm_os.str());
    }

    // Aggregate figure-equivalents.
    const std::vector<std::pair<std::string, std::optional<exposure::CellGroup>>> groups = {
        {"all", std::nullopt},
        {"macro", exposure::CellGroup::macro},
        {"sc", exposure::CellGroup::sc}};

    if (result.mode == "sweep" || result.mode == "single") {
      // Collect per point.
      std::vector<double> points;
      for (const auto& run : result.runs) {
        if (std::find(points.begin(), points.end(), run.cio_db) == points.end()) {
          points.push_back(run.cio_db);
        }
      }
      std::ostringstream loads, outage, ftt, expo, ccdf;
      loads << "cio_db,group,direction,load_mean,load_std,n_seeds\n";
      outage << "cio_db,group,outage_mean,outage_std,n_seeds\n";
      ftt << "cio_db,group,direction,mean_ftt_s_mean,mean_ftt_s_std,n_seeds\n";
      expo << "cio_db,group,component,value_mean,value_std,n_seeds\n";
      ccdf << "cio_db,power_dbm,ccdf_mean,ccdf_std,n_seeds\n";
      for (double cio : points) {
        std::vector<const RunResult*> runs;
        for (const auto& run : result.runs) {
          if (run.cio_db == cio && !run.failed) runs.push_back(&run);
        }
        for (const auto& [gname, group] : groups) {
          std::vector<double> ul, dl;
          std::vector<std::optional<double>> out, fu, fd, eu, ed, et;
          for (const RunResult* r : runs) {
            const GroupAggregate a = group_aggregate(r->trace, layout, group);
            ul.push_back(a.mean_ul_load);
            dl.push_back(a.mean_dl_load);
            out.push_back(a.outage);
            fu.push_back(a.mean_ftt_ul_s);
            fd.push_back(a.mean_ftt_dl_s);
            eu.push_back(a.f_ul);
            ed.push_back(a.f_dl);
            et.push_back(a.f_total);
          }
          const SeriesStats sul = stats(ul), sdl = stats(dl), sout = stats(collect(out));
          const SeriesStats sfu = stats(collect(fu)), sfd = stats(collect(fd));
          const SeriesStats seu = stats(collect(eu)), sed = stats(collect(ed)),
                            set = stats(collect(et));
          csv::Row(loads).field(cio).field(gname).field("UL").field(sul.mean).field(sul.stddev)
              .field(sul.n);
          csv::Row(loads).field(cio).field(gname).field("DL").field(sdl.mean).field(sdl.stddev)
              .field(sdl.n);
          csv::Row(outage).field(cio).field(gname).field(sout.mean).field(sout.stddev)
              .field(sout.n);
          csv::Row(ftt).field(cio).field(gname).field("UL").field(sfu.mean).field(sfu.stddev)
              .field(sfu.n);
          csv::Row(ftt).field(cio).field(gname).field("DL").field(sfd.mean).field(sfd.stddev)
              .field(sfd.n);
          csv::Row(expo).field(cio).field(gname).field("f_ul").field(seu.mean).field(seu.stddev)
              .field(seu.n);
          csv::Row(expo).field(cio).field(gname).field("f_dl").field(sed.mean).field(sed.stddev)
              .field(sed.n);
          csv::Row(expo).field(cio).field(gname).field("f_total").field(set.mean)
              .field(set.stddev).field(set.n);
        }
        // UL Tx power CCDF (Fig. 3 equivalent).
        std::vector<std::vector<double>> curves;
        for (const RunResult* r : runs) {
          curves.push_back(ccdf_curve(ul_power_samples_dbm(r->trace, layout)));
        }
        if (!curves.empty()) {
          const int n_points = static_cast<int>(curves.front().size());
          for (int i = 0; i < n_points; ++i) {
            std::vector<double> vals;
            for (const auto& c : curves) vals.push_back(c[i]);
            const SeriesStats s = stats(vals);
            csv::Row(ccdf).field(cio).field(kCcdfMinDbm + i * kCcdfStepDb).field(s.mean)
                .field(s.stddev).field(s.n);
          }
        }
      }
      em.write("fig3_ul_txpower_ccdf.csv", ccdf.str());
      em.write("fig4_ftt_vs_cio.csv", ftt.str());
      em.write("fig5_exposure_vs_cio.csv", expo.str());
      em.write("fig6_loads_vs_cio.csv", loads.str());
      em.write("fig7_outage_vs_cio.csv", outage.str());
    }

    if (result.mode == "son") {
      std::ostringstream conv, offs, soutage, gaincsv;
      conv << "seed,verdict,converged_at_iteration,n_iterations\n";
      for (const auto& run : result.runs) {
        csv::Row(conv)
            .field(static_cast<unsigned long long>(run.seed))
            .field(run.failed ? "FAILED" : son::verdict_name(run.verdict))
            .field(run.failed ? -1 : converged_at(run, result.config.son))
            .field(static_cast<int>(run.son_history.size()));
      }
      em.write("son_convergence.csv", conv.str());

      offs << "iteration,sc_id,offset_dbm_mean,offset_dbm_std,n_seeds\n";
      soutage << "iteration,sc_id,outage_mean,outage_std,n_seeds\n";
      std::size_t n_iter = 0;
      for (const auto& run : result.runs) {
        if (!run.failed) n_iter = std::max(n_iter, run.son_history.size());
      }
      const int n_sc = layout.n_small_cells();
      for (std::size_t it = 0; it < n_iter; ++it) {
        for (int s = 0; s < n_sc; ++s) {
          std::vector<double> o, th;
          for (const auto& run : result.runs) {
            if (run.failed || it >= run.son_history.size()) continue;
            o.push_back(layout.config.sc_pilot_dbm + run.son_history[it].offsets(s));
            th.push_back(run.son_history[it].outage(s));
          }
          const SeriesStats so = stats(o), st = stats(th);
          csv::Row(offs).field(static_cast<int>(it)).field(layout.sc_cell_id(s)).field(so.mean)
              .field(so.stddev).field(so.n);
          csv::Row(soutage).field(static_cast<int>(it)).field(layout.sc_cell_id(s)).field(st.mean)
              .field(st.stddev).field(st.n);
        }
      }
      em.write("fig8_offsets_vs_iteration.csv", offs.str());
      em.write("fig9_outage_vs_iteration.csv", soutage.str());

      gaincsv << "group,component,gain_mean_percent,gain_std_percent,n_seeds";
      for (const auto& run : result.runs) {
        gaincsv << ",seed_" << run.seed;
      }
      gaincsv << "\n";
      auto gain_of = [&](const exposure::GainReport& g, const std::string& group,
                         const std::string& comp) -> std::optional<double> {
        const exposure::GainValues& v =
            group == "macro" ? g.macro : (group == "sc" ? g.sc : g.all);
        return comp == "f_ul" ? v.f_ul : (comp == "f_dl" ? v.f_dl : v.f_total);
      };
      for (const std::string& group : {"all", "macro", "sc"}) {
        for (const std::string& comp : {"f_ul", "f_dl", "f_total"}) {
          std::vector<std::optional<double>> per_seed;
          for (std::size_t i = 0; i < result.gains.size(); ++i) {
            per_seed.push_back(gain_of(result.gains[i], group, comp));
          }
          const SeriesStats s = stats(collect(per_seed));
          csv::Row row(gaincsv);
          row.field(group).field(comp).field(s.mean).field(s.stddev).field(s.n);
          for (const auto& v : per_seed) row.field(v);
        }
      }
      em.write("exposure_gain.csv", gaincsv.str());
    }

    // Text summary.
    std::ostringstream sum;
    sum << "campaign: " << result.mode << "\n";
    sum << "seeds:";
    for (const auto& run : result.runs) {
      sum << ' ' << run.seed;
    }
    sum << "\nruns: " << result.runs.size() << " (failed: ";
    int failed = 0;
    for (const auto& run : result.runs) failed += run.failed ? 1 : 0;
    sum << failed << ")\n";
    if (result.mode == "son" && !result.gains.empty()) {
      auto mean_gain = [&](auto pick) {
        std::vector<double> vs;
        for (const auto& g : result.gains) {
          if (auto v = pick(g)) vs.push_back(*v);
        }
        return stats(vs);
      };
      const SeriesStats all_total =
          mean_gain([](const exposure::GainReport& g) { return g.all.f_total; });
      const SeriesStats macro_total =
          mean_gain([](const exposure::GainReport& g) { return g.macro.f_total; });
      const SeriesStats macro_ul =
          mean_gain([](const exposure::GainReport& g) { return g.macro.f_ul; });
      const SeriesStats all_ul =
          mean_gain([](const exposure::GainReport& g) { return g.all.f_ul; });
      const SeriesStats all_dl =
          mean_gain([](const exposure::GainReport& g) { return g.all.f_dl; });
      sum << "exposure gains vs baseline (positive = reduction), seed means:\n";
      sum << "  zone A combined f_total: " << csv::num(all_total.mean) << " % (std "
          << csv::num(all_total.stddev) << ")\n";
      sum << "  zone A UL f_ul:          " << csv::num(all_ul.mean) << " %\n";
      sum << "  zone A DL f_dl:          " << csv::num(all_dl.mean) << " %\n";
      sum << "  macro combined f_total:  " << csv::num(macro_total.mean) << " %\n";
      sum << "  macro UL f_ul:           " << csv::num(macro_ul.mean) << " %\n";
      sum << "reference bands from the source study (full-scale):\n";
      auto inside = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
      sum << "  macro combined ~30%: measured " << csv::num(macro_total.mean) << " % -> "
          << (inside(macro_total.mean, 25.0, 35.0) ? "inside" : "outside") << "\n";
      sum << "  overall 15..20%: measured " << csv::num(all_total.mean) << " % -> "
          << (inside(all_total.mean, 15.0, 20.0) ? "inside" : "outside") << "\n";
      sum << "  DL increase 10..20% (gain -20..-10%): measured " << csv::num(all_dl.mean)
          << " % -> " << (inside(all_dl.mean, -20.0, -10.0) ? "inside" : "outside") << "\n";
      sum << "convergence:";
      for (const auto& run : result.runs) {
        sum << " seed" << run.seed << "="
            << (run.failed ? "FAILED" : son::verdict_name(run.verdict));
      }
      sum << "\n";
    }
    em.write("summary.txt", sum.str());
  }

  // Manifest (not listing itself).
  std::sort(em.entries.begin(), em.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  std::string concat;
  for (const auto& e : em.entries) concat += e.path + ":" + e.fnv1a64 + "\n";
  Manifest manifest;
  manifest.files = em.entries;
  manifest.campaign_hash = hex64(fnv1a64(concat.data(), concat.size()));

  json mj;
  mj["version"] = 1;
  mj["campaign"] = result.mode.empty() ? "empty" : result.mode;
  mj["hash_algorithm"] = "fnv1a64";
  mj["campaign_hash"] = manifest.campaign_hash;
  mj["files"] = json::array();
  for (const auto& e : manifest.files) {
    mj["files"].push_back({{"path", e.path}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64}});
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  require(out.good(), ErrorCategory::io, "cannot write manifest.json");
  out << mj.dump(2) << "\n";
  return manifest;
}

Manifest read_manifest(const fs::path& out_dir) {
  std::ifstream in(out_dir / "manifest.json", std::ios::binary);
  require(in.good(), ErrorCategory::io,
          "cannot read manifest: " + (out_dir / "manifest.json").string());
  json mj;
  try {
    in >> mj;
  } catch (const std::exception& e) {
    fail(ErrorCategory::io, std::string("manifest parse error: ") + e.what());
  }
  Manifest m;
  m.campaign_hash = mj.at("campaign_hash").get<std::string>();
  for (const auto& f : mj.at("files")) {
    m.files.push_back({f.at("path").get<std::string>(), f.at("bytes").get<std::uint64_t>(),
                       f.at("fnv1a64").get<std::string>()});
  }
  return m;
}

bool verify_manifest(const fs::path& out_dir, std::string* error) {
  const Manifest m = read_manifest(out_dir);
  for (const auto& e : m.files) {
    const fs::path p = out_dir / e.path;
    if (!fs::exists(p)) {
      if (error) *error = "missing file: " + e.path;
      return false;
    }
    if (hex64(fnv1a64_file(p)) != e.fnv1a64) {
      if (error) *error = "hash mismatch: " + e.path;
      return false;
    }
  }
  return true;
}

}  // namespace hetsim::harness
