// Scenario-level experiment runners behind the `sim` command.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fdasim/arrays.hpp"
#include "fdasim/covariance.hpp"
#include "fdasim/geometry.hpp"
#include "fdasim/jammer.hpp"
#include "fdasim/manifest.hpp"
#include "fdasim/scenario.hpp"
#include "fdasim/stap.hpp"

namespace fdasim {

/// Runs fn(0..n-1) on up to `threads` workers; results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// -----------------------------------------------------------------------------
// Scene and interference assembly
// -----------------------------------------------------------------------------

struct Scene {
  SceneGeometry geometry;
  EllipseTrajectory trajectory;
  ScattererRing clutter;
  ScattererRing jamming;
  Angles look;
};

inline Scene build_scene(const ScenarioConfig& cfg) {
  Scene s;
  s.geometry = scene_geometry(cfg);
  s.trajectory = jamming_trajectory(s.geometry);
  s.clutter = sample_clutter_ring(s.geometry, cfg.clutter_patches);
  s.jamming = sample_jamming_ring(s.geometry, s.trajectory, cfg.jamming_patches);
  s.look = look_direction(cfg);
  return s;
}

struct JammingCase {
  JammerKind kind;
  double dfp_khz;
};

/// Interference snapshots and mean powers for one radar partition, with or
/// without jamming. Jamming-ring powers are set from the unmodulated ring
/// snapshots so the modulation loss of exact mode stays visible.
inline InterferenceModel build_interference(const ScenarioConfig& cfg, const Scene& scene,
                                            const ArrayConfig& arr,
                                            const std::optional<JammingCase>& jc) {
  InterferenceModel m;
  m.noise_power = cfg.noise_power;
  m.clutter_snapshots = clutter_snapshot_matrix(scene.clutter, arr, scene.look, cfg.rt_m);
  m.clutter_powers = uniform_powers(m.clutter_snapshots, db_to_linear(cfg.cnr_db), cfg.noise_power);
  m.jamming_snapshots.resize(arr.dimension(), 0);
  if (jc) {
    const JammerModel jam = jammer_model(cfg, jc->kind, jc->dfp_khz);
    const ModulationMatrix mod = modulation_matrix(jam, arr, cfg.rt_m, cfg.modulation);
    m.jamming_snapshots =
        jamming_snapshot_matrix(scene.jamming, arr, scene.look, cfg.rt_m, jam, mod);
    const ComplexMatrix reference =
        clutter_snapshot_matrix(scene.jamming, arr, scene.look, cfg.rt_m);
    m.jamming_powers = uniform_powers(reference, db_to_linear(cfg.jnr_db), cfg.noise_power);
  }
  return m;
}

inline std::vector<JammingCase> jamming_cases(const ScenarioConfig& cfg) {
  std::vector<JammingCase> out;
  for (auto k : cfg.jammer_kinds) {
    for (double d : cfg.dfp_khz) out.push_back({k, d});
  }
  return out;
}

// -----------------------------------------------------------------------------
// CSV helpers
// -----------------------------------------------------------------------------

inline std::string csv_number(double v) { return detail::format_double(v); }

inline std::string offset_label(double dfp_khz) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%gkhz", dfp_khz);
  return buf;
}

inline std::string case_label(const JammingCase& jc) {
  return std::string(to_string(jc.kind)) + "_" + offset_label(jc.dfp_khz);
}

inline std::string eigen_csv(const RealVector& db) {
  std::string s = "index,eigenvalue_dB\n";
  for (Eigen::Index i = 0; i < db.size(); ++i) {
    s += std::to_string(i + 1) + "," + csv_number(db(i)) + "\n";
  }
  return s;
}

inline std::string if_csv(const std::vector<double>& doppler, const std::vector<double>& mean,
                          const std::vector<double>& stddev) {
  std::string s = "normalized_doppler,IF_dB_mean,IF_dB_std\n";
  for (std::size_t i = 0; i < doppler.size(); ++i) {
    s += csv_number(doppler[i]) + "," + csv_number(mean[i]) + "," + csv_number(stddev[i]) + "\n";
  }
  return s;
}

inline std::string spectrum_csv(const SpatialDopplerSpectrum& sp) {
  std::string s = "normalized_doppler";
  for (double u : sp.spatial) s += "," + csv_number(u);
  s += "\n";
  for (std::size_t i = 0; i < sp.doppler.size(); ++i) {
    s += csv_number(sp.doppler[i]);
    for (std::size_t j = 0; j < sp.spatial.size(); ++j) {
      s += "," + csv_number(sp.db(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    s += "\n";
  }
  return s;
}

inline std::string python_list(const std::vector<std::string>& names) {
  std::string s = "[";
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", '" : "'") + names[i] + "'";
  return s + "]";
}

// -----------------------------------------------------------------------------
// eigen
// -----------------------------------------------------------------------------

struct EigenResult {
  std::string file;
  std::string radar_case;
  std::string label;  // "clutter" or <kind>_<offset>
  RealVector db;
  int rank = 0;
  int knee = 0;
};

inline std::vector<EigenResult> compute_eigen(const ScenarioConfig& cfg, unsigned threads) {
  const Scene scene = build_scene(cfg);
  struct Job {
    RadarCase rc;
    std::optional<JammingCase> jc;
  };
  std::vector<Job> jobs;
  for (auto rc : cfg.radar_cases) {
    jobs.push_back({rc, std::nullopt});
    for (const auto& jc : jamming_cases(cfg)) jobs.push_back({rc, jc});
  }
  return parallel_map<EigenResult>(jobs.size(), threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const ArrayConfig arr = array_config(cfg, job.rc);
    const InterferenceModel model = build_interference(cfg, scene, arr, job.jc);
    const RealVector ev = eigen_spectrum(model.covariance());
    EigenResult r;
    r.radar_case = to_string(job.rc);
    r.label = job.jc ? case_label(*job.jc) : "clutter";
    r.file = "eigen_" + r.radar_case + "_" + r.label + ".csv";
    r.db = eigen_spectrum_db(ev, cfg.noise_power);
    r.rank = clutter_rank(ev, cfg.noise_power, cfg.rank_threshold_db);
    r.knee = knee_index(r.db);
    return r;
  });
}

inline void run_eigen(const ScenarioConfig& cfg, OutputDirectory& out, std::ostream& log,
                      unsigned threads = 1) {
  const auto results = compute_eigen(cfg, threads);
  std::vector<std::string> names;
  log << "case      jamming          rank  knee\n";
  for (const auto& r : results) {
    out.write(r.file, eigen_csv(r.db));
    names.push_back(r.file);
    log << std::left << std::setw(10) << r.radar_case << std::setw(17) << r.label
        << std::setw(6) << r.rank << r.knee << "\n";
  }
  out.write("plot_eigen.py",
            "import csv\nimport matplotlib.pyplot as plt\n\n"
            "files = " + python_list(names) + "\n"
            "for name in files:\n"
            "    with open(name) as f:\n"
            "        rows = list(csv.DictReader(f))\n"
            "    plt.plot([int(r['index']) for r in rows][:60],\n"
            "             [float(r['eigenvalue_dB']) for r in rows][:60], label=name[6:-4])\n"
            "plt.xlabel('eigenvalue index')\nplt.ylabel('eigenvalue (dB)')\n"
            "plt.legend(fontsize=6)\nplt.savefig('eigen.png', dpi=150)\n");
}

// -----------------------------------------------------------------------------
// if
// -----------------------------------------------------------------------------

struct IfResult {
  std::string file;
  std::optional<JammingCase> jamming;
  MonteCarloIf curve;
};

/// IF curves for the FDA-MIMO partition (S = subarrays); `trials` = 0 gives
/// the analytic curve with zero spread.
inline std::vector<IfResult> compute_if(const ScenarioConfig& cfg, unsigned threads) {
  const Scene scene = build_scene(cfg);
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  std::vector<std::optional<JammingCase>> jobs{std::nullopt};
  for (const auto& jc : jamming_cases(cfg)) jobs.push_back(jc);
  // Trials parallelize inside a job when Monte Carlo is on.
  const unsigned outer = cfg.trials > 0 ? 1 : threads;
  const unsigned inner = cfg.trials > 0 ? threads : 1;
  return parallel_map<IfResult>(jobs.size(), outer, [&](std::size_t i) {
    IfResult r;
    r.jamming = jobs[i];
    r.file = r.jamming ? "if_" + case_label(*r.jamming) + ".csv" : "if_clutter.csv";
    const InterferenceModel model = build_interference(cfg, scene, arr, r.jamming);
    if (cfg.trials > 0) {
      r.curve = monte_carlo_if(model, arr, scene.look, cfg.rt_m, cfg.if_grid, cfg.trials,
                               cfg.seed, inner);
    } else {
      const IfCurve c = if_curve(model.covariance(), arr, scene.look, cfg.rt_m,
                                 cfg.noise_power, cfg.if_grid);
      r.curve.doppler = c.doppler;
      r.curve.mean_db = c.if_db;
      r.curve.std_db.assign(c.if_db.size(), 0.0);
    }
    return r;
  });
}

inline IfCurve mean_curve(const MonteCarloIf& mc) { return {mc.doppler, mc.mean_db}; }

inline void run_if(const ScenarioConfig& cfg, OutputDirectory& out, std::ostream& log,
                   unsigned threads = 1) {
  const auto results = compute_if(cfg, threads);
  std::vector<std::string> names;
  log << "curve              notch_width_10dB  secondary_notch\n";
  for (const auto& r : results) {
    out.write(r.file, if_csv(r.curve.doppler, r.curve.mean_db, r.curve.std_db));
    names.push_back(r.file);
    const IfCurve c = mean_curve(r.curve);
    const auto notch = secondary_notch(c);
    log << std::left << std::setw(19) << r.file.substr(3, r.file.size() - 7) << std::setw(18)
        << notch_width(c) << (notch ? csv_number(*notch) : std::string("none")) << "\n";
  }
  out.write("plot_if.py",
            "import csv\nimport matplotlib.pyplot as plt\n\n"
            "files = " + python_list(names) + "\n"
            "for name in files:\n"
            "    with open(name) as f:\n"
            "        rows = list(csv.DictReader(f))\n"
            "    plt.plot([float(r['normalized_doppler']) for r in rows],\n"
            "             [float(r['IF_dB_mean']) for r in rows], label=name[3:-4])\n"
            "plt.xlabel('normalized Doppler')\nplt.ylabel('IF (dB)')\n"
            "plt.legend(fontsize=6)\nplt.savefig('if.png', dpi=150)\n");
}

// -----------------------------------------------------------------------------
// spectrum
// -----------------------------------------------------------------------------

struct SpectrumResult {
  std::string file;
  std::optional<JammingCase> jamming;
  SpatialDopplerSpectrum spectrum;
};

/// Covariance for spectra: interference plus the target's rank-1 term when
/// `with_target` is set.
inline ComplexMatrix spectrum_covariance(const ScenarioConfig& cfg, const Scene& scene,
                                         const ArrayConfig& arr,
                                         const std::optional<JammingCase>& jc, bool with_target) {
  ComplexMatrix r = build_interference(cfg, scene, arr, jc).covariance();
  if (with_target) {
    const ComplexVector t = target_steering(arr, scene.look, cfg.target_doppler, cfg.rt_m);
    // Per-element target power equals target_to_noise_db above the noise.
    const double scale = db_to_linear(cfg.target_to_noise_db) * cfg.noise_power *
                         arr.dimension() / t.squaredNorm();
    r += scale * t * t.adjoint();
  }
  return r;
}

inline std::vector<SpectrumResult> compute_spectrum(const ScenarioConfig& cfg, unsigned threads) {
  const Scene scene = build_scene(cfg);
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  std::vector<std::optional<JammingCase>> jobs{std::nullopt};
  for (const auto& jc : jamming_cases(cfg)) jobs.push_back(jc);
  return parallel_map<SpectrumResult>(jobs.size(), threads, [&](std::size_t i) {
    SpectrumResult r;
    r.jamming = jobs[i];
    r.file = r.jamming ? "spectrum_" + case_label(*r.jamming) + ".csv" : "spectrum_clutter.csv";
    r.spectrum = mvdr_spectrum(spectrum_covariance(cfg, scene, arr, r.jamming, true), arr,
                               cfg.rt_m, cfg.spectrum_spatial_bins, cfg.spectrum_doppler_bins);
    return r;
  });
}

inline void run_spectrum(const ScenarioConfig& cfg, OutputDirectory& out, std::ostream& log,
                         unsigned threads = 1) {
  const auto results = compute_spectrum(cfg, threads);
  std::vector<std::string> names;
  for (const auto& r : results) {
    out.write(r.file, spectrum_csv(r.spectrum));
    names.push_back(r.file);
    log << r.file << "\n";
  }
  out.write("plot_spectrum.py",
            "import csv\nimport matplotlib.pyplot as plt\n\n"
            "files = " + python_list(names) + "\n"
            "for name in files:\n"
            "    with open(name) as f:\n"
            "        rows = list(csv.reader(f))\n"
            "    u = [float(x) for x in rows[0][1:]]\n"
            "    fd = [float(r[0]) for r in rows[1:]]\n"
            "    z = [[float(x) for x in r[1:]] for r in rows[1:]]\n"
            "    plt.figure()\n"
            "    plt.pcolormesh(u, fd, z, shading='nearest', vmin=-60, vmax=0)\n"
            "    plt.colorbar(label='dB')\n"
            "    plt.xlabel('spatial frequency')\n    plt.ylabel('normalized Doppler')\n"
            "    plt.title(name[:-4])\n"
            "    plt.savefig(name[:-4] + '.png', dpi=150)\n"
            "    plt.close()\n");
}

// -----------------------------------------------------------------------------
// bounds
// -----------------------------------------------------------------------------

struct BoundsRow {
  JammerKind kind;
  OffsetPurpose purpose;
  OffsetInterval interval;
};

inline const char* to_string(OffsetPurpose p) {
  switch (p) {
    case OffsetPurpose::kFalseTargets:
      return "false_targets";
    case OffsetPurpose::kDeception:
      return "deception";
    case OffsetPurpose::kScatteredWave:
      break;
  }
  return "scattered_wave";
}

inline std::vector<BoundsRow> compute_bounds(const ScenarioConfig& cfg) {
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  std::vector<BoundsRow> rows;
  for (auto kind : cfg.jammer_kinds) {
    const JammerModel jam = jammer_model(cfg, kind, 0.0);
    for (auto p : {OffsetPurpose::kFalseTargets, OffsetPurpose::kDeception,
                   OffsetPurpose::kScatteredWave}) {
      rows.push_back({kind, p, frequency_offset_bounds(jam, arr, cfg.rt_m, p)});
    }
  }
  return rows;
}

inline std::string format_khz(double hz) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", hz / 1e3);
  return buf;
}

inline void run_bounds(const ScenarioConfig& cfg, OutputDirectory& out, std::ostream& log) {
  const auto rows = compute_bounds(cfg);
  std::string csv = "kind,purpose,lower_hz,upper_hz,lower_closed,upper_closed\n";
  log << "kind  purpose         lower_khz    upper_khz    interval_khz\n";
  for (const auto& r : rows) {
    const auto& iv = r.interval;
    csv += std::string(to_string(r.kind)) + "," + to_string(r.purpose) + "," +
           csv_number(iv.lower) + "," + csv_number(iv.upper) + "," +
           (iv.lower_closed ? "true" : "false") + "," + (iv.upper_closed ? "true" : "false") + "\n";
    const std::string text = std::string(iv.lower_closed ? "[" : "(") + format_khz(iv.lower) +
                             ", " + format_khz(iv.upper) + (iv.upper_closed ? "]" : ")");
    log << std::left << std::setw(6) << to_string(r.kind) << std::setw(16) << to_string(r.purpose)
        << std::setw(13) << format_khz(iv.lower) << std::setw(13) << format_khz(iv.upper) << text
        << "\n";
  }
  out.write("bounds.csv", csv);
}

// -----------------------------------------------------------------------------
// validate
// -----------------------------------------------------------------------------

enum class CheckStatus { kPass, kFail, kSkip };

struct CheckResult {
  std::string name;
  CheckStatus status;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::kFail; });
  }
  void add(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass ? CheckStatus::kPass : CheckStatus::kFail,
                      std::move(detail)});
  }
  void skip(std::string name, std::string detail) {
    checks.push_back({std::move(name), CheckStatus::kSkip, std::move(detail)});
  }
};

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// The diagonal approximation holds when subarray waveforms are orthogonal over a pulse
/// and the jammer's array factor stays near its peak: small drift within the
/// pulse and a small initial shift.
inline bool diagonal_regime(const JammerModel& jam, const ArrayConfig& arr,
                            double target_range) {
  return arr.subarray_freq_increment * arr.pulse_width >= 1.0 &&
         jam.frequency_offset * arr.pulse_width <= 0.01 &&
         (jam.antennas - 1) * std::abs(array_factor_shift(jam, target_range)) <= 0.1;
}

namespace detail {

inline void validate_geometry(const ScenarioConfig& cfg, const Scene& scene,
                              ValidationReport& rep) {
  const Position3D radar = scene.geometry.radar_position();
  const Position3D jammer = scene.geometry.jammer_position;
  double worst_sum = 0.0, worst_conic = 0.0;
  for (const auto& p : scene.jamming.points) {
    const double s = distance(p.position, radar) + distance(p.position, jammer);
    worst_sum = std::max(worst_sum, std::abs(s - 2.0 * cfg.rt_m) / (2.0 * cfg.rt_m));
    const double scale = scene.trajectory.max_abs_coefficient() *
                         std::max({1.0, p.position.x * p.position.x, p.position.y * p.position.y});
    worst_conic = std::max(worst_conic,
                           std::abs(scene.trajectory.evaluate(p.position.x, p.position.y)) / scale);
  }
  rep.add("geometry.sum_of_distances", worst_sum <= 1e-9, "max relative error " + sci(worst_sum));
  rep.add("geometry.conic_membership", worst_conic <= 1e-9, "max scaled residual " + sci(worst_conic));
  double worst_circle = 0.0;
  const double radius = scene.geometry.clutter_ground_radius();
  for (const auto& p : scene.clutter.points) {
    worst_circle = std::max(worst_circle, std::abs(std::hypot(p.position.x, p.position.y) - radius));
    worst_circle = std::max(worst_circle, std::abs(distance(p.position, radar) - cfg.rt_m));
  }
  rep.add("geometry.clutter_circle", worst_circle <= 1e-9 * cfg.rt_m,
          "max deviation " + sci(worst_circle) + " m");
}

inline void validate_arrays(const ScenarioConfig& cfg, const Scene& scene, ValidationReport& rep) {
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  std::mt19937_64 eng(cfg.seed);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const Angles a{kTwoPi * uniform01(eng), 0.5 * kPi * uniform01(eng)};
    const ComplexVector v = clutter_snapshot(arr, scene.look, a, cfg.rt_m);
    const auto f = space_time_frequencies(arr, a, cfg.rt_m);
    const double b = transmit_gain(arr, scene.look, a, arr.partition());
    for (int k = 0; k < arr.pulses; ++k) {
      for (int n = 0; n < arr.rx_elements; ++n) {
        for (int s = 0; s < arr.subarrays; ++s) {
          // Reduce each term first so the sum stays small.
          const double cycles =
              std::remainder(k * f.doppler, 1.0) + std::remainder(n * f.spatial, 1.0) +
              std::remainder(s * arr.subarray_phase_spacing * f.spatial, 1.0) -
              std::remainder(s * f.range, 1.0);
          const cdouble expect = b * std::polar(1.0, kTwoPi * cycles);
          worst = std::max(worst, std::abs(v((k * arr.rx_elements + n) * arr.subarrays + s) - expect));
        }
      }
    }
  }
  rep.add("arrays.kronecker_consistency", worst <= 1e-12, "max deviation " + sci(worst));
  double ridge = 0.0;
  for (const auto& p : scene.clutter.points) {
    const auto f = space_time_frequencies(arr, p.direction, cfg.rt_m);
    ridge = std::max(ridge, std::abs(f.doppler - arr.beta() * f.spatial));
  }
  rep.add("arrays.clutter_ridge", ridge <= 1e-15, "max |phi_D - beta phi_s| " + sci(ridge));
}

inline void validate_jammer(const ScenarioConfig& cfg, ValidationReport& rep) {
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  for (const auto& jc : jamming_cases(cfg)) {
    const JammerModel jam = jammer_model(cfg, jc.kind, jc.dfp_khz);
    const std::string tag = case_label(jc);
    double worst = 0.0;
    bool converged = true;
    std::string error;
    for (int lag = -(arr.subarrays - 1); lag < arr.subarrays; ++lag) {
      try {
        worst = std::max(worst, omega_entry(jam, arr, cfg.rt_m, lag).relative_difference);
      } catch (const std::exception& e) {
        converged = false;
        error = e.what();
      }
    }
    rep.add("jammer.omega_dual_route[" + tag + "]", converged && worst <= kOmegaAgreementTol,
            converged ? "max relative difference " + sci(worst) : error);
    if (!converged) continue;
    const ComplexMatrix d = coupling_matrix(jam, arr, cfg.rt_m, ModulationMode::kExact);
    double toeplitz = 0.0;
    for (int a = 1; a < arr.subarrays; ++a) {
      for (int b = 1; b < arr.subarrays; ++b) toeplitz = std::max(toeplitz, std::abs(d(a, b) - d(a - 1, b - 1)));
    }
    rep.add("jammer.toeplitz[" + tag + "]", toeplitz == 0.0, "max |D[a][b] - D[a-1][b-1]| " + sci(toeplitz));
    if (!diagonal_regime(jam, arr, cfg.rt_m)) {
      rep.skip("jammer.diagonal_dominance[" + tag + "]",
               "outside the diagonal-approximation regime: df'*Tp = " +
                   sci(jam.frequency_offset * arr.pulse_width) + ", (P-1)*|shift| = " +
                   sci((jam.antennas - 1) * std::abs(array_factor_shift(jam, cfg.rt_m))));
    } else {
      const double ptp = jam.antennas * arr.pulse_width;
      double off = 0.0, diag = 0.0;
      for (int a = 0; a < arr.subarrays; ++a) {
        for (int b = 0; b < arr.subarrays; ++b) {
          if (a == b) {
            diag = std::max(diag, std::abs(d(a, b) - ptp) / ptp);
          } else {
            off = std::max(off, std::abs(d(a, b)) / ptp);
          }
        }
      }
      rep.add("jammer.diagonal_dominance[" + tag + "]", off <= 0.05 && diag <= 0.05,
              "diagonal deviation " + sci(diag) + ", off-diagonal " + sci(off));
    }
  }
}

inline void validate_covariance(const ScenarioConfig& cfg, const Scene& scene,
                                ValidationReport& rep) {
  for (auto rc : cfg.radar_cases) {
    const ArrayConfig arr = array_config(cfg, rc);
    const std::string name = to_string(rc);
    const InterferenceModel clutter = build_interference(cfg, scene, arr, std::nullopt);
    const ComplexMatrix rc_only = clutter.covariance();
    const RealVector ev0 = eigen_spectrum(rc_only);
    const int r0 = clutter_rank(ev0, cfg.noise_power, cfg.rank_threshold_db);
    double asym = max_asymmetry(assemble_covariance(clutter.clutter_snapshots, clutter.clutter_powers));
    double min_eig = ev0.minCoeff() - cfg.noise_power;
    double trace_scale = rc_only.trace().real();
    bool rank_ok = true;
    std::string rank_detail = "clutter rank " + std::to_string(r0);
    for (const auto& jc : jamming_cases(cfg)) {
      const InterferenceModel m = build_interference(cfg, scene, arr, jc);
      const ComplexMatrix rj = assemble_covariance(m.jamming_snapshots, m.jamming_powers);
      asym = std::max(asym, max_asymmetry(rj));
      const RealVector ev = eigen_spectrum(m.covariance());
      min_eig = std::min(min_eig, ev.minCoeff() - cfg.noise_power);
      trace_scale = std::max(trace_scale, m.covariance().trace().real());
      const int r = clutter_rank(ev, cfg.noise_power, cfg.rank_threshold_db);
      ComplexMatrix rj_noise = rj;
      rj_noise.diagonal().array() += cfg.noise_power;
      const int rjr = clutter_rank(eigen_spectrum(rj_noise), cfg.noise_power, cfg.rank_threshold_db);
      const bool ok = rc == RadarCase::kPhasedArray ? r == r0 : (r >= r0 && r <= r0 + rjr);
      rank_ok = rank_ok && ok;
      rank_detail += ", " + case_label(jc) + " " + std::to_string(r);
    }
    rep.add("covariance.hermitian[" + name + "]", asym <= 1e-12 * std::max(1.0, trace_scale),
            "max asymmetry " + sci(asym));
    rep.add("covariance.psd[" + name + "]", min_eig >= -1e-10 * trace_scale,
            "min interference eigenvalue " + sci(min_eig));
    rep.add(rc == RadarCase::kPhasedArray ? "covariance.pa_rank_invariance"
                                          : "covariance.fda_rank_bounds",
            rank_ok, rank_detail);
  }
  // Factorization of jamming snapshots over the clutter ring.
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  double worst = 0.0;
  for (const auto& jc : jamming_cases(cfg)) {
    const JammerModel jam = jammer_model(cfg, jc.kind, jc.dfp_khz);
    const ModulationMatrix mod = modulation_matrix(jam, arr, cfg.rt_m, cfg.modulation);
    const ComplexMatrix vj = jamming_snapshot_matrix(scene.clutter, arr, scene.look, cfg.rt_m, jam, mod);
    const ComplexMatrix vr = clutter_snapshot_matrix(scene.clutter, arr, scene.look, cfg.rt_m);
    const ComplexVector shift = doppler_steering(arr, jamming_doppler_offset(jam, arr, cfg.rt_m));
    const ComplexMatrix ups = mod.normalized(jam);
    const int S = arr.subarrays, N = arr.rx_elements;
    ComplexMatrix predicted(vr.rows(), vr.cols());
    for (int k = 0; k < arr.pulses; ++k) {
      for (int n = 0; n < N; ++n) {
        const Eigen::Index row = (k * N + n) * S;
        predicted.middleRows(row, S) = shift(k) * ups * vr.middleRows(row, S);
      }
    }
    worst = std::max(worst, (vj - predicted).cwiseAbs().maxCoeff() / vj.cwiseAbs().maxCoeff());
  }
  rep.add("covariance.factorization", worst <= 1e-10, "max relative deviation " + sci(worst));
}

inline void validate_stap(const ScenarioConfig& cfg, ValidationReport& rep) {
  std::mt19937_64 eng(splitmix64(cfg.seed));
  std::normal_distribution<double> normal;
  double distortion = 0.0, oracle = 0.0;
  bool bound_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + static_cast<int>(eng() % 26);
    ComplexMatrix a(dim, dim + 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {normal(eng), normal(eng)};
    ComplexMatrix r = a * a.adjoint();
    r.diagonal().array() += 1.0;
    ComplexVector t(dim);
    for (int i = 0; i < dim; ++i) t(i) = {normal(eng), normal(eng)};
    const ComplexVector w = optimal_weights(r, t);
    distortion = std::max(distortion, std::abs(w.dot(t) - 1.0));
    const double quad = improvement_factor(r, t, 1.0);
    const ComplexVector w2 = r.fullPivLu().solve(t);
    const double gain = std::norm(w2.dot(t)) / w2.dot(r * w2).real();
    oracle = std::max(oracle, std::abs(gain - quad) / quad);
    bound_ok = bound_ok && quad <= t.squaredNorm() * (1.0 + 1e-12);
  }
  rep.add("stap.distortionless", distortion <= 1e-10, "max |w^H t - 1| " + sci(distortion));
  rep.add("stap.oracle", oracle <= 1e-8, "max relative difference " + sci(oracle));
  rep.add("stap.if_upper_bound", bound_ok, "IF never exceeds the noise-only value");
}

}  // namespace detail

inline ValidationReport compute_validation(const ScenarioConfig& cfg) {
  ValidationReport rep;
  const Scene scene = build_scene(cfg);
  detail::validate_geometry(cfg, scene, rep);
  detail::validate_arrays(cfg, scene, rep);
  detail::validate_jammer(cfg, rep);
  detail::validate_covariance(cfg, scene, rep);
  detail::validate_stap(cfg, rep);
  return rep;
}

inline bool run_validate(const ScenarioConfig& cfg, OutputDirectory& out, std::ostream& log) {
  const ValidationReport rep = compute_validation(cfg);
  std::string csv = "check,status,detail\n";
  for (const auto& c : rep.checks) {
    const char* status = c.status == CheckStatus::kPass   ? "PASS"
                         : c.status == CheckStatus::kFail ? "FAIL"
                                                          : "SKIP";
    log << status << "  " << c.name << "  (" << c.detail << ")\n";
    csv += c.name + "," + status + ",\"" + c.detail + "\"\n";
  }
  out.write("validate.csv", csv);
  return rep.ok();
}

}  // namespace fdasim
