// Acceptance runner: one PASS/FAIL line per criterion, tolerances pinned here.
#include <Eigen/LU>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "fdasim/fdasim.hpp"

using namespace fdasim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double uniform(std::mt19937_64& eng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(eng);
}

SceneGeometry random_scene(std::mt19937_64& eng) {
  while (true) {
    const double h = uniform(eng, 500.0, 6000.0);
    const double rt = h * uniform(eng, 1.2, 5.0);
    const double r = uniform(eng, 0.0, 1.8 * rt);
    const double az = uniform(eng, -kPi, kPi);
    const double z = uniform(eng, 0.0, 1.0) < 0.5 ? 0.0 : uniform(eng, 0.0, 2.0 * h);
    const Position3D j{r * std::cos(az), r * std::sin(az), z};
    if (std::hypot(j.x, j.y, j.z + h) < 1.98 * rt && std::hypot(j.x, j.y, j.z - h) < 1.98 * rt) {
      return make_scene(h, j, rt, 75.0);
    }
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Geometry invariants.
Outcome geometry_suite() {
  std::mt19937_64 eng(1);
  double worst = 0.0;
  std::size_t points = 0;
  for (int scene = 0; scene < 20; ++scene) {
    const SceneGeometry g = random_scene(eng);
    const EllipseTrajectory e = jamming_trajectory(g);
    // 500 rays per scene; rays that cross the ellipse twice add a second point.
    const ScattererRing ring = sample_jamming_ring(g, e, 500);
    for (const auto& p : ring.points) {
      const double s = distance(p.position, g.radar_position()) + distance(p.position, g.jammer_position);
      worst = std::max(worst, std::abs(s - 2 * g.target_range) / (2 * g.target_range));
    }
    points += ring.size();
  }
  const SceneGeometry co = make_scene(2000.0, {0.0, 0.0, 2000.0}, 6000.0, 75.0);
  const ScattererRing a = sample_clutter_ring(co, 360);
  const ScattererRing b = sample_jamming_ring(co, jamming_trajectory(co), 360);
  double coincident = a.size() == b.size() ? 0.0 : 1e300;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    coincident = std::max(coincident, distance(a.points[i].position, b.points[i].position) / 6000.0);
  }
  return {points >= 10000 && worst <= 1e-9 && coincident <= 1e-9,
          std::to_string(points) + " points, max sum-of-distances error " + fmt("%.2e", worst) +
              " (tol 1e-9), coincident-foci max offset " + fmt("%.2e", coincident) + " R_t (tol 1e-9)"};
}

// 2. Diagonal dominance of the coupling matrix and the dual-route integrals.
Outcome diagonal_dominance() {
  const ScenarioConfig cfg;
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  std::string detail;
  bool pass = true;
  for (JammerKind kind : {JammerKind::kSameFrequency, JammerKind::kAlternatingFrequency}) {
    double worst = 0.0, at = 0.0;
    for (double khz : {0.1, 0.5, 1.0}) {
      const double dev = diagonal_deviation(jammer_model(cfg, kind, khz), arr, cfg.rt_m);
      if (dev > worst) {
        worst = dev;
        at = khz;
      }
    }
    pass = pass && worst < 0.05;
    detail += std::string(to_string(kind)) + " max-norm deviation " + fmt("%.4f", worst) + " at " +
              fmt("%g", at) + " kHz; ";
  }
  double agreement = 0.0;
  for (JammerKind kind : {JammerKind::kSameFrequency, JammerKind::kAlternatingFrequency}) {
    for (int lag : {-2, -1, 0, 1, 2}) {
      for (double khz : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        try {
          agreement = std::max(agreement, omega_entry(jammer_model(cfg, kind, khz), arr, cfg.rt_m, lag)
                                              .relative_difference);
        } catch (const ModulationError&) {
          agreement = 1e300;
        }
      }
    }
  }
  pass = pass && agreement <= 1e-6;
  return {pass, detail + "tol 0.05; Omega closed form vs quadrature max rel diff " +
                    fmt("%.2e", agreement) + " (tol 1e-6)"};
}

// 3. PA rank invariance.
Outcome pa_rank() {
  ScenarioConfig cfg;
  cfg.radar_cases = {RadarCase::kPhasedArray};
  cfg.dfp_khz = {0.1, 0.5, 1.0, 16.9};
  const auto rs = compute_eigen(cfg, 1);
  int base = -1;
  for (const auto& r : rs) {
    if (r.label == "clutter") base = r.rank;
  }
  bool pass = base >= 0;
  std::string detail = "clutter rank " + std::to_string(base) + "; jammed:";
  for (const auto& r : rs) {
    if (r.label == "clutter") continue;
    pass = pass && r.rank == base;
    detail += " " + r.label + "=" + std::to_string(r.rank);
  }
  return {pass, detail};
}

// 4. FDA-MIMO rank inflation.
Outcome fda_rank() {
  ScenarioConfig cfg;
  cfg.radar_cases = {RadarCase::kFdaMimo};
  cfg.dfp_khz = {0.1, 0.5, 1.0};
  const auto rs = compute_eigen(cfg, 1);
  int base = -1;
  for (const auto& r : rs) {
    if (r.label == "clutter") base = r.rank;
  }
  bool pass = base >= 17 && base <= 20;
  std::string detail = "no-jamming rank " + std::to_string(base) + " (window [17, 20]); jammed:";
  for (const auto& r : rs) {
    if (r.label == "clutter") continue;
    pass = pass && r.rank > base && r.rank <= 2 * base;
    detail += " " + r.label + "=" + std::to_string(r.rank);
  }
  return {pass, detail + " (window (" + std::to_string(base) + ", " + std::to_string(2 * base) + "])"};
}

// 5. Notch-shift law.
Outcome notch_law() {
  ScenarioConfig cfg;
  cfg.if_grid = 128;
  cfg.dfp_khz = {2.2, 4.0, 4.2, 6.0};
  const auto rs = compute_if(cfg, 1);
  auto curve = [&](const std::string& file) {
    for (const auto& r : rs) {
      if (r.file == file) return mean_curve(r.curve);
    }
    throw std::runtime_error("missing " + file);
  };
  const double bin = 1.0 / 128;
  const auto n4 = secondary_notch(curve("if_sf_4khz.csv"));
  const auto n6 = secondary_notch(curve("if_sf_6khz.csv"));
  bool pass = n4 && n6 && std::abs(*n4 - 0.24) <= bin + 1e-12 && std::abs(*n6 - 0.36) <= bin + 1e-12;
  double worst = 0.0;
  for (auto [af, sf] : {std::pair{"if_af_2.2khz.csv", "if_sf_4khz.csv"},
                        std::pair{"if_af_4.2khz.csv", "if_sf_6khz.csv"}}) {
    const IfCurve a = curve(af), s = curve(sf);
    for (std::size_t i = 0; i < a.if_db.size(); ++i) worst = std::max(worst, std::abs(a.if_db[i] - s.if_db[i]));
  }
  pass = pass && worst <= 0.5;
  return {pass, "SF 4 kHz notch " + (n4 ? fmt("%.6f", *n4) : std::string("none")) +
                    " (0.24 +- 1/128), SF 6 kHz notch " + (n6 ? fmt("%.6f", *n6) : std::string("none")) +
                    " (0.36 +- 1/128), AF 2.2/4.2 vs SF 4/6 kHz max |dIF| " + fmt("%.2e", worst) +
                    " dB (tol 0.5)"};
}

// 6. Offset thresholds, read back from the printed bounds table.
Outcome thresholds() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "fdasim_acceptance_bounds";
  OutputDirectory out(dir);
  std::ostringstream log;
  run_bounds(ScenarioConfig{}, out, log);
  std::istringstream in(log.str());
  std::string line;
  double zs = -1, za = -1;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string kind, purpose;
    double lower, upper;
    if (!(row >> kind >> purpose >> lower >> upper) || purpose != "scattered_wave") continue;
    (kind == "sf" ? zs : za) = upper;
  }
  const bool pass = std::abs(zs - 16.67) <= 0.05 && std::abs(za - 18.5) <= 0.1;
  return {pass, "zeta_SF " + fmt("%.3f", zs) + " kHz (16.67 +- 0.05), zeta_AF " + fmt("%.3f", za) +
                    " kHz (18.5 +- 0.1)"};
}

// 7. STAP oracle on small radar instances.
Outcome stap_oracle() {
  std::mt19937_64 eng(7);
  std::uniform_int_distribution<int> small(1, 3);
  double worst = 0.0;
  int instances = 0;
  while (instances < 50) {
    ArrayConfig arr;
    arr.subarrays = small(eng);
    arr.tx_elements = arr.subarrays * small(eng);
    arr.rx_elements = small(eng);
    arr.pulses = small(eng);
    if (arr.dimension() > 27 || arr.dimension() < 2) continue;
    const SceneGeometry g = random_scene(eng);
    const Angles look{uniform(eng, 0.2, 2.9), std::asin(g.radar_height / g.target_range)};
    JammerModel jam;
    jam.kind = uniform(eng, 0, 1) < 0.5 ? JammerKind::kSameFrequency : JammerKind::kAlternatingFrequency;
    jam.frequency_offset = uniform(eng, 0.0, 8000.0);
    const auto mod = modulation_matrix(jam, arr, g.target_range, ModulationMode::kExact);
    InterferenceModel m;
    m.noise_power = uniform(eng, 0.5, 2.0);
    m.clutter_snapshots = clutter_snapshot_matrix(sample_clutter_ring(g, 41), arr, look, g.target_range);
    m.clutter_powers = uniform_powers(m.clutter_snapshots, uniform(eng, 10, 1000), m.noise_power);
    m.jamming_snapshots = jamming_snapshot_matrix(sample_jamming_ring(g, jamming_trajectory(g), 23), arr,
                                                  look, g.target_range, jam, mod);
    m.jamming_powers = uniform_powers(m.jamming_snapshots, uniform(eng, 1, 100), m.noise_power);
    const ComplexMatrix r = m.covariance();
    const ComplexVector t = target_steering(arr, look, uniform(eng, -0.5, 0.5), g.target_range);
    const ComplexVector w = Eigen::FullPivLU<ComplexMatrix>(r).solve(t);
    const double gain = m.noise_power * std::norm(w.dot(t)) / w.dot(r * w).real();
    const double quad = improvement_factor(r, t, m.noise_power);
    worst = std::max(worst, std::abs(gain - quad) / quad);
    ++instances;
  }
  return {worst <= 1e-8, std::to_string(instances) + " instances, max rel diff " + fmt("%.2e", worst) +
                             " (tol 1e-8)"};
}

// 8. Monte Carlo stability.
Outcome monte_carlo() {
  ScenarioConfig cfg;
  cfg.trials = 100;
  const Scene scene = build_scene(cfg);
  const ArrayConfig arr = array_config(cfg, RadarCase::kFdaMimo);
  std::string detail;
  bool pass = true;
  for (const std::optional<JammingCase>& jc :
       {std::optional<JammingCase>{}, std::optional<JammingCase>{{JammerKind::kSameFrequency, 4.0}},
        std::optional<JammingCase>{{JammerKind::kAlternatingFrequency, 1.0}}}) {
    const InterferenceModel model = build_interference(cfg, scene, arr, jc);
    const auto mc = monte_carlo_if(model, arr, scene.look, cfg.rt_m, cfg.if_grid, cfg.trials, cfg.seed, 1);
    const IfCurve an = if_curve(model.covariance(), arr, scene.look, cfg.rt_m, cfg.noise_power, cfg.if_grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < mc.doppler.size(); ++i) {
      if (std::abs(mc.doppler[i]) > 0.1) worst = std::max(worst, std::abs(mc.mean_db[i] - an.if_db[i]));
    }
    pass = pass && worst < 1.0;
    detail += (jc ? case_label(*jc) : std::string("clutter")) + " " + fmt("%.3f", worst) + " dB; ";
  }
  return {pass, "100 trials, max |mean - analytic| for |f| > 0.1: " + detail + "tol 1 dB"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"geometry invariants", 5, geometry_suite},
      {"coupling-matrix diagonal dominance", 30, diagonal_dominance},
      {"PA rank invariance", 120, pa_rank},
      {"FDA-MIMO rank inflation", 300, fda_rank},
      {"notch-shift law", 600, notch_law},
      {"offset thresholds", 60, thresholds},
      {"STAP oracle", 60, stap_oracle},
      {"Monte Carlo stability", 900, monte_carlo},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= criteria[i].budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %zu. %s: %s; %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str(), secs, criteria[i].budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
