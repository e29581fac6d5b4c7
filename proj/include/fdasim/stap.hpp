// Optimum STAP weights, improvement factor, MVDR spectra and Monte Carlo
// realizations of the interference covariance.
#pragma once

#include <Eigen/Cholesky>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fdasim/arrays.hpp"
#include "fdasim/covariance.hpp"

namespace fdasim {

class StapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Eigen::LLT<ComplexMatrix> factorize(const ComplexMatrix& r) {
  Eigen::LLT<ComplexMatrix> llt(r);
  if (llt.info() != Eigen::Success) {
    throw StapError("covariance is not positive definite");
  }
  return llt;
}

inline double quadratic_form(const Eigen::LLT<ComplexMatrix>& llt, const ComplexVector& v) {
  return v.dot(llt.solve(v)).real();
}

}  // namespace detail

/// w = R^-1 t / (t^H R^-1 t).
inline ComplexVector optimal_weights(const ComplexMatrix& r, const ComplexVector& steering) {
  const auto llt = detail::factorize(r);
  const ComplexVector x = llt.solve(steering);
  const cdouble denom = steering.dot(x);
  if (!(std::abs(denom) > 0.0)) throw StapError("steering vector is in the null space");
  return x / denom;
}

/// Output SINR gain over the single-element noise-limited SNR,
/// noise_power * v^H R^-1 v, linear.
inline double improvement_factor(const ComplexMatrix& r, const ComplexVector& steering,
                                 double noise_power) {
  return noise_power * detail::quadratic_form(detail::factorize(r), steering);
}

inline double improvement_factor_db(const ComplexMatrix& r, const ComplexVector& steering,
                                    double noise_power) {
  return linear_to_db(improvement_factor(r, steering, noise_power));
}

/// Target space-time steering at normalized Doppler `doppler`, weighted by
/// the transmit gain toward the look direction.
inline ComplexVector target_steering(const ArrayConfig& cfg, const Angles& look,
                                     double doppler, double target_range) {
  const auto f = space_time_frequencies(cfg, look, target_range);
  const double gain = transmit_gain(cfg, look, look, cfg.partition());
  return gain * space_time_snapshot(subarray_vector(cfg, f), receive_steering(cfg, f),
                                    doppler_steering(cfg, doppler));
}

inline std::vector<double> doppler_grid(int bins) {
  std::vector<double> g(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) g[static_cast<std::size_t>(i)] = -0.5 + double(i) / bins;
  return g;
}

struct IfCurve {
  std::vector<double> doppler;
  std::vector<double> if_db;
};

inline ComplexMatrix target_steering_matrix(const ArrayConfig& cfg, const Angles& look,
                                            double target_range,
                                            const std::vector<double>& doppler) {
  ComplexMatrix t(cfg.dimension(), static_cast<Eigen::Index>(doppler.size()));
  for (std::size_t i = 0; i < doppler.size(); ++i) {
    t.col(static_cast<Eigen::Index>(i)) = target_steering(cfg, look, doppler[i], target_range);
  }
  return t;
}

inline std::vector<double> if_db_columns(const ComplexMatrix& r, const ComplexMatrix& steering,
                                         double noise_power) {
  const auto llt = detail::factorize(r);
  const ComplexMatrix x = llt.solve(steering);
  std::vector<double> out(static_cast<std::size_t>(steering.cols()));
  for (Eigen::Index i = 0; i < steering.cols(); ++i) {
    out[static_cast<std::size_t>(i)] =
        linear_to_db(noise_power * steering.col(i).dot(x.col(i)).real());
  }
  return out;
}

inline IfCurve if_curve(const ComplexMatrix& r, const ArrayConfig& cfg, const Angles& look,
                        double target_range, double noise_power, int bins) {
  IfCurve c;
  c.doppler = doppler_grid(bins);
  c.if_db = if_db_columns(r, target_steering_matrix(cfg, look, target_range, c.doppler),
                          noise_power);
  return c;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty sequence");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

/// Deepest local minimum (circular neighbours) more than `depth_db` below the
/// curve median, ignoring |f| <= exclusion.
inline std::optional<double> secondary_notch(const IfCurve& c, double exclusion = 0.05,
                                             double depth_db = 3.0) {
  const std::size_t n = c.if_db.size();
  if (n < 3) return std::nullopt;
  const double limit = median(c.if_db) - depth_db;
  std::optional<double> best;
  double best_value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = c.if_db[i];
    const double prev = c.if_db[(i + n - 1) % n];
    const double next = c.if_db[(i + 1) % n];
    if (std::abs(c.doppler[i]) <= exclusion || !(y < prev && y < next && y < limit)) continue;
    if (!best || y < best_value) {
      best = c.doppler[i];
      best_value = y;
    }
  }
  return best;
}

/// Width (normalized Doppler) of the contiguous region around f = 0 lying
/// more than `level_db` below the curve maximum.
inline double notch_width(const IfCurve& c, double level_db = 10.0) {
  const std::size_t n = c.if_db.size();
  if (n == 0) return 0.0;
  const double limit = *std::max_element(c.if_db.begin(), c.if_db.end()) - level_db;
  std::size_t centre = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(c.doppler[i]) < std::abs(c.doppler[centre])) centre = i;
  }
  if (!(c.if_db[centre] < limit)) return 0.0;
  std::size_t count = 1;
  for (std::size_t k = 1; k < n && c.if_db[(centre + n - k) % n] < limit; ++k) ++count;
  for (std::size_t k = 1; k < n && count < n && c.if_db[(centre + k) % n] < limit; ++k) ++count;
  return double(std::min(count, n)) / double(n);
}

/// IF value at the grid bin closest to `doppler`.
inline double if_at(const IfCurve& c, double doppler) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.doppler.size(); ++i) {
    if (std::abs(c.doppler[i] - doppler) < std::abs(c.doppler[best] - doppler)) best = i;
  }
  return c.if_db.at(best);
}

// -----------------------------------------------------------------------------
// MVDR spectrum
// -----------------------------------------------------------------------------

struct SpatialDopplerSpectrum {
  std::vector<double> spatial;
  std::vector<double> doppler;
  Eigen::MatrixXd db;  // rows: Doppler bins, columns: spatial bins; peak at 0 dB
};

/// Unit-modulus scan vector at receive spatial frequency `spatial`.
inline ComplexVector scan_vector(const ArrayConfig& cfg, double spatial, double doppler,
                                 double target_range) {
  SpaceTimeFrequencies f;
  f.spatial = spatial;
  f.range = 2.0 * cfg.subarray_freq_increment * target_range / kSpeedOfLight;
  return space_time_snapshot(subarray_vector(cfg, f), receive_steering(cfg, f),
                             doppler_steering(cfg, doppler));
}

inline SpatialDopplerSpectrum mvdr_spectrum(const ComplexMatrix& r, const ArrayConfig& cfg,
                                            double target_range, int spatial_bins,
                                            int doppler_bins) {
  SpatialDopplerSpectrum out;
  out.spatial = doppler_grid(spatial_bins);
  out.doppler = doppler_grid(doppler_bins);
  const auto llt = detail::factorize(r);
  Eigen::MatrixXd power(doppler_bins, spatial_bins);
  for (int j = 0; j < spatial_bins; ++j) {
    ComplexMatrix scans(cfg.dimension(), doppler_bins);
    for (int i = 0; i < doppler_bins; ++i) {
      scans.col(i) = scan_vector(cfg, out.spatial[static_cast<std::size_t>(j)],
                                 out.doppler[static_cast<std::size_t>(i)], target_range);
    }
    const ComplexMatrix x = llt.solve(scans);
    for (int i = 0; i < doppler_bins; ++i) power(i, j) = 1.0 / scans.col(i).dot(x.col(i)).real();
  }
  const double peak = power.maxCoeff();
  out.db = (power.array() / peak).log10() * 10.0;
  return out;
}

// -----------------------------------------------------------------------------
// Monte Carlo
// -----------------------------------------------------------------------------

/// Snapshots and mean per-patch powers of every interference component.
struct InterferenceModel {
  ComplexMatrix clutter_snapshots;
  RealVector clutter_powers;
  ComplexMatrix jamming_snapshots;
  RealVector jamming_powers;
  double noise_power = 1.0;

  ComplexMatrix covariance() const {
    return covariance_with(clutter_powers, jamming_powers);
  }
  ComplexMatrix covariance_with(const RealVector& clutter, const RealVector& jamming) const {
    ComplexMatrix r = assemble_covariance(clutter_snapshots, clutter);
    if (jamming_snapshots.cols() > 0) r += assemble_covariance(jamming_snapshots, jamming);
    r.diagonal().array() += noise_power;
    return r;
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent engine for one trial; identical for any thread count.
inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ trial));
}

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double standard_exponential(std::mt19937_64& eng) { return -std::log1p(-uniform01(eng)); }

/// Per-patch powers with independent exponential fluctuations about the mean.
inline RealVector draw_powers(const RealVector& mean, std::mt19937_64& eng) {
  RealVector p(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) p(i) = mean(i) * standard_exponential(eng);
  return p;
}

struct MonteCarloIf {
  std::vector<double> doppler;
  std::vector<double> mean_db;
  std::vector<double> std_db;
  int trials = 0;
};

inline MonteCarloIf monte_carlo_if(const InterferenceModel& model, const ArrayConfig& cfg,
                                   const Angles& look, double target_range, int bins,
                                   int trials, std::uint64_t seed, unsigned threads = 1) {
  if (trials < 1) throw std::invalid_argument("Monte Carlo needs at least one trial");
  MonteCarloIf out;
  out.doppler = doppler_grid(bins);
  out.trials = trials;
  const ComplexMatrix steering = target_steering_matrix(cfg, look, target_range, out.doppler);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(trials));

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(std::max(1u, threads));
  auto worker = [&](unsigned id) {
    try {
      for (int t = next++; t < trials; t = next++) {
        auto eng = trial_engine(seed, static_cast<std::uint64_t>(t));
        const RealVector pc = draw_powers(model.clutter_powers, eng);
        const RealVector pj = draw_powers(model.jamming_powers, eng);
        rows[static_cast<std::size_t>(t)] =
            if_db_columns(model.covariance_with(pc, pj), steering, model.noise_power);
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  const unsigned n_threads = std::clamp(threads, 1u, static_cast<unsigned>(trials));
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker, i);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::size_t nb = out.doppler.size();
  out.mean_db.assign(nb, 0.0);
  out.std_db.assign(nb, 0.0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < nb; ++i) out.mean_db[i] += row[i];
  }
  for (auto& m : out.mean_db) m /= trials;
  if (trials > 1) {
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < nb; ++i) {
        const double d = row[i] - out.mean_db[i];
        out.std_db[i] += d * d;
      }
    }
    for (auto& s : out.std_db) s = std::sqrt(s / (trials - 1));
  }
  return out;
}

}  // namespace fdasim
