// FDA jammer: modulation factors, the inter-subarray coupling matrix and the
// Doppler/frequency-offset relationships of scattered-wave jamming.
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "fdasim/arrays.hpp"
#include "fdasim/geometry.hpp"
#include "fdasim/quadrature.hpp"

namespace fdasim {

enum class JammerKind { kSameFrequency, kAlternatingFrequency };
enum class ModulationMode { kExact, kDiagonal };

inline const char* to_string(JammerKind k) {
  return k == JammerKind::kSameFrequency ? "sf" : "af";
}
inline const char* to_string(ModulationMode m) {
  return m == ModulationMode::kExact ? "exact" : "diagonal";
}

struct JammerModel {
  JammerKind kind = JammerKind::kSameFrequency;
  int antennas = 4;              // P
  double frequency_offset = 0.0;  // delta f' [Hz]
  // f0 * d_j * cos(theta_j) * cos(phi_j) of the jammer array [Hz m].
  double geometry_term = 2.16e7;
  double power = 10.0;  // xi_j^2, relative to unit noise

  /// Spatial frequency of the jammer array itself.
  double spatial_frequency() const { return geometry_term / kSpeedOfLight; }
  /// Range-dependent phase rate of the jammer FDA across the target range.
  double range_frequency(double target_range) const {
    return -frequency_offset * 2.0 * target_range / kSpeedOfLight;
  }

  void validate() const {
    if (antennas < 2) throw std::invalid_argument("an FDA jammer needs at least two antennas");
    if (!(frequency_offset >= 0.0) || !std::isfinite(frequency_offset)) {
      throw std::invalid_argument("jammer frequency offset must be finite and non-negative");
    }
    if (!(power >= 0.0)) throw std::invalid_argument("jammer power must be non-negative");
  }
};

inline cdouble theta_factor(const JammerModel& jam, double pulse_width, double target_range) {
  const double phi_r = jam.range_frequency(target_range);
  const double scale = jam.power / pulse_width;
  const double p1 = jam.antennas - 1;
  if (jam.kind == JammerKind::kSameFrequency) {
    return scale * std::polar(1.0, -p1 * kPi * phi_r);
  }
  return scale * std::polar(1.0, p1 * kPi * (jam.spatial_frequency() - phi_r));
}

namespace detail {
inline double omega_shift(const JammerModel& jam, double target_range);
}

/// Shift of the jammer's array factor at the start of the pulse.
inline double array_factor_shift(const JammerModel& jam, double target_range) {
  return detail::omega_shift(jam, target_range);
}

namespace detail {

inline double omega_shift(const JammerModel& jam, double target_range) {
  const double phi_r = jam.range_frequency(target_range);
  return jam.kind == JammerKind::kSameFrequency ? phi_r : phi_r - jam.spatial_frequency();
}

inline cdouble exp_integral(double g, double t) {
  // integral of exp(j 2 pi g x) over [0, t]
  const double x = g * t;
  if (std::abs(x) < 1e-12) return {t, 0.0};
  return t * std::polar(1.0, kPi * x) * (std::sin(kPi * x) / (kPi * x));
}

}  // namespace detail

/// Coupling integral between transmit subarrays separated by `lag`:
/// the pulse-long integral of the jammer array factor against the
/// inter-subarray frequency difference, in closed form.
inline cdouble omega_closed_form(const JammerModel& jam, const ArrayConfig& cfg,
                                 double target_range, int lag) {
  const double x0 = detail::omega_shift(jam, target_range);
  const double centre = 0.5 * (jam.antennas - 1);
  cdouble sum{};
  for (int i = 0; i < jam.antennas; ++i) {
    const double g = lag * cfg.subarray_freq_increment + i * jam.frequency_offset;
    sum += unit_phasor(-(i - centre) * x0) * detail::exp_integral(g, cfg.pulse_width);
  }
  return sum;
}

/// The same coupling integral evaluated by adaptive quadrature of
/// Dir_P(delta f' t - x0) exp(j 2 pi (lag delta f + (P-1) delta f' / 2) t).
inline QuadratureResult<cdouble> omega_quadrature(const JammerModel& jam,
                                                  const ArrayConfig& cfg,
                                                  double target_range, int lag,
                                                  QuadratureOptions opt = {}) {
  const double x0 = detail::omega_shift(jam, target_range);
  const double carrier =
      lag * cfg.subarray_freq_increment + 0.5 * (jam.antennas - 1) * jam.frequency_offset;
  if (opt.abs_tol == 0.0) opt.abs_tol = 1e-13 * jam.antennas * cfg.pulse_width;
  auto f = [&](double t) {
    return dirichlet(jam.antennas, jam.frequency_offset * t - x0) * unit_phasor(carrier * t);
  };
  return integrate(f, 0.0, cfg.pulse_width, opt);
}

class ModulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OmegaEntry {
  cdouble closed_form;
  cdouble quadrature;
  double relative_difference;
};

inline constexpr double kOmegaAgreementTol = 1e-6;

/// Both evaluations of one coupling entry; throws if they disagree. Entries
/// far below the diagonal scale P T_p are compared on that scale instead.
inline OmegaEntry omega_entry(const JammerModel& jam, const ArrayConfig& cfg,
                              double target_range, int lag) {
  OmegaEntry e;
  e.closed_form = omega_closed_form(jam, cfg, target_range, lag);
  e.quadrature = omega_quadrature(jam, cfg, target_range, lag).value;
  const double floor = 1e-8 * jam.antennas * cfg.pulse_width;
  const double ref = std::max({std::abs(e.closed_form), std::abs(e.quadrature), floor});
  e.relative_difference = std::abs(e.closed_form - e.quadrature) / ref;
  if (e.relative_difference > kOmegaAgreementTol) {
    throw ModulationError("coupling entry at lag " + std::to_string(lag) +
                          " disagrees between closed form and quadrature");
  }
  return e;
}

struct ModulationMatrix {
  ModulationMode mode = ModulationMode::kDiagonal;
  cdouble theta;
  ComplexMatrix coupling;  // D, S x S Toeplitz
  ComplexMatrix upsilon;   // theta * D

  /// Upsilon scaled so that the ideal diagonal is unit modulus.
  ComplexMatrix normalized(const JammerModel& jam) const {
    return upsilon / (jam.power * jam.antennas);
  }
};

inline ComplexMatrix coupling_matrix(const JammerModel& jam, const ArrayConfig& cfg,
                                     double target_range, ModulationMode mode) {
  const int S = cfg.subarrays;
  if (mode == ModulationMode::kDiagonal) {
    return ComplexMatrix::Identity(S, S) * cdouble(jam.antennas * cfg.pulse_width, 0.0);
  }
  ComplexMatrix d(S, S);
  for (int lag = -(S - 1); lag <= S - 1; ++lag) {
    const cdouble w = omega_entry(jam, cfg, target_range, lag).closed_form;
    for (int a = 0; a < S; ++a) {
      const int b = a + lag;
      if (b >= 0 && b < S) d(a, b) = w;
    }
  }
  return d;
}

inline ModulationMatrix modulation_matrix(const JammerModel& jam, const ArrayConfig& cfg,
                                          double target_range, ModulationMode mode) {
  ModulationMatrix m;
  m.mode = mode;
  m.theta = theta_factor(jam, cfg.pulse_width, target_range);
  m.coupling = coupling_matrix(jam, cfg, target_range, mode);
  m.upsilon = m.theta * m.coupling;
  return m;
}

/// Largest entry of |D - P T_p I| / (P T_p): how far the exact coupling
/// matrix is from its diagonal approximation.
inline double diagonal_deviation(const JammerModel& jam, const ArrayConfig& cfg,
                                 double target_range) {
  const ComplexMatrix exact = coupling_matrix(jam, cfg, target_range, ModulationMode::kExact);
  const ComplexMatrix ideal =
      coupling_matrix(jam, cfg, target_range, ModulationMode::kDiagonal);
  return (exact - ideal).cwiseAbs().maxCoeff() / (jam.antennas * cfg.pulse_width);
}

inline ComplexVector jammed_transmit_steering(const ModulationMatrix& m, const JammerModel& jam,
                                              const ComplexVector& subarray) {
  return m.normalized(jam) * subarray;
}

/// Normalized Doppler at which the jamming ridge crosses the look direction,
/// relative to the clutter ridge.
inline double notch_shift_prediction(const JammerModel& jam, const ArrayConfig& cfg,
                                     double target_range) {
  const double phi_r = jam.range_frequency(target_range);
  const double p1 = jam.antennas - 1;
  if (jam.kind == JammerKind::kSameFrequency) return -p1 * phi_r / (2.0 * cfg.beta());
  return p1 * (jam.spatial_frequency() - phi_r) / (2.0 * cfg.beta());
}

/// Slow-time Doppler offset applied to jamming snapshots. Without transmit
/// subarrays there is no waveform diversity to decouple, so none is applied.
inline double jamming_doppler_offset(const JammerModel& jam, const ArrayConfig& cfg,
                                     double target_range) {
  return cfg.subarrays > 1 ? notch_shift_prediction(jam, cfg, target_range) : 0.0;
}

/// Frequency-offset shift that moves the notch by exactly one Doppler period.
inline double notch_period_offset(const JammerModel& jam, const ArrayConfig& cfg,
                                  double target_range) {
  return cfg.beta() * kSpeedOfLight / ((jam.antennas - 1) * target_range);
}

inline double zeta_same_frequency(const JammerModel& jam, const ArrayConfig& cfg,
                                  double target_range) {
  return notch_period_offset(jam, cfg, target_range);
}

inline double zeta_alternating_frequency(const JammerModel& jam, const ArrayConfig& cfg,
                                         double target_range) {
  return notch_period_offset(jam, cfg, target_range) +
         cfg.beta() * jam.geometry_term / (2.0 * target_range);
}

enum class OffsetPurpose { kFalseTargets, kDeception, kScatteredWave };

struct OffsetInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_closed = true;
  bool upper_closed = false;

  bool contains(double x) const {
    const bool lo = lower_closed ? x >= lower : x > lower;
    const bool hi = upper_closed ? x <= upper : x < upper;
    return lo && hi;
  }
};

inline OffsetInterval frequency_offset_bounds(const JammerModel& jam, const ArrayConfig& cfg,
                                              double target_range, OffsetPurpose purpose) {
  if (jam.antennas < 2) {
    throw std::invalid_argument("frequency-offset bounds need at least two jammer antennas");
  }
  const double p1 = jam.antennas - 1;
  const double coherence = 1.0 / (p1 * cfg.pulse_width);
  switch (purpose) {
    case OffsetPurpose::kFalseTargets:
      return {coherence, cfg.subarray_freq_increment / p1, true, false};
    case OffsetPurpose::kDeception:
      return {0.0, coherence, false, true};
    case OffsetPurpose::kScatteredWave:
      break;
  }
  const double zeta = jam.kind == JammerKind::kSameFrequency
                          ? zeta_same_frequency(jam, cfg, target_range)
                          : zeta_alternating_frequency(jam, cfg, target_range);
  return {0.0, zeta, true, false};
}

/// Space-time snapshot of the jamming scattered from one ground patch.
inline ComplexVector jamming_snapshot(const ArrayConfig& cfg, const Angles& look,
                                      const Angles& scatterer, double target_range,
                                      const JammerModel& jam, const ModulationMatrix& m) {
  const auto f = space_time_frequencies(cfg, scatterer, target_range);
  const double gain = transmit_gain(cfg, look, scatterer, cfg.partition());
  // Integer pulse indices make the offset periodic; reducing it keeps k * f_D exact.
  const double doppler =
      f.doppler + std::remainder(jamming_doppler_offset(jam, cfg, target_range), 1.0);
  return gain * space_time_snapshot(jammed_transmit_steering(m, jam, subarray_vector(cfg, f)),
                                    receive_steering(cfg, f), doppler_steering(cfg, doppler));
}

}  // namespace fdasim
