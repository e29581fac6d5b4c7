// Array configuration, normalized frequencies and steering vectors.
//
// Space-time vectors are ordered pulse-major: index = (k * N + n) * S + s,
// i.e. the Kronecker product doppler (K) x receive (N) x transmit (S).
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "fdasim/geometry.hpp"

namespace fdasim {

inline constexpr double kSpeedOfLight = 3.0e8;

using cdouble = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class Partition { kPhasedArray, kFdaMimo };

struct ArrayConfig {
  int tx_elements = 8;        // M
  int rx_elements = 8;        // N
  int subarrays = 1;          // S
  int pulses = 8;             // K
  double element_spacing = 0.015;         // d [m]
  double carrier = 10e9;                  // f0 [Hz]
  double subarray_freq_increment = 10e6;  // delta f [Hz]
  double pri = 100e-6;                    // T [s]
  double pulse_width = 10e-6;             // T_p [s]
  double platform_velocity = 75.0;        // v_a [m/s]
  // Inter-subarray phase-centre spacing in element spacings.
  int subarray_phase_spacing = 1;

  int elements_per_subarray() const { return tx_elements / subarrays; }
  double wavelength() const { return kSpeedOfLight / carrier; }
  double spacing_ratio() const { return element_spacing / wavelength(); }
  double beta() const { return 2.0 * platform_velocity * pri / element_spacing; }
  int dimension() const { return subarrays * rx_elements * pulses; }
  Partition partition() const {
    return subarrays == 1 ? Partition::kPhasedArray : Partition::kFdaMimo;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (tx_elements < 1 || rx_elements < 1 || pulses < 1 || subarrays < 1) {
      fail("element, pulse and subarray counts must be positive");
    }
    if (tx_elements % subarrays != 0) fail("subarray count must divide the transmit elements");
    if (subarray_phase_spacing < 0) fail("subarray phase spacing must be non-negative");
    if (!(element_spacing > 0.0) || !(carrier > 0.0) || !(pri > 0.0) ||
        !(pulse_width > 0.0)) {
      fail("spacing, carrier, PRI and pulse width must be positive");
    }
    if (!(subarray_freq_increment >= 0.0)) fail("frequency increment must be non-negative");
  }
};

struct SpaceTimeFrequencies {
  double spatial = 0.0;  // phi_s
  double doppler = 0.0;  // phi_D
  double range = 0.0;    // phi_R
};

inline SpaceTimeFrequencies space_time_frequencies(const ArrayConfig& cfg,
                                                   const Angles& dir, double range) {
  SpaceTimeFrequencies f;
  f.spatial = cfg.spacing_ratio() * direction_cosine(dir);
  f.doppler = cfg.beta() * f.spatial;
  f.range = 2.0 * cfg.subarray_freq_increment * range / kSpeedOfLight;
  return f;
}

/// exp(j 2 pi cycles), with the integer part removed first so that large
/// phase counts keep full precision.
inline cdouble unit_phasor(double cycles) {
  return std::polar(1.0, kTwoPi * std::remainder(cycles, 1.0));
}

inline ComplexVector receive_steering(const ArrayConfig& cfg, const SpaceTimeFrequencies& f) {
  ComplexVector a(cfg.rx_elements);
  for (int n = 0; n < cfg.rx_elements; ++n) a(n) = unit_phasor(n * f.spatial);
  return a;
}

inline ComplexVector doppler_steering(const ArrayConfig& cfg, double doppler) {
  ComplexVector d(cfg.pulses);
  for (int k = 0; k < cfg.pulses; ++k) d(k) = unit_phasor(k * doppler);
  return d;
}

inline ComplexVector doppler_steering(const ArrayConfig& cfg, const SpaceTimeFrequencies& f) {
  return doppler_steering(cfg, f.doppler);
}

/// Transmit subarray vector; all-ones of length 1 for the phased array.
inline ComplexVector subarray_vector(const ArrayConfig& cfg, const SpaceTimeFrequencies& f) {
  ComplexVector p(cfg.subarrays);
  // Reduce the spatial and range terms separately: phi_R is large.
  for (int s = 0; s < cfg.subarrays; ++s) {
    p(s) = unit_phasor(std::remainder(s * cfg.subarray_phase_spacing * f.spatial, 1.0) -
                       std::remainder(s * f.range, 1.0));
  }
  return p;
}

/// sin(L pi x) / sin(pi x), continuous at integer x.
inline double dirichlet(int length, double x) {
  const double den = std::sin(kPi * x);
  if (std::abs(den) < 1e-12) {
    return length * std::cos(length * kPi * x) / std::cos(kPi * x);
  }
  return std::sin(length * kPi * x) / den;
}

/// Transmit beampattern toward `scatterer` when the beam looks at `look`.
/// The coherent aperture is the whole array (PA) or one subarray (FDA-MIMO).
inline double transmit_gain(const ArrayConfig& cfg, const Angles& look, const Angles& scatterer,
                            Partition mode) {
  const int length =
      mode == Partition::kPhasedArray ? cfg.tx_elements : cfg.elements_per_subarray();
  const double du = direction_cosine(look) - direction_cosine(scatterer);
  return dirichlet(length, cfg.spacing_ratio() * du);
}

/// Kronecker product doppler x receive x transmit.
inline ComplexVector space_time_snapshot(const ComplexVector& transmit,
                                         const ComplexVector& receive,
                                         const ComplexVector& doppler) {
  const Eigen::Index S = transmit.size(), N = receive.size(), K = doppler.size();
  ComplexVector v(S * N * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index n = 0; n < N; ++n) {
      const cdouble dk = doppler(k) * receive(n);
      for (Eigen::Index s = 0; s < S; ++s) v((k * N + n) * S + s) = dk * transmit(s);
    }
  }
  return v;
}

inline ComplexVector clutter_snapshot(const ArrayConfig& cfg, const Angles& look,
                                      const Angles& scatterer, double range) {
  const auto f = space_time_frequencies(cfg, scatterer, range);
  const double gain = transmit_gain(cfg, look, scatterer, cfg.partition());
  return gain * space_time_snapshot(subarray_vector(cfg, f), receive_steering(cfg, f),
                                    doppler_steering(cfg, f));
}

}  // namespace fdasim
