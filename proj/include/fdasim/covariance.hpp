// Interference covariance assembly and eigen-spectrum analysis.
#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fdasim/arrays.hpp"
#include "fdasim/geometry.hpp"
#include "fdasim/jammer.hpp"

namespace fdasim {

using RealVector = Eigen::VectorXd;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Columns are the clutter snapshots of the ring's patches.
inline ComplexMatrix clutter_snapshot_matrix(const ScattererRing& ring, const ArrayConfig& cfg,
                                             const Angles& look, double target_range) {
  ComplexMatrix v(cfg.dimension(), static_cast<Eigen::Index>(ring.size()));
  for (std::size_t i = 0; i < ring.size(); ++i) {
    v.col(static_cast<Eigen::Index>(i)) =
        clutter_snapshot(cfg, look, ring.points[i].direction, target_range);
  }
  return v;
}

inline ComplexMatrix jamming_snapshot_matrix(const ScattererRing& ring, const ArrayConfig& cfg,
                                             const Angles& look, double target_range,
                                             const JammerModel& jam,
                                             const ModulationMatrix& m) {
  ComplexMatrix v(cfg.dimension(), static_cast<Eigen::Index>(ring.size()));
  for (std::size_t i = 0; i < ring.size(); ++i) {
    v.col(static_cast<Eigen::Index>(i)) =
        jamming_snapshot(cfg, look, ring.points[i].direction, target_range, jam, m);
  }
  return v;
}

/// Equal per-patch power such that trace(V diag(w) V^H) / dim equals
/// ratio * noise_power. `reference` holds the snapshots that set the scale.
inline RealVector uniform_powers(const ComplexMatrix& reference, double ratio,
                                 double noise_power) {
  const double energy = reference.squaredNorm();
  if (!(energy > 0.0)) {
    throw std::invalid_argument("reference snapshots carry no energy");
  }
  const double per_patch =
      ratio * noise_power * static_cast<double>(reference.rows()) / energy;
  return RealVector::Constant(reference.cols(), per_patch);
}

/// V diag(powers) V^H, made exactly Hermitian.
inline ComplexMatrix assemble_covariance(const ComplexMatrix& snapshots,
                                         const RealVector& powers) {
  if (snapshots.cols() != powers.size()) {
    throw std::invalid_argument("one power per snapshot is required");
  }
  if ((powers.array() < 0.0).any()) throw std::invalid_argument("powers must be non-negative");
  const ComplexMatrix weighted = snapshots * powers.cwiseSqrt().asDiagonal();
  ComplexMatrix r = weighted * weighted.adjoint();
  r = 0.5 * (r + r.adjoint()).eval();
  return r;
}

inline ComplexMatrix total_covariance(const ComplexMatrix& clutter, const ComplexMatrix& jamming,
                                      double noise_power) {
  ComplexMatrix r = clutter + jamming;
  r.diagonal().array() += noise_power;
  return r;
}

inline double max_asymmetry(const ComplexMatrix& r) { return (r - r.adjoint()).cwiseAbs().maxCoeff(); }

/// Eigenvalues in descending order.
inline RealVector eigen_spectrum(const ComplexMatrix& r) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(r, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen-decomposition failed");
  }
  return solver.eigenvalues().reverse();
}

/// Descending eigenvalues in dB relative to the noise power. Values at or
/// below zero are clamped to a tiny positive floor before conversion.
inline RealVector eigen_spectrum_db(const RealVector& eigenvalues, double noise_power) {
  RealVector db(eigenvalues.size());
  const double floor = 1e-300;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    db(i) = linear_to_db(std::max(eigenvalues(i), floor) / noise_power);
  }
  return db;
}

/// Number of eigenvalues of a noise-inclusive covariance lying more than
/// `threshold_db` above the noise power.
inline int clutter_rank(const RealVector& eigenvalues, double noise_power,
                        double threshold_db = 3.0) {
  const double limit = noise_power * db_to_linear(threshold_db);
  int count = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) count += eigenvalues(i) > limit;
  return count;
}

/// Number of eigenvalues before the largest drop between consecutive
/// descending eigenvalues (in dB).
inline int knee_index(const RealVector& spectrum_db) {
  int best = 0;
  double drop = -1.0;
  for (Eigen::Index i = 0; i + 1 < spectrum_db.size(); ++i) {
    const double d = spectrum_db(i) - spectrum_db(i + 1);
    if (d > drop) {
      drop = d;
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

}  // namespace fdasim
