#pragma once

// Seeded generators for test measures and unitaries with prescribed spectra.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ucontract/circle_measure.hpp"
#include "ucontract/matrix_model.hpp"
#include "ucontract/rng.hpp"

namespace ucontract {

inline double uniform_angle(Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  return Angle::normalize(u(rng)).value();
}

/// 1..max_atoms atoms at uniform angles; equal weights or uniform random
/// weights renormalized.
inline CircleMeasure random_measure(Rng& rng, std::size_t max_atoms, bool equal_weight) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  const std::size_t n = count(rng);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({uniform_angle(rng), equal_weight ? 1.0 : w(rng)});
  return CircleMeasure::normalized(std::move(atoms));
}

/// Exactly n uniform-weight atoms (distinct with probability one).
inline CircleMeasure random_uniform_measure(Rng& rng, std::size_t n) {
  std::vector<double> angles(n);
  for (auto& a : angles) a = uniform_angle(rng);
  return CircleMeasure::uniform(angles);
}

/// Atoms whose weights are integer multiples of 1/denominator.
inline CircleMeasure random_lattice_measure(Rng& rng, std::size_t max_atoms, std::size_t denominator) {
  std::uniform_int_distribution<std::size_t> count(1, std::min(max_atoms, denominator));
  const std::size_t n = count(rng);
  std::vector<std::size_t> units(n, 1);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t r = n; r < denominator; ++r) ++units[pick(rng)];
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    atoms.push_back({uniform_angle(rng), static_cast<double>(units[i]) / static_cast<double>(denominator)});
  }
  return CircleMeasure(std::move(atoms));
}

/// W diag(e^{2 pi i angles}) W^* with W Haar from the given seed.
inline UnitaryMatrix unitary_with_spectrum(std::span<const double> angles, std::uint64_t seed) {
  const auto w = sample_haar_unitary(angles.size(), seed);
  const auto d = UnitaryMatrix::diagonal(angles);
  Matrix m = w.matrix() * d.matrix() * w.matrix().adjoint();
  return UnitaryMatrix::checked(std::move(m));
}

/// Rotated version of the N-point quantile spectrum of mu.
inline UnitaryMatrix unitary_with_measure(const CircleMeasure& mu, std::size_t n, std::uint64_t seed) {
  const auto angles = quantile_angles(mu, n);
  return unitary_with_spectrum(angles, seed);
}

}  // namespace ucontract
