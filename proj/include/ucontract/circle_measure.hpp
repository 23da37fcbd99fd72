#pragma once

// Finitely supported probability measures on the unit circle.
//
// Points of the circle are stored in turn coordinates: the angle x stands for
// e^{2 pi i x}, with x reduced into the half-open window (-1/2, 1/2].

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ucontract/error.hpp"

namespace ucontract {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angles closer than this (in turns, circularly) are merged into one atom.
inline constexpr double kMergeTolerance = 1e-12;

/// Tolerated deviation of the total mass from 1 before renormalization.
inline constexpr double kMassTolerance = 1e-9;

/// e^{2 pi i x}. Quarter turns are exact so that symmetric atoms cancel
/// exactly; other arguments are reduced to (-1/2, 1/2] first.
inline Complex unit_phase(double x) {
  const double r = x - std::round(x);
  const double q = 4.0 * r;
  if (q == std::round(q)) {
    switch (static_cast<int>(q)) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case -1: return {0.0, -1.0};
      default: return {-1.0, 0.0};
    }
  }
  return std::polar(1.0, kTwoPi * r);
}

class Angle {
 public:
  constexpr Angle() = default;

  /// Reduces any finite real modulo 1 into (-1/2, 1/2].
  static Angle normalize(double x) {
    detail::require(std::isfinite(x), "angle must be finite");
    // x - round(x) is exact and lies in [-1/2, 1/2].
    const double r = x - std::round(x);
    return Angle(r == -0.5 ? 0.5 : r);
  }

  constexpr double value() const noexcept { return value_; }

  Complex point() const noexcept { return unit_phase(value_); }

  friend constexpr auto operator<=>(Angle, Angle) = default;

 private:
  constexpr explicit Angle(double v) : value_(v) {}
  double value_ = 0.0;
};

inline Angle normalize_angle(double x) { return Angle::normalize(x); }

/// Shortest signed turn distance from a to b, in (-1/2, 1/2].
inline double turn_difference(double a, double b) { return Angle::normalize(b - a).value(); }

/// Squared chordal distance |e^{2 pi i a} - e^{2 pi i b}|^2.
inline double chordal_cost(double a, double b) {
  const double s = 2.0 * std::sin(std::numbers::pi * (a - b));
  return s * s;
}

inline double chordal_distance(double a, double b) {
  return 2.0 * std::abs(std::sin(std::numbers::pi * (a - b)));
}

/// Angle of a nonzero complex number in turns.
inline Angle angle_of(Complex z) { return Angle::normalize(std::arg(z) / kTwoPi); }

struct Atom {
  double angle = 0.0;
  double weight = 0.0;
};

/// A circle map in turn coordinates.
using CircleMap = std::function<double(double)>;

class MomentSequence {
 public:
  MomentSequence(std::vector<Complex> values) : m_(std::move(values)) {
    detail::require(m_.size() >= 2, "moment sequence needs order >= 1");
    m_[0] = Complex(1.0, 0.0);
  }

  std::size_t order() const noexcept { return m_.size() - 1; }
  Complex operator[](std::size_t k) const { return m_.at(k); }
  std::span<const Complex> values() const noexcept { return m_; }

  /// True when every |m_k| <= 1 + tol.
  bool bounded(double tol = 1e-12) const {
    return std::all_of(m_.begin(), m_.end(), [tol](Complex z) { return std::abs(z) <= 1.0 + tol; });
  }

 private:
  std::vector<Complex> m_;
};

class CircleMeasure {
 public:
  /// Builds a measure from raw atoms: angles are normalized, zero weights
  /// dropped, atoms sorted and coincident angles merged. The total mass must
  /// be 1 within kMassTolerance; it is then rescaled to 1.
  explicit CircleMeasure(std::vector<Atom> atoms) : atoms_(canonicalize(std::move(atoms), false)) {}

  /// Same as the constructor but rescales any positive total mass.
  static CircleMeasure normalized(std::vector<Atom> atoms) {
    return CircleMeasure(canonicalize(std::move(atoms), true), Canonical{});
  }

  /// Equal-weight measure on the given angles (repeats allowed).
  static CircleMeasure uniform(std::span<const double> angles) {
    detail::require(!angles.empty(), "uniform measure needs at least one angle");
    std::vector<Atom> atoms;
    atoms.reserve(angles.size());
    const double w = 1.0 / static_cast<double>(angles.size());
    for (double a : angles) atoms.push_back({a, w});
    return CircleMeasure(std::move(atoms));
  }

  static CircleMeasure dirac(double angle) { return CircleMeasure({{angle, 1.0}}); }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// All weights equal within tol.
  bool equal_weight(double tol = 1e-12) const {
    const double w = 1.0 / static_cast<double>(atoms_.size());
    return std::all_of(atoms_.begin(), atoms_.end(),
                       [&](const Atom& a) { return std::abs(a.weight - w) <= tol; });
  }

  std::vector<double> angles() const {
    std::vector<double> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back(a.angle);
    return out;
  }

  /// Rotation by a fixed number of turns.
  CircleMeasure rotated(double by) const {
    std::vector<Atom> out(atoms_.begin(), atoms_.end());
    for (auto& a : out) a.angle += by;
    return CircleMeasure(std::move(out));
  }

  /// Exact structural equality of atoms within the given tolerances.
  bool approx_equal(const CircleMeasure& other, double angle_tol, double weight_tol) const {
    if (size() != other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (std::abs(turn_difference(atoms_[i].angle, other.atoms_[i].angle)) > angle_tol) return false;
      if (std::abs(atoms_[i].weight - other.atoms_[i].weight) > weight_tol) return false;
    }
    return true;
  }

 private:
  struct Canonical {};
  CircleMeasure(std::vector<Atom> atoms, Canonical) : atoms_(std::move(atoms)) {}

  static std::vector<Atom> canonicalize(std::vector<Atom> atoms, bool rescale) {
    std::vector<Atom> kept;
    kept.reserve(atoms.size());
    double total = 0.0;
    for (const auto& a : atoms) {
      detail::require(std::isfinite(a.weight) && a.weight >= 0.0,
                      "atom weights must be finite and nonnegative");
      if (a.weight == 0.0) continue;
      kept.push_back({Angle::normalize(a.angle).value(), a.weight});
      total += a.weight;
    }
    detail::require(!kept.empty(), "measure needs at least one atom of positive weight");
    if (!rescale) {
      detail::require(std::abs(total - 1.0) <= kMassTolerance,
                      "atom weights must sum to 1 (got " + std::to_string(total) + ")");
    }
    // Already-normalized input keeps its exact weights so that
    // serialization round-trips bit for bit.
    if (std::abs(total - 1.0) > 1e-14) {
      for (auto& a : kept) a.weight /= total;
    }

    std::stable_sort(kept.begin(), kept.end(),
                     [](const Atom& x, const Atom& y) { return x.angle < y.angle; });
    std::vector<Atom> merged;
    merged.reserve(kept.size());
    for (const auto& a : kept) {
      if (!merged.empty() && a.angle - merged.back().angle < kMergeTolerance) {
        merged.back().weight += a.weight;
      } else {
        merged.push_back(a);
      }
    }
    // -1/2 is excluded from the window, so the wrap seam sits between the
    // last atom and 1/2 + first atom.
    if (merged.size() > 1 && merged.front().angle + 1.0 - merged.back().angle < kMergeTolerance) {
      merged.back().weight += merged.front().weight;
      merged.erase(merged.begin());
    }
    return merged;
  }

  std::vector<Atom> atoms_;
};

/// m_k = sum_i w_i exp(2 pi i k theta_i), k = 0..order.
inline MomentSequence moments(const CircleMeasure& mu, std::size_t order) {
  detail::require(order >= 1, "moment order must be >= 1");
  std::vector<Complex> m(order + 1, Complex(0.0, 0.0));
  for (const auto& a : mu.atoms()) {
    for (std::size_t k = 1; k <= order; ++k) {
      // Reduce k*theta before the trig call so large k keeps full precision.
      m[k] += a.weight * unit_phase(static_cast<double>(k) * a.angle);
    }
  }
  return MomentSequence(std::move(m));
}

/// n equal atoms at the n-th roots of unity.
inline CircleMeasure haar_discretization(std::size_t n) {
  detail::require(n >= 1, "Haar discretization needs n >= 1");
  std::vector<Atom> atoms;
  atoms.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    atoms.push_back({static_cast<double>(k) / static_cast<double>(n), w});
  }
  return CircleMeasure(std::move(atoms));
}

inline CircleMeasure pushforward(const CircleMeasure& mu, const CircleMap& map) {
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const auto& a : mu.atoms()) out.push_back({map(a.angle), a.weight});
  return CircleMeasure::normalized(std::move(out));
}

/// The n angles at cumulative-mass levels (k + 1/2)/n, walking from -1/2.
/// Unmerged, sorted; the building block of quantile_sample and of the
/// equal-weight transport fast paths.
inline std::vector<double> quantile_angles(const CircleMeasure& mu, std::size_t n) {
  detail::require(n >= 1, "quantile sample size must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  const auto atoms = mu.atoms();
  std::size_t i = 0;
  double cumulative = atoms[0].weight;
  for (std::size_t k = 0; k < n; ++k) {
    const double level = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    while (cumulative < level && i + 1 < atoms.size()) {
      ++i;
      cumulative += atoms[i].weight;
    }
    out.push_back(atoms[i].angle);
  }
  return out;
}

inline CircleMeasure quantile_sample(const CircleMeasure& mu, std::size_t n) {
  const auto angles = quantile_angles(mu, n);
  return CircleMeasure::uniform(angles);
}

/// Mixture sum_j c_j mu_j with c_j >= 0 summing to 1.
inline CircleMeasure mixture(std::span<const CircleMeasure> parts, std::span<const double> coeffs) {
  detail::require(parts.size() == coeffs.size() && !parts.empty(), "mixture: size mismatch");
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    for (const auto& a : parts[j].atoms()) atoms.push_back({a.angle, coeffs[j] * a.weight});
  }
  return CircleMeasure(std::move(atoms));
}

}  // namespace ucontract
