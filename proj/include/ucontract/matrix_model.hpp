#pragma once

// Matrix-scale stand-ins for unitaries in a tracial algebra: Haar sampling,
// spectral decomposition of unitary matrices, functional calculus, the
// principal logarithm generator and the normalized-trace 2-norm.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ucontract/circle_measure.hpp"
#include "ucontract/error.hpp"
#include "ucontract/rng.hpp"

namespace ucontract {

using Matrix = Eigen::MatrixXcd;

inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kReunitarizeThreshold = 1e-12;

/// max |A*A - I|.
inline double unitarity_defect(const Matrix& a) {
  Matrix g = a.adjoint() * a;
  g.diagonal().array() -= Complex(1.0, 0.0);
  return g.cwiseAbs().maxCoeff();
}

/// Newton-Schulz steps toward the unitary polar factor; quadratic near U(N).
inline Matrix reunitarize(Matrix a, int max_steps = 6) {
  const auto n = a.rows();
  for (int step = 0; step < max_steps; ++step) {
    Matrix g = a.adjoint() * a;
    Matrix corr = -g;
    corr.diagonal().array() += Complex(3.0, 0.0);
    a = 0.5 * (a * corr);
    g = a.adjoint() * a;
    g.diagonal().array() -= Complex(1.0, 0.0);
    if (g.cwiseAbs().maxCoeff() <= 1e-15 * static_cast<double>(n)) break;
  }
  return a;
}

class UnitaryMatrix {
 public:
  /// Validates a candidate unitary. Drift above 1e-12 is projected away;
  /// drift that cannot be repaired below 1e-10 is a NumericalError.
  static UnitaryMatrix checked(Matrix m) {
    detail::require(m.rows() == m.cols() && m.rows() > 0, "unitary must be square and nonempty");
    double defect = unitarity_defect(m);
    if (defect > kReunitarizeThreshold && defect < 0.5) {
      m = reunitarize(std::move(m));
      defect = unitarity_defect(m);
    }
    if (!(defect <= kUnitaryTolerance)) {
      throw NumericalError("matrix is not unitary: max|U*U - I| = " + std::to_string(defect));
    }
    return UnitaryMatrix(std::move(m));
  }

  static UnitaryMatrix identity(std::size_t n) {
    return UnitaryMatrix(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  static UnitaryMatrix scalar(std::size_t n, double angle) {
    return UnitaryMatrix(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) *
                         unit_phase(angle));
  }

  /// diag(e^{2 pi i angle_k}).
  static UnitaryMatrix diagonal(std::span<const double> angles) {
    detail::require(!angles.empty(), "diagonal unitary needs at least one phase");
    const auto n = static_cast<Eigen::Index>(angles.size());
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = unit_phase(angles[static_cast<std::size_t>(i)]);
    return UnitaryMatrix(std::move(m));
  }

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }

  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    detail::require(a.dim() == b.dim(), "unitary dimensions differ");
    return checked(a.m_ * b.m_);
  }

 private:
  explicit UnitaryMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// sqrt(tau(A* A)) with tau the normalized trace.
inline double two_norm(const Matrix& a) {
  detail::require(a.rows() == a.cols() && a.rows() > 0, "two_norm needs a square matrix");
  return a.norm() / std::sqrt(static_cast<double>(a.rows()));
}

/// two_norm(U - I).
inline double distance_to_identity(const UnitaryMatrix& u) {
  Matrix d = u.matrix();
  d.diagonal().array() -= Complex(1.0, 0.0);
  return two_norm(d);
}

inline Complex normalized_trace(const Matrix& a) { return a.trace() / static_cast<double>(a.rows()); }

/// Haar-distributed unitary: QR of a standard complex Gaussian matrix, with
/// the phases of diag(R) moved into Q. Deterministic per (n, seed).
inline UnitaryMatrix sample_haar_unitary(std::size_t n, std::uint64_t seed) {
  detail::require(n >= 1, "Haar sample needs n >= 1");
  auto rng = make_rng(seed, {static_cast<std::uint64_t>(StreamOp::haar), n});
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0 ? d / mag : Complex(1.0, 0.0));
  }
  return UnitaryMatrix::checked(std::move(q));
}

/// Eigenvectors (orthonormal columns) and eigen-angles in turns of a unitary.
struct UnitaryEigen {
  Matrix vectors;
  std::vector<double> angles;
};

namespace detail {

/// Gap in the folded Hermitian spectrum below which eigenvectors are
/// resolved jointly on their common invariant subspace.
inline constexpr double kClusterGap = 1e-4;

inline bool is_diagonal(const Matrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j && a(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Spectral decomposition of a unitary (normal) matrix.
///
/// The Hermitian part Re(rU) is diagonalized first; its eigenvalues fold the
/// circle onto [-1, 1], so eigenvalues of U symmetric about the fold axis
/// become (near-)degenerate. Runs of close folded eigenvalues are split
/// again by a Schur decomposition of U compressed to their invariant
/// subspace. The fold axis r is turned perpendicular to tau(U) so that
/// spectra concentrated near one point stay unfolded.
inline UnitaryEigen unitary_eigen(const UnitaryMatrix& unitary) {
  const Matrix& u = unitary.matrix();
  const Eigen::Index n = u.rows();
  UnitaryEigen out;
  out.angles.resize(static_cast<std::size_t>(n));

  if (detail::is_diagonal(u)) {
    out.vectors = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) out.angles[static_cast<std::size_t>(i)] = angle_of(u(i, i)).value();
    return out;
  }

  const Complex m1 = normalized_trace(u);
  const Complex rot =
      std::abs(m1) > 1e-3 ? std::polar(1.0, std::numbers::pi / 2 - std::arg(m1)) : Complex(1.0, 0.0);
  Matrix h = 0.5 * (rot * u + std::conj(rot) * u.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver failed (dimension " + std::to_string(n) + ")");
  }
  out.vectors = es.eigenvectors();
  const Eigen::VectorXd& folded = es.eigenvalues();

  std::vector<char> resolved(static_cast<std::size_t>(n), 0);
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && folded(end) - folded(end - 1) < detail::kClusterGap) ++end;
    const Eigen::Index k = end - start;
    if (k > 1) {
      Matrix basis = out.vectors.middleCols(start, k);
      Matrix block = basis.adjoint() * u * basis;
      Eigen::ComplexSchur<Matrix> schur(block);
      if (schur.info() != Eigen::Success) {
        throw NumericalError("Schur decomposition failed on a cluster of size " + std::to_string(k));
      }
      out.vectors.middleCols(start, k) = basis * schur.matrixU();
      for (Eigen::Index i = 0; i < k; ++i) {
        out.angles[static_cast<std::size_t>(start + i)] = angle_of(schur.matrixT()(i, i)).value();
        resolved[static_cast<std::size_t>(start + i)] = 1;
      }
    }
    start = end;
  }

  Matrix uw = u * out.vectors;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (resolved[static_cast<std::size_t>(i)]) continue;
    const Complex rayleigh = out.vectors.col(i).dot(uw.col(i));
    out.angles[static_cast<std::size_t>(i)] = angle_of(rayleigh).value();
  }
  return out;
}

/// Eigen-angles of U (unmerged, sorted).
inline std::vector<double> spectral_angles(const UnitaryMatrix& u) {
  auto angles = unitary_eigen(u).angles;
  std::sort(angles.begin(), angles.end());
  return angles;
}

/// Empirical spectral distribution: N equal atoms at the eigenvalues.
inline CircleMeasure spectral_measure(const UnitaryMatrix& u) {
  const auto angles = spectral_angles(u);
  return CircleMeasure::uniform(angles);
}

/// W diag(e^{2 pi i f(theta)}) W* for a precomputed decomposition.
inline UnitaryMatrix apply_map(const UnitaryEigen& eig, const CircleMap& map) {
  const auto n = eig.vectors.rows();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phases(i) = unit_phase(map(eig.angles[static_cast<std::size_t>(i)]));
  }
  Matrix scaled = eig.vectors * phases.asDiagonal();
  return UnitaryMatrix::checked(scaled * eig.vectors.adjoint());
}

inline UnitaryMatrix functional_calculus(const UnitaryMatrix& u, const CircleMap& map) {
  return apply_map(unitary_eigen(u), map);
}

/// Self-adjoint X with operator norm <= 1, kept together with its
/// eigendecomposition so that e^{i pi s X} is one matrix product.
class HermitianGenerator {
 public:
  static HermitianGenerator from_matrix(const Matrix& x) {
    detail::require(x.rows() == x.cols() && x.rows() > 0, "generator must be square and nonempty");
    Matrix sym = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
    std::vector<double> values(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return HermitianGenerator(std::move(sym), es.eigenvectors(), std::move(values));
  }

  static HermitianGenerator from_spectrum(Matrix vectors, std::vector<double> values) {
    Matrix x = vectors * Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))
                            .cast<Complex>()
                            .asDiagonal() *
               vectors.adjoint();
    x = 0.5 * (x + x.adjoint()).eval();
    return HermitianGenerator(std::move(x), std::move(vectors), std::move(values));
  }

  const Matrix& matrix() const noexcept { return x_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::span<const double> eigenvalues() const noexcept { return values_; }
  const Matrix& eigenvectors() const noexcept { return vectors_; }

  double operator_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// e^{i pi s X}.
  UnitaryMatrix exp_i_pi(double s) const {
    const auto n = vectors_.rows();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      phases(i) = std::polar(1.0, std::numbers::pi * s * values_[static_cast<std::size_t>(i)]);
    }
    Matrix scaled = vectors_ * phases.asDiagonal();
    return UnitaryMatrix::checked(scaled * vectors_.adjoint());
  }

 private:
  HermitianGenerator(Matrix x, Matrix vectors, std::vector<double> values)
      : x_(std::move(x)), vectors_(std::move(vectors)), values_(std::move(values)) {
    if (operator_norm() > 1.0 + 1e-10) {
      throw InvalidArgument("generator operator norm " + std::to_string(operator_norm()) + " exceeds 1");
    }
  }

  Matrix x_;
  Matrix vectors_;
  std::vector<double> values_;
};

/// X with e^{i pi X} = V, taking each eigen-angle theta in (-1/2, 1/2] to the
/// eigenvalue 2 theta in (-1, 1]; eigenvalue -1 of V maps to +1.
inline HermitianGenerator principal_log_generator(const UnitaryMatrix& v) {
  auto eig = unitary_eigen(v);
  std::vector<double> values(eig.angles.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = 2.0 * eig.angles[i];
  return HermitianGenerator::from_spectrum(std::move(eig.vectors), std::move(values));
}

/// tau(M^k) for k = 0..order by matrix powers, pairing P_a and P_b with
/// a + b = k so only ceil(order/2) - 1 products are formed.
inline MomentSequence trace_moments(const Matrix& m, std::size_t order) {
  detail::require(order >= 1, "moment order must be >= 1");
  const double n = static_cast<double>(m.rows());
  const std::size_t half = (order + 1) / 2;
  std::vector<Matrix> powers;
  powers.reserve(half);
  powers.push_back(m);
  while (powers.size() < half) powers.push_back(powers.back() * m);
  std::vector<Complex> out(order + 1);
  out[0] = Complex(1.0, 0.0);
  for (std::size_t k = 1; k <= order; ++k) {
    if (k <= half) {
      out[k] = powers[k - 1].trace() / n;
    } else {
      const std::size_t a = half;
      const std::size_t b = k - half;
      // tr(P_a P_b) = sum_ij P_a(i,j) P_b(j,i)
      out[k] = (powers[a - 1].cwiseProduct(powers[b - 1].transpose())).sum() / n;
    }
  }
  return MomentSequence(std::move(out));
}

}  // namespace ucontract
