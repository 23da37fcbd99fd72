#pragma once

// Free multiplicative convolution on the circle, computed two ways: a
// combinatorial moment recursion driven by the freeness relation, and a
// random-matrix sampler relying on asymptotic freeness of a Haar-rotated
// diagonal pair. Also a numerical freeness diagnostic for matrix pairs.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ucontract/circle_measure.hpp"
#include "ucontract/error.hpp"
#include "ucontract/matrix_model.hpp"
#include "ucontract/transport.hpp"

namespace ucontract {

inline constexpr std::size_t kDefaultMomentCap = 10;
inline constexpr std::size_t kDefaultWordBudget = 16;

enum class Side : std::uint8_t { left = 0, right = 1 };

struct Letter {
  Side side = Side::left;
  std::size_t power = 1;
  friend bool operator==(const Letter&, const Letter&) = default;
};

/// A word in powers of two elements, stored with strictly alternating sides.
class AlternatingWord {
 public:
  AlternatingWord() = default;

  /// Merges equal-side neighbours by adding powers. Zero powers are rejected.
  explicit AlternatingWord(const std::vector<Letter>& letters) {
    for (const auto& l : letters) {
      detail::require(l.power >= 1, "word powers must be >= 1");
      if (!letters_.empty() && letters_.back().side == l.side) {
        letters_.back().power += l.power;
      } else {
        letters_.push_back(l);
      }
    }
  }

  const std::vector<Letter>& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }

  std::string to_string() const {
    std::string s;
    for (const auto& l : letters_) {
      s += (l.side == Side::left ? "U" : "V");
      s += "^" + std::to_string(l.power) + " ";
    }
    if (!s.empty()) s.pop_back();
    return s;
  }

 private:
  std::vector<Letter> letters_;
};

struct FreenessDefect {
  double max_defect = 0.0;
  AlternatingWord worst_word;
  std::size_t max_length = 0;
  std::size_t words_checked = 0;
};

namespace detail {

/// Memoized evaluation of tau on words in two free unitaries with known
/// moments. tau is tracial, so words are reduced to a canonical cyclic
/// rotation before lookup.
class FreeWordEvaluator {
 public:
  FreeWordEvaluator(std::span<const Complex> left, std::span<const Complex> right)
      : left_(left.begin(), left.end()), right_(right.begin(), right.end()) {}

  /// tau of the word given as (side, power) letters; neighbours need not be
  /// merged yet.
  Complex evaluate(std::vector<Letter> word) {
    canonicalize(word);
    return evaluate_canonical(word);
  }

  std::size_t memo_size() const noexcept { return memo_.size(); }

 private:
  Complex moment(const Letter& l) const {
    const auto& m = l.side == Side::left ? left_ : right_;
    if (l.power >= m.size()) throw InvalidArgument("moment order too small for requested word");
    return m[l.power];
  }

  static void canonicalize(std::vector<Letter>& w) {
    std::vector<Letter> merged;
    merged.reserve(w.size());
    for (const auto& l : w) {
      if (!merged.empty() && merged.back().side == l.side) {
        merged.back().power += l.power;
      } else {
        merged.push_back(l);
      }
    }
    if (merged.size() > 1 && merged.front().side == merged.back().side) {
      merged.front().power += merged.back().power;
      merged.pop_back();
    }
    // Lexicographically least rotation (sizes are small).
    const std::size_t n = merged.size();
    std::size_t best = 0;
    auto less_at = [&](std::size_t a, std::size_t b) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto& x = merged[(a + i) % n];
        const auto& y = merged[(b + i) % n];
        if (x.side != y.side) return x.side < y.side;
        if (x.power != y.power) return x.power < y.power;
      }
      return false;
    };
    for (std::size_t r = 1; r < n; ++r) {
      if (less_at(r, best)) best = r;
    }
    w.clear();
    for (std::size_t i = 0; i < n; ++i) w.push_back(merged[(best + i) % n]);
  }

  static std::string key_of(const std::vector<Letter>& w) {
    std::string k;
    k.reserve(w.size() * 2);
    for (const auto& l : w) {
      k.push_back(static_cast<char>(l.side));
      k.push_back(static_cast<char>(l.power));
    }
    return k;
  }

  // Each letter x_i is (x_i - c_i) + c_i with c_i = tau(x_i). Expanding the
  // product of centered letters, whose trace vanishes by freeness, gives
  //   tau(x_1 ... x_L) = - sum_{S proper subset} prod_{i not in S} (-c_i) tau(x_S).
  // Dropping letters merges equal-side neighbours, so every x_S is shorter.
  Complex evaluate_canonical(const std::vector<Letter>& w) {
    if (w.empty()) return Complex(1.0, 0.0);
    if (w.size() == 1) return moment(w[0]);
    const auto key = key_of(w);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const std::size_t len = w.size();
    std::vector<Complex> neg_c(len);
    std::uint32_t zero_mask = 0;  // letters with c_i == 0 must be kept
    for (std::size_t i = 0; i < len; ++i) {
      neg_c[i] = -moment(w[i]);
      if (neg_c[i] == Complex(0.0, 0.0)) zero_mask |= (1u << i);
    }
    const std::uint32_t full = (1u << len) - 1u;
    Complex sum(0.0, 0.0);
    std::vector<Letter> sub;
    sub.reserve(len);
    for (std::uint32_t keep = 0; keep < full; ++keep) {
      if ((keep & zero_mask) != zero_mask) continue;
      Complex coef(1.0, 0.0);
      sub.clear();
      for (std::size_t i = 0; i < len; ++i) {
        if (keep & (1u << i)) {
          sub.push_back(w[i]);
        } else {
          coef *= neg_c[i];
        }
      }
      canonicalize(sub);
      sum += coef * evaluate_canonical(sub);
    }
    const Complex value = -sum;
    memo_.emplace(key, value);
    return value;
  }

  std::vector<Complex> left_;
  std::vector<Complex> right_;
  std::unordered_map<std::string, Complex> memo_;
};

inline Complex clean_zero(Complex z) {
  // -0.0 parts come from sign flips of exact zeros; report +0.0.
  return Complex(z.real() == 0.0 ? 0.0 : z.real(), z.imag() == 0.0 ? 0.0 : z.imag());
}

}  // namespace detail

/// m_k(mu boxtimes nu) for k = 0..order from the moments of mu and nu, by
/// the centering recursion on tau((uv)^k). Only m_1..m_order of each input
/// are used.
inline MomentSequence boxtimes_moments(const MomentSequence& mu_m, const MomentSequence& nu_m, std::size_t order,
                                       std::size_t cap = kDefaultMomentCap) {
  detail::require(order >= 1, "order must be >= 1");
  if (order > cap) {
    throw SizeError("boxtimes_moments order " + std::to_string(order) + " exceeds the cap " + std::to_string(cap) +
                    ": the recursion expands words of length 2k into 2^(2k) centered terms");
  }
  detail::require(mu_m.order() >= order && nu_m.order() >= order, "input moment order below requested order");
  auto a = mu_m.values().first(order + 1);
  auto b = nu_m.values().first(order + 1);
  // tau((uv)^k) is symmetric in u and v; evaluating in a fixed input order
  // makes swapped calls bitwise identical.
  const bool swap = std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end(), [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  if (swap) std::swap(a, b);
  detail::FreeWordEvaluator eval(a, b);
  std::vector<Complex> out(order + 1);
  out[0] = Complex(1.0, 0.0);
  for (std::size_t k = 1; k <= order; ++k) {
    std::vector<Letter> word;
    for (std::size_t i = 0; i < k; ++i) {
      word.push_back({Side::left, 1});
      word.push_back({Side::right, 1});
    }
    out[k] = detail::clean_zero(eval.evaluate(std::move(word)));
  }
  return MomentSequence(std::move(out));
}

/// tau of an arbitrary word in two free unitaries with the given moments.
inline Complex free_word_trace(const MomentSequence& left, const MomentSequence& right,
                               const std::vector<Letter>& word) {
  detail::FreeWordEvaluator eval(left.values(), right.values());
  return eval.evaluate(word);
}

namespace detail {

/// A * Q * B * Q^* with A, B diagonal. Scalar factors short-circuit so that
/// products of scalars stay exact.
inline Matrix free_product_matrix(std::span<const double> a_angles, std::span<const double> b_angles,
                                  const UnitaryMatrix& q) {
  const auto n = static_cast<Eigen::Index>(a_angles.size());
  auto is_scalar = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  Eigen::VectorXcd a(n), b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i) = unit_phase(a_angles[static_cast<std::size_t>(i)]);
    b(i) = unit_phase(b_angles[static_cast<std::size_t>(i)]);
  }
  Matrix c;
  if (is_scalar(b_angles)) {
    c = Matrix::Identity(n, n) * b(0);
  } else {
    Matrix qb = q.matrix() * b.asDiagonal();
    c = qb * q.matrix().adjoint();
  }
  return a.asDiagonal() * c;
}

}  // namespace detail

/// N-atom approximation of mu boxtimes nu: the spectrum of A Q B Q^* with
/// A, B diagonal carrying the N-point quantile spectra and Q Haar.
inline CircleMeasure boxtimes_sampled(const CircleMeasure& mu, const CircleMeasure& nu, std::size_t n,
                                      std::uint64_t seed) {
  detail::require(n >= 2, "boxtimes_sampled needs N >= 2");
  const auto a = quantile_angles(mu, n);
  const auto b = quantile_angles(nu, n);
  const auto q = sample_haar_unitary(n, seed);
  return spectral_measure(UnitaryMatrix::checked(detail::free_product_matrix(a, b, q)));
}

/// Moments of the same sampled product, read off traces of powers instead of
/// eigenvalues. Takes the conjugator so one Haar draw can serve many pairs.
inline MomentSequence boxtimes_sampled_moments(const CircleMeasure& mu, const CircleMeasure& nu,
                                               const UnitaryMatrix& conjugator, std::size_t order) {
  const std::size_t n = conjugator.dim();
  detail::require(n >= 2, "boxtimes_sampled needs N >= 2");
  const auto a = quantile_angles(mu, n);
  const auto b = quantile_angles(nu, n);
  return trace_moments(detail::free_product_matrix(a, b, conjugator), order);
}

/// Maximum |tau| over alternating words of centered powers of U and V, with
/// word length <= max_length and powers in 1..max_power.
inline FreenessDefect freeness_defect(const UnitaryMatrix& u, const UnitaryMatrix& v, std::size_t max_length,
                                      std::size_t max_power, std::size_t budget = kDefaultWordBudget) {
  detail::require(u.dim() == v.dim(), "freeness_defect: dimensions differ");
  detail::require(max_length >= 1 && max_power >= 1, "freeness_defect: caps must be >= 1");
  if (max_length * max_power > budget) {
    throw SizeError("freeness_defect: max_length * max_power = " + std::to_string(max_length * max_power) +
                    " exceeds the budget " + std::to_string(budget));
  }
  const auto n = static_cast<Eigen::Index>(u.dim());
  std::vector<Matrix> centered[2];
  for (int side = 0; side < 2; ++side) {
    const Matrix& base = side == 0 ? u.matrix() : v.matrix();
    Matrix p = base;
    for (std::size_t k = 1; k <= max_power; ++k) {
      if (k > 1) p = (p * base).eval();
      Matrix c = p;
      c.diagonal().array() -= normalized_trace(p);
      centered[side].push_back(std::move(c));
    }
  }

  FreenessDefect out;
  out.max_length = max_length;
  std::vector<Letter> word;
  // Depth-first over prefixes; the last letter is folded into a trace so
  // only prefixes of length < max_length are multiplied out.
  auto visit = [&](auto&& self, const Matrix& prefix, int last_side) -> void {
    const int side = 1 - last_side;
    for (std::size_t p = 1; p <= max_power; ++p) {
      const Matrix& letter = centered[side][p - 1];
      word.push_back({static_cast<Side>(side), p});
      const Complex tr = word.size() == 1 ? normalized_trace(letter)
                                          : (prefix.cwiseProduct(letter.transpose())).sum() / static_cast<double>(n);
      ++out.words_checked;
      if (std::abs(tr) > out.max_defect || out.words_checked == 1) {
        out.max_defect = std::abs(tr);
        out.worst_word = AlternatingWord(word);
      }
      if (word.size() < max_length) {
        if (word.size() == 1) {
          self(self, letter, side);
        } else {
          Matrix next = prefix * letter;
          self(self, next, side);
        }
      }
      word.pop_back();
    }
  };
  const Matrix empty;
  visit(visit, empty, 1);  // words starting with U
  visit(visit, empty, 0);  // words starting with V
  return out;
}

struct ContractionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  /// two_norm(A1 - A2) of the paired diagonal inputs.
  double paired_input_distance = 0.0;
};

/// Compares W2 of two sampled free products sharing one conjugated factor
/// with W2 of the inputs. The diagonal spectra of mu1 and mu2 are paired by
/// an optimal matching, so the two products differ by exactly that coupling.
inline ContractionCheck w2_contraction_check(const CircleMeasure& mu1, const CircleMeasure& mu2,
                                             const CircleMeasure& nu, std::size_t n, std::uint64_t seed) {
  detail::require(n >= 2, "w2_contraction_check needs N >= 2");
  const auto a1 = quantile_angles(mu1, n);
  const auto a2_sorted = quantile_angles(mu2, n);
  const auto match = detail::match_angles(a1, a2_sorted);
  std::vector<double> a2(n);
  for (std::size_t i = 0; i < n; ++i) a2[i] = a2_sorted[match.row_to_col[i]];
  const auto b = quantile_angles(nu, n);
  const auto q = sample_haar_unitary(n, seed);

  const auto p1 = UnitaryMatrix::checked(detail::free_product_matrix(a1, b, q));
  const auto p2 = UnitaryMatrix::checked(detail::free_product_matrix(a2, b, q));
  ContractionCheck out;
  out.lhs = w2_matching(spectral_angles(p1), spectral_angles(p2));
  out.rhs = w2_exact(mu1, mu2).distance;
  out.paired_input_distance = std::sqrt(std::max(0.0, match.cost));
  return out;
}

}  // namespace ucontract
