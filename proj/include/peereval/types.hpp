#pragma once

#include <cstddef>
#include <vector>

#include "peereval/errors.hpp"

namespace peereval {

// Absolute tolerance for sum-to-one checks on share vectors.
inline constexpr double kShareSumTolerance = 1e-12;
// Relative tolerance for the reciprocity law b_ij * b_ji = 1.
inline constexpr double kReciprocityTolerance = 1e-9;

/// Nonnegative shares summing to one. Holds both the true contribution
/// vector and the perceived contributions a mechanism outputs.
class ContributionVector {
 public:
  explicit ContributionVector(std::vector<double> values);

  /// Rescales a nonnegative vector with positive sum onto the simplex.
  static ContributionVector normalized(std::vector<double> raw);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const ContributionVector& other) const = default;

 private:
  std::vector<double> values_;
};

/// Square matrix of raw peer evaluations. Entry (i, j) is the score student j
/// reported for student i: column j is everything j reported, row i is
/// everything reported about i. The per-column `submitted` flag records
/// whether column j came from the student or was imputed.
class EvaluationMatrix {
 public:
  explicit EvaluationMatrix(std::size_t n);
  static EvaluationMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }

  bool submitted(std::size_t j) const { return submitted_[j]; }
  void set_submitted(std::size_t j, bool value) { submitted_[j] = value; }

  std::vector<double> row(std::size_t i) const;
  std::vector<double> column(std::size_t j) const;
  double column_sum(std::size_t j) const;

  bool operator==(const EvaluationMatrix& other) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
  std::vector<bool> submitted_;
};

/// Instructor trust grades for the written reports, one per student.
/// Scale-free: the weighted ratio construction is homogeneous in these.
class InstructorWeights {
 public:
  explicit InstructorWeights(std::vector<double> values);
  static InstructorWeights all_ones(std::size_t n);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const InstructorWeights& other) const = default;

 private:
  std::vector<double> values_;
};

/// One pairwise contribution ratio. A ratio is a positive finite value, zero
/// (the reciprocal of an infinite ratio), positive infinity, or undefined
/// (no evaluator could compare the pair). Encoded as a double where NaN
/// marks the undefined state.
class ExtendedRatio {
 public:
  ExtendedRatio();  // undefined

  static ExtendedRatio finite(double value);  // requires value > 0
  static ExtendedRatio zero() noexcept;
  static ExtendedRatio infinite() noexcept;
  static ExtendedRatio undefined() noexcept;
  /// Classifies numerator/denominator per the ratio case table:
  /// den > 0 -> num/den (zero allowed), num > 0 with den = 0 -> infinity,
  /// num = den = 0 -> undefined.
  static ExtendedRatio from_fraction(double numerator, double denominator);

  bool is_undefined() const noexcept;
  bool is_infinite() const noexcept;
  bool is_zero() const noexcept { return raw_ == 0.0; }
  /// Defined and not infinite; zero counts as finite.
  bool is_finite() const noexcept { return !is_undefined() && !is_infinite(); }

  /// Numeric value; requires is_finite().
  double value() const;

  ExtendedRatio reciprocal() const noexcept;

  bool operator==(const ExtendedRatio& other) const noexcept;

 private:
  explicit ExtendedRatio(double raw) noexcept : raw_(raw) {}
  double raw_;
};

/// Square matrix of pairwise contribution ratios b_ij (contribution of i
/// relative to j according to the rest of the team). Diagonal is one.
class AuxiliaryMatrix {
 public:
  explicit AuxiliaryMatrix(std::size_t n);
  /// Builds from plain doubles: positive -> finite, 0 -> zero,
  /// +inf -> infinite, NaN -> undefined. Test and CLI convenience.
  static AuxiliaryMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  const ExtendedRatio& at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, ExtendedRatio value) { entries_[i * n_ + j] = value; }

  /// True when every entry of column j is defined and not infinite.
  bool column_all_finite(std::size_t j) const;

 private:
  std::size_t n_ = 0;
  std::vector<ExtendedRatio> entries_;
};

}  // namespace peereval
