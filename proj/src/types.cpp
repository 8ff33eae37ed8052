#include "peereval/types.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

namespace peereval {

namespace {

std::string index_message(const char* what, std::size_t i) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s (index %zu)", what, i);
  return buf;
}

}  // namespace

ContributionVector::ContributionVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw PeerEvalError(ErrorCode::InvalidValue, "contribution vector is empty");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0)) {
      throw PeerEvalError(ErrorCode::InvalidValue,
                          index_message("contribution entry is negative or NaN", i));
    }
    sum += values_[i];
  }
  if (std::abs(sum - 1.0) > kShareSumTolerance) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "contribution entries sum to %.17g, expected 1", sum);
    throw PeerEvalError(ErrorCode::InvalidValue, buf);
  }
}

ContributionVector ContributionVector::normalized(std::vector<double> raw) {
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= 0.0)) {
      throw PeerEvalError(ErrorCode::InvalidValue,
                          index_message("share entry is negative or NaN", i));
    }
    sum += raw[i];
  }
  if (!(sum > 0.0)) {
    throw PeerEvalError(ErrorCode::InvalidValue, "cannot normalize an all-zero vector");
  }
  for (double& v : raw) v /= sum;
  // Second pass only if rounding left the sum outside tolerance.
  double check = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (std::abs(check - 1.0) > kShareSumTolerance) {
    for (double& v : raw) v /= check;
  }
  return ContributionVector(std::move(raw));
}

EvaluationMatrix::EvaluationMatrix(std::size_t n)
    : n_(n), entries_(n * n, 0.0), submitted_(n, true) {
  if (n == 0) {
    throw PeerEvalError(ErrorCode::InvalidValue, "evaluation matrix must not be empty");
  }
}

EvaluationMatrix EvaluationMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  EvaluationMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw PeerEvalError(ErrorCode::InvalidValue, "evaluation matrix must be square");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<double> EvaluationMatrix::row(std::size_t i) const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = (*this)(i, j);
  return out;
}

std::vector<double> EvaluationMatrix::column(std::size_t j) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)(i, j);
  return out;
}

double EvaluationMatrix::column_sum(std::size_t j) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) sum += (*this)(i, j);
  return sum;
}

InstructorWeights::InstructorWeights(std::vector<double> values)
    : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0)) {
      throw PeerEvalError(ErrorCode::InvalidValue,
                          index_message("instructor weight is negative or NaN", i));
    }
  }
}

InstructorWeights InstructorWeights::all_ones(std::size_t n) {
  return InstructorWeights(std::vector<double>(n, 1.0));
}

ExtendedRatio::ExtendedRatio() : raw_(std::numeric_limits<double>::quiet_NaN()) {}

ExtendedRatio ExtendedRatio::finite(double value) {
  if (!(value > 0.0) || std::isinf(value)) {
    throw PeerEvalError(ErrorCode::InvalidValue, "finite ratio must be a positive real");
  }
  return ExtendedRatio(value);
}

ExtendedRatio ExtendedRatio::zero() noexcept { return ExtendedRatio(0.0); }

ExtendedRatio ExtendedRatio::infinite() noexcept {
  return ExtendedRatio(std::numeric_limits<double>::infinity());
}

ExtendedRatio ExtendedRatio::undefined() noexcept {
  return ExtendedRatio(std::numeric_limits<double>::quiet_NaN());
}

ExtendedRatio ExtendedRatio::from_fraction(double numerator, double denominator) {
  if (!(numerator >= 0.0) || !(denominator >= 0.0)) {
    throw PeerEvalError(ErrorCode::InvalidValue, "ratio terms must be nonnegative");
  }
  if (denominator > 0.0) {
    return numerator > 0.0 ? finite(numerator / denominator) : zero();
  }
  return numerator > 0.0 ? infinite() : undefined();
}

bool ExtendedRatio::is_undefined() const noexcept { return std::isnan(raw_); }

bool ExtendedRatio::is_infinite() const noexcept { return std::isinf(raw_); }

double ExtendedRatio::value() const {
  if (!is_finite()) {
    throw PeerEvalError(ErrorCode::InvalidValue, "ratio has no finite value");
  }
  return raw_;
}

ExtendedRatio ExtendedRatio::reciprocal() const noexcept {
  if (is_undefined()) return undefined();
  if (is_infinite()) return zero();
  if (is_zero()) return infinite();
  return ExtendedRatio(1.0 / raw_);
}

bool ExtendedRatio::operator==(const ExtendedRatio& other) const noexcept {
  if (is_undefined() || other.is_undefined()) {
    return is_undefined() && other.is_undefined();
  }
  return raw_ == other.raw_;
}

AuxiliaryMatrix::AuxiliaryMatrix(std::size_t n) : n_(n), entries_(n * n) {
  if (n == 0) {
    throw PeerEvalError(ErrorCode::InvalidValue, "auxiliary matrix must not be empty");
  }
  for (std::size_t i = 0; i < n; ++i) set(i, i, ExtendedRatio::finite(1.0));
}

AuxiliaryMatrix AuxiliaryMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  AuxiliaryMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw PeerEvalError(ErrorCode::InvalidValue, "auxiliary matrix must be square");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      double v = rows[i][j];
      ExtendedRatio r = std::isnan(v)  ? ExtendedRatio::undefined()
                        : std::isinf(v) ? ExtendedRatio::infinite()
                        : v == 0.0      ? ExtendedRatio::zero()
                                        : ExtendedRatio::finite(v);
      m.set(i, j, r);
    }
  }
  return m;
}

bool AuxiliaryMatrix::column_all_finite(std::size_t j) const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (!at(i, j).is_finite()) return false;
  }
  return true;
}

}  // namespace peereval
