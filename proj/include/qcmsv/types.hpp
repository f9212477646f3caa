// Copyright 2026 The qcmsv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#define QCMSV_VERSION_STRING "0.1.0"

namespace qcmsv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidArgument,
  ZeroSignal,
  NonFinite,
  TrivialKernel,
  InvalidQ,
  InvalidS,
  InvalidOrder,
  Infeasible,
  NotApplicable,
  SMismatch,
  NotConverged,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TrivialKernel: return "TrivialKernel";
    case ErrorCode::InvalidQ: return "InvalidQ";
    case ErrorCode::InvalidS: return "InvalidS";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::SMismatch: return "SMismatch";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

/// Extended sparsity order. Zero, One and Infinity are the limit cases of the
/// finite family and are kept as distinct tags so no caller ever has to pass
/// a sentinel like 1.0 or HUGE_VAL.
class QParam {
 public:
  enum class Kind { Zero, Finite, One, Infinity };

  static QParam zero() { return QParam(Kind::Zero, 0.0); }
  static QParam one() { return QParam(Kind::One, 1.0); }
  static QParam infinity() {
    return QParam(Kind::Infinity, std::numeric_limits<double>::infinity());
  }
  static QParam finite(double q) {
    require(std::isfinite(q) && q > 0.0 && q != 1.0, ErrorCode::InvalidQ,
            "finite q must satisfy q > 0 and q != 1, got " + std::to_string(q));
    return QParam(Kind::Finite, q);
  }
  /// Maps 0, 1 and +inf onto their tags; everything else must be a valid
  /// finite order.
  static QParam from_double(double q) {
    if (q == 0.0) return zero();
    if (q == 1.0) return one();
    if (std::isinf(q) && q > 0) return infinity();
    return finite(q);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_zero() const noexcept { return kind_ == Kind::Zero; }
  bool is_one() const noexcept { return kind_ == Kind::One; }
  bool is_infinity() const noexcept { return kind_ == Kind::Infinity; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }

  /// Numeric value; +inf for Infinity.
  double value() const noexcept { return value_; }

  /// True for the orders used by the recovery theory (1 < q <= inf).
  bool above_one() const noexcept {
    return kind_ == Kind::Infinity || (kind_ == Kind::Finite && value_ > 1.0);
  }

  friend bool operator==(const QParam& a, const QParam& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

  /// Total order Zero < Finite(q<1) < One < Finite(q>1) < Infinity.
  friend bool operator<(const QParam& a, const QParam& b) {
    return a.value_ < b.value_;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::Zero: return "0";
      case Kind::One: return "1";
      case Kind::Infinity: return "inf";
      case Kind::Finite: break;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
  }

 private:
  QParam(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_;
  double value_;
};

/// Parses "0", "1", "inf"/"infinity" or a positive real.
inline QParam parse_q(std::string_view text) {
  std::string s(text);
  if (s == "inf" || s == "Inf" || s == "infinity" || s == "Infinity") {
    return QParam::infinity();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidQ, "cannot parse q from '" + s + "'");
  }
  require(used == s.size(), ErrorCode::InvalidQ, "cannot parse q from '" + s + "'");
  return QParam::from_double(v);
}

enum class EnsembleTag { Gaussian, Bernoulli, HadamardSub, Custom };

inline std::string_view to_string(EnsembleTag tag) {
  switch (tag) {
    case EnsembleTag::Gaussian: return "gaussian";
    case EnsembleTag::Bernoulli: return "bernoulli";
    case EnsembleTag::HadamardSub: return "hadamard_sub";
    case EnsembleTag::Custom: return "custom";
  }
  return "custom";
}

inline constexpr double kColumnNormTolerance = 1e-10;

/// Dense m x N measurement matrix plus the metadata the experiments need.
class MeasurementMatrix {
 public:
  MeasurementMatrix() = default;

  explicit MeasurementMatrix(Matrix entries,
                             EnsembleTag tag = EnsembleTag::Custom,
                             bool columns_normalized = false)
      : entries_(std::move(entries)), tag_(tag), normalized_(columns_normalized) {
    require(entries_.rows() >= 1 && entries_.cols() >= 1, ErrorCode::InvalidArgument,
            "measurement matrix must be at least 1x1");
    require(entries_.allFinite(), ErrorCode::NonFinite,
            "measurement matrix has non-finite entries");
    if (normalized_) {
      for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
        require(std::abs(entries_.col(j).norm() - 1.0) <= kColumnNormTolerance,
                ErrorCode::InvalidArgument,
                "column " + std::to_string(j) + " is flagged normalized but is not unit norm");
      }
    }
  }

  const Matrix& entries() const noexcept { return entries_; }
  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }
  EnsembleTag ensemble() const noexcept { return tag_; }
  bool columns_normalized() const noexcept { return normalized_; }

  /// Copy with every column scaled to unit Euclidean norm. Zero columns are
  /// rejected.
  MeasurementMatrix normalized() const {
    Matrix out = entries_;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      const double n = out.col(j).norm();
      require(n > 0.0, ErrorCode::InvalidArgument,
              "cannot normalize zero column " + std::to_string(j));
      out.col(j) /= n;
    }
    return MeasurementMatrix(std::move(out), tag_, true);
  }

 private:
  Matrix entries_;
  EnsembleTag tag_ = EnsembleTag::Custom;
  bool normalized_ = false;
};

inline void require_finite(const Vector& v, const char* what) {
  require(v.size() >= 1, ErrorCode::InvalidArgument, std::string(what) + " must be non-empty");
  require(v.allFinite(), ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

/// Estimator direction tags surfaced in reports and JSON caveats.
enum class EstimateDirection { UpperBound, LowerBound };

inline std::string_view to_string(EstimateDirection d) {
  return d == EstimateDirection::UpperBound ? "UPPER_BOUND" : "LOWER_BOUND";
}

}  // namespace qcmsv
