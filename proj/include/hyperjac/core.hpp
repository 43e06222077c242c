#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperjac {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd I{0.0, 1.0};

enum class ErrorCode {
  OddCount,
  DuplicateBranchPoint,
  NonSimpleBranchPolyline,
  PathTooCloseToBranchPoint,
  NonconvergentContinuation,
  IndexOutOfRange,
  QuadratureNonconvergence,
  SingularPeriodMatrix,
  WeierstrassPoint,
  InvalidPeriodMatrix,
  NonIntegerCharacteristic,
  RiemannConstantValidationFailed,
  PathConstructionFailed,
  GenusMismatch,
  CoincidentPoints,
  JEquivalentPair,
  AmbiguousClassification,
  UnexplainedSolution,
  CorrectorDiverged,
  RankDegenerate,
  ProjectionInconsistent,
  NoUsableOddCharacteristic,
  PathThroughPole,
  LogBranchLost,
  InputError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OddCount: return "OddCount";
    case ErrorCode::DuplicateBranchPoint: return "DuplicateBranchPoint";
    case ErrorCode::NonSimpleBranchPolyline: return "NonSimpleBranchPolyline";
    case ErrorCode::PathTooCloseToBranchPoint: return "PathTooCloseToBranchPoint";
    case ErrorCode::NonconvergentContinuation: return "NonconvergentContinuation";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::QuadratureNonconvergence: return "QuadratureNonconvergence";
    case ErrorCode::SingularPeriodMatrix: return "SingularPeriodMatrix";
    case ErrorCode::WeierstrassPoint: return "WeierstrassPoint";
    case ErrorCode::InvalidPeriodMatrix: return "InvalidPeriodMatrix";
    case ErrorCode::NonIntegerCharacteristic: return "NonIntegerCharacteristic";
    case ErrorCode::RiemannConstantValidationFailed: return "RiemannConstantValidationFailed";
    case ErrorCode::PathConstructionFailed: return "PathConstructionFailed";
    case ErrorCode::GenusMismatch: return "GenusMismatch";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::JEquivalentPair: return "JEquivalentPair";
    case ErrorCode::AmbiguousClassification: return "AmbiguousClassification";
    case ErrorCode::UnexplainedSolution: return "UnexplainedSolution";
    case ErrorCode::CorrectorDiverged: return "CorrectorDiverged";
    case ErrorCode::RankDegenerate: return "RankDegenerate";
    case ErrorCode::ProjectionInconsistent: return "ProjectionInconsistent";
    case ErrorCode::NoUsableOddCharacteristic: return "NoUsableOddCharacteristic";
    case ErrorCode::PathThroughPole: return "PathThroughPole";
    case ErrorCode::LogBranchLost: return "LogBranchLost";
    case ErrorCode::InputError: return "InputError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline double sup_norm(const CMatrix& m) {
  // row-sum norm, as used for the "‖Π‖∞" scale
  double best = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) best = std::max(best, m.row(r).cwiseAbs().sum());
  return best;
}

}  // namespace hyperjac
