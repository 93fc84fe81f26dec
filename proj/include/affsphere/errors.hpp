#pragma once

#include <stdexcept>
#include <string>

namespace affsphere {

enum class ErrorKind {
  Domain,
  Convergence,
  Quadrature,
  OutsideCone,
  InconsistentJet,
  ScalarMatrix,
  Degenerate,
  EmptyMesh,
  BlowUp,
  LeftAdmissibleRegion,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type; `kind()` selects the failure class, `detail()` carries
/// a kind-specific number (eigenvalue gap for Degenerate, escape time for BlowUp).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double detail = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  double detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  double detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what, double detail = 0.0) {
  throw Error(kind, what, detail);
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Convergence: return "ConvergenceError";
    case ErrorKind::Quadrature: return "QuadratureFailure";
    case ErrorKind::OutsideCone: return "OutsideCone";
    case ErrorKind::InconsistentJet: return "InconsistentJet";
    case ErrorKind::ScalarMatrix: return "ScalarMatrix";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::EmptyMesh: return "EmptyMesh";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::LeftAdmissibleRegion: return "LeftAdmissibleRegion";
  }
  return "Error";
}

}  // namespace affsphere
