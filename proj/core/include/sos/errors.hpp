#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sos {

// Base for every domain-level failure raised by the toolkit. Anything that
// derives from Error is a problem with the input or an expected outcome
// signal; everything else escaping the library is an internal bug.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

class DegreeError : public Error {
 public:
  explicit DegreeError(const std::string& what) : Error("degree", what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class IncompleteTableError : public Error {
 public:
  explicit IncompleteTableError(const std::string& what) : Error("incomplete-table", what) {}
};

class SdpError : public Error {
 public:
  explicit SdpError(const std::string& what) : Error("sdp", what) {}
};

// The moment relaxation is infeasible at the requested degree, i.e. the
// system has a degree-l refutation.
class RefutableError : public Error {
 public:
  RefutableError(const std::string& what, int degree)
      : Error("refutable", what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

// No degree-l refutation exists (a pseudoexpectation satisfies the system).
class NoCertificateError : public Error {
 public:
  explicit NoCertificateError(const std::string& what) : Error("no-certificate", what) {}
};

// Solver output sits too close to the feasibility boundary to decide.
class AmbiguousError : public Error {
 public:
  explicit AmbiguousError(const std::string& what) : Error("ambiguous", what) {}
};

class SatisfiableError : public Error {
 public:
  SatisfiableError(const std::string& what, std::vector<int> witness)
      : Error("satisfiable", what), witness_(std::move(witness)) {}
  const std::vector<int>& witness() const noexcept { return witness_; }

 private:
  std::vector<int> witness_;
};

class DegenerateWeightError : public Error {
 public:
  explicit DegenerateWeightError(const std::string& what) : Error("degenerate-weight", what) {}
};

class InvalidPseudoExpectation : public Error {
 public:
  explicit InvalidPseudoExpectation(const std::string& what)
      : Error("invalid-pseudoexpectation", what) {}
};

// Every rounding draw produced an unusable set.
class RoundingError : public Error {
 public:
  explicit RoundingError(const std::string& what) : Error("rounding-failure", what) {}
};

// The relaxation optimum is below the planted-sparsity threshold.
class NoSparseVectorError : public Error {
 public:
  explicit NoSparseVectorError(const std::string& what) : Error("no-sparse-vector", what) {}
};

class CertificationError : public Error {
 public:
  explicit CertificationError(const std::string& what) : Error("certification-failure", what) {}
};

// The pseudodistribution objective is too small for a column to exist.
class NoColumnError : public Error {
 public:
  explicit NoColumnError(const std::string& what) : Error("no-column", what) {}
};

// No reweighting concentrated the pseudodistribution on one direction.
class IsolationError : public Error {
 public:
  explicit IsolationError(const std::string& what) : Error("isolation-failure", what) {}
};

}  // namespace sos
