#pragma once

#include <stdexcept>
#include <string>

namespace infogeo {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: wrong shapes, invalid states, parse
// failures. The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// The input is well formed but the requested computation has no answer:
// infeasible moment targets, biased estimators, solver non-convergence,
// a matrix function undefined on the spectrum. The CLI maps these to exit
// code 1.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Raised by the eigensolver when the QR iteration budget is exhausted.
class ConvergenceError : public DomainError {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : DomainError(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

}  // namespace infogeo
