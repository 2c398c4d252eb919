#pragma once

#include <stdexcept>
#include <string>

namespace minsurf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PointOutsideDomain : public Error {
 public:
  using Error::Error;
};

class DegenerateImmersion : public Error {
 public:
  using Error::Error;
};

class UnknownSurface : public Error {
 public:
  using Error::Error;
};

class BadParams : public Error {
 public:
  using Error::Error;
};

class GaugeContinuationFailure : public Error {
 public:
  using Error::Error;
};

class LoopLeavesDomain : public Error {
 public:
  using Error::Error;
};

class SupportTouchesBoundary : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

// Thrown by the eigensolver; carries the best estimate reached.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations, double best_lambda, double best_residual)
      : Error(what), iterations(iterations), best_lambda(best_lambda), best_residual(best_residual) {}

  int iterations;
  double best_lambda;
  double best_residual;
};

}  // namespace minsurf
