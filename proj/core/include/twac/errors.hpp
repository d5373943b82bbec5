#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twac {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid construction input (coincident wells, bad arcs, bad grids, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve did not reach its tolerance. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double last_residual, long iterations)
      : Error(msg), last_residual(last_residual), iterations(iterations) {}
  double last_residual = 0.0;
  long iterations = 0;
};

/// Heteroclinic truncation interval too small for the requested potential.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Too few usable tail samples for a decay-rate fit.
class InsufficientTailError : public Error {
 public:
  using Error::Error;
};

/// Winding number queried at a point lying on the curve.
class OnCurveError : public Error {
 public:
  using Error::Error;
};

/// Triangle inequality failed: some surface tension is nonpositive.
class DegenerateTensionError : public Error {
 public:
  using Error::Error;
};

/// A boundary arc is too short for the requested transition width.
class ArcTooShortError : public Error {
 public:
  using Error::Error;
};

/// Blowdown target exceeds the source field footprint.
class OutOfFootprintError : public Error {
 public:
  using Error::Error;
};

/// Recovery schedule violates its geometric constraints.
class InvalidScheduleError : public Error {
 public:
  using Error::Error;
};

/// Boundary data topology outside the supported range.
class UnsupportedTopologyError : public Error {
 public:
  using Error::Error;
};

/// Requested wetted area cannot be realized by the arc construction.
class DeltaTooLargeError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or config. Carries the byte offset (and line if known).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t byte_offset, long line = -1)
      : Error(msg), byte_offset(byte_offset), line(line) {}
  std::size_t byte_offset = 0;
  long line = -1;
};

/// File carries an unknown format version.
class VersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace twac
