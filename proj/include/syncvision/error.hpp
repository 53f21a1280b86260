#pragma once

#include <stdexcept>
#include <string>

namespace syncvision {

// Argument errors use std::invalid_argument; the types below carry the
// domain failures callers are expected to branch on.

/// Unreadable or unsupported image / data file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point configuration (collinear, singular) admits no unique transform.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooFewMatches : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConsensus : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Homogeneous coordinate w' vanished.
class PointAtInfinity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation mask selected no pixels.
class EvaluationSkipped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace syncvision
