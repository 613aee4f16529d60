#pragma once

#include <stdexcept>
#include <string>

namespace maght {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction from an empty point/sample list.
struct EmptyInput : Error {
  using Error::Error;
};

// Degenerate axis-aligned bounds (zero or negative extent where forbidden).
struct EmptyBounds : Error {
  using Error::Error;
};

// Field evaluation requested inside a dipole exclusion zone.
struct SingularEvaluation : Error {
  using Error::Error;
};

// Interpolation query outside the sampled volume.
struct OutOfBounds : Error {
  using Error::Error;
};

// Every lattice node has a near-vertical field; no feature index possible.
struct NoValidNodes : Error {
  using Error::Error;
};

// Fewer than two samples survived input preprocessing.
struct TooShort : Error {
  using Error::Error;
};

// First magnetic measure has no usable horizontal component.
struct DegenerateFirstMeasure : Error {
  using Error::Error;
};

// A generated trajectory passes through a dipole exclusion zone.
struct ExclusionZone : Error {
  using Error::Error;
};

// Structured-text document failed validation (bad version, shape, or value).
struct SchemaError : Error {
  using Error::Error;
};

// Filesystem-level failure (missing file, unwritable path).
struct IoError : Error {
  using Error::Error;
};

}  // namespace maght
