#pragma once

#include <stdexcept>
#include <string>

namespace rodom {

// Base for all typed errors thrown by the library. Corrupt or degenerate
// inputs always surface as one of these, never as a crash.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

// Header/payload disagreement, bad magic, non-monotone timestamps.
struct FormatError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Target too close to the z-axis for planar Doppler projection.
struct DegenerateProjectionError : Error {
  using Error::Error;
};

// Rank-deficient design matrix (all azimuths equal) in the velocity solve.
struct DegenerateGeometryError : Error {
  using Error::Error;
};

// RANSAC could not find a consensus set of the required size.
struct EstimationFailedError : Error {
  using Error::Error;
};

struct InvalidTimestampsError : Error {
  using Error::Error;
};

struct InvalidParamsError : Error {
  using Error::Error;
};

struct DegenerateInputError : Error {
  using Error::Error;
};

struct NoTargetsError : Error {
  using Error::Error;
};

// Every source point ended up removed or neglected; no pairs to solve on.
struct NoMatchesError : Error {
  using Error::Error;
};

struct DegenerateWeightsError : Error {
  using Error::Error;
};

struct UndefinedRotationError : Error {
  using Error::Error;
};

struct NoOverlapError : Error {
  using Error::Error;
};

struct DegenerateAlignmentError : Error {
  using Error::Error;
};

}  // namespace rodom
