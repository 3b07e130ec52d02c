// Error types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace insp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct FrameMismatch : Error {
  using Error::Error;
};
struct BehindCamera : Error {
  using Error::Error;
};

// scene
struct InvalidDimensions : Error {
  using Error::Error;
};

// fusion
struct NonMonotonicTimestamp : Error {
  using Error::Error;
};

// localization
struct NoCluster : Error {
  using Error::Error;
};
struct DegenerateInput : Error {
  using Error::Error;
};
struct NoPointsWithinTau : Error {
  using Error::Error;
};

// planner
struct InfeasibleStandoff : Error {
  using Error::Error;
};
struct NoFeasibleWaypoint : Error {
  using Error::Error;
};
struct NoFeasibleDetour : Error {
  using Error::Error;
};

// mission
struct PlanningFailure : Error {
  using Error::Error;
};

// baseline
struct TooLargeForExact : Error {
  using Error::Error;
};

}  // namespace insp
