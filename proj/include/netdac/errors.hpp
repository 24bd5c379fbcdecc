#pragma once

#include <stdexcept>
#include <string>

namespace netdac {

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Feature matrix fails a rank condition (column rank below K, or the
/// constant vector lies in its column span).
struct RankDeficientFeatures : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NearSingularB : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A critic weight, average-reward estimate or policy parameter blew past
/// the divergence threshold (or went non-finite).
struct Diverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace netdac
