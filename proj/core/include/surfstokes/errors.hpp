#pragma once

#include <stdexcept>
#include <string>

namespace surfstokes {

// Error hierarchy shared by all modules. Every failure mode a caller can act
// on gets its own type; tools catch Error to map any failure to an exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfTubularNeighborhood : Error { using Error::Error; };
struct DegenerateLift : Error { using Error::Error; };
struct UnsupportedDegree : Error { using Error::Error; };
struct UnsupportedExactness : Error { using Error::Error; };
struct UnsupportedSurface : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct EigenFailure : Error { using Error::Error; };
struct InvalidSequence : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace surfstokes
