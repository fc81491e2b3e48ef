#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace slpants {

// Base for all library errors. Message text names the offending quantity;
// callers that need to branch catch the concrete type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// polygon validation
struct TooFewPoints : Error { using Error::Error; };
struct NotStrictlyConvex : Error { using Error::Error; };
struct NotCounterclockwise : Error { using Error::Error; };
struct DuplicateVertex : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// potential / trace
struct PotentialSingular : Error { using Error::Error; };
struct ConstraintViolated : Error { using Error::Error; };
struct NotOnBoundary : Error { using Error::Error; };

// grid / solver
struct SpacingTooCoarse : Error { using Error::Error; };
struct DegenerateIntersection : Error { using Error::Error; };
struct SchemeUnavailable : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& msg, std::vector<double> history)
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

// reconstruction / mesh
struct TriangulationFailed : Error { using Error::Error; };
struct InsufficientResolution : Error { using Error::Error; };
struct NonManifoldMesh : Error { using Error::Error; };
struct EmptyMesh : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// asymptotics
struct EigenFailure : Error { using Error::Error; };
struct NonPositiveGroundState : Error { using Error::Error; };
struct NotDecaying : Error { using Error::Error; };
struct WindowTooSmall : Error { using Error::Error; };

// topology
struct InvalidTopology : Error { using Error::Error; };

// cli / config
struct ConfigInvalid : Error { using Error::Error; };

struct PreconditionViolated : Error { using Error::Error; };

} // namespace slpants
