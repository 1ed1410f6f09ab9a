#ifndef SPR3_ERRORS_HPP
#define SPR3_ERRORS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spr3 {

enum class ErrorCode {
    InvalidArgument,
    DegenerateOrientation,
    ZeroLengthLimb,
    InfeasibleJointLength,
    NonFiniteIterate,
    SingularJacobian,
    NoConvergence,
    DegeneratePose,
    StepTooLarge,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateOrientation: return "DegenerateOrientation";
        case ErrorCode::ZeroLengthLimb: return "ZeroLengthLimb";
        case ErrorCode::InfeasibleJointLength: return "InfeasibleJointLength";
        case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegeneratePose: return "DegeneratePose";
        case ErrorCode::StepTooLarge: return "StepTooLarge";
    }
    return "Unknown";
}

class KinematicsError : public std::runtime_error {
public:
    KinematicsError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Solver iteration at which the error surfaced, when known.
    std::optional<int> iteration() const noexcept { return iteration_; }

    KinematicsError with_iteration(int k) const {
        KinematicsError copy(*this);
        copy.iteration_ = k;
        return copy;
    }

private:
    ErrorCode code_;
    std::optional<int> iteration_;
};

}  // namespace spr3

#endif  // SPR3_ERRORS_HPP
