#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace devcauchy {

enum class ErrorKind {
    // input / validation
    DimensionMismatch,
    GradeOutOfRange,
    DegenerateInput,
    Syntax,
    EvalDomain,
    OutOfInterval,
    IrregularCurve,
    NotTangent,
    DegenerateDistribution,
    NotTangentToD,
    WrongCodimension,
    GVanishes,
    CurvatureVanishes,
    BadInitialPlane,
    Scene,
    // mathematical obstructions
    CurveNotCurving,
    RankTooHigh,
    RankDropsToZero,
    AsymptoticDirection,
    AlphaRankTooHigh,
    ShapeOperatorSingular,
    NotUnique,
    NotSolvable,
    RulingInTS,
    // numerical collapse
    BoxCollapse,
    ImmersionFailure,
    BoundaryTooClose,
    SolverPreconditionViolated,
    Internal,
};

inline std::string_view to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GradeOutOfRange: return "GradeOutOfRange";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::EvalDomain: return "EvalDomainError";
    case ErrorKind::OutOfInterval: return "OutOfInterval";
    case ErrorKind::IrregularCurve: return "IrregularCurve";
    case ErrorKind::NotTangent: return "NotTangent";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::NotTangentToD: return "NotTangentToD";
    case ErrorKind::WrongCodimension: return "WrongCodimension";
    case ErrorKind::GVanishes: return "GVanishes";
    case ErrorKind::CurvatureVanishes: return "CurvatureVanishes";
    case ErrorKind::BadInitialPlane: return "BadInitialPlane";
    case ErrorKind::Scene: return "SceneError";
    case ErrorKind::CurveNotCurving: return "CurveNotCurving";
    case ErrorKind::RankTooHigh: return "RankTooHigh";
    case ErrorKind::RankDropsToZero: return "RankDropsToZero";
    case ErrorKind::AsymptoticDirection: return "AsymptoticDirection";
    case ErrorKind::AlphaRankTooHigh: return "AlphaRankTooHigh";
    case ErrorKind::ShapeOperatorSingular: return "ShapeOperatorSingular";
    case ErrorKind::NotUnique: return "NotUnique";
    case ErrorKind::NotSolvable: return "NotSolvable";
    case ErrorKind::RulingInTS: return "RulingInTS";
    case ErrorKind::BoxCollapse: return "BoxCollapse";
    case ErrorKind::ImmersionFailure: return "ImmersionFailure";
    case ErrorKind::BoundaryTooClose: return "BoundaryTooClose";
    case ErrorKind::SolverPreconditionViolated: return "SolverPreconditionViolated";
    case ErrorKind::Internal: return "InternalError";
    }
    return "UnknownError";
}

/// CLI exit-code class: 1 mathematical obstruction, 2 bad input, 3 numerical collapse.
inline int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::CurveNotCurving:
    case ErrorKind::RankTooHigh:
    case ErrorKind::RankDropsToZero:
    case ErrorKind::AsymptoticDirection:
    case ErrorKind::AlphaRankTooHigh:
    case ErrorKind::ShapeOperatorSingular:
    case ErrorKind::NotUnique:
    case ErrorKind::NotSolvable:
    case ErrorKind::RulingInTS:
        return 1;
    case ErrorKind::BoxCollapse:
    case ErrorKind::ImmersionFailure:
    case ErrorKind::BoundaryTooClose:
    case ErrorKind::SolverPreconditionViolated:
    case ErrorKind::Internal:
        return 3;
    default:
        return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<double> where = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message), where_(where)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }
    /// Offending curve parameter, when the failure is localized.
    std::optional<double> where() const noexcept { return where_; }

private:
    ErrorKind kind_;
    std::string message_;
    std::optional<double> where_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
        : Error(ErrorKind::Syntax, describe(offset, expected, found)), offset_(offset),
          expected_(std::move(expected))
    {
    }

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string describe(std::size_t offset, const std::vector<std::string>& expected,
                                const std::string& found)
    {
        std::string s = "at offset " + std::to_string(offset) + ": found " + found + ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) s += i + 1 == expected.size() ? " or " : ", ";
            s += expected[i];
        }
        return s;
    }

    std::size_t offset_;
    std::vector<std::string> expected_;
};

} // namespace devcauchy
