#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nlstplan {

/// Every failure the engine reports is tagged with one of these codes.
enum class ErrorCode {
    // geo
    InvalidGeometry,
    IncompatibleOperands,
    EmptyInput,
    InvalidK,
    BadEncoding,
    // catalog
    MissingCatalog,
    SchemaMismatch,
    BadGeometry,
    UnknownRelation,
    // corpus
    NoTemplates,
    Unrepairable,
    // nlu
    UnknownEntity,
    AmbiguousEntity,
    InvalidPeriod,
    InsufficientData,
    ModelLoadError,
    // planner
    MissingSlot,
    UnsupportedType,
    PlanSyntaxError,
    ExecError,
    // tools
    FileNotFound,
    InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Entity grounding failure. Carries the offending span and ranked alternatives.
class EntityError : public Error {
public:
    EntityError(ErrorCode code, std::string span, std::vector<std::string> suggestions,
                const std::string& message)
        : Error(code, message), span_(std::move(span)), suggestions_(std::move(suggestions)) {}

    const std::string& span() const noexcept { return span_; }
    const std::vector<std::string>& suggestions() const noexcept { return suggestions_; }

private:
    std::string span_;
    std::vector<std::string> suggestions_;
};

/// Plan text could not be parsed; `position` is the byte offset of the bad token.
class PlanSyntaxError : public Error {
public:
    PlanSyntaxError(std::size_t position, std::string token, const std::string& message)
        : Error(ErrorCode::PlanSyntaxError, message), position_(position), token_(std::move(token)) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::size_t position_;
    std::string token_;
};

/// Missing required query slot, e.g. a nearest-neighbor query without an object.
class MissingSlotError : public Error {
public:
    explicit MissingSlotError(std::string slot)
        : Error(ErrorCode::MissingSlot, "missing slot: " + slot), slot_(std::move(slot)) {}

    const std::string& slot() const noexcept { return slot_; }

private:
    std::string slot_;
};

}  // namespace nlstplan
