#pragma once

#include <stdexcept>
#include <string>

namespace nlrs {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Division where the divisor enclosure contains zero.
struct DivisionByUncertainZero : Error {
    DivisionByUncertainZero() : Error("division by an enclosure containing zero") {}
};

/// Refinement reached the precision cap without meeting the request.
struct PrecisionCapExceeded : Error {
    explicit PrecisionCapExceeded(const std::string& what) : Error(what) {}
};

/// An enclosure straddles a rounding boundary even at the precision cap.
struct AmbiguousRounding : Error {
    explicit AmbiguousRounding(const std::string& what) : Error(what) {}
};

struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& what) : Error(what) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& what) : Error(what) {}
};

struct ModulusNotAboveOne : Error {
    ModulusNotAboveOne() : Error("base modulus is not certified > 1") {}
};

struct InseparableInput : Error {
    InseparableInput() : Error("characteristic polynomial has a repeated root") {}
};

struct IllConditioned : Error {
    explicit IllConditioned(const std::string& what) : Error(what) {}
};

struct SearchBudgetExceeded : Error {
    explicit SearchBudgetExceeded(const std::string& what) : Error(what) {}
};

struct AllRootsOfUnity : Error {
    AllRootsOfUnity() : Error("every base quotient is a root of unity") {}
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& what) : Error(what) {}
};

struct DependentBases : Error {
    explicit DependentBases(const std::string& what) : Error(what) {}
};

struct DepthInsufficient : Error {
    explicit DepthInsufficient(const std::string& what) : Error(what) {}
};

struct LambdaZero : Error {
    LambdaZero() : Error("the power product equals 1 exactly") {}
};

struct MissingBinetData : Error {
    explicit MissingBinetData(const std::string& what) : Error(what) {}
};

/// JSON spec validation failure; carries the offending field path.
struct SchemaError : Error {
    std::string field;
    explicit SchemaError(const std::string& f, const std::string& what = "")
        : Error("schema error at '" + f + "'" + (what.empty() ? "" : ": " + what)), field(f) {}
};

struct IsolationError : Error {
    explicit IsolationError(const std::string& what) : Error(what) {}
};

}  // namespace nlrs
