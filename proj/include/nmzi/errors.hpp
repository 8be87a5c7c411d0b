#ifndef NMZI_ERRORS_HPP
#define NMZI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nmzi {

// Base class for all typed errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- layout parsing / graph validation -------------------------------------

struct SyntaxError : Error {
    SyntaxError(std::size_t line, std::size_t column, const std::string& what_arg)
        : Error("syntax error at line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what_arg),
          line(line), column(column) {}
    std::size_t line;
    std::size_t column;
};

struct CycleError : Error {
    using Error::Error;
};
struct DanglingEdgeError : Error {
    using Error::Error;
};
struct DuplicateLabelError : Error {
    using Error::Error;
};
struct NoSourceError : Error {
    using Error::Error;
};
struct MultipleSourcesError : Error {
    using Error::Error;
};
struct UnreachableElementError : Error {
    using Error::Error;
};
struct InvalidElementError : Error {
    using Error::Error;
};
struct InvalidPathError : Error {
    using Error::Error;
};

// ---- epsilon expansion ------------------------------------------------------

struct UnknownMirrorSymbolError : Error {
    using Error::Error;
};
struct OrderMismatchError : Error {
    using Error::Error;
};
struct OrderOutOfRangeError : Error {
    using Error::Error;
};
struct MissingAssignmentError : Error {
    using Error::Error;
};

// ---- two-state vector -------------------------------------------------------

struct UnknownDetectorError : Error {
    using Error::Error;
};
struct ZeroOverlapError : Error {
    using Error::Error;
};
struct IncompleteCutError : Error {
    using Error::Error;
};

// ---- pointer simulation -----------------------------------------------------

struct ZeroNormError : Error {
    using Error::Error;
};
struct NegativePhotonNumberError : Error {
    using Error::Error;
};

// ---- spectrum ----------------------------------------------------------------

struct NyquistError : Error {
    using Error::Error;
};
struct InvalidOscillationConfigError : Error {
    using Error::Error;
};
struct EmptySignalError : Error {
    using Error::Error;
};

// ---- propagators --------------------------------------------------------------

struct NonPositiveTimeError : Error {
    using Error::Error;
};
struct UnorderedEventsError : Error {
    using Error::Error;
};
struct QuadratureNonconvergenceError : Error {
    using Error::Error;
};
struct GridResolutionError : Error {
    using Error::Error;
};

}  // namespace nmzi

#endif  // NMZI_ERRORS_HPP
