#pragma once

#include <stdexcept>
#include <string>

namespace eor {

// Error categories; the CLI maps them onto its exit-code contract
// (input -> 2, constraint -> 3, numerical -> 4).
enum class ErrorKind { InvalidInput, Constraint, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define EOR_DEFINE_ERROR(Name, Kind)                                     \
    struct Name : Error {                                                \
        explicit Name(const std::string& msg)                            \
            : Error(ErrorKind::Kind, std::string(#Name ": ") + msg) {}   \
    }

EOR_DEFINE_ERROR(PoolError, InvalidInput);
EOR_DEFINE_ERROR(CsvError, InvalidInput);
EOR_DEFINE_ERROR(InvalidPrior, InvalidInput);
EOR_DEFINE_ERROR(BadParams, InvalidInput);

EOR_DEFINE_ERROR(WrongGroupCount, Constraint);
EOR_DEFINE_ERROR(EmptyGroup, Constraint);
EOR_DEFINE_ERROR(DegenerateRelevance, Constraint);
EOR_DEFINE_ERROR(NotStochastic, Constraint);
EOR_DEFINE_ERROR(MissingLabels, Constraint);
EOR_DEFINE_ERROR(SingleClass, Constraint);
EOR_DEFINE_ERROR(TooLarge, Constraint);
EOR_DEFINE_ERROR(InfeasibleProblem, Constraint);

EOR_DEFINE_ERROR(NumericalFailure, Numerical);
EOR_DEFINE_ERROR(MatchFailure, Numerical);

#undef EOR_DEFINE_ERROR

}  // namespace eor
