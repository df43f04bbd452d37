#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// An input violated one of the admissible parameter bounds.
class ConstraintError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain where a closed form is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to produce a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A shooting bracket does not straddle a change of outcome.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace blowup
