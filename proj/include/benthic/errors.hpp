#ifndef BENTHIC_ERRORS_HPP
#define BENTHIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace benthic {

/// Base of every error raised by the library. The CLI maps these to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the region where the kinetics are defined (poles, non-finite input).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameter combination at which a closed-form expression is singular (e.g. m = 1).
class SingularParameterError : public Error {
public:
    using Error::Error;
};

/// A root, crossing or critical point was requested but none lies in the given bracket.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Requested steady state or wavenumber does not exist for these coefficients.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

/// Repeated eigenvalue, resonant linear operator or vanishing leading coefficient.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Field, domain or amplitude layout that does not fit together.
class MismatchError : public Error {
public:
    using Error::Error;
};

/// Newton, eigen-solver or continuation failure.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Time integration produced non-finite values.
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace benthic

#endif
