#ifndef ALH_ERRORS_HPP
#define ALH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace alh {

// Base class; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class DegreeOverflow : public Error {
public:
    using Error::Error;
};

// Operator or family is outside the supported class (coupled modes, not b-type, ...).
class StructureError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

// An identity that must hold exactly did not.
class IdentityFailure : public Error {
public:
    using Error::Error;
};

} // namespace alh

#endif
