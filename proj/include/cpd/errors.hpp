#pragma once

#include <stdexcept>
#include <string>

namespace cpd {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class NotSquareError : public Error {
public:
    using Error::Error;
};

class DimMismatchError : public Error {
public:
    using Error::Error;
};

class BadRangeError : public Error {
public:
    using Error::Error;
};

class EmptyWindowError : public Error {
public:
    using Error::Error;
};

class WrongKindError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NotStationaryError : public Error {
public:
    using Error::Error;
};

class NonPositiveError : public Error {
public:
    using Error::Error;
};

class BadEpsError : public Error {
public:
    using Error::Error;
};

class SeparationError : public Error {
public:
    using Error::Error;
};

class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

class UnknownTableError : public Error {
public:
    using Error::Error;
};

} // namespace cpd
