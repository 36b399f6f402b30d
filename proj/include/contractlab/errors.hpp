#pragma once

#include <stdexcept>
#include <string>

namespace contractlab {

// Base class for all library errors. The CLI maps subclasses onto exit
// codes: format/data/domain problems exit 2, numeric failures exit 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural problem in an input stream (bad header, wrong column count).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Semantically invalid data: ordering violations, empty joins, empty panels.
class DataError : public Error {
public:
    using Error::Error;
};

/// Argument outside a function's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Too few observations for the requested fit.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient design matrix; carries the name of the offending column.
class CollinearityError : public Error {
public:
    CollinearityError(std::string column, const std::string& message)
        : Error(message), column_(std::move(column)) {}

    [[nodiscard]] const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

/// An iterative numeric routine failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace contractlab
