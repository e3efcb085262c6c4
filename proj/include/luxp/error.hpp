#pragma once

#include <stdexcept>
#include <string>

namespace luxp {

/// Base for every error the toolkit raises on bad input or failed I/O.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violated a documented contract (schema, range, cardinality).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

[[noreturn]] void fail_validation(const std::string& message);
[[noreturn]] void fail_io(const std::string& message);

} // namespace luxp
