#pragma once

#include <stdexcept>
#include <string>

namespace sensorcast {

enum class ErrorKind {
    InvalidArgument,
    Data,
    Io,
    Numeric,
    Protocol,
};

/// Base for every error thrown by the library. The kind maps onto the C API
/// status codes and the CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& what) : Error(ErrorKind::Protocol, what) {}
};

} // namespace sensorcast
