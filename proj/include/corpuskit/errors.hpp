#pragma once

#include <stdexcept>
#include <string>

namespace corpuskit {

/// Base for every error the toolkit raises. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Record-level schema problems that cannot be skipped (e.g. duplicate ids).
class SchemaError : public Error {
public:
    using Error::Error;
};

class SerializationError : public Error {
public:
    using Error::Error;
};

/// A value outside its documented domain. `key()` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string key, const std::string& what)
        : Error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Caller passed input that violates an operation's precondition.
class UsageError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace corpuskit
