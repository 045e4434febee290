#pragma once

#include <stdexcept>
#include <string>

namespace claimguard {

// Base for every error the library raises on purpose. Callers that only
// need "did the operation fail" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    IoError(const std::string& what, std::string path) : Error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class UnrecognizedLabel : public Error {
public:
    explicit UnrecognizedLabel(std::string raw)
        : Error("unrecognized label: '" + raw + "'"), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

} // namespace claimguard
