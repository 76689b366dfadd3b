#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weyl {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression text could not be parsed. Carries the byte offset of the failure.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// A metric spec file failed validation (bad shape, unknown symbol, wrong signature...).
class SpecError : public Error {
public:
    using Error::Error;
};

/// Evaluation left the domain of an elementary function (log of non-positive,
/// division by zero, ...). Carries the offending subexpression when known.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what, std::string subexpr = {})
        : Error(subexpr.empty() ? what : what + " in '" + subexpr + "'"),
          subexpr_(std::move(subexpr)) {}
    const std::string& subexpr() const { return subexpr_; }

private:
    std::string subexpr_;
};

/// Unrecoverable numeric failure: singular metric, signature mismatch,
/// insufficient jet order for a requested derivative, and similar.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace weyl
