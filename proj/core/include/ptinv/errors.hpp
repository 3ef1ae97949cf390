#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptinv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated preconditions on inputs (sigma <= 0, t outside the window, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& msg, double t)
        : Error(msg + " (t = " + std::to_string(t) + ")"), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class HermiticityError : public Error {
public:
    HermiticityError(const std::string& msg, double defect)
        : Error(msg + " (defect " + std::to_string(defect) + ")"), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

class TruncationOverflow : public Error {
public:
    using Error::Error;
};

}  // namespace ptinv
