#pragma once

#include <stdexcept>
#include <string>

namespace swlw {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    SingularSystem(std::size_t row, const std::string& what)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

class NonConvergence : public Error {
public:
    NonConvergence(int iterations, double last_increment, const std::string& what)
        : Error(what + " after " + std::to_string(iterations) +
                " iterations, last increment " + std::to_string(last_increment)),
          iterations_(iterations),
          last_increment_(last_increment) {}
    int iterations() const { return iterations_; }
    double last_increment() const { return last_increment_; }

private:
    int iterations_;
    double last_increment_;
};

class BlowUp : public Error {
public:
    BlowUp(double t, double dt)
        : Error("non-finite state at t = " + std::to_string(t) + " (dt = " + std::to_string(dt) + ")"),
          t_(t),
          dt_(dt) {}
    double t() const { return t_; }
    double dt() const { return dt_; }

private:
    double t_;
    double dt_;
};

}  // namespace swlw
