#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the region where an operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The quadrature oracle could not reach the requested tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, std::complex<double> best, double achieved)
        : Error(what), best_estimate_(best), achieved_rel_tol_(achieved) {}

    std::complex<double> best_estimate() const noexcept { return best_estimate_; }
    double achieved_rel_tol() const noexcept { return achieved_rel_tol_; }

private:
    std::complex<double> best_estimate_;
    double achieved_rel_tol_;
};

class DegenerateFitError : public Error {
public:
    using Error::Error;
};

/// The retained probability after a projection fell below 1e-15.
class ExtinctionError : public Error {
public:
    ExtinctionError(const std::string& what, double retained) : Error(what), retained_(retained) {}
    double retained() const noexcept { return retained_; }

private:
    double retained_;
};

/// Probability reached the guard band of a periodic grid.
class PaddingError : public Error {
public:
    PaddingError(const std::string& what, double band_probability)
        : Error(what), band_probability_(band_probability) {}
    double band_probability() const noexcept { return band_probability_; }

private:
    double band_probability_;
};

/// Short-time kernel used outside its validity window (dt * sup|V| too large).
class ValidityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace qcl
