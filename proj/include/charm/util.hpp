#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace charm {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PoleError : std::runtime_error {
    explicit PoleError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A search (critical point, root) failed; carries a diagnostic dump.
struct SearchError : std::runtime_error {
    explicit SearchError(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numeric identity that should hold (within tolerance) did not.
struct IdentityViolation : std::runtime_error {
    explicit IdentityViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Compensated summation

class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class KahanComplex {
public:
    void add(const Complex& z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    Complex value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

// ---------------------------------------------------------------------------
// Uniform return shape for truncated analytic evaluations.

template <class T>
struct Evaluated {
    T value{};
    double tail = 0.0;    // certified-by-policy truncation/quadrature estimate
    int shells = 0;       // shells (or segments) actually used
    bool degraded = false;  // tail exceeded the requested target
};

// ---------------------------------------------------------------------------
// Deterministic sample-point generator (splitmix64; portable across stdlibs,
// unlike std::uniform_real_distribution).

class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    Complex inBox(double reLo, double reHi, double imLo, double imHi) {
        const double re = uniform(reLo, reHi);
        const double im = uniform(imLo, imHi);
        return {re, im};
    }

private:
    std::uint64_t state_;
};

}  // namespace charm
