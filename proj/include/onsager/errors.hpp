#pragma once

#include <stdexcept>
#include <string>

namespace onsager {

// Base class for refusals that are mathematical rather than I/O related.
// The CLI maps these to exit code 2.
class MathRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A kernel violated k_n < 0 or k_1 < k_2 < ... .
class KernelInvariantError : public MathRefusal {
public:
    using MathRefusal::MathRefusal;
};

// max|u| on the quadrature grid exceeded the exponentiation guard.
class RangeError : public MathRefusal {
public:
    using MathRefusal::MathRefusal;
};

// lambda lies inside the guard band around a bifurcation value.
class NearBifurcation : public MathRefusal {
public:
    NearBifurcation(const std::string& what, double lambda, int mode)
        : MathRefusal(what), lambda_(lambda), mode_(mode) {}
    double lambda() const { return lambda_; }
    int mode() const { return mode_; }

private:
    double lambda_;
    int mode_;
};

// A zero with (numerically) singular Jacobian.
class NonRegularZero : public MathRefusal {
public:
    using MathRefusal::MathRefusal;
};

// A zero on the boundary of the domain; the degree is undefined there.
class BoundaryZero : public MathRefusal {
public:
    BoundaryZero(const std::string& what, double homotopy_t = 1.0)
        : MathRefusal(what), t_(homotopy_t) {}
    double homotopy_t() const { return t_; }

private:
    double t_;
};

}  // namespace onsager
