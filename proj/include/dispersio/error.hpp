#pragma once

#include <stdexcept>
#include <string>

namespace dispersio {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Eigenvalue collision; the projections are not defined at this frequency.
class DegenerateFrequency : public Error {
public:
    using Error::Error;
};

// A or B vanishes and the phase is not differentiable.
class SingularPoint : public Error {
public:
    using Error::Error;
};

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

// Quadrature would need more nodes than the configured budget allows.
class UnresolvedOscillation : public Error {
public:
    using Error::Error;
};

class PoorFit : public Error {
public:
    PoorFit(const std::string& what, double r2) : Error(what), r2_(r2) {}
    double r2() const { return r2_; }

private:
    double r2_;
};

class NonUniformGrid : public Error {
public:
    using Error::Error;
};

class HorizonTooShort : public Error {
public:
    using Error::Error;
};

class CflViolation : public Error {
public:
    using Error::Error;
};

}  // namespace dispersio
