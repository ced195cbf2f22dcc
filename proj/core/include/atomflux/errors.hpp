#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace atomflux {

namespace detail {
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
}  // namespace detail

/// Base class for every error raised by the simulation core.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the documented domain of an operation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Rabi frequency is zero, so the dressed basis does not exist.
class DegenerateCoupling : public Error {
public:
    using Error::Error;
};

/// The 8x8 matching system could not be solved reliably.
class NumericalDegeneracy : public Error {
public:
    NumericalDegeneracy(double k, double rcond)
        : Error("singular matching system at k=" + detail::num(k) +
                " 1/m (reciprocal condition " + detail::num(rcond) + ")"),
          k_(k), rcond_(rcond) {}
    double wavenumber() const { return k_; }
    double reciprocal_condition() const { return rcond_; }

private:
    double k_;
    double rcond_;
};

/// Adaptive quadrature did not reach its tolerance.
class QuadratureFailure : public Error {
public:
    QuadratureFailure(const std::string& what, double estimate, double error)
        : Error(what), estimate_(estimate), error_(error) {}
    double estimate() const { return estimate_; }
    double error_estimate() const { return error_; }

private:
    double estimate_;
    double error_;
};

/// Density fell below the floor where the guidance velocity is evaluated.
class NearNode : public Error {
public:
    NearNode(double x, double t, double rho)
        : Error("density below floor at x=" + detail::num(x) + " m, t=" + detail::num(t) +
                " s (rho=" + detail::num(rho) + ")"),
          x_(x), t_(t) {}
    double position() const { return x_; }
    double time() const { return t_; }

private:
    double x_;
    double t_;
};

/// Transmission probability is 0 or 1, so no reflection/transmission split exists.
class NoBifurcation : public Error {
public:
    NoBifurcation(double transmission)
        : Error("no bifurcation: |T|^2=" + detail::num(transmission)), transmission_(transmission) {}
    double transmission() const { return transmission_; }

private:
    double transmission_;
};

/// Presence-probability series did not settle at |T|^2 by the end of the window.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double q_left, double q_right, double transmission)
        : Error(what), q_left_(q_left), q_right_(q_right), transmission_(transmission) {}
    double q_left() const { return q_left_; }
    double q_right() const { return q_right_; }
    double transmission() const { return transmission_; }

private:
    double q_left_;
    double q_right_;
    double transmission_;
};

/// Q series violate the ordering that the min/max time formulas rely on.
class InconsistentSeries : public Error {
public:
    using Error::Error;
};

/// Current through a boundary integrates to zero.
class NoArrivals : public Error {
public:
    using Error::Error;
};

/// A documented invariant failed after a computation finished.
class InvariantViolation : public Error {
public:
    InvariantViolation(const std::string& quantity, double value, double tolerance)
        : Error(quantity + " = " + detail::num(value) + " exceeds tolerance " +
                detail::num(tolerance)),
          quantity_(quantity), value_(value), tolerance_(tolerance) {}
    const std::string& quantity() const { return quantity_; }
    double value() const { return value_; }
    double tolerance() const { return tolerance_; }

private:
    std::string quantity_;
    double value_;
    double tolerance_;
};

}  // namespace atomflux
