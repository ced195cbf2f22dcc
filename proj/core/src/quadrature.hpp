#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>

#include "atomflux/errors.hpp"

namespace atomflux::detail {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive bisection on a 15-point Gauss-Kronrod rule with an absolute error target.
/// A subinterval is accepted once its Kronrod-Gauss difference falls below its share of
/// `abs_tol`, or below `rel_tol` times its own magnitude.
template <class F>
QuadratureResult adaptive_gk15(F&& f, double a, double b, double abs_tol, double rel_tol = 1e-12,
                               int max_depth = 40) {
    using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    QuadratureResult out;
    const std::function<void(double, double, double, int)> recurse =
        [&](double lo, double hi, double tol, int depth) {
            double err = 0.0;
            const double v = rule::integrate(f, lo, hi, 0, 0.0, &err);
            // the single-rule error comes back on the reference interval [-1, 1]
            err *= 0.5 * (hi - lo);
            if (err <= tol || err <= rel_tol * std::abs(v) || depth >= max_depth) {
                out.value += v;
                out.error += err;
                return;
            }
            const double mid = 0.5 * (lo + hi);
            recurse(lo, mid, 0.5 * tol, depth + 1);
            recurse(mid, hi, 0.5 * tol, depth + 1);
        };
    recurse(a, b, abs_tol, 0);
    return out;
}

/// Splits [a, b] into panels no wider than `panel` before adapting, so that narrow
/// features are never missed by the first rule application.
template <class F>
QuadratureResult paneled_gk15(F&& f, double a, double b, double panel, double abs_tol,
                              double rel_tol = 1e-12) {
    QuadratureResult out;
    if (!(b > a)) return out;
    const auto n = static_cast<long>(std::ceil((b - a) / panel));
    const double h = (b - a) / static_cast<double>(n);
    const double share = abs_tol / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
        const double lo = a + h * static_cast<double>(i);
        const double hi = (i + 1 == n) ? b : lo + h;
        const QuadratureResult r = adaptive_gk15(f, lo, hi, share, rel_tol);
        out.value += r.value;
        out.error += r.error;
    }
    return out;
}

}  // namespace atomflux::detail
