#pragma once

#include <cmath>
#include <limits>

#include "mhrelay/errors.hpp"

namespace mhrelay::detail {

// Lower incomplete gamma, generic over the floating type so the same
// algorithm serves double precision and the multiprecision fallback used
// by the closed-form BLER sums. gamma_a must equal Gamma(a); it is only
// consumed on the continued-fraction branch (z >= a+1).
//
// Series (z < a+1):   Y(a,z) = z^a e^-z sum_n z^n / (a (a+1) ... (a+n))
// Fraction (z >= a+1): Y(a,z) = Gamma(a) - z^a e^-z / CF(a,z)  (Lentz)
// Both branches are cancellation-free for their argument range.
template <class Real>
Real lower_incomplete_gamma_t(const Real& a, const Real& z, const Real& gamma_a) {
    using std::exp;
    using std::fabs;
    using std::log;

    const Real eps = std::numeric_limits<Real>::epsilon();
    const Real zero(0);

    if (z == zero) return zero;

    // z^a e^-z, evaluated in log space to survive extreme arguments.
    const Real scale_log = a * log(z) - z;
    if (z < a + Real(1)) {
        Real ap = a;
        Real del = Real(1) / a;
        Real sum = del;
        for (int n = 0; n < 10000; ++n) {
            ap += Real(1);
            del *= z / ap;
            sum += del;
            if (fabs(del) < fabs(sum) * eps) return sum * exp(scale_log);
        }
        throw NumericError("lower incomplete gamma series failed to converge");
    }

    // Modified Lentz continued fraction for the upper incomplete gamma.
    const Real fpmin = std::numeric_limits<Real>::min() / eps;
    Real b = z + Real(1) - a;
    Real c = Real(1) / fpmin;
    Real d = Real(1) / b;
    Real h = d;
    for (int i = 1; i < 10000; ++i) {
        const Real an = -Real(i) * (Real(i) - a);
        b += Real(2);
        d = an * d + b;
        if (fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (fabs(c) < fpmin) c = fpmin;
        d = Real(1) / d;
        const Real del = d * c;
        h *= del;
        if (fabs(del - Real(1)) < eps) {
            const Real upper = exp(scale_log) * h;
            return gamma_a - upper;
        }
    }
    throw NumericError("upper incomplete gamma continued fraction failed to converge");
}

// Regularized upper incomplete gamma Q(a,z) for integer-friendly use in
// tail bounds; accurate when z is large (no 1-P cancellation).
template <class Real>
Real regularized_upper_gamma_t(const Real& a, const Real& z, const Real& gamma_a) {
    using std::exp;
    using std::fabs;
    using std::log;

    const Real eps = std::numeric_limits<Real>::epsilon();
    if (z == Real(0)) return Real(1);
    if (z < a + Real(1))
        return (gamma_a - lower_incomplete_gamma_t(a, z, gamma_a)) / gamma_a;

    const Real scale_log = a * log(z) - z;
    const Real fpmin = std::numeric_limits<Real>::min() / eps;
    Real b = z + Real(1) - a;
    Real c = Real(1) / fpmin;
    Real d = Real(1) / b;
    Real h = d;
    for (int i = 1; i < 10000; ++i) {
        const Real an = -Real(i) * (Real(i) - a);
        b += Real(2);
        d = an * d + b;
        if (fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (fabs(c) < fpmin) c = fpmin;
        d = Real(1) / d;
        const Real del = d * c;
        h *= del;
        if (fabs(del - Real(1)) < eps) return exp(scale_log) * h / gamma_a;
    }
    throw NumericError("upper incomplete gamma continued fraction failed to converge");
}

template <class Real>
Real factorial_t(int n) {
    Real out(1);
    for (int i = 2; i <= n; ++i) out *= Real(i);
    return out;
}

} // namespace mhrelay::detail
