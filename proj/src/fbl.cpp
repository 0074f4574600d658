#include "mhrelay/fbl.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mhrelay/detail/incomplete_gamma.hpp"
#include "mhrelay/errors.hpp"

namespace mhrelay {

namespace {
constexpr double kLog2E = std::numbers::log2e;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2Pi = 2.50662827463100050242;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / kSqrt2Pi; }

// Acklam's rational approximation of the standard normal quantile,
// relative error below 1.2e-9 before refinement.
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > 1 - plow) {
        const double q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}
} // namespace

double q_function(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double inv_q_function(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("inv_q_function: p must lie in (0,1)");
    // Q(z) = p  <=>  Phi(z) = 1-p.
    double z = normal_quantile(1.0 - p);
    const double pdf = normal_pdf(z);
    if (pdf > 0) z += (q_function(z) - p) / pdf; // one Newton step
    return z;
}

double lower_incomplete_gamma(double a, double z) {
    if (!(a > 0)) throw std::domain_error("lower_incomplete_gamma: a must be > 0");
    if (!(z >= 0)) throw std::domain_error("lower_incomplete_gamma: z must be >= 0");
    return detail::lower_incomplete_gamma_t<double>(a, z, std::tgamma(a));
}

double capacity(double gamma) { return std::log2(1.0 + gamma); }

double dispersion(double gamma) {
    const double u = 1.0 + gamma;
    return (1.0 - 1.0 / (u * u)) * kLog2E * kLog2E;
}

FblParams build_fbl_params(double rate, long long blocklength) {
    if (!(rate > 0)) throw std::domain_error("build_fbl_params: rate must be > 0");
    if (blocklength < 1) throw std::domain_error("build_fbl_params: blocklength must be >= 1");

    FblParams p;
    p.rate = rate;
    p.blocklength = blocklength;
    p.tau = std::exp2(rate) - 1.0;
    const double two2r = std::exp2(2.0 * rate) - 1.0;
    p.xi = 1.0 / std::sqrt(2.0 * std::numbers::pi * two2r);
    if (!std::isfinite(p.tau) || !std::isfinite(p.xi) || p.xi <= 0)
        throw NumericError("build_fbl_params: rate too large for double-precision constants");
    const double half_width = 1.0 / (2.0 * p.xi * std::sqrt(static_cast<double>(blocklength)));
    p.phi_high = p.tau + half_width;
    p.phi_low = std::max(p.tau - half_width, 0.0);
    return p;
}

double instantaneous_bler(double gamma, double rate, long long blocklength) {
    if (!(gamma >= 0)) throw std::domain_error("instantaneous_bler: gamma must be >= 0");
    const double c = capacity(gamma);
    const double v = dispersion(gamma);
    if (v <= 0) {
        if (c < rate) return 1.0;
        if (c > rate) return 0.0;
        return 0.5;
    }
    return q_function((c - rate) / std::sqrt(v / static_cast<double>(blocklength)));
}

double linearized_bler(double gamma, const FblParams& p) {
    const double ramp =
        0.5 - p.xi * std::sqrt(static_cast<double>(p.blocklength)) * (gamma - p.tau);
    if (ramp >= 1.0) return 1.0;
    if (ramp <= 0.0) return 0.0;
    return ramp;
}

double max_coding_rate(double gamma, long long blocklength, double target_bler) {
    if (!(target_bler > 0.0) || !(target_bler < 1.0))
        throw std::domain_error("max_coding_rate: target_bler must lie in (0,1)");
    if (gamma == 0) return 0.0;
    return capacity(gamma) -
           std::sqrt(dispersion(gamma) / static_cast<double>(blocklength)) *
               inv_q_function(target_bler);
}

} // namespace mhrelay
