#pragma once

#include <cstdint>

namespace mhrelay {

// Linearization constants for the conditional-BLER curve of a rate-R,
// blocklength-beta code under the normal approximation. The conditional
// BLER as a function of the instantaneous SNR is replaced by a piecewise
// linear ramp: 1 below phi_low, 0 above phi_high, slope -xi*sqrt(beta)
// in between, centered at tau where the BLER equals 1/2.
struct FblParams {
    double rate = 0;        // R, bits per CU
    long long blocklength = 0;
    double xi = 0;          // [2*pi*(2^{2R}-1)]^{-1/2}
    double tau = 0;         // 2^R - 1
    double phi_low = 0;     // max(tau - 1/(2*xi*sqrt(beta)), 0)
    double phi_high = 0;    // tau + 1/(2*xi*sqrt(beta))
};

// Gaussian tail probability Q(z).
double q_function(double z);

// Inverse of q_function on (0,1). Rational approximation of the normal
// quantile refined by one Newton step.
double inv_q_function(double p);

// Lower incomplete gamma integral(0..z) e^-t t^(a-1) dt, a > 0, z >= 0.
// Series expansion for z < a+1, continued fraction otherwise.
double lower_incomplete_gamma(double a, double z);

// Shannon capacity log2(1+gamma) of the complex AWGN channel at SNR gamma.
double capacity(double gamma);

// Channel dispersion V(gamma) = (1 - (1+gamma)^-2) * (log2 e)^2.
double dispersion(double gamma);

FblParams build_fbl_params(double rate, long long blocklength);

// Exact normal-approximation conditional BLER
// Q((C(gamma) - R) / sqrt(V(gamma)/beta)). At gamma = 0 the dispersion
// vanishes; the sign-of-(C-R) limit applies.
double instantaneous_bler(double gamma, double rate, long long blocklength);

// Piecewise-linear approximation of instantaneous_bler built from p.
double linearized_bler(double gamma, const FblParams& p);

// Maximum coding rate achievable at blocklength beta and target BLER
// epsilon: C(gamma) - sqrt(V(gamma)/beta) * Qinv(epsilon). May be
// negative for small gamma.
double max_coding_rate(double gamma, long long blocklength, double target_bler);

} // namespace mhrelay
