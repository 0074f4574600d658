#pragma once

#include <span>
#include <vector>

#include "mhrelay/fbl.hpp"
#include "mhrelay/system_model.hpp"

namespace mhrelay {

enum class BlerMethod {
    ClosedForm,       // analytic expansion of the linearized average BLER
    QuadratureLinear, // adaptive quadrature of the linearized integrand
    QuadratureExact,  // adaptive quadrature of the exact Q-form integrand
};

const char* to_token(BlerMethod m);

struct HopBler {
    int hop_index = 1;
    Scheme scheme = Scheme::TasMrc;
    double value = 0;   // average BLER in [0,1]
    BlerMethod method = BlerMethod::ClosedForm;
    bool clamped = false; // raw result strayed outside [0,1] and was clamped
};

struct BlerReport {
    SystemConfig config;
    std::vector<HopBler> per_hop;
    double e2e = 0;
};

// CDF of the post-combining SNR at one hop.
// TAS/MRC: {1 - e^{-g/gb} sum_{n<N_R} (g/gb)^n/n!}^{N_T}
// TAS/SC:  {1 - e^{-g/gb}}^{N_T N_R}
// Evaluated through the regularized incomplete gamma / expm1 so small
// arguments keep full relative accuracy.
double cdf_tas_mrc(double gamma, double gamma_bar, int n_t, int n_r);
double cdf_tas_sc(double gamma, double gamma_bar, int n_t, int n_r);

// Densities matching the CDFs above (used by the exact-Q oracle).
double pdf_tas_mrc(double gamma, double gamma_bar, int n_t, int n_r);
double pdf_tas_sc(double gamma, double gamma_bar, int n_t, int n_r);

// Average BLER of one hop from the analytic expansion of the linearized
// integrand. The alternating binomial sums are evaluated in double
// precision first and re-evaluated at increasing multiprecision widths
// whenever cancellation would eat into the 1e-12 certificate, so the
// returned value is trustworthy even deep in the high-SNR tail.
HopBler hop_bler_closed_form(const HopBudget& budget, const FblParams& p,
                             Scheme scheme, int n_t, int n_r);

enum class BlerIntegrand { Linearized, ExactQ };

// Quadrature oracle for the same quantity. Linearized integrates the
// hop-SNR CDF over the linearization ramp (relative tolerance 1e-10);
// ExactQ integrates the exact conditional BLER against the SNR density
// with the tail truncated where the CDF complement drops below 1e-14.
HopBler hop_bler_quadrature(const HopBudget& budget, const FblParams& p,
                            Scheme scheme, int n_t, int n_r,
                            BlerIntegrand integrand);

// Selective decode-and-forward composition:
// e1 + sum_{k>=2} e_k prod_{m<k} (1 - e_m)  ==  1 - prod(1 - e_k).
double e2e_bler(std::span<const double> per_hop);
double e2e_bler(std::span<const HopBler> per_hop);

// Convenience: per-hop closed forms for every hop of cfg plus the e2e
// composition. Hops with identical budgets are evaluated once.
BlerReport analyze_bler(const SystemConfig& cfg);

} // namespace mhrelay
