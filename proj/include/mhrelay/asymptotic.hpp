#pragma once

#include <span>
#include <vector>

#include "mhrelay/bler.hpp"
#include "mhrelay/fbl.hpp"
#include "mhrelay/system_model.hpp"

namespace mhrelay {

struct AsymptoticReport {
    std::vector<double> per_hop_asym;
    double e2e_asym = 0;
    double diversity_order = 0; // N_T * N_R for both schemes
    double array_gain = 0;      // G such that e2e ~ (G * gamma_bar)^-D
    double y_factor = 0;        // scheme-dependent constant in the tail law
};

// High-SNR per-hop tail law:
//   xi sqrt(beta) [phi_H^{D+1} - phi_L^{D+1}] / (w (D+1) gamma_bar_k^D)
// with D = N_T N_R and w = (N_R!)^{N_T} for TAS/MRC, w = 1 for TAS/SC.
double hop_bler_asymptotic(const HopBudget& budget, const FblParams& p,
                           Scheme scheme, int n_t, int n_r);

// The per-hop tails are all << 1 at high SNR, so the end-to-end tail is
// their plain sum.
double e2e_bler_asymptotic(std::span<const double> per_hop_asym);

// Least-squares slope of -log10(BLER) against log10(gamma_bar) over tail
// points (all BLER must lie in (0, 1e-3)); estimates the diversity order.
double diversity_order_fit(std::span<const double> snr_db_grid,
                           std::span<const double> e2e_bler_values);

// Scheme constant and array gain of the e2e tail law.
double y_factor(const FblParams& p, Scheme scheme, int n_t, int n_r);
double array_gain(const SystemConfig& cfg, std::span<const HopBudget> budgets,
                  const FblParams& p, Scheme scheme);

// Horizontal separation of the two schemes' asymptotes:
// 10 log10((N_R!)^{1/N_R}) dB.
double snr_gap_db(int n_r);

AsymptoticReport analyze_asymptotic(const SystemConfig& cfg);

} // namespace mhrelay
