#include "mhrelay/asymptotic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mhrelay/errors.hpp"

namespace mhrelay {

namespace {

// log of xi sqrt(beta) (phi_H^{D+1} - phi_L^{D+1}) / (w (D+1)), evaluated
// in log space so large diversity orders cannot overflow.
double log_y_factor(const FblParams& p, Scheme scheme, int n_t, int n_r) {
    const int d = n_t * n_r;
    const double log_xi_sb =
        std::log(p.xi) + 0.5 * std::log(static_cast<double>(p.blocklength));
    const double ratio = p.phi_low / p.phi_high; // in [0,1)
    const double log_power_diff =
        (d + 1) * std::log(p.phi_high) + std::log1p(-std::pow(ratio, d + 1));
    double out = log_xi_sb + log_power_diff - std::log(static_cast<double>(d + 1));
    if (scheme == Scheme::TasMrc) out -= n_t * std::lgamma(n_r + 1.0);
    return out;
}

} // namespace

double hop_bler_asymptotic(const HopBudget& budget, const FblParams& p, Scheme scheme,
                           int n_t, int n_r) {
    if (!(budget.avg_snr_linear > 0))
        throw std::domain_error("average hop SNR must be > 0");
    const int d = n_t * n_r;
    return std::exp(log_y_factor(p, scheme, n_t, n_r) -
                    d * std::log(budget.avg_snr_linear));
}

double e2e_bler_asymptotic(std::span<const double> per_hop_asym) {
    if (per_hop_asym.empty())
        throw std::domain_error("e2e_bler_asymptotic: empty per-hop list");
    double sum = 0;
    for (double v : per_hop_asym) sum += v;
    return sum;
}

double diversity_order_fit(std::span<const double> snr_db_grid,
                           std::span<const double> e2e_bler_values) {
    if (snr_db_grid.size() != e2e_bler_values.size())
        throw std::domain_error("diversity_order_fit: grid/value size mismatch");
    if (snr_db_grid.size() < 2)
        throw std::domain_error("diversity_order_fit: need >= 2 tail points");

    const size_t n = snr_db_grid.size();
    double mx = 0, my = 0;
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        const double v = e2e_bler_values[i];
        if (!(v > 0) || !(v < 1e-3))
            throw std::domain_error(
                "diversity_order_fit: tail points must have BLER in (0, 1e-3)");
        xs[i] = snr_db_grid[i] / 10.0; // log10 of the linear SNR
        ys[i] = -std::log10(v);
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0)) throw std::domain_error("diversity_order_fit: degenerate SNR grid");
    return sxy / sxx;
}

double y_factor(const FblParams& p, Scheme scheme, int n_t, int n_r) {
    return std::exp(log_y_factor(p, scheme, n_t, n_r));
}

double array_gain(const SystemConfig& cfg, std::span<const HopBudget> budgets,
                  const FblParams& p, Scheme scheme) {
    if (budgets.empty()) throw std::domain_error("array_gain: no hop budgets");
    const int d = cfg.tx_antennas * cfg.rx_antennas;

    // log sum_k c_k^-D via logsumexp.
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(budgets.size());
    for (const auto& b : budgets) {
        const double t = -d * std::log(b.channel_gain);
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    double accum = 0;
    for (double t : terms) accum += std::exp(t - max_term);
    const double log_sum = max_term + std::log(accum);

    const double log_y = log_y_factor(p, scheme, cfg.tx_antennas, cfg.rx_antennas);
    return std::exp(-(log_y + log_sum) / d);
}

double snr_gap_db(int n_r) {
    if (n_r < 1) throw std::domain_error("snr_gap_db: N_R must be >= 1");
    return 10.0 * std::lgamma(n_r + 1.0) / (n_r * std::numbers::ln10);
}

AsymptoticReport analyze_asymptotic(const SystemConfig& cfg) {
    cfg.validate();
    AsymptoticReport report;
    const auto budgets = build_hop_budgets(cfg);
    const auto params = build_fbl_params(coding_rate(cfg), cfg.blocklength);
    for (const auto& b : budgets)
        report.per_hop_asym.push_back(
            hop_bler_asymptotic(b, params, cfg.scheme, cfg.tx_antennas, cfg.rx_antennas));
    report.e2e_asym = e2e_bler_asymptotic(report.per_hop_asym);
    report.diversity_order = static_cast<double>(cfg.tx_antennas) * cfg.rx_antennas;
    report.y_factor = y_factor(params, cfg.scheme, cfg.tx_antennas, cfg.rx_antennas);
    report.array_gain = array_gain(cfg, budgets, params, cfg.scheme);
    return report;
}

} // namespace mhrelay
