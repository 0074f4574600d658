#include "mhrelay/system_model.hpp"

#include <cmath>

#include "mhrelay/errors.hpp"

namespace mhrelay {

const char* to_token(Scheme s) {
    return s == Scheme::TasMrc ? "tas-mrc" : "tas-sc";
}

const char* to_display(Scheme s) {
    return s == Scheme::TasMrc ? "TAS/MRC" : "TAS/SC";
}

Scheme scheme_from_token(const std::string& token) {
    if (token == "tas-mrc" || token == "TAS/MRC" || token == "mrc") return Scheme::TasMrc;
    if (token == "tas-sc" || token == "TAS/SC" || token == "sc") return Scheme::TasSc;
    throw ConfigError("unknown scheme '" + token + "' (expected tas-mrc or tas-sc)");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

std::vector<std::string> SystemConfig::validate() const {
    if (relays < 0) throw ConfigError("relays: must be >= 0");
    if (tx_antennas < 1) throw ConfigError("tx_antennas: must be >= 1");
    if (rx_antennas < 1) throw ConfigError("rx_antennas: must be >= 1");
    if (info_bits < 1) throw ConfigError("info_bits: must be >= 1");
    if (blocklength < 1) throw ConfigError("blocklength: must be >= 1");
    if (!std::isfinite(pathloss_exponent) || pathloss_exponent <= 0)
        throw ConfigError("pathloss_exponent: must be finite and > 0");
    if (!std::isfinite(total_distance) || total_distance <= 0)
        throw ConfigError("total_distance: must be finite and > 0");
    if (!std::isfinite(avg_snr_db)) throw ConfigError("avg_snr_db: must be finite");
    const double rate = static_cast<double>(info_bits) / static_cast<double>(blocklength);
    if (!std::isfinite(rate) || rate <= 0)
        throw ConfigError("info_bits/blocklength: coding rate must be finite and positive");

    std::vector<std::string> flags;
    if (blocklength < 100) flags.push_back("beta_lt_100");
    return flags;
}

double coding_rate(const SystemConfig& cfg) {
    if (cfg.blocklength < 1) throw ConfigError("blocklength: must be >= 1");
    return static_cast<double>(cfg.info_bits) / static_cast<double>(cfg.blocklength);
}

std::vector<HopBudget> build_hop_budgets(const SystemConfig& cfg) {
    cfg.validate();
    const int hops = cfg.relays + 1;
    const double d = cfg.total_distance / hops;
    const double gain = std::pow(d, -cfg.pathloss_exponent) / hops;
    const double snr = gain * db_to_linear(cfg.avg_snr_db);

    std::vector<HopBudget> budgets(hops);
    for (int k = 0; k < hops; ++k)
        budgets[k] = HopBudget{k + 1, d, gain, snr};
    return budgets;
}

} // namespace mhrelay
