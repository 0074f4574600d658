#pragma once

#include <string>
#include <vector>

namespace mhrelay {

enum class Scheme {
    TasMrc, // transmit antenna selection + maximum ratio combining
    TasSc,  // transmit antenna selection + selection combining
};

const char* to_token(Scheme s);          // "tas-mrc" / "tas-sc"
const char* to_display(Scheme s);        // "TAS/MRC" / "TAS/SC"
Scheme scheme_from_token(const std::string& token);

// Full network/waveform parameterization. K relays give K+1 hops; the
// source-to-destination distance D is split equally and so is the total
// transmit power.
struct SystemConfig {
    int relays = 3;                 // K; hops = K+1
    int tx_antennas = 2;            // N_T
    int rx_antennas = 2;            // N_R
    long long info_bits = 1024;     // bits per packet
    long long blocklength = 128;    // channel uses per packet
    double pathloss_exponent = 3.0; // eta
    double total_distance = 1.0;    // normalized D
    double avg_snr_db = 10.0;       // total-power SNR P_S/N_0 in dB
    Scheme scheme = Scheme::TasMrc;

    // Throws ConfigError on invariant violations; returns advisory flags
    // (e.g. "beta_lt_100") for configurations that are legal but unusual.
    std::vector<std::string> validate() const;
};

// Per-hop link budget under equal power/distance allocation.
struct HopBudget {
    int hop_index = 1;          // 1..K+1
    double distance = 1.0;      // d_k
    double channel_gain = 1.0;  // c_k = d_k^{-eta} / (K+1)
    double avg_snr_linear = 1;  // gamma_bar_k = c_k * 10^(avg_snr_db/10)
};

double coding_rate(const SystemConfig& cfg); // T / beta, bits per CU

std::vector<HopBudget> build_hop_budgets(const SystemConfig& cfg);

double db_to_linear(double db);
double linear_to_db(double linear);

} // namespace mhrelay
