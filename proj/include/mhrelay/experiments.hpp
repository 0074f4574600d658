#pragma once

#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "mhrelay/latency.hpp"
#include "mhrelay/monte_carlo.hpp"
#include "mhrelay/system_model.hpp"

namespace mhrelay {

enum class SweepVariable { SnrDb, Beta, Relays, Alpha };
enum class OutputKind { Analytic, Asymptotic, MonteCarlo, Latency, Throughput };

const char* to_token(SweepVariable v);
const char* to_token(OutputKind k);

struct SweepSpec {
    SweepVariable variable = SweepVariable::SnrDb;
    std::vector<double> grid; // non-empty, strictly increasing
    SystemConfig base;
    RetxConfig retx;
    McConfig mc;
    std::vector<Scheme> schemes = {Scheme::TasMrc, Scheme::TasSc};
    std::set<OutputKind> outputs = {OutputKind::Analytic, OutputKind::Asymptotic,
                                    OutputKind::Latency, OutputKind::Throughput};
    // Fields pinned explicitly by the user (field names as in the config
    // file); the swept variable must not appear here.
    std::set<std::string> pinned;

    void validate() const; // throws ConfigError with field diagnostics
};

// One output row. Cells left NaN were not requested (or failed; see
// flags). The fixed CSV column order matches the field order here.
struct ResultRow {
    Scheme scheme = Scheme::TasMrc;
    int relays = 0;
    int tx_antennas = 0;
    int rx_antennas = 0;
    double snr_db = 0;
    long long blocklength = 0;
    long long info_bits = 0;
    double rate = 0;
    double bler_analytic = std::numeric_limits<double>::quiet_NaN();
    double bler_asymptotic = std::numeric_limits<double>::quiet_NaN();
    double bler_mc_mean = std::numeric_limits<double>::quiet_NaN();
    double bler_mc_ci95 = std::numeric_limits<double>::quiet_NaN();
    double latency_cu = std::numeric_limits<double>::quiet_NaN();
    double latency_ms = std::numeric_limits<double>::quiet_NaN();
    double throughput_bpcu = std::numeric_limits<double>::quiet_NaN();
    std::string flags;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<std::string> summary;    // headline quantities, one per line
    std::string resolved_config;         // full key=value echo of the run
};

ResultTable run_sweep(const SweepSpec& spec);

// Hard-coded parameter presets reproducing the reference experiments.
// Valid names: fig2 fig3 fig5 fig6 fig7 fig8.
ResultTable run_figure(const std::string& name, const McConfig& mc,
                       bool with_monte_carlo = false);

enum class OutputFormat { Csv, Jsonl };

void write_table(std::ostream& os, const ResultTable& table, OutputFormat format);

// Flat key = value configuration file; '#' starts a comment. Returns the
// key/value pairs in file order; unknown keys are the caller's problem.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies recognized keys onto the three config structs, recording each
// applied key in pinned. Throws ConfigError on unknown keys / bad values.
void apply_config_entries(const std::map<std::string, std::string>& entries,
                          SystemConfig& sys, RetxConfig& retx, McConfig& mc,
                          std::set<std::string>* pinned = nullptr);

} // namespace mhrelay
