#include "mhrelay/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mhrelay/asymptotic.hpp"
#include "mhrelay/bler.hpp"
#include "mhrelay/errors.hpp"

namespace mhrelay {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void append_flag(std::string& flags, const std::string& token) {
    if (!flags.empty()) flags += ";";
    flags += token;
}

long long parse_ll(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long long out = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double out = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// One sweep row; numeric failures annotate the row instead of aborting.
ResultRow compute_row(const SystemConfig& cfg, const RetxConfig& retx, const McConfig& mc,
                      const std::set<OutputKind>& outputs) {
    ResultRow row;
    row.scheme = cfg.scheme;
    row.relays = cfg.relays;
    row.tx_antennas = cfg.tx_antennas;
    row.rx_antennas = cfg.rx_antennas;
    row.snr_db = cfg.avg_snr_db;
    row.blocklength = cfg.blocklength;
    row.info_bits = cfg.info_bits;
    row.rate = coding_rate(cfg);
    for (const auto& f : cfg.validate()) append_flag(row.flags, f);

    const bool need_analytic = outputs.count(OutputKind::Analytic) ||
                               outputs.count(OutputKind::Latency) ||
                               outputs.count(OutputKind::Throughput);
    try {
        if (need_analytic) {
            const BlerReport rep = analyze_bler(cfg);
            for (const auto& h : rep.per_hop)
                if (h.clamped) {
                    append_flag(row.flags, "clamped");
                    break;
                }
            if (outputs.count(OutputKind::Analytic)) row.bler_analytic = rep.e2e;
            if (outputs.count(OutputKind::Latency) ||
                outputs.count(OutputKind::Throughput)) {
                std::vector<double> per_hop;
                per_hop.reserve(rep.per_hop.size());
                for (const auto& h : rep.per_hop) per_hop.push_back(h.value);
                const double t_s = success_latency(cfg, retx);
                const double t_f = failure_latency(per_hop, cfg, retx);
                const double latency = e2e_latency(rep.e2e, t_s, t_f, retx);
                if (outputs.count(OutputKind::Latency)) {
                    row.latency_cu = latency;
                    row.latency_ms = latency * retx.cu_duration_us / 1000.0;
                }
                if (outputs.count(OutputKind::Throughput))
                    row.throughput_bpcu =
                        e2e_throughput(rep.e2e, latency, t_f, retx, cfg.info_bits);
            }
        }
        if (outputs.count(OutputKind::Asymptotic))
            row.bler_asymptotic = analyze_asymptotic(cfg).e2e_asym;
        if (outputs.count(OutputKind::MonteCarlo)) {
            const auto budgets = build_hop_budgets(cfg);
            const McEstimate est = estimate_e2e_bler(cfg, budgets, mc);
            row.bler_mc_mean = est.mean;
            row.bler_mc_ci95 = est.ci_halfwidth_95;
        }
    } catch (const std::exception& e) {
        append_flag(row.flags, std::string("error:") + e.what());
    }
    return row;
}

std::string describe_config(const SweepSpec& spec) {
    std::ostringstream os;
    os << "variable=" << to_token(spec.variable);
    os << " relays=" << spec.base.relays << " tx_antennas=" << spec.base.tx_antennas
       << " rx_antennas=" << spec.base.rx_antennas << " info_bits=" << spec.base.info_bits
       << " blocklength=" << spec.base.blocklength
       << " pathloss_exponent=" << fmt(spec.base.pathloss_exponent)
       << " total_distance=" << fmt(spec.base.total_distance)
       << " avg_snr_db=" << fmt(spec.base.avg_snr_db);
    os << " max_retx=" << spec.retx.max_retx
       << " feedback_delay_cu=" << fmt(spec.retx.feedback_delay_cu)
       << " decode_delay_factor=" << fmt(spec.retx.decode_delay_factor)
       << " cu_duration_us=" << fmt(spec.retx.cu_duration_us);
    if (spec.outputs.count(OutputKind::MonteCarlo))
        os << " trials=" << spec.mc.trials << " seed=" << spec.mc.seed
           << " estimator=" << to_token(spec.mc.estimator)
           << " chunk_size=" << spec.mc.chunk_size;
    os << " schemes=";
    for (size_t i = 0; i < spec.schemes.size(); ++i)
        os << (i ? "," : "") << to_token(spec.schemes[i]);
    os << " outputs=";
    bool first = true;
    for (const auto k : spec.outputs) {
        os << (first ? "" : ",") << to_token(k);
        first = false;
    }
    return os.str();
}

const char* config_key(SweepVariable v) {
    switch (v) {
        case SweepVariable::SnrDb: return "avg_snr_db";
        case SweepVariable::Beta: return "blocklength";
        case SweepVariable::Relays: return "relays";
        case SweepVariable::Alpha: return "decode_delay_factor";
    }
    return "?";
}

} // namespace

const char* to_token(SweepVariable v) {
    switch (v) {
        case SweepVariable::SnrDb: return "snr_db";
        case SweepVariable::Beta: return "beta";
        case SweepVariable::Relays: return "k";
        case SweepVariable::Alpha: return "alpha";
    }
    return "?";
}

const char* to_token(OutputKind k) {
    switch (k) {
        case OutputKind::Analytic: return "analytic";
        case OutputKind::Asymptotic: return "asymptotic";
        case OutputKind::MonteCarlo: return "monte_carlo";
        case OutputKind::Latency: return "latency";
        case OutputKind::Throughput: return "throughput";
    }
    return "?";
}

void SweepSpec::validate() const {
    if (grid.empty()) throw ConfigError("sweep grid: must be non-empty");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ConfigError("sweep grid: values must be strictly increasing");
    if (outputs.empty())
        throw ConfigError("outputs: at least one output kind must be requested");
    if (schemes.empty()) throw ConfigError("schemes: at least one scheme is required");
    if (pinned.count(config_key(variable)))
        throw ConfigError(std::string("sweep variable '") + to_token(variable) +
                          "' is also pinned to a fixed value (" + config_key(variable) +
                          ")");
    if (variable == SweepVariable::Beta || variable == SweepVariable::Relays) {
        for (double v : grid) {
            if (v != std::floor(v))
                throw ConfigError(std::string(to_token(variable)) +
                                  " grid: values must be integers");
            if (variable == SweepVariable::Beta && v < 1)
                throw ConfigError("beta grid: values must be >= 1");
            if (variable == SweepVariable::Relays && v < 0)
                throw ConfigError("k grid: values must be >= 0");
        }
    }
    base.validate();
    retx.validate();
    mc.validate();
}

ResultTable run_sweep(const SweepSpec& spec) {
    spec.validate();
    ResultTable table;
    table.resolved_config = describe_config(spec);

    for (double value : spec.grid) {
        for (Scheme scheme : spec.schemes) {
            SystemConfig cfg = spec.base;
            RetxConfig retx = spec.retx;
            cfg.scheme = scheme;
            switch (spec.variable) {
                case SweepVariable::SnrDb: cfg.avg_snr_db = value; break;
                case SweepVariable::Beta: cfg.blocklength = static_cast<long long>(value); break;
                case SweepVariable::Relays: cfg.relays = static_cast<int>(value); break;
                case SweepVariable::Alpha: retx.decode_delay_factor = value; break;
            }
            table.rows.push_back(compute_row(cfg, retx, spec.mc, spec.outputs));
        }
    }
    return table;
}

void write_table(std::ostream& os, const ResultTable& table, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        if (!table.resolved_config.empty()) os << "# config: " << table.resolved_config << "\n";
        os << "scheme,K,N_T,N_R,snr_db,beta,info_bits,rate,bler_analytic,bler_asymptotic,"
              "bler_mc_mean,bler_mc_ci95,latency_cu,latency_ms,throughput_bpcu,flags\n";
        for (const auto& r : table.rows) {
            os << to_token(r.scheme) << ',' << r.relays << ',' << r.tx_antennas << ','
               << r.rx_antennas << ',' << fmt(r.snr_db) << ',' << r.blocklength << ','
               << r.info_bits << ',' << fmt(r.rate) << ',' << fmt(r.bler_analytic) << ','
               << fmt(r.bler_asymptotic) << ',' << fmt(r.bler_mc_mean) << ','
               << fmt(r.bler_mc_ci95) << ',' << fmt(r.latency_cu) << ','
               << fmt(r.latency_ms) << ',' << fmt(r.throughput_bpcu) << ',' << r.flags
               << "\n";
        }
        for (const auto& line : table.summary) os << "# " << line << "\n";
        return;
    }

    for (const auto& r : table.rows) {
        nlohmann::ordered_json j;
        j["scheme"] = to_token(r.scheme);
        j["K"] = r.relays;
        j["N_T"] = r.tx_antennas;
        j["N_R"] = r.rx_antennas;
        j["snr_db"] = r.snr_db;
        j["beta"] = r.blocklength;
        j["info_bits"] = r.info_bits;
        j["rate"] = r.rate;
        j["bler_analytic"] = r.bler_analytic;
        j["bler_asymptotic"] = r.bler_asymptotic;
        j["bler_mc_mean"] = r.bler_mc_mean;
        j["bler_mc_ci95"] = r.bler_mc_ci95;
        j["latency_cu"] = r.latency_cu;
        j["latency_ms"] = r.latency_ms;
        j["throughput_bpcu"] = r.throughput_bpcu;
        j["flags"] = r.flags;
        j["config"] = table.resolved_config;
        os << j.dump() << "\n";
    }
    for (const auto& line : table.summary) {
        nlohmann::ordered_json j;
        j["summary"] = line;
        os << j.dump() << "\n";
    }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        out[key] = value;
    }
    return out;
}

void apply_config_entries(const std::map<std::string, std::string>& entries,
                          SystemConfig& sys, RetxConfig& retx, McConfig& mc,
                          std::set<std::string>* pinned) {
    for (const auto& [key, value] : entries) {
        if (key == "relays") sys.relays = static_cast<int>(parse_ll(key, value));
        else if (key == "tx_antennas") sys.tx_antennas = static_cast<int>(parse_ll(key, value));
        else if (key == "rx_antennas") sys.rx_antennas = static_cast<int>(parse_ll(key, value));
        else if (key == "info_bits") sys.info_bits = parse_ll(key, value);
        else if (key == "blocklength") sys.blocklength = parse_ll(key, value);
        else if (key == "pathloss_exponent") sys.pathloss_exponent = parse_real(key, value);
        else if (key == "total_distance") sys.total_distance = parse_real(key, value);
        else if (key == "avg_snr_db") sys.avg_snr_db = parse_real(key, value);
        else if (key == "scheme") sys.scheme = scheme_from_token(value);
        else if (key == "max_retx") retx.max_retx = parse_ll(key, value);
        else if (key == "feedback_delay_cu") retx.feedback_delay_cu = parse_real(key, value);
        else if (key == "decode_delay_factor") retx.decode_delay_factor = parse_real(key, value);
        else if (key == "cu_duration_us") retx.cu_duration_us = parse_real(key, value);
        else if (key == "trials") mc.trials = parse_ll(key, value);
        else if (key == "seed") mc.seed = static_cast<std::uint64_t>(parse_ll(key, value));
        else if (key == "estimator") mc.estimator = estimator_from_token(value);
        else if (key == "chunk_size") mc.chunk_size = parse_ll(key, value);
        else if (key == "threads") mc.threads = static_cast<int>(parse_ll(key, value));
        else throw ConfigError("unknown config key '" + key + "'");
        if (pinned) pinned->insert(key);
    }
}

// ---------------------------------------------------------------------
// Figure presets
// ---------------------------------------------------------------------

namespace {

std::vector<double> make_grid(double start, double stop, double step) {
    std::vector<double> grid;
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    return grid;
}

std::string fmt_summary(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Smallest blocklength whose e2e BLER meets the target (integer search).
long long smallest_beta_for_target(SystemConfig cfg, double target, long long beta_lo,
                                   long long beta_hi) {
    for (long long beta = beta_lo; beta <= beta_hi; ++beta) {
        cfg.blocklength = beta;
        if (analyze_bler(cfg).e2e <= target) return beta;
    }
    return -1;
}

} // namespace

ResultTable run_figure(const std::string& name, const McConfig& mc, bool with_monte_carlo) {
    SweepSpec spec;
    spec.mc = mc;
    if (with_monte_carlo) spec.outputs.insert(OutputKind::MonteCarlo);

    ResultTable table;

    if (name == "fig2") {
        // e2e BLER vs SNR for K in {1,2,3}; N_T = N_R = 2, T = 1024, beta = 128.
        spec.variable = SweepVariable::SnrDb;
        spec.grid = make_grid(0, 40, 2);
        spec.base.tx_antennas = 2;
        spec.base.rx_antennas = 2;
        spec.base.info_bits = 1024;
        spec.base.blocklength = 128;
        spec.outputs.erase(OutputKind::Latency);
        spec.outputs.erase(OutputKind::Throughput);
        for (int k : {1, 2, 3}) {
            spec.base.relays = k;
            auto part = run_sweep(spec);
            if (table.resolved_config.empty())
                table.resolved_config = part.resolved_config + " series=K:1,2,3";
            table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
        }
        for (int k : {1, 2, 3}) {
            for (const auto& r : table.rows)
                if (r.relays == k && r.snr_db == 10.0)
                    table.summary.push_back("fig2: e2e BLER at 10 dB, K=" +
                                            std::to_string(k) + " (" + to_token(r.scheme) +
                                            "): " + fmt_summary(r.bler_analytic));
        }
        return table;
    }

    if (name == "fig3") {
        // MIMO configuration comparison at K = 3, T = 1024, beta = 128.
        spec.variable = SweepVariable::SnrDb;
        spec.grid = make_grid(0, 40, 2);
        spec.base.relays = 3;
        spec.base.info_bits = 1024;
        spec.base.blocklength = 128;
        spec.outputs.erase(OutputKind::Latency);
        spec.outputs.erase(OutputKind::Throughput);
        const std::vector<std::pair<int, int>> antennas = {{1, 1}, {2, 2}, {2, 4}, {4, 2}};
        for (auto [nt, nr] : antennas) {
            spec.base.tx_antennas = nt;
            spec.base.rx_antennas = nr;
            auto part = run_sweep(spec);
            if (table.resolved_config.empty())
                table.resolved_config =
                    part.resolved_config + " series=antennas:1x1,2x2,2x4,4x2";
            table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
        }
        double max_sc_diff = 0;
        bool mrc_24_better = true;
        for (const auto& a : table.rows) {
            if (a.tx_antennas != 2 || a.rx_antennas != 4) continue;
            for (const auto& b : table.rows) {
                if (b.tx_antennas != 4 || b.rx_antennas != 2) continue;
                if (b.snr_db != a.snr_db || b.scheme != a.scheme) continue;
                if (a.scheme == Scheme::TasSc) {
                    const double denom = std::max(a.bler_analytic, b.bler_analytic);
                    if (denom > 0)
                        max_sc_diff = std::max(
                            max_sc_diff,
                            std::fabs(a.bler_analytic - b.bler_analytic) / denom);
                } else if (a.bler_analytic >= b.bler_analytic) {
                    mrc_24_better = false;
                }
            }
        }
        table.summary.push_back(
            "fig3: max relative difference of TAS/SC e2e BLER between (2,4) and (4,2): " +
            fmt_summary(max_sc_diff));
        table.summary.push_back(std::string("fig3: TAS/MRC strictly better with (2,4) "
                                            "than (4,2) at every grid SNR: ") +
                                (mrc_24_better ? "yes" : "no"));
        return table;
    }

    if (name == "fig5") {
        // e2e BLER vs beta at K = 3, T = 1024; headline search at 0 dB, (2,3).
        spec.variable = SweepVariable::Beta;
        spec.grid = make_grid(100, 1000, 10);
        spec.base.relays = 3;
        spec.base.tx_antennas = 2;
        spec.base.rx_antennas = 3;
        spec.base.info_bits = 1024;
        spec.base.avg_snr_db = 0;
        spec.outputs.erase(OutputKind::Latency);
        spec.outputs.erase(OutputKind::Throughput);
        table = run_sweep(spec);
        for (Scheme s : spec.schemes) {
            SystemConfig cfg = spec.base;
            cfg.scheme = s;
            const long long beta = smallest_beta_for_target(cfg, 1e-5, 100, 2000);
            table.summary.push_back(
                "fig5: smallest beta with e2e BLER <= 1e-5 at 0 dB (" +
                std::string(to_token(s)) + "): " + std::to_string(beta));
        }
        return table;
    }

    if (name == "fig6") {
        // Latency/throughput vs decoding delay factor for K in {3,5}.
        spec.variable = SweepVariable::Alpha;
        spec.grid = make_grid(0, 4, 0.25);
        spec.base.tx_antennas = 3;
        spec.base.rx_antennas = 3;
        spec.base.avg_snr_db = 10;
        spec.base.info_bits = 1024;
        spec.base.blocklength = 128;
        spec.retx.max_retx = 20;
        spec.retx.feedback_delay_cu = 40;
        for (int k : {3, 5}) {
            spec.base.relays = k;
            auto part = run_sweep(spec);
            if (table.resolved_config.empty())
                table.resolved_config = part.resolved_config + " series=K:3,5";
            table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
        }
        // Rows come out grid-value-major with the two schemes adjacent, so
        // pairs sit at even offsets within each K block.
        double max_gap = 0;
        for (size_t i = 0; i + 1 < table.rows.size(); i += 2) {
            const auto& a = table.rows[i];
            const auto& b = table.rows[i + 1];
            if (a.relays != 5) continue;
            const double gap =
                std::fabs(a.latency_cu - b.latency_cu) / std::max(a.latency_cu, b.latency_cu);
            max_gap = std::max(max_gap, gap);
        }
        table.summary.push_back(
            "fig6: max relative latency gap between schemes at K=5: " + fmt_summary(max_gap));
        return table;
    }

    if (name == "fig7") {
        // Latency/throughput vs blocklength; optimal beta per scheme.
        spec.variable = SweepVariable::Beta;
        spec.grid = make_grid(100, 1000, 10);
        spec.base.relays = 5;
        spec.base.tx_antennas = 3;
        spec.base.rx_antennas = 3;
        spec.base.avg_snr_db = -10;
        spec.base.info_bits = 1024;
        spec.retx.max_retx = 20;
        spec.retx.feedback_delay_cu = 40;
        spec.retx.decode_delay_factor = 2;
        table = run_sweep(spec);
        std::vector<long long> beta_grid;
        for (double v : spec.grid) beta_grid.push_back(static_cast<long long>(v));
        for (Scheme s : spec.schemes) {
            SystemConfig cfg = spec.base;
            cfg.scheme = s;
            const auto lat =
                optimize_blocklength(cfg, spec.retx, beta_grid, Objective::MinLatency);
            const auto thr =
                optimize_blocklength(cfg, spec.retx, beta_grid, Objective::MaxThroughput);
            table.summary.push_back(
                "fig7: optimal beta (" + std::string(to_token(s)) +
                ", min-latency): " + std::to_string(lat.best) + " CU, latency " +
                fmt_summary(lat.best_point.report.latency_cu) + " CU");
            table.summary.push_back(
                "fig7: optimal beta (" + std::string(to_token(s)) +
                ", max-throughput): " + std::to_string(thr.best) + " CU, throughput " +
                fmt_summary(thr.best_point.report.throughput_bpcu) + " bpcu");
        }
        return table;
    }

    if (name == "fig8") {
        // Latency/throughput vs number of relays; optimal K per scheme.
        spec.variable = SweepVariable::Relays;
        spec.grid = make_grid(0, 9, 1);
        spec.base.tx_antennas = 3;
        spec.base.rx_antennas = 3;
        spec.base.avg_snr_db = 15;
        spec.base.info_bits = 1024;
        spec.base.blocklength = 128;
        spec.retx.max_retx = 20;
        spec.retx.feedback_delay_cu = 40;
        spec.retx.decode_delay_factor = 2;
        table = run_sweep(spec);
        std::vector<long long> k_grid;
        for (double v : spec.grid) k_grid.push_back(static_cast<long long>(v));
        for (Scheme s : spec.schemes) {
            SystemConfig cfg = spec.base;
            cfg.scheme = s;
            const auto best = optimize_relays(cfg, spec.retx, k_grid, Objective::MinLatency);
            table.summary.push_back(
                "fig8: optimal K (" + std::string(to_token(s)) +
                "): " + std::to_string(best.best) + ", latency " +
                fmt_summary(best.best_point.report.latency_cu) + " CU = " +
                fmt_summary(best.best_point.report.latency_ms) + " ms, throughput " +
                fmt_summary(best.best_point.report.throughput_bpcu) + " bpcu");
        }
        return table;
    }

    throw ConfigError("unknown figure preset '" + name +
                      "' (expected fig2, fig3, fig5, fig6, fig7 or fig8)");
}

} // namespace mhrelay
