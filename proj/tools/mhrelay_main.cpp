// Command-line front end: parameter sweeps, figure presets, Monte Carlo
// validation and the blocklength / relay-count optimizers. Outputs CSV
// (default) or JSON lines; see README for the column schema.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mhrelay/asymptotic.hpp"
#include "mhrelay/bler.hpp"
#include "mhrelay/errors.hpp"
#include "mhrelay/experiments.hpp"
#include "mhrelay/latency.hpp"
#include "mhrelay/monte_carlo.hpp"

namespace {

using namespace mhrelay;

struct Range {
    bool is_range = false;
    double value = 0;
    double start = 0, stop = 0, step = 0;

    std::vector<double> grid(const std::string& flag) const {
        if (!is_range)
            throw ConfigError(flag + ": expected a start:stop:step range");
        if (step <= 0) throw ConfigError(flag + ": step must be > 0");
        if (stop < start) throw ConfigError(flag + ": stop must be >= start");
        std::vector<double> out;
        for (double v = start; v <= stop + 1e-9 * step; v += step) out.push_back(v);
        return out;
    }
};

Range parse_range(const std::string& flag, const std::string& text) {
    Range r;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        try {
            size_t pos = 0;
            r.value = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw ConfigError(flag + ": expected a number or start:stop:step, got '" +
                              text + "'");
        }
        return r;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw ConfigError(flag + ": expected start:stop:step, got '" + text + "'");
    try {
        r.start = std::stod(text.substr(0, c1));
        r.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        r.step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw ConfigError(flag + ": expected start:stop:step, got '" + text + "'");
    }
    r.is_range = true;
    return r;
}

// Raw option values; only options the user actually passed are applied.
struct CliValues {
    std::string config_path;
    std::string scheme = "both";
    std::string snr_db, beta, relays, alpha; // range-capable
    long long nt = 0, nr = 0, info_bits = 0;
    double eta = 0;
    long long max_retx = 0;
    double feedback_cu = 0;
    long long trials = 0;
    long long seed = 0;
    std::string estimator;
    long long chunk_size = 0;
    long long threads = -1;
    std::string outputs;
    std::string format = "csv";
    std::string output_path;
    std::string objective = "min-latency";
};

void add_common_options(CLI::App* cmd, CliValues& v) {
    cmd->add_option("--config", v.config_path, "flat key = value configuration file");
    cmd->add_option("--scheme", v.scheme, "tas-mrc, tas-sc or both")
        ->check(CLI::IsMember({"tas-mrc", "tas-sc", "both"}));
    cmd->add_option("--snr-db", v.snr_db, "average SNR in dB (value or start:stop:step)");
    cmd->add_option("--beta", v.beta, "blocklength in CUs (value or start:stop:step)");
    cmd->add_option("--k", v.relays, "number of relays (value or start:stop:step)");
    cmd->add_option("--alpha", v.alpha,
                    "decoding delay factor (value or start:stop:step)");
    cmd->add_option("--nt", v.nt, "transmit antennas");
    cmd->add_option("--nr", v.nr, "receive antennas");
    cmd->add_option("--info-bits", v.info_bits, "information bits per packet");
    cmd->add_option("--eta", v.eta, "path-loss exponent");
    cmd->add_option("--max-retx", v.max_retx, "maximum number of retransmissions");
    cmd->add_option("--feedback-cu", v.feedback_cu, "per-round feedback delay in CUs");
    cmd->add_option("--trials", v.trials, "Monte Carlo trials");
    cmd->add_option("--seed", v.seed, "Monte Carlo seed");
    cmd->add_option("--estimator", v.estimator, "semi or bernoulli")
        ->check(CLI::IsMember({"semi", "bernoulli"}));
    cmd->add_option("--chunk-size", v.chunk_size, "Monte Carlo chunk size");
    cmd->add_option("--threads", v.threads, "worker threads (0 = hardware)");
    cmd->add_option("--outputs", v.outputs,
                    "comma list of analytic,asymptotic,monte_carlo,latency,throughput");
    cmd->add_option("--format", v.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--output", v.output_path, "write results to this path");
}

struct ResolvedOptions {
    SystemConfig sys;
    RetxConfig retx;
    McConfig mc;
    std::set<std::string> pinned;
    std::vector<Scheme> schemes;
    std::optional<Range> snr_db, beta, relays, alpha;
    std::set<OutputKind> outputs{OutputKind::Analytic, OutputKind::Asymptotic,
                                 OutputKind::Latency, OutputKind::Throughput};
    bool outputs_given = false;
};

OutputKind output_kind_from_token(const std::string& token) {
    if (token == "analytic") return OutputKind::Analytic;
    if (token == "asymptotic") return OutputKind::Asymptotic;
    if (token == "monte_carlo" || token == "monte-carlo") return OutputKind::MonteCarlo;
    if (token == "latency") return OutputKind::Latency;
    if (token == "throughput") return OutputKind::Throughput;
    throw ConfigError("unknown output kind '" + token + "'");
}

ResolvedOptions resolve(const CLI::App* cmd, const CliValues& v) {
    ResolvedOptions r;

    if (!v.config_path.empty()) {
        auto entries = parse_config_file(v.config_path);
        if (auto it = entries.find("outputs"); it != entries.end()) {
            r.outputs.clear();
            std::stringstream ss(it->second);
            std::string token;
            while (std::getline(ss, token, ','))
                if (!token.empty()) r.outputs.insert(output_kind_from_token(token));
            r.outputs_given = true;
            entries.erase(it);
        }
        apply_config_entries(entries, r.sys, r.retx, r.mc, &r.pinned);
    }

    auto given = [&](const std::string& name) {
        return cmd->count(name) > 0;
    };

    if (given("--nt")) { r.sys.tx_antennas = static_cast<int>(v.nt); r.pinned.insert("tx_antennas"); }
    if (given("--nr")) { r.sys.rx_antennas = static_cast<int>(v.nr); r.pinned.insert("rx_antennas"); }
    if (given("--info-bits")) { r.sys.info_bits = v.info_bits; r.pinned.insert("info_bits"); }
    if (given("--eta")) { r.sys.pathloss_exponent = v.eta; r.pinned.insert("pathloss_exponent"); }
    if (given("--max-retx")) { r.retx.max_retx = v.max_retx; r.pinned.insert("max_retx"); }
    if (given("--feedback-cu")) { r.retx.feedback_delay_cu = v.feedback_cu; r.pinned.insert("feedback_delay_cu"); }
    if (given("--trials")) { r.mc.trials = v.trials; r.pinned.insert("trials"); }
    if (given("--seed")) { r.mc.seed = static_cast<std::uint64_t>(v.seed); r.pinned.insert("seed"); }
    if (given("--estimator")) { r.mc.estimator = estimator_from_token(v.estimator); r.pinned.insert("estimator"); }
    if (given("--chunk-size")) { r.mc.chunk_size = v.chunk_size; r.pinned.insert("chunk_size"); }
    if (given("--threads")) { r.mc.threads = static_cast<int>(v.threads); }

    if (given("--snr-db")) {
        r.snr_db = parse_range("--snr-db", v.snr_db);
        if (!r.snr_db->is_range) { r.sys.avg_snr_db = r.snr_db->value; r.pinned.insert("avg_snr_db"); }
    }
    if (given("--beta")) {
        r.beta = parse_range("--beta", v.beta);
        if (!r.beta->is_range) { r.sys.blocklength = static_cast<long long>(r.beta->value); r.pinned.insert("blocklength"); }
    }
    if (given("--k")) {
        r.relays = parse_range("--k", v.relays);
        if (!r.relays->is_range) { r.sys.relays = static_cast<int>(r.relays->value); r.pinned.insert("relays"); }
    }
    if (given("--alpha")) {
        r.alpha = parse_range("--alpha", v.alpha);
        if (!r.alpha->is_range) { r.retx.decode_delay_factor = r.alpha->value; r.pinned.insert("decode_delay_factor"); }
    }

    if (v.scheme == "both")
        r.schemes = {Scheme::TasMrc, Scheme::TasSc};
    else
        r.schemes = {scheme_from_token(v.scheme)};

    if (cmd->count("--outputs") > 0) {
        r.outputs.clear();
        std::stringstream ss(v.outputs);
        std::string token;
        while (std::getline(ss, token, ','))
            if (!token.empty()) r.outputs.insert(output_kind_from_token(token));
        r.outputs_given = true;
    }
    return r;
}

void emit(const ResultTable& table, const CliValues& v) {
    const OutputFormat format =
        v.format == "jsonl" ? OutputFormat::Jsonl : OutputFormat::Csv;
    if (v.output_path.empty()) {
        write_table(std::cout, table, format);
        return;
    }
    std::ofstream out(v.output_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + v.output_path + "'");
    write_table(out, table, format);
}

int run_sweep_cmd(const CLI::App* cmd, const CliValues& v) {
    ResolvedOptions r = resolve(cmd, v);

    SweepSpec spec;
    spec.base = r.sys;
    spec.retx = r.retx;
    spec.mc = r.mc;
    spec.schemes = r.schemes;
    spec.outputs = r.outputs;
    spec.pinned = r.pinned;

    int ranged = 0;
    if (r.snr_db && r.snr_db->is_range) { spec.variable = SweepVariable::SnrDb; spec.grid = r.snr_db->grid("--snr-db"); ++ranged; }
    if (r.beta && r.beta->is_range) { spec.variable = SweepVariable::Beta; spec.grid = r.beta->grid("--beta"); ++ranged; }
    if (r.relays && r.relays->is_range) { spec.variable = SweepVariable::Relays; spec.grid = r.relays->grid("--k"); ++ranged; }
    if (r.alpha && r.alpha->is_range) { spec.variable = SweepVariable::Alpha; spec.grid = r.alpha->grid("--alpha"); ++ranged; }
    if (ranged != 1)
        throw ConfigError("sweep: exactly one of --snr-db/--beta/--k/--alpha must be a "
                          "start:stop:step range");

    emit(run_sweep(spec), v);
    return 0;
}

int run_figure_cmd(const CLI::App* cmd, const CliValues& v, const std::string& name) {
    ResolvedOptions r = resolve(cmd, v);
    const bool with_mc = r.outputs_given && r.outputs.count(OutputKind::MonteCarlo) > 0;
    emit(run_figure(name, r.mc, with_mc), v);
    return 0;
}

int run_optimize_cmd(const CLI::App* cmd, const CliValues& v, bool over_beta) {
    ResolvedOptions r = resolve(cmd, v);

    const Objective objective = v.objective == "max-throughput"
                                    ? Objective::MaxThroughput
                                    : Objective::MinLatency;
    std::vector<long long> grid;
    const Range fallback =
        over_beta ? Range{true, 0, 100, 1000, 10} : Range{true, 0, 0, 9, 1};
    const std::optional<Range>& opt = over_beta ? r.beta : r.relays;
    const Range range = (opt && opt->is_range) ? *opt : fallback;
    for (double g : range.grid(over_beta ? "--beta" : "--k"))
        grid.push_back(static_cast<long long>(g));

    OptimizationResult best;
    ResultTable table;
    for (Scheme s : r.schemes) {
        SystemConfig cfg = r.sys;
        cfg.scheme = s;
        best = over_beta ? optimize_blocklength(cfg, r.retx, grid, objective)
                         : optimize_relays(cfg, r.retx, grid, objective);
        for (const auto& point : best.sweep) {
            ResultRow row;
            row.scheme = s;
            row.relays = over_beta ? cfg.relays : static_cast<int>(point.value);
            row.tx_antennas = cfg.tx_antennas;
            row.rx_antennas = cfg.rx_antennas;
            row.snr_db = cfg.avg_snr_db;
            row.blocklength = over_beta ? point.value : cfg.blocklength;
            row.info_bits = cfg.info_bits;
            row.rate = static_cast<double>(cfg.info_bits) / row.blocklength;
            row.bler_analytic = point.e2e_bler;
            row.latency_cu = point.report.latency_cu;
            row.latency_ms = point.report.latency_ms;
            row.throughput_bpcu = point.report.throughput_bpcu;
            table.rows.push_back(row);
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "optimal %s (%s, %s): %lld (latency %.6g CU = %.6g ms, throughput "
                      "%.6g bpcu)",
                      over_beta ? "beta" : "K", to_token(s), v.objective.c_str(),
                      static_cast<long long>(best.best), best.best_point.report.latency_cu,
                      best.best_point.report.latency_ms,
                      best.best_point.report.throughput_bpcu);
        table.summary.push_back(buf);
    }
    emit(table, v);
    return 0;
}

int run_mc_validate_cmd(const CLI::App* cmd, const CliValues& v) {
    ResolvedOptions r = resolve(cmd, v);

    std::vector<double> snr_grid;
    if (r.snr_db && r.snr_db->is_range)
        snr_grid = r.snr_db->grid("--snr-db");
    else
        snr_grid = {r.sys.avg_snr_db};

    SweepSpec spec;
    spec.base = r.sys;
    spec.retx = r.retx;
    spec.mc = r.mc;
    spec.schemes = r.schemes;
    spec.outputs = {OutputKind::Analytic, OutputKind::MonteCarlo};
    spec.variable = SweepVariable::SnrDb;
    spec.grid = snr_grid;

    ResultTable table = run_sweep(spec);

    // Coverage against the exact-Q analytic reference (the quantity the
    // simulator estimates).
    int covered = 0, total = 0;
    for (const auto& row : table.rows) {
        SystemConfig cfg = spec.base;
        cfg.scheme = row.scheme;
        cfg.avg_snr_db = row.snr_db;
        const auto budgets = build_hop_budgets(cfg);
        const auto params = build_fbl_params(coding_rate(cfg), cfg.blocklength);
        std::vector<double> per_hop;
        for (const auto& b : budgets)
            per_hop.push_back(hop_bler_quadrature(b, params, cfg.scheme, cfg.tx_antennas,
                                                  cfg.rx_antennas, BlerIntegrand::ExactQ)
                                  .value);
        const double exact = e2e_bler(per_hop);
        ++total;
        if (std::fabs(exact - row.bler_mc_mean) <= row.bler_mc_ci95) ++covered;
        char buf[120];
        std::snprintf(buf, sizeof(buf), "exact-Q reference (%s, %.6g dB): %.12g",
                      to_token(row.scheme), row.snr_db, exact);
        table.summary.push_back(buf);
    }
    table.summary.push_back("exact-Q reference within 95% CI: " + std::to_string(covered) +
                            "/" + std::to_string(total) + " points");
    emit(table, v);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"End-to-end BLER, latency and throughput analysis of multihop MIMO "
                 "decode-and-forward relaying under finite-blocklength coding"};
    app.require_subcommand(1);

    CliValues v;
    std::string figure_name;

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one variable over a grid");
    add_common_options(sweep, v);

    CLI::App* figure = app.add_subcommand("figure", "run a preset experiment");
    figure->add_option("name", figure_name, "fig2, fig3, fig5, fig6, fig7 or fig8")
        ->required();
    add_common_options(figure, v);

    CLI::App* opt_beta =
        app.add_subcommand("optimize-beta", "grid search over the blocklength");
    add_common_options(opt_beta, v);
    opt_beta->add_option("--objective", v.objective, "min-latency or max-throughput")
        ->check(CLI::IsMember({"min-latency", "max-throughput"}));

    CLI::App* opt_relays =
        app.add_subcommand("optimize-relays", "grid search over the relay count");
    add_common_options(opt_relays, v);
    opt_relays->add_option("--objective", v.objective, "min-latency or max-throughput")
        ->check(CLI::IsMember({"min-latency", "max-throughput"}));

    CLI::App* mc_validate = app.add_subcommand(
        "mc-validate", "Monte Carlo estimates against the analytic references");
    add_common_options(mc_validate, v);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (sweep->parsed()) return run_sweep_cmd(sweep, v);
        if (figure->parsed()) return run_figure_cmd(figure, v, figure_name);
        if (opt_beta->parsed()) return run_optimize_cmd(opt_beta, v, true);
        if (opt_relays->parsed()) return run_optimize_cmd(opt_relays, v, false);
        if (mc_validate->parsed()) return run_mc_validate_cmd(mc_validate, v);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
