// Acceptance suite: every release criterion exercised end to end, one
// PASS/FAIL line each. Exits non-zero if any criterion fails.
//
// Usage: mhrelay_acceptance [path-to-mhrelay-cli]
// The CLI path is needed by the output-determinism criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mhrelay/asymptotic.hpp"
#include "mhrelay/bler.hpp"
#include "mhrelay/experiments.hpp"
#include "mhrelay/fbl.hpp"
#include "mhrelay/latency.hpp"
#include "mhrelay/monte_carlo.hpp"
#include "mhrelay/system_model.hpp"

using namespace mhrelay;

namespace {

struct Harness {
    int failures = 0;

    void run(int number, const std::string& title, const std::function<std::string()>& fn) {
        try {
            const std::string detail = fn();
            std::printf("[PASS] criterion %2d: %s %s\n", number, title.c_str(),
                        detail.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %2d: %s -- %s\n", number, title.c_str(),
                        e.what());
        }
        std::fflush(stdout);
    }
};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void expect(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

SystemConfig reference_config(Scheme s) {
    SystemConfig cfg;
    cfg.relays = 3;
    cfg.tx_antennas = 2;
    cfg.rx_antennas = 2;
    cfg.info_bits = 1024;
    cfg.blocklength = 128;
    cfg.scheme = s;
    return cfg;
}

double closed_form_e2e(SystemConfig cfg, double snr_db) {
    cfg.avg_snr_db = snr_db;
    return analyze_bler(cfg).e2e;
}

double exact_q_e2e(SystemConfig cfg, double snr_db) {
    cfg.avg_snr_db = snr_db;
    const auto budgets = build_hop_budgets(cfg);
    const auto p = build_fbl_params(coding_rate(cfg), cfg.blocklength);
    std::vector<double> per_hop;
    for (const auto& b : budgets)
        per_hop.push_back(hop_bler_quadrature(b, p, cfg.scheme, cfg.tx_antennas,
                                              cfg.rx_antennas, BlerIntegrand::ExactQ)
                              .value);
    return e2e_bler(per_hop);
}

// Bisection for the SNR (dB) where a decreasing curve crosses the target.
double crossing_snr_db(const std::function<double(double)>& curve, double target,
                       double lo_db, double hi_db) {
    expect(curve(lo_db) > target && curve(hi_db) < target,
           "crossing bracket does not straddle the target");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo_db + hi_db);
        if (curve(mid) > target)
            lo_db = mid;
        else
            hi_db = mid;
    }
    return 0.5 * (lo_db + hi_db);
}

std::string criterion_closed_form_oracle() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0;
    for (auto [bits, beta] : std::vector<std::pair<long long, long long>>{
             {1024, 128}, {256, 256}}) {
        const auto p = build_fbl_params(static_cast<double>(bits) / beta, beta);
        for (Scheme s : {Scheme::TasMrc, Scheme::TasSc})
            for (int n_t = 1; n_t <= 4; ++n_t)
                for (int n_r = 1; n_r <= 4; ++n_r)
                    for (double db : {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0}) {
                        const HopBudget b{1, 1.0, 1.0, db_to_linear(db)};
                        const double cf = hop_bler_closed_form(b, p, s, n_t, n_r).value;
                        const double quad =
                            hop_bler_quadrature(b, p, s, n_t, n_r,
                                                BlerIntegrand::Linearized)
                                .value;
                        const double rel = std::fabs(cf - quad) / quad;
                        worst = std::max(worst, rel);
                        expect(rel <= 1e-9,
                               fmt("closed-form mismatch %.3e at snr %.0f dB", rel, db) +
                                   " (" + to_token(s) + " " + std::to_string(n_t) + "x" +
                                   std::to_string(n_r) + " beta " + std::to_string(beta) +
                                   ")");
                    }
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    expect(seconds < 10.0, fmt("grid took %.1f s (budget 10 s)", seconds));
    return fmt("(max rel err %.2e over 384 cells, %.1f s)", worst, seconds);
}

std::string criterion_monte_carlo_agreement() {
    const auto start = std::chrono::steady_clock::now();
    McConfig mc;
    mc.trials = 1000000;
    mc.seed = 424242;

    int total = 0, covered = 0;
    const SystemConfig base = reference_config(Scheme::TasMrc);
    for (double db = 0; db <= 24; db += 2) {
        const double exact = exact_q_e2e(base, db);
        if (exact < 1e-4) continue;
        SystemConfig cfg = base;
        cfg.avg_snr_db = db;
        const auto est = estimate_e2e_bler(cfg, build_hop_budgets(cfg), mc);
        ++total;
        if (std::fabs(est.mean - exact) <= est.ci_halfwidth_95) ++covered;
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    expect(total >= 5, "too few grid points above the 1e-4 floor");
    expect(covered >= static_cast<int>(std::ceil(0.9 * total)),
           fmt("coverage %.0f/%.0f below 90%%", covered, total));
    expect(seconds < 120.0, fmt("took %.1f s (budget 120 s)", seconds));
    return fmt("(%.0f/%.0f points covered, %.1f s)", covered, total, seconds);
}

std::string criterion_diversity_order() {
    std::string detail = "(";
    for (auto [n_t, n_r] : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {2, 3}, {3, 2}})
        for (Scheme s : {Scheme::TasMrc, Scheme::TasSc}) {
            SystemConfig cfg = reference_config(s);
            cfg.tx_antennas = n_t;
            cfg.rx_antennas = n_r;
            std::vector<double> snr_db, bler;
            for (double db = 0; db <= 100; db += 2.5) {
                const double v = closed_form_e2e(cfg, db);
                if (v >= 1e-12 && v <= 1e-3) {
                    snr_db.push_back(db);
                    bler.push_back(v);
                }
            }
            const double slope = diversity_order_fit(snr_db, bler);
            const double expected = n_t * n_r;
            expect(std::fabs(slope - expected) <= 0.05 * expected,
                   fmt("slope %.3f vs %g", slope, expected) + " for " + to_token(s));
            if (n_t == 2 && n_r == 2 && s == Scheme::TasMrc)
                detail += fmt("2x2 slope %.4f, ", slope);
            if (n_t == 3 && n_r == 2 && s == Scheme::TasSc)
                detail += fmt("3x2 slope %.4f", slope);
        }
    return detail + ")";
}

std::string criterion_bler_loss() {
    SystemConfig mrc = reference_config(Scheme::TasMrc);
    const double snr_db = crossing_snr_db(
        [&](double db) { return closed_form_e2e(mrc, db); }, 1e-8, 10, 60);
    SystemConfig sc = reference_config(Scheme::TasSc);
    const double ratio = closed_form_e2e(sc, snr_db) / closed_form_e2e(mrc, snr_db);
    const double expected = 4.0; // (N_R!)^{N_T} for 2x2
    expect(std::fabs(ratio - expected) <= 0.1 * expected,
           fmt("ratio %.4f vs %g at %.2f dB", ratio, expected, snr_db));
    return fmt("(ratio %.4f at %.2f dB)", ratio, snr_db);
}

std::string criterion_snr_gap() {
    std::string detail = "(";
    for (int n_r : {2, 3}) {
        auto asym_curve = [&](Scheme s) {
            return [&, s](double db) {
                SystemConfig cfg = reference_config(s);
                cfg.rx_antennas = n_r;
                cfg.avg_snr_db = db;
                return analyze_asymptotic(cfg).e2e_asym;
            };
        };
        const double mrc_db = crossing_snr_db(asym_curve(Scheme::TasMrc), 1e-6, 0, 80);
        const double sc_db = crossing_snr_db(asym_curve(Scheme::TasSc), 1e-6, 0, 80);
        const double gap = sc_db - mrc_db;
        const double expected = snr_gap_db(n_r);
        expect(std::fabs(gap - expected) <= 0.05,
               fmt("gap %.4f dB vs %.4f dB for N_R=%g", gap, expected, n_r));
        detail += fmt("N_R=%.0f: %.4f dB ", n_r, gap);
    }
    return detail + ")";
}

std::string criterion_sc_symmetry() {
    SystemConfig a = reference_config(Scheme::TasSc);
    a.tx_antennas = 2;
    a.rx_antennas = 4;
    SystemConfig b = reference_config(Scheme::TasSc);
    b.tx_antennas = 4;
    b.rx_antennas = 2;
    SystemConfig am = a, bm = b;
    am.scheme = bm.scheme = Scheme::TasMrc;

    double worst_sc = 0;
    for (double db = 0; db <= 30; db += 2) {
        const double sc_a = closed_form_e2e(a, db);
        const double sc_b = closed_form_e2e(b, db);
        worst_sc = std::max(worst_sc, std::fabs(sc_a - sc_b) / std::max(sc_a, sc_b));
        expect(worst_sc <= 1e-12, fmt("TAS/SC asymmetry %.2e at %.0f dB", worst_sc, db));
        const double mrc_a = closed_form_e2e(am, db);
        const double mrc_b = closed_form_e2e(bm, db);
        expect(mrc_a < mrc_b,
               fmt("TAS/MRC (2,4) not better than (4,2) at %.0f dB", db));
    }
    return fmt("(max TAS/SC rel diff %.2e)", worst_sc);
}

std::string criterion_fig5_blocklengths() {
    SystemConfig cfg = reference_config(Scheme::TasMrc);
    cfg.tx_antennas = 2;
    cfg.rx_antennas = 3;
    cfg.avg_snr_db = 0;

    auto smallest = [&](Scheme s) {
        SystemConfig c = cfg;
        c.scheme = s;
        for (long long beta = 100; beta <= 2000; ++beta) {
            c.blocklength = beta;
            if (analyze_bler(c).e2e <= 1e-5) return beta;
        }
        return -1LL;
    };
    const long long mrc = smallest(Scheme::TasMrc);
    const long long sc = smallest(Scheme::TasSc);
    expect(std::llabs(mrc - 460) <= 20,
           fmt("TAS/MRC smallest beta %.0f vs 460 +/- 20 "
               "(check the linearized-vs-exact-Q sensitivity)",
               static_cast<double>(mrc)));
    expect(std::llabs(sc - 650) <= 20,
           fmt("TAS/SC smallest beta %.0f vs 650 +/- 20 "
               "(check the linearized-vs-exact-Q sensitivity)",
               static_cast<double>(sc)));
    return fmt("(beta %.0f / %.0f)", static_cast<double>(mrc), static_cast<double>(sc));
}

std::string criterion_fig7_optima() {
    SystemConfig cfg;
    cfg.relays = 5;
    cfg.tx_antennas = 3;
    cfg.rx_antennas = 3;
    cfg.avg_snr_db = -10;
    cfg.info_bits = 1024;
    RetxConfig retx;
    retx.max_retx = 20;
    retx.feedback_delay_cu = 40;
    retx.decode_delay_factor = 2;

    std::vector<long long> grid;
    for (long long b = 100; b <= 1000; b += 10) grid.push_back(b);

    std::string detail = "(";
    for (auto [scheme, expected] :
         std::vector<std::pair<Scheme, long long>>{{Scheme::TasMrc, 330},
                                                   {Scheme::TasSc, 420}}) {
        cfg.scheme = scheme;
        const auto lat = optimize_blocklength(cfg, retx, grid, Objective::MinLatency);
        const auto thr = optimize_blocklength(cfg, retx, grid, Objective::MaxThroughput);
        expect(std::llabs(lat.best - expected) <= 10,
               fmt("min-latency beta* %.0f vs %.0f", static_cast<double>(lat.best),
                   static_cast<double>(expected)) +
                   " for " + to_token(scheme));
        expect(std::llabs(thr.best - expected) <= 10,
               fmt("max-throughput beta* %.0f vs %.0f", static_cast<double>(thr.best),
                   static_cast<double>(expected)) +
                   " for " + to_token(scheme));
        detail += fmt("beta* %.0f/%.0f ", static_cast<double>(lat.best),
                      static_cast<double>(thr.best));
    }
    return detail + "latency/throughput objectives)";
}

std::string criterion_fig8_relays() {
    SystemConfig cfg;
    cfg.tx_antennas = 3;
    cfg.rx_antennas = 3;
    cfg.avg_snr_db = 15;
    cfg.info_bits = 1024;
    cfg.blocklength = 128;
    RetxConfig retx;
    retx.max_retx = 20;
    retx.feedback_delay_cu = 40;
    retx.decode_delay_factor = 2;
    retx.cu_duration_us = 3;

    std::vector<long long> grid{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::string detail = "(";
    for (auto [scheme, expected_cu] :
         std::vector<std::pair<Scheme, double>>{{Scheme::TasMrc, 770.0},
                                                {Scheme::TasSc, 1030.0}}) {
        cfg.scheme = scheme;
        const auto best = optimize_relays(cfg, retx, grid, Objective::MinLatency);
        expect(best.best == 1, fmt("K* = %.0f, expected 1",
                                   static_cast<double>(best.best)) +
                                   " for " + to_token(scheme));
        const double latency = best.best_point.report.latency_cu;
        expect(std::fabs(latency - expected_cu) <= 0.10 * expected_cu,
               fmt("latency %.1f CU vs %.0f +/- 10%% "
                   "(sensitivity to the failure-cost depth weighting)",
                   latency, expected_cu));
        detail +=
            fmt("%.1f CU = %.3f ms ", latency, best.best_point.report.latency_ms);
    }
    return detail + ")";
}

std::string criterion_retx_limits() {
    SystemConfig cfg = reference_config(Scheme::TasMrc);
    RetxConfig retx;
    retx.max_retx = 20;
    retx.feedback_delay_cu = 40;
    retx.decode_delay_factor = 2;

    const double t_s = success_latency(cfg, retx);
    const double t_f = 321.5;
    expect(e2e_latency(0.0, t_s, t_f, retx) == t_s, "latency at eps=0 is not exactly T_S");
    expect(e2e_throughput(0.0, t_s, t_f, retx, cfg.info_bits) ==
               static_cast<double>(cfg.info_bits) / t_s,
           "throughput at eps=0 is not exactly T/T_S");

    retx.max_retx = 0;
    for (double eps : {0.0, 0.2, 0.7, 0.999})
        expect(e2e_latency(eps, t_s, t_f, retx) == t_s,
               fmt("single-shot latency at eps=%.3f is not exactly T_S", eps));
    return fmt("(T_S = %.0f CU)", t_s);
}

std::string criterion_cli_determinism(const std::string& cli_path) {
    expect(!cli_path.empty(), "CLI path not provided (pass it as argv[1])");

    const std::string out1 = "acceptance_mc_a.csv";
    const std::string out2 = "acceptance_mc_b.csv";
    const std::string common = " mc-validate --seed 42 --trials 1000000 --snr-db 14"
                               " --k 3 --nt 2 --nr 2 --output ";
    const std::string run1 = cli_path + common + out1 + " --threads 1";
    const std::string run2 = cli_path + common + out2 + " --threads 2";
    expect(std::system(run1.c_str()) == 0, "first CLI run failed");
    expect(std::system(run2.c_str()) == 0, "second CLI run failed");

    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(out1);
    const std::string b = slurp(out2);
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    expect(!a.empty(), "first CLI run produced no output");
    expect(a == b, "outputs differ across parallelism levels");
    return fmt("(%.0f identical bytes across thread counts)",
               static_cast<double>(a.size()));
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli_path = argc > 1 ? argv[1] : "";
    Harness h;

    h.run(1, "closed form matches the linearized quadrature oracle",
          criterion_closed_form_oracle);
    h.run(2, "Monte Carlo estimates cover the exact-Q analytic values",
          criterion_monte_carlo_agreement);
    h.run(3, "fitted diversity order equals N_T * N_R", criterion_diversity_order);
    h.run(4, "TAS/SC vs TAS/MRC loss converges to (N_R!)^{N_T}", criterion_bler_loss);
    h.run(5, "asymptote crossing gap equals 10 log10((N_R!)^{1/N_R})",
          criterion_snr_gap);
    h.run(6, "TAS/SC antenna-swap symmetry; TAS/MRC favors receive antennas",
          criterion_sc_symmetry);
    h.run(7, "smallest blocklength for 1e-5 reliability at 0 dB",
          criterion_fig5_blocklengths);
    h.run(8, "optimal blocklength at the reference operating point",
          criterion_fig7_optima);
    h.run(9, "optimal relay count and its latency", criterion_fig8_relays);
    h.run(10, "retransmission limits are exact", criterion_retx_limits);
    h.run(11, "Monte Carlo CLI output is byte-stable across parallelism",
          [&] { return criterion_cli_determinism(cli_path); });

    if (h.failures == 0)
        std::printf("all %d acceptance criteria passed\n", 11);
    else
        std::printf("%d acceptance criteri%s failed\n", h.failures,
                    h.failures == 1 ? "on" : "a");
    return h.failures == 0 ? 0 : 1;
}
