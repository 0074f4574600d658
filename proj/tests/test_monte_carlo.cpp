#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mhrelay/bler.hpp"
#include "mhrelay/errors.hpp"
#include "mhrelay/fbl.hpp"
#include "mhrelay/monte_carlo.hpp"

using namespace mhrelay;

namespace {

SystemConfig reference_config() {
    SystemConfig cfg;
    cfg.relays = 3;
    cfg.tx_antennas = 2;
    cfg.rx_antennas = 2;
    cfg.info_bits = 1024;
    cfg.blocklength = 128;
    cfg.avg_snr_db = 16.5; // e2e BLER around 1e-2
    return cfg;
}

double exact_q_hop(const HopBudget& b, const SystemConfig& cfg) {
    const auto p = build_fbl_params(coding_rate(cfg), cfg.blocklength);
    return hop_bler_quadrature(b, p, cfg.scheme, cfg.tx_antennas, cfg.rx_antennas,
                               BlerIntegrand::ExactQ)
        .value;
}

double exact_q_e2e(const SystemConfig& cfg) {
    const auto budgets = build_hop_budgets(cfg);
    std::vector<double> per_hop;
    for (const auto& b : budgets) per_hop.push_back(exact_q_hop(b, cfg));
    return e2e_bler(per_hop);
}

} // namespace

TEST_CASE("single-branch draws follow the Rayleigh power law") {
    const int n = 100000;
    const double gamma_bar = 2.5;
    std::vector<double> draws;
    draws.reserve(n);
    for (int t = 0; t < n; ++t) {
        CounterRng rng(99, 1, static_cast<std::uint64_t>(t));
        draws.push_back(draw_hop_snr(gamma_bar, 1, 1, Scheme::TasMrc, rng));
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-draws[i] / gamma_bar);
        ks = std::max(ks, std::fabs(cdf - (i + 1.0) / n));
        ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / n));
    }
    CHECK(ks < 0.01);
}

TEST_CASE("combined draws follow the scheme CDFs") {
    const int n = 100000;
    const double gamma_bar = 2.0;
    for (Scheme s : {Scheme::TasMrc, Scheme::TasSc}) {
        std::vector<double> draws;
        draws.reserve(n);
        for (int t = 0; t < n; ++t) {
            CounterRng rng(2024, 1, static_cast<std::uint64_t>(t));
            draws.push_back(draw_hop_snr(gamma_bar, 2, 2, s, rng));
        }
        for (double g : {1.0, 3.0, 6.0, 10.0}) {
            const double expected = s == Scheme::TasMrc ? cdf_tas_mrc(g, gamma_bar, 2, 2)
                                                        : cdf_tas_sc(g, gamma_bar, 2, 2);
            const double observed =
                std::count_if(draws.begin(), draws.end(),
                              [&](double d) { return d <= g; }) /
                static_cast<double>(n);
            const double sigma = std::sqrt(expected * (1 - expected) / n);
            CHECK(std::fabs(observed - expected) <= 3.0 * sigma + 1e-9);
        }
    }
}

TEST_CASE("selection combining never beats MRC on the same branches") {
    for (int t = 0; t < 2000; ++t) {
        CounterRng rng_mrc(5, 2, static_cast<std::uint64_t>(t));
        CounterRng rng_sc(5, 2, static_cast<std::uint64_t>(t)); // identical stream
        const double mrc = draw_hop_snr(3.0, 3, 2, Scheme::TasMrc, rng_mrc);
        const double sc = draw_hop_snr(3.0, 3, 2, Scheme::TasSc, rng_sc);
        CHECK(sc <= mrc);
    }
}

TEST_CASE("hop estimate saturates when the channel cannot support the rate") {
    SystemConfig cfg = reference_config();
    McConfig mc;
    mc.trials = 5000;
    const HopBudget dead{1, 1.0, 1.0, 1e-6};
    const auto est = estimate_hop_bler(dead, cfg, mc);
    CHECK(est.mean == 1.0);
    CHECK(est.ci_halfwidth_95 == 0.0);
    CHECK(est.trials_used == 5000);
}

TEST_CASE("hop estimate agrees with the exact-Q oracle") {
    SystemConfig cfg = reference_config();
    McConfig mc;
    mc.trials = 200000;
    mc.seed = 31337;
    const auto budgets = build_hop_budgets(cfg);
    const double exact = exact_q_hop(budgets[0], cfg);
    const auto est = estimate_hop_bler(budgets[0], cfg, mc);
    CHECK(std::fabs(est.mean - exact) <= 3.0 * est.ci_halfwidth_95);
}

TEST_CASE("outputs are invariant to chunking and thread count") {
    SystemConfig cfg = reference_config();
    McConfig mc;
    mc.trials = 20000;
    mc.seed = 42;

    mc.chunk_size = 1000;
    mc.threads = 1;
    const auto a = estimate_hop_bler(build_hop_budgets(cfg)[0], cfg, mc);
    mc.chunk_size = 100000; // single chunk
    mc.threads = 2;
    const auto b = estimate_hop_bler(build_hop_budgets(cfg)[0], cfg, mc);
    CHECK(a.mean == b.mean); // bit identical
    CHECK(a.ci_halfwidth_95 == b.ci_halfwidth_95);

    const auto budgets = build_hop_budgets(cfg);
    mc.chunk_size = 777;
    mc.threads = 2;
    const auto c = estimate_e2e_bler(cfg, budgets, mc);
    mc.chunk_size = 20000;
    mc.threads = 1;
    const auto d = estimate_e2e_bler(cfg, budgets, mc);
    CHECK(c.mean == d.mean);
    CHECK(c.ci_halfwidth_95 == d.ci_halfwidth_95);
}

TEST_CASE("direct link estimate equals the single-hop estimate") {
    SystemConfig cfg = reference_config();
    cfg.relays = 0;
    McConfig mc;
    mc.trials = 10000;
    const auto budgets = build_hop_budgets(cfg);
    const auto hop = estimate_hop_bler(budgets[0], cfg, mc);
    const auto e2e = estimate_e2e_bler(cfg, budgets, mc);
    CHECK(hop.mean == e2e.mean);
}

TEST_CASE("estimator CI covers the exact value at the nominal rate") {
    // 100 seeded repetitions; the normal-approximation CI must cover the
    // exact-Q composition in at least 93 of them.
    SystemConfig cfg = reference_config();
    const double exact = exact_q_e2e(cfg);
    CHECK(exact > 2e-3);
    CHECK(exact < 5e-2);

    const auto budgets = build_hop_budgets(cfg);
    McConfig mc;
    mc.trials = 50000;
    int covered = 0;
    for (int rep = 0; rep < 100; ++rep) {
        mc.seed = 1000 + rep;
        const auto est = estimate_e2e_bler(cfg, budgets, mc);
        if (std::fabs(est.mean - exact) <= est.ci_halfwidth_95) ++covered;
    }
    MESSAGE("coverage: ", covered, "/100");
    CHECK(covered >= 93);
}

TEST_CASE("bernoulli estimator agrees with semi-analytic in expectation") {
    SystemConfig cfg = reference_config();
    const auto budgets = build_hop_budgets(cfg);
    McConfig mc;
    mc.trials = 400000;
    mc.seed = 7;

    mc.estimator = McEstimator::SemiAnalytic;
    const auto semi = estimate_e2e_bler(cfg, budgets, mc);
    mc.estimator = McEstimator::Bernoulli;
    const auto bern = estimate_e2e_bler(cfg, budgets, mc);

    CHECK(std::fabs(semi.mean - bern.mean) <=
          semi.ci_halfwidth_95 + bern.ci_halfwidth_95);
    // conditioning on the channel draw strictly reduces variance
    CHECK(semi.ci_halfwidth_95 <= bern.ci_halfwidth_95);
}

TEST_CASE("estimator input validation") {
    SystemConfig cfg = reference_config();
    const auto budgets = build_hop_budgets(cfg);
    McConfig mc;
    mc.trials = 1;
    CHECK_THROWS_AS(estimate_hop_bler(budgets[0], cfg, mc), std::domain_error);
    CHECK_THROWS_AS(estimate_e2e_bler(cfg, budgets, mc), std::domain_error);
    mc.trials = 0;
    CHECK_THROWS_AS(mc.validate(), ConfigError);
    mc.trials = 100;
    mc.chunk_size = 0;
    CHECK_THROWS_AS(mc.validate(), ConfigError);
}

TEST_CASE("hop estimates track the exact-Q oracle across a small grid") {
    SystemConfig cfg = reference_config();
    McConfig mc;
    mc.trials = 100000;
    mc.seed = 555;
    for (Scheme s : {Scheme::TasMrc, Scheme::TasSc}) {
        cfg.scheme = s;
        for (double db : {10.0, 14.0, 18.0}) {
            cfg.avg_snr_db = db;
            const auto budgets = build_hop_budgets(cfg);
            const double exact = exact_q_hop(budgets[0], cfg);
            const auto est = estimate_hop_bler(budgets[0], cfg, mc);
            CHECK(std::fabs(est.mean - exact) <= 3.0 * est.ci_halfwidth_95);
        }
    }
}
