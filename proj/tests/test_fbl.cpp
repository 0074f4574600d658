#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mhrelay/fbl.hpp"
#include "mhrelay/quadrature.hpp"

using namespace mhrelay;

namespace {

// Gaussian tail computed by quadrature of the density, independent of the
// erfc path used by the implementation.
double q_oracle(double z) {
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    auto density = [&](double u) { return norm * std::exp(-0.5 * u * u); };
    return integrate_adaptive(density, z, z + 60.0, 1e-13, 1e-30).value;
}

// Bisection inverse of q_function.
double inv_q_oracle(double p) {
    double lo = -60, hi = 60;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (q_function(mid) > p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double gamma_oracle(double a, double z) {
    auto f = [&](double t) { return std::exp(-t) * std::pow(t, a - 1.0); };
    return integrate_adaptive(f, 0.0, z, 1e-13, 1e-30).value;
}

constexpr double kLog2e2 = std::numbers::log2e * std::numbers::log2e;

} // namespace

TEST_CASE("q_function") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(40.0) < 1e-300);
    CHECK(q_function(1.0) == doctest::Approx(q_oracle(1.0)).epsilon(1e-12));
    CHECK(q_function(1.0) == doctest::Approx(0.15865525393146).epsilon(1e-12));
    CHECK(q_function(3.5) == doctest::Approx(q_oracle(3.5)).epsilon(1e-11));
    // monotone non-increasing
    double prev = 1.0;
    for (double z = -8; z <= 8; z += 0.25) {
        CHECK(q_function(z) <= prev);
        prev = q_function(z);
    }
}

TEST_CASE("inv_q_function") {
    CHECK(inv_q_function(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::fabs(inv_q_function(0.158655) - 1.0) <= 1e-5);
    CHECK(inv_q_function(1e-5) == doctest::Approx(inv_q_oracle(1e-5)).epsilon(1e-9));
    CHECK(inv_q_function(1e-5) == doctest::Approx(4.2648907939228).epsilon(1e-9));

    CHECK_THROWS_AS(inv_q_function(0.0), std::domain_error);
    CHECK_THROWS_AS(inv_q_function(1.0), std::domain_error);
    CHECK_THROWS_AS(inv_q_function(-0.2), std::domain_error);

    SUBCASE("round trip across the full range") {
        for (double p : std::vector<double>{1e-12, 1e-9, 1e-5, 1e-3, 0.1, 0.25, 0.5,
                                            0.75, 0.9, 1 - 1e-3, 1 - 1e-9, 1 - 1e-12}) {
            const double back = q_function(inv_q_function(p));
            CHECK(std::fabs(back - p) / p <= 1e-9);
        }
    }
}

TEST_CASE("lower incomplete gamma") {
    CHECK(lower_incomplete_gamma(1.0, 1.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    CHECK(lower_incomplete_gamma(3.0, 0.0) == 0.0);
    CHECK(lower_incomplete_gamma(2.0, 1.0) ==
          doctest::Approx(gamma_oracle(2.0, 1.0)).epsilon(1e-12));
    CHECK(lower_incomplete_gamma(2.0, 1.0) ==
          doctest::Approx(0.26424111765712).epsilon(1e-12));
    // spot-check both algorithm branches against the quadrature oracle
    for (double a : {0.5, 1.5, 4.0, 9.0}) {
        for (double z : {0.1, 1.0, 3.0, 10.0, 40.0}) {
            CHECK(lower_incomplete_gamma(a, z) ==
                  doctest::Approx(gamma_oracle(a, z)).epsilon(1e-11));
        }
    }

    SUBCASE("monotone in z, saturates at Gamma(a)") {
        for (int a = 1; a <= 8; ++a) {
            double fact = 1;
            for (int i = 2; i < a; ++i) fact *= i;
            double prev = -1;
            for (double z : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
                const double v = lower_incomplete_gamma(a, z);
                CHECK(v > prev);
                prev = v;
            }
            CHECK(lower_incomplete_gamma(a, 800.0) == doctest::Approx(fact).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(lower_incomplete_gamma(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(lower_incomplete_gamma(2.0, -1.0), std::domain_error);
}

TEST_CASE("capacity and dispersion") {
    CHECK(capacity(0.0) == 0.0);
    CHECK(capacity(1.0) == 1.0);
    CHECK(capacity(15.0) == 4.0);

    CHECK(dispersion(0.0) == 0.0);
    CHECK(dispersion(1e12) == doctest::Approx(kLog2e2).epsilon(1e-9));
    CHECK(dispersion(1.0) == doctest::Approx(0.75 * kLog2e2).epsilon(1e-14));
    double prev = -1;
    for (double g : {0.0, 0.1, 1.0, 5.0, 100.0}) {
        CHECK(dispersion(g) >= prev);
        prev = dispersion(g);
    }
}

TEST_CASE("fbl linearization constants") {
    const auto p = build_fbl_params(8.0, 128);
    CHECK(p.tau == doctest::Approx(255.0).epsilon(1e-15));
    const double xi_expected = 1.0 / std::sqrt(2.0 * std::numbers::pi * (65536.0 - 1.0));
    CHECK(p.xi == doctest::Approx(xi_expected).epsilon(1e-14));
    CHECK(p.phi_high == doctest::Approx(255.0 + 28.3590452).epsilon(1e-8));
    CHECK(p.phi_low == doctest::Approx(255.0 - 28.3590452).epsilon(1e-8));

    const auto p1 = build_fbl_params(1.0, 100);
    CHECK(p1.tau == 1.0);
    CHECK(p1.xi == doctest::Approx(1.0 / std::sqrt(6.0 * std::numbers::pi)).epsilon(1e-14));

    SUBCASE("ramp width equals 1/(xi sqrt(beta)) before clamping") {
        for (double r : {0.5, 1.0, 2.0, 8.0}) {
            for (long long beta : {100LL, 128LL, 500LL}) {
                const auto q = build_fbl_params(r, beta);
                if (q.phi_low > 0)
                    CHECK(q.phi_high - q.phi_low ==
                          doctest::Approx(1.0 / (q.xi * std::sqrt(double(beta))))
                              .epsilon(1e-12));
            }
        }
    }

    SUBCASE("low-rate configs clamp phi_low at zero") {
        const auto q = build_fbl_params(0.01, 100);
        CHECK(q.phi_low == 0.0);
        CHECK(q.phi_high > q.tau);
    }

    CHECK_THROWS_AS(build_fbl_params(0.0, 100), std::domain_error);
    CHECK_THROWS_AS(build_fbl_params(-1.0, 100), std::domain_error);
}

TEST_CASE("instantaneous BLER") {
    CHECK(instantaneous_bler(255.0, 8.0, 128) == 0.5); // C(gamma) == R
    CHECK(instantaneous_bler(0.0, 8.0, 128) == 1.0);
    CHECK(instantaneous_bler(0.0, 0.0, 128) == 0.5);

    // frozen from the Gaussian-tail quadrature oracle
    const double z = (capacity(300.0) - 8.0) / std::sqrt(dispersion(300.0) / 128.0);
    CHECK(instantaneous_bler(300.0, 8.0, 128) ==
          doctest::Approx(q_oracle(z)).epsilon(1e-11));
    CHECK(instantaneous_bler(300.0, 8.0, 128) ==
          doctest::Approx(0.033470434).epsilon(1e-7));

    SUBCASE("non-increasing in gamma; blocklength sharpens the threshold") {
        double prev = 2;
        for (double g = 0; g <= 600; g += 10) {
            const double v = instantaneous_bler(g, 8.0, 128);
            CHECK(v <= prev);
            prev = v;
        }
        // Above the rate threshold more blocklength only helps; below it
        // the sharper threshold makes the conditional BLER worse.
        prev = 2;
        for (long long beta : {100LL, 128LL, 200LL, 400LL, 1000LL}) {
            const double v = instantaneous_bler(300.0, 8.0, beta);
            CHECK(v <= prev);
            prev = v;
        }
        prev = -1;
        for (long long beta : {100LL, 128LL, 200LL, 400LL, 1000LL}) {
            const double v = instantaneous_bler(240.0, 8.0, beta);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("linearized BLER") {
    const auto p = build_fbl_params(8.0, 128);
    CHECK(linearized_bler(p.tau, p) == 0.5);
    CHECK(linearized_bler(p.phi_high, p) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(linearized_bler(p.phi_low, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(linearized_bler(0.0, p) == 1.0);
    CHECK(linearized_bler(1e9, p) == 0.0);

    const double expected = 0.5 - p.xi * std::sqrt(128.0) * (240.0 - 255.0);
    CHECK(linearized_bler(240.0, p) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(linearized_bler(240.0, p) == doctest::Approx(0.764465885).epsilon(1e-8));

    double prev = 2;
    for (double g = 0; g < 400; g += 5) {
        CHECK(linearized_bler(g, p) <= prev);
        prev = linearized_bler(g, p);
    }
}

TEST_CASE("linearized BLER tracks the exact conditional BLER") {
    // Integral of |exact - linearized| over the SNR axis stays a small
    // fraction of the integral of the exact curve.
    for (double rate : {2.0, 8.0}) {
        const auto p = build_fbl_params(rate, 128);
        auto exact = [&](double g) { return instantaneous_bler(g, rate, 128); };
        auto diff = [&](double g) {
            return std::fabs(instantaneous_bler(g, rate, 128) - linearized_bler(g, p));
        };
        const double hi = 4.0 * p.phi_high;
        const std::vector<double> breaks{p.phi_low, p.tau, p.phi_high};
        const double total = integrate_adaptive(exact, 0.0, hi, 1e-9, 1e-14, breaks).value;
        const double gap = integrate_adaptive(diff, 0.0, hi, 1e-6, 1e-12, breaks).value;
        CHECK(std::isfinite(gap));
        CHECK(gap < 0.05 * total);
    }
}

TEST_CASE("max coding rate") {
    CHECK(max_coding_rate(3.0, 128, 0.5) == capacity(3.0)); // Qinv(0.5) = 0
    CHECK(max_coding_rate(0.0, 128, 1e-3) == 0.0);
    CHECK(max_coding_rate(0.001, 128, 1e-3) < 0.0); // may go negative

    const double expected =
        capacity(15.0) - std::sqrt(dispersion(15.0) / 128.0) * inv_q_oracle(1e-3);
    CHECK(max_coding_rate(15.0, 128, 1e-3) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(max_coding_rate(15.0, 128, 1e-3) == doctest::Approx(3.606711914).epsilon(1e-8));

    CHECK_THROWS_AS(max_coding_rate(15.0, 128, 0.0), std::domain_error);
    CHECK_THROWS_AS(max_coding_rate(15.0, 128, 1.0), std::domain_error);

    SUBCASE("below capacity for any epsilon < 0.5") {
        for (double g : {0.5, 2.0, 15.0, 200.0})
            for (double eps : {1e-9, 1e-5, 1e-2, 0.4})
                CHECK(max_coding_rate(g, 128, eps) < capacity(g));
    }
}
