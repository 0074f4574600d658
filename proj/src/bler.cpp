#include "mhrelay/bler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mhrelay/detail/incomplete_gamma.hpp"
#include "mhrelay/errors.hpp"
#include "mhrelay/quadrature.hpp"

namespace mhrelay {

namespace {

namespace mp = boost::multiprecision;
using Float50 = mp::cpp_bin_float_50;
using Float100 = mp::cpp_bin_float_100;
using Float200 = mp::number<mp::cpp_bin_float<200>>;

// Regularized lower incomplete gamma P(a, z) for integer a >= 1.
double regularized_gamma_p(int a, double z) {
    if (z <= 0) return 0.0;
    const double ga = detail::factorial_t<double>(a - 1);
    return detail::lower_incomplete_gamma_t<double>(static_cast<double>(a), z, ga) / ga;
}

double regularized_gamma_q(int a, double z) {
    if (z <= 0) return 1.0;
    const double ga = detail::factorial_t<double>(a - 1);
    return detail::regularized_upper_gamma_t<double>(static_cast<double>(a), z, ga);
}

void check_cdf_args(double gamma, double gamma_bar, int n_t, int n_r) {
    if (!(gamma >= 0)) throw std::domain_error("hop SNR must be >= 0");
    if (!(gamma_bar > 0)) throw std::domain_error("average hop SNR must be > 0");
    if (n_t < 1 || n_r < 1) throw std::domain_error("antenna counts must be >= 1");
}

// ---------------------------------------------------------------------
// Closed-form average BLER: the linearized conditional BLER integrated
// against the hop-SNR distribution, expanded into alternating binomial
// sums of incomplete-gamma (TAS/MRC) or exponential (TAS/SC) terms.
//
// The expansion cancels heavily in the high-SNR tail, so each evaluation
// also reports the largest pre-cancellation term magnitude ("scale"). A
// result is only accepted when scale * eps <= |value| * 1e-12; otherwise
// the same sum is re-run at the next wider floating type.
// ---------------------------------------------------------------------

template <class Real>
struct CoreResult {
    Real value;
    Real scale;
};

template <class Real>
Real pow_int(Real base, int exponent) {
    Real out(1);
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

template <class Real>
CoreResult<Real> closed_form_core(Scheme scheme, int n_t, int n_r, double gamma_bar_in,
                                  const FblParams& p) {
    using std::exp;
    using std::fabs;
    using std::sqrt;

    const Real gamma_bar(gamma_bar_in);
    const Real xi_sb = Real(p.xi) * sqrt(Real(static_cast<double>(p.blocklength)));
    const Real phi_l(p.phi_low);
    const Real phi_h(p.phi_high);

    // m = 0 term of the binomial expansion; equals 1 whenever phi_low was
    // not clamped at zero.
    Real sum = xi_sb * (phi_h - phi_l);
    Real scale = fabs(sum);

    if (scheme == Scheme::TasSc) {
        const int order = n_t * n_r;
        Real binom(1);
        for (int m = 1; m <= order; ++m) {
            binom = binom * Real(order - m + 1) / Real(m);
            const Real eh = exp(-Real(m) * phi_h / gamma_bar);
            const Real el = exp(-Real(m) * phi_l / gamma_bar);
            const Real coef = xi_sb * binom * gamma_bar / Real(m);
            const Real term = ((m & 1) ? coef : -coef) * (eh - el); // (-1)^{m+1}
            sum += term;
            const Real mag = coef * std::max(eh, el);
            if (mag > scale) scale = mag;
        }
    } else {
        // Coefficients of [sum_{j<N_R} x^j/j!]^m, grouped by total power S;
        // equivalent to enumerating all (j_1..j_m) tuples.
        std::vector<Real> base(n_r);
        Real fact(1);
        for (int j = 0; j < n_r; ++j) {
            if (j > 0) fact *= Real(j);
            base[j] = Real(1) / fact;
        }
        std::vector<Real> poly{Real(1)};
        Real binom(1);
        for (int m = 1; m <= n_t; ++m) {
            binom = binom * Real(n_t - m + 1) / Real(m);
            std::vector<Real> next(poly.size() + n_r - 1, Real(0));
            for (size_t i = 0; i < poly.size(); ++i)
                for (int j = 0; j < n_r; ++j) next[i + j] += poly[i] * base[j];
            poly = std::move(next);

            const Real z_h = Real(m) * phi_h / gamma_bar;
            const Real z_l = Real(m) * phi_l / gamma_bar;
            const Real sign = (m & 1) ? Real(-1) : Real(1);
            Real s_factorial(1);
            for (int s = 0; s < static_cast<int>(poly.size()); ++s) {
                if (s > 0) s_factorial *= Real(s);
                const Real a(static_cast<double>(s + 1));
                const Real upper = detail::lower_incomplete_gamma_t<Real>(a, z_h, s_factorial);
                const Real lower = detail::lower_incomplete_gamma_t<Real>(a, z_l, s_factorial);
                const Real coef =
                    xi_sb * binom * poly[s] * gamma_bar / pow_int(Real(m), s + 1);
                sum += sign * coef * (upper - lower);
                const Real mag = coef * std::max(upper, lower);
                if (mag > scale) scale = mag;
            }
        }
    }
    return {sum, scale};
}

struct LadderOutcome {
    double value = 0;
    bool certified = false;
};

template <class Real>
LadderOutcome try_rung(Scheme scheme, int n_t, int n_r, double gamma_bar,
                       const FblParams& p) {
    const auto r = closed_form_core<Real>(scheme, n_t, n_r, gamma_bar, p);
    if (r.value != r.value) return {0, false}; // NaN
    using std::fabs;
    const Real budget = fabs(r.value) * Real(1e-12);
    const Real noise = r.scale * std::numeric_limits<Real>::epsilon();
    if (noise <= budget) return {static_cast<double>(r.value), true};
    return {static_cast<double>(r.value), false};
}

double closed_form_value(Scheme scheme, int n_t, int n_r, double gamma_bar,
                         const FblParams& p) {
    if (!(gamma_bar > 0)) throw std::domain_error("average hop SNR must be > 0");
    if (n_t < 1 || n_r < 1) throw std::domain_error("antenna counts must be >= 1");
    if (n_t * n_r > 64)
        throw NumericError("closed-form expansion rejected: N_T*N_R = " +
                           std::to_string(n_t * n_r) + " exceeds the supported range (64)");

    if (auto r = try_rung<double>(scheme, n_t, n_r, gamma_bar, p);
        r.certified && std::isfinite(r.value))
        return r.value;
    if (auto r = try_rung<Float50>(scheme, n_t, n_r, gamma_bar, p); r.certified)
        return r.value;
    if (auto r = try_rung<Float100>(scheme, n_t, n_r, gamma_bar, p); r.certified)
        return r.value;
    if (auto r = try_rung<Float200>(scheme, n_t, n_r, gamma_bar, p); r.certified)
        return r.value;
    throw NumericError(
        "closed-form BLER sum lost all significant digits (cancellation beyond 200 "
        "decimal digits); operating point is outside the supported tail depth");
}

// Tail cutoff for the exact-Q oracle: smallest gamma (by doubling) whose
// CDF complement drops below 1e-14.
double tail_cutoff(double gamma_bar, int n_t, int n_r, Scheme scheme) {
    auto complement = [&](double x) {
        if (scheme == Scheme::TasSc) {
            const double u = std::exp(-x);
            return -std::expm1(static_cast<double>(n_t) * n_r * std::log1p(-u));
        }
        const double q = regularized_gamma_q(n_r, x);
        return -std::expm1(static_cast<double>(n_t) * std::log1p(-q));
    };
    double x = 1.0;
    while (complement(x) >= 1e-14) {
        x *= 2;
        if (x > 1e300) throw NumericError("exact-Q tail cutoff search failed");
    }
    return gamma_bar * x;
}

std::vector<double> geometric_breakpoints(double from, double to) {
    std::vector<double> out;
    for (double x = from; x < to; x *= 2) out.push_back(x);
    return out;
}

} // namespace

const char* to_token(BlerMethod m) {
    switch (m) {
        case BlerMethod::ClosedForm: return "closed_form";
        case BlerMethod::QuadratureLinear: return "quadrature_linear";
        case BlerMethod::QuadratureExact: return "quadrature_exact";
    }
    return "?";
}

double cdf_tas_mrc(double gamma, double gamma_bar, int n_t, int n_r) {
    check_cdf_args(gamma, gamma_bar, n_t, n_r);
    const double p = regularized_gamma_p(n_r, gamma / gamma_bar);
    return std::pow(p, n_t);
}

double cdf_tas_sc(double gamma, double gamma_bar, int n_t, int n_r) {
    check_cdf_args(gamma, gamma_bar, n_t, n_r);
    const double u = -std::expm1(-gamma / gamma_bar);
    return std::pow(u, n_t * n_r);
}

double pdf_tas_mrc(double gamma, double gamma_bar, int n_t, int n_r) {
    check_cdf_args(gamma, gamma_bar, n_t, n_r);
    const double x = gamma / gamma_bar;
    if (x == 0) return (n_r == 1 && n_t == 1) ? 1.0 / gamma_bar : 0.0;
    const double p = regularized_gamma_p(n_r, x);
    const double gamma_pdf =
        std::exp((n_r - 1) * std::log(x) - x - std::lgamma(n_r)) / gamma_bar;
    return n_t * std::pow(p, n_t - 1) * gamma_pdf;
}

double pdf_tas_sc(double gamma, double gamma_bar, int n_t, int n_r) {
    check_cdf_args(gamma, gamma_bar, n_t, n_r);
    const double x = gamma / gamma_bar;
    const int order = n_t * n_r;
    const double u = -std::expm1(-x);
    if (u == 0) return order == 1 ? 1.0 / gamma_bar : 0.0;
    return order * std::pow(u, order - 1) * std::exp(-x) / gamma_bar;
}

HopBler hop_bler_closed_form(const HopBudget& budget, const FblParams& p, Scheme scheme,
                             int n_t, int n_r) {
    HopBler out;
    out.hop_index = budget.hop_index;
    out.scheme = scheme;
    out.method = BlerMethod::ClosedForm;
    const double raw = closed_form_value(scheme, n_t, n_r, budget.avg_snr_linear, p);
    out.value = std::clamp(raw, 0.0, 1.0);
    out.clamped = (raw != out.value);
    return out;
}

HopBler hop_bler_quadrature(const HopBudget& budget, const FblParams& p, Scheme scheme,
                            int n_t, int n_r, BlerIntegrand integrand) {
    const double gamma_bar = budget.avg_snr_linear;
    if (!(gamma_bar > 0)) throw std::domain_error("average hop SNR must be > 0");
    if (n_t < 1 || n_r < 1) throw std::domain_error("antenna counts must be >= 1");

    HopBler out;
    out.hop_index = budget.hop_index;
    out.scheme = scheme;

    double raw = 0;
    if (integrand == BlerIntegrand::Linearized) {
        out.method = BlerMethod::QuadratureLinear;
        auto cdf = [&](double g) {
            return scheme == Scheme::TasMrc ? cdf_tas_mrc(g, gamma_bar, n_t, n_r)
                                            : cdf_tas_sc(g, gamma_bar, n_t, n_r);
        };
        const auto q =
            integrate_adaptive(cdf, p.phi_low, p.phi_high, 1e-10, 1e-300, {p.tau});
        raw = p.xi * std::sqrt(static_cast<double>(p.blocklength)) * q.value;
    } else {
        out.method = BlerMethod::QuadratureExact;
        auto f = [&](double g) {
            const double pdf = scheme == Scheme::TasMrc
                                   ? pdf_tas_mrc(g, gamma_bar, n_t, n_r)
                                   : pdf_tas_sc(g, gamma_bar, n_t, n_r);
            if (pdf == 0) return 0.0;
            return instantaneous_bler(g, p.rate, p.blocklength) * pdf;
        };
        const double upper = tail_cutoff(gamma_bar, n_t, n_r, scheme);
        // The density lives on the gamma_bar scale while the BLER ramp
        // lives around tau; seed breakpoints on both scales so the first
        // pass cannot overlook either feature.
        std::vector<double> breaks = geometric_breakpoints(gamma_bar / 16, upper);
        for (double b : geometric_breakpoints(std::max(p.phi_high, 1e-300), upper))
            breaks.push_back(b);
        breaks.push_back(p.phi_low);
        breaks.push_back(p.tau);
        breaks.push_back(p.phi_high);
        std::sort(breaks.begin(), breaks.end());
        const auto q = integrate_adaptive(f, 0.0, upper, 1e-10, 1e-280, breaks);
        raw = q.value;
    }

    out.value = std::clamp(raw, 0.0, 1.0);
    out.clamped = (raw != out.value);
    return out;
}

double e2e_bler(std::span<const double> per_hop) {
    if (per_hop.empty()) throw std::domain_error("e2e_bler: empty per-hop list");
    double total = 0;
    double survive = 1;
    for (double e : per_hop) {
        if (!(e >= 0.0) || !(e <= 1.0))
            throw std::domain_error("e2e_bler: per-hop BLER outside [0,1]");
        total += e * survive;
        survive *= (1.0 - e);
    }
    return std::min(total, 1.0);
}

double e2e_bler(std::span<const HopBler> per_hop) {
    std::vector<double> values;
    values.reserve(per_hop.size());
    for (const auto& h : per_hop) values.push_back(h.value);
    return e2e_bler(std::span<const double>(values));
}

BlerReport analyze_bler(const SystemConfig& cfg) {
    BlerReport report;
    report.config = cfg;
    const auto budgets = build_hop_budgets(cfg);
    const auto params = build_fbl_params(coding_rate(cfg), cfg.blocklength);

    std::map<double, HopBler> cache; // keyed by avg hop SNR
    for (const auto& b : budgets) {
        auto it = cache.find(b.avg_snr_linear);
        if (it == cache.end()) {
            it = cache
                     .emplace(b.avg_snr_linear,
                              hop_bler_closed_form(b, params, cfg.scheme, cfg.tx_antennas,
                                                   cfg.rx_antennas))
                     .first;
        }
        HopBler hop = it->second;
        hop.hop_index = b.hop_index;
        report.per_hop.push_back(hop);
    }
    report.e2e = e2e_bler(std::span<const HopBler>(report.per_hop));
    return report;
}

} // namespace mhrelay
