#include "mhrelay/latency.hpp"

#include <cmath>
#include <stdexcept>

#include "mhrelay/bler.hpp"
#include "mhrelay/errors.hpp"

namespace mhrelay {

void RetxConfig::validate() const {
    if (max_retx < 0) throw ConfigError("max_retx: must be >= 0");
    if (!std::isfinite(feedback_delay_cu) || feedback_delay_cu < 0)
        throw ConfigError("feedback_delay_cu: must be finite and >= 0");
    if (!std::isfinite(decode_delay_factor) || decode_delay_factor < 0)
        throw ConfigError("decode_delay_factor: must be finite and >= 0");
    if (!std::isfinite(cu_duration_us) || cu_duration_us <= 0)
        throw ConfigError("cu_duration_us: must be finite and > 0");
}

double success_latency(const SystemConfig& cfg, const RetxConfig& retx) {
    const double beta = static_cast<double>(cfg.blocklength);
    return (cfg.relays + 1) * (beta + retx.decode_delay_factor * beta);
}

double failure_latency(std::span<const double> per_hop_bler, const SystemConfig& cfg,
                       const RetxConfig& retx) {
    const double beta = static_cast<double>(cfg.blocklength);
    const double per_round = beta + retx.decode_delay_factor * beta + retx.feedback_delay_cu;

    double weighted = 0;
    double survive = 1;
    int k = 1;
    for (double e : per_hop_bler) {
        if (!(e >= 0.0) || !(e <= 1.0))
            throw std::domain_error("failure_latency: per-hop BLER outside [0,1]");
        weighted += k * e * survive;
        survive *= (1.0 - e);
        ++k;
    }
    return per_round * weighted;
}

double e2e_latency(double e2e_bler_value, double t_success, double t_failure,
                   const RetxConfig& retx) {
    if (!(e2e_bler_value >= 0.0) || !(e2e_bler_value <= 1.0))
        throw std::domain_error("e2e_latency: e2e BLER must lie in [0,1]");
    const long long retries = retx.max_retx;
    if (retries == 0) return t_success;

    const double eps = e2e_bler_value;
    if (1.0 - eps < 1e-12) return t_success + 0.5 * retries * t_failure;

    double sum = 0;
    double eps_pow = 1.0;
    for (long long r = 0; r <= retries; ++r) {
        sum += eps_pow * (r * t_failure + t_success);
        eps_pow *= eps;
    }
    // 1 - eps^{L+1} without cancellation.
    const double geo = -std::expm1((retries + 1) * std::log1p(eps - 1.0));
    return (1.0 - eps) / geo * sum;
}

double e2e_throughput(double e2e_bler_value, double latency_cu, double t_failure,
                      const RetxConfig& retx, long long info_bits) {
    if (!(e2e_bler_value >= 0.0) || e2e_bler_value > 1.0)
        throw std::domain_error("e2e_throughput: e2e BLER must lie in [0,1]");
    const double eps = e2e_bler_value;
    const long long retries = retx.max_retx;

    double eps_pow = 1.0; // eps^{L+1}
    for (long long r = 0; r <= retries; ++r) eps_pow *= eps;
    const double geo = -std::expm1((retries + 1) * std::log1p(eps - 1.0));

    const double denom = latency_cu * geo + (retries + 1) * t_failure * eps_pow;
    if (!(denom > 0))
        throw NumericError("e2e_throughput: degenerate duration denominator");
    return info_bits * geo / denom;
}

LatencyThroughputReport analyze_latency_throughput(const SystemConfig& cfg,
                                                   const RetxConfig& retx) {
    retx.validate();
    const BlerReport bler = analyze_bler(cfg);
    std::vector<double> per_hop;
    per_hop.reserve(bler.per_hop.size());
    for (const auto& h : bler.per_hop) per_hop.push_back(h.value);

    LatencyThroughputReport report;
    report.t_success_cu = success_latency(cfg, retx);
    report.t_failure_cu = failure_latency(per_hop, cfg, retx);
    report.latency_cu =
        e2e_latency(bler.e2e, report.t_success_cu, report.t_failure_cu, retx);
    report.latency_ms = report.latency_cu * retx.cu_duration_us / 1000.0;
    report.throughput_bpcu =
        e2e_throughput(bler.e2e, report.latency_cu, report.t_failure_cu, retx,
                       cfg.info_bits);
    return report;
}

namespace {

OptimizationResult optimize_over(const SystemConfig& cfg_template, const RetxConfig& retx,
                                 std::span<const long long> grid, Objective objective,
                                 bool sweep_beta) {
    if (grid.empty()) throw std::domain_error("optimizer: empty grid");
    OptimizationResult result;
    result.sweep.reserve(grid.size());

    for (long long value : grid) {
        SystemConfig cfg = cfg_template;
        if (sweep_beta)
            cfg.blocklength = value;
        else
            cfg.relays = static_cast<int>(value);
        cfg.validate();

        SweepPoint point;
        point.value = value;
        point.e2e_bler = analyze_bler(cfg).e2e;
        point.report = analyze_latency_throughput(cfg, retx);
        result.sweep.push_back(point);
    }

    // The latency metric conditions on delivery within the retransmission
    // budget; where delivery essentially never happens it degenerates to a
    // bounded 0/0 limit that would undercut every real operating point, so
    // such grid points do not compete for the latency optimum.
    auto feasible = [&](const SweepPoint& point) {
        if (objective != Objective::MinLatency) return true;
        const double delivery_prob =
            -std::expm1((retx.max_retx + 1) * std::log1p(point.e2e_bler - 1.0));
        return delivery_prob >= 1e-9;
    };
    auto score = [&](const SweepPoint& point) {
        return objective == Objective::MinLatency ? point.report.latency_cu
                                                  : -point.report.throughput_bpcu;
    };

    for (int pass = 0; pass < 2; ++pass) {
        bool have_best = false;
        double best_score = 0;
        for (const auto& point : result.sweep) {
            if (pass == 0 && !feasible(point)) continue;
            if (!have_best || score(point) < best_score) {
                have_best = true;
                best_score = score(point);
                result.best = point.value;
                result.best_point = point;
            }
        }
        if (have_best) break; // second pass only if nothing was feasible
    }
    return result;
}

} // namespace

OptimizationResult optimize_blocklength(const SystemConfig& cfg_template,
                                        const RetxConfig& retx,
                                        std::span<const long long> beta_grid,
                                        Objective objective) {
    return optimize_over(cfg_template, retx, beta_grid, objective, true);
}

OptimizationResult optimize_relays(const SystemConfig& cfg_template,
                                   const RetxConfig& retx,
                                   std::span<const long long> k_grid,
                                   Objective objective) {
    return optimize_over(cfg_template, retx, k_grid, objective, false);
}

} // namespace mhrelay
