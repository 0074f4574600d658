#pragma once

#include <span>
#include <vector>

#include "mhrelay/system_model.hpp"

namespace mhrelay {

// Retransmission policy: up to L retransmissions, each failed round costs
// the feedback delay F on top of the packet and decoding time. Decoding
// delay follows the linear profile D(beta) = alpha * beta.
struct RetxConfig {
    long long max_retx = 20;          // L; 0 = single shot
    double feedback_delay_cu = 40;    // F, channel uses
    double decode_delay_factor = 2.0; // alpha
    double cu_duration_us = 3.0;

    void validate() const; // throws ConfigError
};

struct LatencyThroughputReport {
    double t_success_cu = 0;     // (K+1)(beta + D(beta))
    double t_failure_cu = 0;     // depth-weighted failure cost
    double latency_cu = 0;
    double latency_ms = 0;
    double throughput_bpcu = 0;
};

// Latency of one error-free end-to-end delivery: (K+1)(beta + alpha*beta).
double success_latency(const SystemConfig& cfg, const RetxConfig& retx);

// Average latency charged to a failed end-to-end attempt; each hop's
// error contribution is weighted by its depth k:
// (beta + D(beta) + F) (e1 + sum_{k>=2} k e_k prod_{m<k} (1-e_m)).
double failure_latency(std::span<const double> per_hop_bler,
                       const SystemConfig& cfg, const RetxConfig& retx);

// Expected delivered-packet latency under the retransmission policy:
// [(1-e)/(1-e^{L+1})] sum_{r=0..L} e^r (r T_F + T_S). Continuous limit
// T_S + (L/2) T_F is used when 1-e < 1e-12.
double e2e_latency(double e2e_bler_value, double t_success, double t_failure,
                   const RetxConfig& retx);

// Delivered information bits per CU:
// T (1-e^{L+1}) / (L_e2e (1-e^{L+1}) + (L+1) T_F e^{L+1}).
double e2e_throughput(double e2e_bler_value, double latency_cu, double t_failure,
                      const RetxConfig& retx, long long info_bits);

// Full pipeline for one configuration (closed-form per-hop BLERs).
LatencyThroughputReport analyze_latency_throughput(const SystemConfig& cfg,
                                                   const RetxConfig& retx);

enum class Objective { MinLatency, MaxThroughput };

struct SweepPoint {
    long long value = 0; // the swept beta or K
    double e2e_bler = 0;
    LatencyThroughputReport report;
};

struct OptimizationResult {
    long long best = 0;
    SweepPoint best_point;
    std::vector<SweepPoint> sweep;
};

// Exhaustive grid optimizers over blocklength / relay count; ties break
// toward the smaller grid value.
OptimizationResult optimize_blocklength(const SystemConfig& cfg_template,
                                        const RetxConfig& retx,
                                        std::span<const long long> beta_grid,
                                        Objective objective);
OptimizationResult optimize_relays(const SystemConfig& cfg_template,
                                   const RetxConfig& retx,
                                   std::span<const long long> k_grid,
                                   Objective objective);

} // namespace mhrelay
