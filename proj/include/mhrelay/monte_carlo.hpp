#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mhrelay/system_model.hpp"

namespace mhrelay {

enum class McEstimator {
    SemiAnalytic, // average the conditional BLER over channel draws
    Bernoulli,    // draw block error outcomes and count
};

const char* to_token(McEstimator e);
McEstimator estimator_from_token(const std::string& token);

struct McConfig {
    long long trials = 100000;
    std::uint64_t seed = 12345;
    McEstimator estimator = McEstimator::SemiAnalytic;
    long long chunk_size = 65536; // parallel work-partition size
    int threads = 0;              // 0 = hardware concurrency

    void validate() const; // throws ConfigError
};

struct McEstimate {
    double mean = 0;
    double ci_halfwidth_95 = 0;
    long long trials_used = 0;
};

// Counter-based generator: every (seed, hop, trial) tuple owns an
// independent stream, so draws never depend on how trials are grouped
// into chunks or scheduled across threads. Outputs are the SplitMix64
// finalizer applied to a keyed counter.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t hop_index, std::uint64_t trial_index);

    std::uint64_t next_u64();
    double next_unit();                    // uniform [0,1)
    double next_exponential(double mean);  // mean > 0

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// One post-combining SNR draw: N_T*N_R i.i.d. exponential branch SNRs of
// mean gamma_bar, combined as max-of-row-sums (TAS/MRC) or overall max
// (TAS/SC). Branches are consumed in transmit-major order, so both
// schemes see identical branch samples from an equally-positioned stream.
double draw_hop_snr(double gamma_bar, int n_t, int n_r, Scheme scheme, CounterRng& rng);

// Sample-mean estimate of the average BLER at one hop, with a 95% CI
// (normal-approximation for SemiAnalytic, Wilson for Bernoulli).
// Per-trial statistics are accumulated in 128-bit fixed point, making the
// reduction exact and therefore independent of chunking and scheduling.
McEstimate estimate_hop_bler(const HopBudget& budget, const SystemConfig& cfg,
                             const McConfig& mc);

// Same estimator applied to the end-to-end error event across all hops
// (SemiAnalytic composes per-hop conditional BLERs; Bernoulli simulates
// the decode-and-stop forwarding chain).
McEstimate estimate_e2e_bler(const SystemConfig& cfg, std::span<const HopBudget> budgets,
                             const McConfig& mc);

} // namespace mhrelay
