#include "mhrelay/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mhrelay/errors.hpp"
#include "mhrelay/fbl.hpp"

namespace mhrelay {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Accumulates per-trial statistics in [0,1] as integer multiples of
// 2^-53. Integer addition is exact and associative, so totals do not
// depend on how trials are partitioned into chunks or threads.
struct FixedPointAccumulator {
    unsigned __int128 sum = 0;
    unsigned __int128 sum_sq = 0;
    long long count = 0;

    void add(double value) {
        sum += static_cast<std::uint64_t>(std::llround(value * 9007199254740992.0));
        sum_sq += static_cast<std::uint64_t>(
            std::llround(value * value * 9007199254740992.0));
        ++count;
    }

    void merge(const FixedPointAccumulator& other) {
        sum += other.sum;
        sum_sq += other.sum_sq;
        count += other.count;
    }

    double mean() const { return static_cast<double>(sum) * 0x1p-53 / count; }
    double second_moment() const { return static_cast<double>(sum_sq) * 0x1p-53 / count; }
};

double z_95() {
    static const double z = inv_q_function(0.025);
    return z;
}

McEstimate finish_semi_analytic(const FixedPointAccumulator& acc) {
    McEstimate est;
    est.trials_used = acc.count;
    est.mean = acc.mean();
    const double var =
        std::max(0.0, acc.second_moment() - est.mean * est.mean) * acc.count /
        (acc.count - 1.0);
    est.ci_halfwidth_95 = z_95() * std::sqrt(var / acc.count);
    return est;
}

McEstimate finish_bernoulli(long long errors, long long trials) {
    McEstimate est;
    est.trials_used = trials;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    est.mean = p;
    const double z = z_95();
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    est.ci_halfwidth_95 =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return est;
}

// Runs fn(trial_index, accumulator&, error_count&) over every trial,
// chunked for parallelism. The reduction is exact, so scheduling cannot
// change any output bit.
template <class PerTrial>
void run_trials(const McConfig& mc, const PerTrial& fn, FixedPointAccumulator& acc,
                long long& errors) {
    const long long chunk = std::min<long long>(std::max<long long>(mc.chunk_size, 1),
                                                mc.trials);
    const long long n_chunks = (mc.trials + chunk - 1) / chunk;
    int threads = mc.threads > 0 ? mc.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<long long>(threads, n_chunks));

    std::atomic<long long> next_chunk{0};
    std::mutex merge_mutex;
    FixedPointAccumulator total;
    long long total_errors = 0;

    auto worker = [&] {
        FixedPointAccumulator local;
        long long local_errors = 0;
        for (;;) {
            const long long c = next_chunk.fetch_add(1, std::memory_order_relaxed);
            if (c >= n_chunks) break;
            const long long begin = c * chunk;
            const long long end = std::min(mc.trials, begin + chunk);
            for (long long t = begin; t < end; ++t) fn(t, local, local_errors);
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        total.merge(local);
        total_errors += local_errors;
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    acc = total;
    errors = total_errors;
}

} // namespace

const char* to_token(McEstimator e) {
    return e == McEstimator::SemiAnalytic ? "semi" : "bernoulli";
}

McEstimator estimator_from_token(const std::string& token) {
    if (token == "semi" || token == "semi-analytic") return McEstimator::SemiAnalytic;
    if (token == "bernoulli") return McEstimator::Bernoulli;
    throw ConfigError("unknown estimator '" + token + "' (expected semi or bernoulli)");
}

void McConfig::validate() const {
    if (trials < 1) throw ConfigError("trials: must be >= 1");
    if (chunk_size < 1) throw ConfigError("chunk_size: must be >= 1");
    if (threads < 0) throw ConfigError("threads: must be >= 0");
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t hop_index,
                       std::uint64_t trial_index) {
    const std::uint64_t h = mix64(seed + kGolden * (hop_index + 1));
    key_ = mix64(h + kGolden * (trial_index + 1));
}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::next_unit() { return (next_u64() >> 11) * 0x1p-53; }

double CounterRng::next_exponential(double mean) {
    return -mean * std::log1p(-next_unit());
}

double draw_hop_snr(double gamma_bar, int n_t, int n_r, Scheme scheme, CounterRng& rng) {
    if (!(gamma_bar > 0)) throw std::domain_error("average hop SNR must be > 0");
    double best = 0;
    for (int i = 0; i < n_t; ++i) {
        double row_sum = 0;
        double row_max = 0;
        for (int j = 0; j < n_r; ++j) {
            const double branch = rng.next_exponential(gamma_bar);
            row_sum += branch;
            row_max = std::max(row_max, branch);
        }
        const double candidate = scheme == Scheme::TasMrc ? row_sum : row_max;
        best = std::max(best, candidate);
    }
    return best;
}

McEstimate estimate_hop_bler(const HopBudget& budget, const SystemConfig& cfg,
                             const McConfig& mc) {
    cfg.validate();
    mc.validate();
    if (mc.trials < 2)
        throw std::domain_error("estimate_hop_bler: need >= 2 trials for a CI");

    const double rate = coding_rate(cfg);
    const long long beta = cfg.blocklength;
    const double gamma_bar = budget.avg_snr_linear;
    const int hop = budget.hop_index;
    const bool bernoulli = mc.estimator == McEstimator::Bernoulli;

    FixedPointAccumulator acc;
    long long errors = 0;
    run_trials(
        mc,
        [&](long long t, FixedPointAccumulator& local, long long& local_errors) {
            CounterRng rng(mc.seed, static_cast<std::uint64_t>(hop),
                           static_cast<std::uint64_t>(t));
            const double gamma =
                draw_hop_snr(gamma_bar, cfg.tx_antennas, cfg.rx_antennas, cfg.scheme, rng);
            const double eps = instantaneous_bler(gamma, rate, beta);
            if (bernoulli) {
                local_errors += (rng.next_unit() < eps) ? 1 : 0;
                local.count += 1;
            } else {
                local.add(eps);
            }
        },
        acc, errors);

    return bernoulli ? finish_bernoulli(errors, acc.count) : finish_semi_analytic(acc);
}

McEstimate estimate_e2e_bler(const SystemConfig& cfg, std::span<const HopBudget> budgets,
                             const McConfig& mc) {
    cfg.validate();
    mc.validate();
    if (budgets.empty()) throw std::domain_error("estimate_e2e_bler: no hop budgets");
    if (mc.trials < 2)
        throw std::domain_error("estimate_e2e_bler: need >= 2 trials for a CI");

    const double rate = coding_rate(cfg);
    const long long beta = cfg.blocklength;
    const bool bernoulli = mc.estimator == McEstimator::Bernoulli;

    FixedPointAccumulator acc;
    long long errors = 0;
    run_trials(
        mc,
        [&](long long t, FixedPointAccumulator& local, long long& local_errors) {
            if (bernoulli) {
                // Selective decode-and-forward: stop at the first hop that
                // fails to decode.
                for (const auto& b : budgets) {
                    CounterRng rng(mc.seed, static_cast<std::uint64_t>(b.hop_index),
                                   static_cast<std::uint64_t>(t));
                    const double gamma = draw_hop_snr(b.avg_snr_linear, cfg.tx_antennas,
                                                      cfg.rx_antennas, cfg.scheme, rng);
                    const double eps = instantaneous_bler(gamma, rate, beta);
                    if (rng.next_unit() < eps) {
                        ++local_errors;
                        break;
                    }
                }
                local.count += 1;
            } else {
                double survive = 1.0;
                for (const auto& b : budgets) {
                    CounterRng rng(mc.seed, static_cast<std::uint64_t>(b.hop_index),
                                   static_cast<std::uint64_t>(t));
                    const double gamma = draw_hop_snr(b.avg_snr_linear, cfg.tx_antennas,
                                                      cfg.rx_antennas, cfg.scheme, rng);
                    survive *= 1.0 - instantaneous_bler(gamma, rate, beta);
                }
                local.add(1.0 - survive);
            }
        },
        acc, errors);

    return bernoulli ? finish_bernoulli(errors, acc.count) : finish_semi_analytic(acc);
}

} // namespace mhrelay
