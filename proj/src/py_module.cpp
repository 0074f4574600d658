#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mhrelay/asymptotic.hpp"
#include "mhrelay/bler.hpp"
#include "mhrelay/errors.hpp"
#include "mhrelay/experiments.hpp"
#include "mhrelay/fbl.hpp"
#include "mhrelay/latency.hpp"
#include "mhrelay/monte_carlo.hpp"
#include "mhrelay/system_model.hpp"

namespace py = pybind11;
using namespace mhrelay;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-blocklength BLER, latency and throughput analysis of multihop "
              "MIMO decode-and-forward relay networks";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NumericError>(m, "NumericError");

    py::enum_<Scheme>(m, "Scheme")
        .value("TAS_MRC", Scheme::TasMrc)
        .value("TAS_SC", Scheme::TasSc);

    py::enum_<BlerMethod>(m, "BlerMethod")
        .value("CLOSED_FORM", BlerMethod::ClosedForm)
        .value("QUADRATURE_LINEAR", BlerMethod::QuadratureLinear)
        .value("QUADRATURE_EXACT", BlerMethod::QuadratureExact);

    py::enum_<BlerIntegrand>(m, "BlerIntegrand")
        .value("LINEARIZED", BlerIntegrand::Linearized)
        .value("EXACT_Q", BlerIntegrand::ExactQ);

    py::enum_<McEstimator>(m, "McEstimator")
        .value("SEMI_ANALYTIC", McEstimator::SemiAnalytic)
        .value("BERNOULLI", McEstimator::Bernoulli);

    py::enum_<Objective>(m, "Objective")
        .value("MIN_LATENCY", Objective::MinLatency)
        .value("MAX_THROUGHPUT", Objective::MaxThroughput);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init([](int relays, int tx_antennas, int rx_antennas, long long info_bits,
                         long long blocklength, double pathloss_exponent,
                         double total_distance, double avg_snr_db, Scheme scheme) {
                 SystemConfig cfg{relays, tx_antennas, rx_antennas, info_bits, blocklength,
                                  pathloss_exponent, total_distance, avg_snr_db, scheme};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("relays") = 3, py::arg("tx_antennas") = 2, py::arg("rx_antennas") = 2,
             py::arg("info_bits") = 1024, py::arg("blocklength") = 128,
             py::arg("pathloss_exponent") = 3.0, py::arg("total_distance") = 1.0,
             py::arg("avg_snr_db") = 10.0, py::arg("scheme") = Scheme::TasMrc)
        .def_readwrite("relays", &SystemConfig::relays)
        .def_readwrite("tx_antennas", &SystemConfig::tx_antennas)
        .def_readwrite("rx_antennas", &SystemConfig::rx_antennas)
        .def_readwrite("info_bits", &SystemConfig::info_bits)
        .def_readwrite("blocklength", &SystemConfig::blocklength)
        .def_readwrite("pathloss_exponent", &SystemConfig::pathloss_exponent)
        .def_readwrite("total_distance", &SystemConfig::total_distance)
        .def_readwrite("avg_snr_db", &SystemConfig::avg_snr_db)
        .def_readwrite("scheme", &SystemConfig::scheme)
        .def("validate", &SystemConfig::validate);

    py::class_<HopBudget>(m, "HopBudget")
        .def(py::init<>())
        .def(py::init([](int hop_index, double distance, double channel_gain,
                         double avg_snr_linear) {
                 return HopBudget{hop_index, distance, channel_gain, avg_snr_linear};
             }),
             py::arg("hop_index"), py::arg("distance"), py::arg("channel_gain"),
             py::arg("avg_snr_linear"))
        .def_readwrite("hop_index", &HopBudget::hop_index)
        .def_readwrite("distance", &HopBudget::distance)
        .def_readwrite("channel_gain", &HopBudget::channel_gain)
        .def_readwrite("avg_snr_linear", &HopBudget::avg_snr_linear);

    py::class_<FblParams>(m, "FblParams")
        .def_readonly("rate", &FblParams::rate)
        .def_readonly("blocklength", &FblParams::blocklength)
        .def_readonly("xi", &FblParams::xi)
        .def_readonly("tau", &FblParams::tau)
        .def_readonly("phi_low", &FblParams::phi_low)
        .def_readonly("phi_high", &FblParams::phi_high);

    py::class_<HopBler>(m, "HopBler")
        .def_readonly("hop_index", &HopBler::hop_index)
        .def_readonly("scheme", &HopBler::scheme)
        .def_readonly("value", &HopBler::value)
        .def_readonly("method", &HopBler::method)
        .def_readonly("clamped", &HopBler::clamped);

    py::class_<BlerReport>(m, "BlerReport")
        .def_readonly("config", &BlerReport::config)
        .def_readonly("per_hop", &BlerReport::per_hop)
        .def_readonly("e2e", &BlerReport::e2e);

    py::class_<AsymptoticReport>(m, "AsymptoticReport")
        .def_readonly("per_hop_asym", &AsymptoticReport::per_hop_asym)
        .def_readonly("e2e_asym", &AsymptoticReport::e2e_asym)
        .def_readonly("diversity_order", &AsymptoticReport::diversity_order)
        .def_readonly("array_gain", &AsymptoticReport::array_gain)
        .def_readonly("y_factor", &AsymptoticReport::y_factor);

    py::class_<McConfig>(m, "McConfig")
        .def(py::init([](long long trials, std::uint64_t seed, McEstimator estimator,
                         long long chunk_size, int threads) {
                 McConfig mc{trials, seed, estimator, chunk_size, threads};
                 mc.validate();
                 return mc;
             }),
             py::arg("trials") = 100000, py::arg("seed") = 12345,
             py::arg("estimator") = McEstimator::SemiAnalytic,
             py::arg("chunk_size") = 65536, py::arg("threads") = 0)
        .def_readwrite("trials", &McConfig::trials)
        .def_readwrite("seed", &McConfig::seed)
        .def_readwrite("estimator", &McConfig::estimator)
        .def_readwrite("chunk_size", &McConfig::chunk_size)
        .def_readwrite("threads", &McConfig::threads);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("mean", &McEstimate::mean)
        .def_readonly("ci_halfwidth_95", &McEstimate::ci_halfwidth_95)
        .def_readonly("trials_used", &McEstimate::trials_used);

    py::class_<RetxConfig>(m, "RetxConfig")
        .def(py::init([](long long max_retx, double feedback_delay_cu,
                         double decode_delay_factor, double cu_duration_us) {
                 RetxConfig retx{max_retx, feedback_delay_cu, decode_delay_factor,
                                 cu_duration_us};
                 retx.validate();
                 return retx;
             }),
             py::arg("max_retx") = 20, py::arg("feedback_delay_cu") = 40.0,
             py::arg("decode_delay_factor") = 2.0, py::arg("cu_duration_us") = 3.0)
        .def_readwrite("max_retx", &RetxConfig::max_retx)
        .def_readwrite("feedback_delay_cu", &RetxConfig::feedback_delay_cu)
        .def_readwrite("decode_delay_factor", &RetxConfig::decode_delay_factor)
        .def_readwrite("cu_duration_us", &RetxConfig::cu_duration_us);

    py::class_<LatencyThroughputReport>(m, "LatencyThroughputReport")
        .def_readonly("t_success_cu", &LatencyThroughputReport::t_success_cu)
        .def_readonly("t_failure_cu", &LatencyThroughputReport::t_failure_cu)
        .def_readonly("latency_cu", &LatencyThroughputReport::latency_cu)
        .def_readonly("latency_ms", &LatencyThroughputReport::latency_ms)
        .def_readonly("throughput_bpcu", &LatencyThroughputReport::throughput_bpcu);

    py::class_<SweepPoint>(m, "SweepPoint")
        .def_readonly("value", &SweepPoint::value)
        .def_readonly("e2e_bler", &SweepPoint::e2e_bler)
        .def_readonly("report", &SweepPoint::report);

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("best", &OptimizationResult::best)
        .def_readonly("best_point", &OptimizationResult::best_point)
        .def_readonly("sweep", &OptimizationResult::sweep);

    // model
    m.def("coding_rate", &coding_rate, py::arg("cfg"));
    m.def("build_hop_budgets", &build_hop_budgets, py::arg("cfg"));
    m.def("db_to_linear", &db_to_linear);
    m.def("linear_to_db", &linear_to_db);

    // finite-blocklength primitives
    m.def("q_function", &q_function, py::arg("z"));
    m.def("inv_q_function", &inv_q_function, py::arg("p"));
    m.def("lower_incomplete_gamma", &lower_incomplete_gamma, py::arg("a"), py::arg("z"));
    m.def("capacity", &capacity, py::arg("gamma"));
    m.def("dispersion", &dispersion, py::arg("gamma"));
    m.def("build_fbl_params", &build_fbl_params, py::arg("rate"), py::arg("blocklength"));
    m.def("instantaneous_bler", &instantaneous_bler, py::arg("gamma"), py::arg("rate"),
          py::arg("blocklength"));
    m.def("linearized_bler", &linearized_bler, py::arg("gamma"), py::arg("params"));
    m.def("max_coding_rate", &max_coding_rate, py::arg("gamma"), py::arg("blocklength"),
          py::arg("target_bler"));

    // analytic BLER
    m.def("cdf_tas_mrc", &cdf_tas_mrc, py::arg("gamma"), py::arg("gamma_bar"),
          py::arg("n_t"), py::arg("n_r"));
    m.def("cdf_tas_sc", &cdf_tas_sc, py::arg("gamma"), py::arg("gamma_bar"),
          py::arg("n_t"), py::arg("n_r"));
    m.def("hop_bler_closed_form", &hop_bler_closed_form, py::arg("budget"),
          py::arg("params"), py::arg("scheme"), py::arg("n_t"), py::arg("n_r"));
    m.def("hop_bler_quadrature", &hop_bler_quadrature, py::arg("budget"), py::arg("params"),
          py::arg("scheme"), py::arg("n_t"), py::arg("n_r"), py::arg("integrand"));
    m.def(
        "e2e_bler",
        [](const std::vector<double>& per_hop) {
            return e2e_bler(std::span<const double>(per_hop));
        },
        py::arg("per_hop"));
    m.def("analyze_bler", &analyze_bler, py::arg("cfg"));

    // asymptotics
    m.def("hop_bler_asymptotic", &hop_bler_asymptotic, py::arg("budget"), py::arg("params"),
          py::arg("scheme"), py::arg("n_t"), py::arg("n_r"));
    m.def(
        "e2e_bler_asymptotic",
        [](const std::vector<double>& per_hop) {
            return e2e_bler_asymptotic(std::span<const double>(per_hop));
        },
        py::arg("per_hop_asym"));
    m.def(
        "diversity_order_fit",
        [](const std::vector<double>& snr_db, const std::vector<double>& bler) {
            return diversity_order_fit(std::span<const double>(snr_db),
                                       std::span<const double>(bler));
        },
        py::arg("snr_db_grid"), py::arg("e2e_bler_values"));
    m.def(
        "array_gain",
        [](const SystemConfig& cfg, const std::vector<HopBudget>& budgets,
           const FblParams& p, Scheme scheme) {
            return array_gain(cfg, std::span<const HopBudget>(budgets), p, scheme);
        },
        py::arg("cfg"), py::arg("budgets"), py::arg("params"), py::arg("scheme"));
    m.def("snr_gap_db", &snr_gap_db, py::arg("n_r"));
    m.def("analyze_asymptotic", &analyze_asymptotic, py::arg("cfg"));

    // Monte Carlo
    m.def("estimate_hop_bler", &estimate_hop_bler, py::arg("budget"), py::arg("cfg"),
          py::arg("mc"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "estimate_e2e_bler",
        [](const SystemConfig& cfg, const std::vector<HopBudget>& budgets,
           const McConfig& mc) {
            py::gil_scoped_release release;
            return estimate_e2e_bler(cfg, std::span<const HopBudget>(budgets), mc);
        },
        py::arg("cfg"), py::arg("budgets"), py::arg("mc"));

    // latency / throughput
    m.def("success_latency", &success_latency, py::arg("cfg"), py::arg("retx"));
    m.def(
        "failure_latency",
        [](const std::vector<double>& per_hop, const SystemConfig& cfg,
           const RetxConfig& retx) {
            return failure_latency(std::span<const double>(per_hop), cfg, retx);
        },
        py::arg("per_hop_bler"), py::arg("cfg"), py::arg("retx"));
    m.def("e2e_latency", &e2e_latency, py::arg("e2e_bler"), py::arg("t_success"),
          py::arg("t_failure"), py::arg("retx"));
    m.def("e2e_throughput", &e2e_throughput, py::arg("e2e_bler"), py::arg("latency_cu"),
          py::arg("t_failure"), py::arg("retx"), py::arg("info_bits"));
    m.def("analyze_latency_throughput", &analyze_latency_throughput, py::arg("cfg"),
          py::arg("retx"));
    m.def(
        "optimize_blocklength",
        [](const SystemConfig& cfg, const RetxConfig& retx,
           const std::vector<long long>& grid, Objective objective) {
            return optimize_blocklength(cfg, retx, std::span<const long long>(grid),
                                        objective);
        },
        py::arg("cfg"), py::arg("retx"), py::arg("beta_grid"), py::arg("objective"));
    m.def(
        "optimize_relays",
        [](const SystemConfig& cfg, const RetxConfig& retx,
           const std::vector<long long>& grid, Objective objective) {
            return optimize_relays(cfg, retx, std::span<const long long>(grid), objective);
        },
        py::arg("cfg"), py::arg("retx"), py::arg("k_grid"), py::arg("objective"));

    // experiments
    m.def(
        "run_figure",
        [](const std::string& name, const McConfig& mc, bool with_monte_carlo) {
            const ResultTable table = run_figure(name, mc, with_monte_carlo);
            py::list rows;
            for (const auto& r : table.rows) {
                py::dict d;
                d["scheme"] = to_token(r.scheme);
                d["K"] = r.relays;
                d["N_T"] = r.tx_antennas;
                d["N_R"] = r.rx_antennas;
                d["snr_db"] = r.snr_db;
                d["beta"] = r.blocklength;
                d["info_bits"] = r.info_bits;
                d["rate"] = r.rate;
                d["bler_analytic"] = r.bler_analytic;
                d["bler_asymptotic"] = r.bler_asymptotic;
                d["bler_mc_mean"] = r.bler_mc_mean;
                d["bler_mc_ci95"] = r.bler_mc_ci95;
                d["latency_cu"] = r.latency_cu;
                d["latency_ms"] = r.latency_ms;
                d["throughput_bpcu"] = r.throughput_bpcu;
                d["flags"] = r.flags;
                rows.append(d);
            }
            return py::make_tuple(rows, table.summary);
        },
        py::arg("name"), py::arg("mc") = McConfig{}, py::arg("with_monte_carlo") = false);
}
