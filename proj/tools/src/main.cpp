// Command-line front end: sampling, distinguisher runs, calibration, power
// experiments, parameter sweeps, and the lower-bound laboratory.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trunc/bodies.hpp"
#include "trunc/constants.hpp"
#include "trunc/errors.hpp"
#include "trunc/gauss.hpp"
#include "trunc/influence.hpp"
#include "trunc/io.hpp"
#include "trunc/lb.hpp"
#include "trunc/rng.hpp"
#include "trunc/samplers.hpp"
#include "trunc/special.hpp"
#include "trunc/testers.hpp"

using nlohmann::json;
using namespace trunctest;

namespace {

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start)
            .count();
    }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

void emit(const std::string& text, const std::optional<std::string>& out_path) {
    if (!out_path) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(*out_path);
    if (!out) throw InvalidArgument("cannot open output file " + *out_path);
    out << text;
}

TruncationSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open spec file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return spec_from_json(buf.str());
}

json report_skeleton(const std::string& command, std::uint64_t seed, const Clock& clock) {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["version"] = TRUNCTEST_VERSION;
    j["wall_time_ms"] = clock.ms();
    return j;
}

json test_report_json(const TestReport& r) {
    json j;
    j["verdict"] = r.verdict();
    j["statistic_M"] = r.statistic_M;
    if (r.statistic_L_normsq) j["statistic_L_normsq"] = *r.statistic_L_normsq;
    if (r.statistic_N) j["statistic_N"] = *r.statistic_N;
    j["m_threshold"] = r.m_threshold;
    if (r.l_threshold) j["l_threshold"] = *r.l_threshold;
    if (r.n_threshold) j["n_threshold"] = *r.n_threshold;
    j["T"] = r.T;
    j["n"] = r.n;
    j["underpowered"] = r.underpowered;
    return j;
}

json defaults_json() {
    const Defaults& d = defaults();
    json j;
    j["symmetry_tol"] = d.symmetry_tol;
    j["chol_pivot_tol"] = d.chol_pivot_tol;
    j["hyperplane_eps"] = d.hyperplane_eps;
    j["unit_norm_tol"] = d.unit_norm_tol;
    j["rejection_max_attempts"] = d.rejection_max_attempts;
    j["chi2_quantile_iters"] = d.chi2_quantile_iters;
    j["chi2_quantile_tol"] = d.chi2_quantile_tol;
    j["c_sym"] = d.c_sym;
    j["c_sample"] = d.c_sample;
    j["l_threshold"] = d.l_threshold;
    j["mean_estimator_delta"] = d.mean_estimator_delta;
    j["calibration_alpha"] = d.calibration_alpha;
    j["quad_rel_tol"] = d.quad_rel_tol;
    j["version"] = TRUNCTEST_VERSION;
    return j;
}

TestReport run_distinguisher(Algorithm alg, const SampleBatch& batch,
                             const TestConfig& config) {
    switch (alg) {
        case Algorithm::SymmConvex: return symm_convex_distinguisher(batch, config);
        case Algorithm::Convex: return convex_distinguisher(batch, config);
        case Algorithm::Ltf: return ltf_distinguisher(batch, config);
    }
    throw InvalidArgument("unknown algorithm");
}

// matched-Gaussian-volume bodies for sweeps: vol(K) = 1 - eps
ConvexBody sweep_body(const std::string& kind, int n, double eps) {
    ConvexBody body;
    body.n = n;
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n);
    e1[0] = 1.0;
    if (kind == "slab") {
        body.shape = Slab{e1, inv_norm_cdf(1.0 - eps / 2.0)};
    } else if (kind == "ball") {
        body.shape = Ball{std::sqrt(chi2_quantile(n, 1.0 - eps))};
    } else if (kind == "halfspace") {
        body.shape = Halfspace{e1, inv_norm_cdf(eps)};
    } else if (kind == "hyperplane") {
        body.shape = Hyperplane{e1};
    } else {
        throw InvalidArgument("unknown sweep body kind: " + kind);
    }
    return body;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex-truncation detection toolkit"};
    app.require_subcommand(0, 1);

    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults,
                 "Print the default constants as JSON and exit");

    std::optional<std::uint64_t> seed_opt;
    std::optional<std::string> out_path;
    int workers = 1;
    app.add_option("--seed", seed_opt, "Master seed (64-bit; random when omitted)");
    app.add_option("--out", out_path, "Output file (stdout when omitted)");
    app.add_option("--workers", workers, "Worker threads (wall time only, never results)");

    // --- sample ---
    auto* cmd_sample = app.add_subcommand("sample", "Draw truncated-Gaussian samples")->fallthrough();
    std::string sample_spec;
    int sample_T = 1000;
    std::uint64_t sample_stream = 0;
    bool sample_binary = false;
    cmd_sample->add_option("--spec", sample_spec, "Truncation spec JSON file")->required();
    cmd_sample->add_option("--T", sample_T, "Sample count");
    cmd_sample->add_option("--stream", sample_stream, "Stream index");
    cmd_sample->add_flag("--binary", sample_binary, "Binary output (requires --out)");

    // --- test ---
    auto* cmd_test = app.add_subcommand("test", "Run a distinguisher")->fallthrough();
    std::string test_alg = "symm";
    int test_n = 100;
    double test_eps = 0.5;
    int test_T = 0;
    std::string test_spec;
    std::string test_in;
    cmd_test->add_option("--alg", test_alg, "symm | convex | ltf");
    cmd_test->add_option("--n", test_n, "Dimension");
    cmd_test->add_option("--eps", test_eps, "Distance parameter");
    cmd_test->add_option("--T", test_T, "Sample count (0 = auto)");
    cmd_test->add_option("--spec", test_spec, "Sample from this truncation spec");
    cmd_test->add_option("--in", test_in, "Read the batch from a file instead of sampling");

    // --- calibrate ---
    auto* cmd_cal = app.add_subcommand("calibrate", "Calibrate a threshold under the null")->fallthrough();
    std::string cal_alg = "symm";
    int cal_n = 100;
    double cal_eps = 0.5;
    int cal_T = 0;
    double cal_alpha = defaults().calibration_alpha;
    std::size_t cal_trials = 2000;
    cmd_cal->add_option("--alg", cal_alg, "symm | convex | ltf");
    cmd_cal->add_option("--n", cal_n, "Dimension");
    cmd_cal->add_option("--eps", cal_eps, "Distance parameter");
    cmd_cal->add_option("--T", cal_T, "Sample count (0 = auto)");
    cmd_cal->add_option("--alpha", cal_alpha, "Target type-I error");
    cmd_cal->add_option("--trials", cal_trials, "Null MC trials");

    // --- power ---
    auto* cmd_power = app.add_subcommand("power", "Detection rate at a sample budget")->fallthrough();
    std::string power_alg = "symm";
    std::string power_spec;
    int power_T = 0;
    std::vector<int> power_T_grid;
    std::size_t power_trials = 300;
    cmd_power->add_option("--alg", power_alg, "symm | convex | ltf");
    cmd_power->add_option("--spec", power_spec, "Truncation spec JSON file")->required();
    cmd_power->add_option("--T", power_T, "Sample budget");
    cmd_power->add_option("--T-grid", power_T_grid, "Budget grid (CSV output)")
        ->delimiter(',');
    cmd_power->add_option("--trials", power_trials, "MC trials per grid point");

    // --- sweep ---
    auto* cmd_sweep = app.add_subcommand("sweep", "Detection rate over one gridded parameter")->fallthrough();
    std::string sweep_alg = "symm";
    std::string sweep_param;
    std::vector<double> sweep_grid;
    int sweep_n = 100;
    double sweep_eps = 0.5;
    int sweep_T = 0;
    std::string sweep_kind = "slab";
    std::size_t sweep_trials = 200;
    cmd_sweep->add_option("--param", sweep_param, "eps | n | T")->required();
    cmd_sweep->add_option("--grid", sweep_grid, "Grid values")->delimiter(',')->required();
    cmd_sweep->add_option("--alg", sweep_alg, "symm | convex | ltf");
    cmd_sweep->add_option("--n", sweep_n, "Dimension (fixed unless gridded)");
    cmd_sweep->add_option("--eps", sweep_eps, "Distance parameter (fixed unless gridded)");
    cmd_sweep->add_option("--T", sweep_T, "Sample budget (0 = auto per point)");
    cmd_sweep->add_option("--body", sweep_kind, "slab | ball | halfspace | hyperplane");
    cmd_sweep->add_option("--trials", sweep_trials, "MC trials per grid point");

    // --- moments ---
    auto* cmd_moments = app.add_subcommand("moments", "Truncated-Gaussian moments at cut b")->fallthrough();
    double moments_b = 0.0;
    cmd_moments->add_option("--b", moments_b, "Lower truncation point")->required();

    // --- lb ---
    auto* cmd_lb = app.add_subcommand("lb", "Lower-bound laboratory")->fallthrough();
    cmd_lb->require_subcommand(1);

    auto* lb_tv = cmd_lb->add_subcommand("wishart-tv", "TV between Wis(p,n) and Wis(p,n-1)")->fallthrough();
    int tv_p = 10, tv_n = 2000;
    std::size_t tv_draws = 10000;
    lb_tv->add_option("--p", tv_p, "Matrix size (even)")->required();
    lb_tv->add_option("--n", tv_n, "Degrees of freedom")->required();
    lb_tv->add_option("--draws", tv_draws, "MC draws");

    auto* lb_clt = cmd_lb->add_subcommand("clt", "Wishart log-det CLT check")->fallthrough();
    int clt_p = 200, clt_n = 400;
    std::size_t clt_trials = 2000;
    lb_clt->add_option("--p", clt_p, "Matrix size")->required();
    lb_clt->add_option("--n", clt_n, "Degrees of freedom")->required();
    lb_clt->add_option("--trials", clt_trials, "MC trials");

    auto* lb_mix = cmd_lb->add_subcommand("mixture", "Mixture lower-bound construction")->fallthrough();
    int mix_n = 200;
    std::optional<double> mix_delta;
    int mix_grid_points = 50;
    lb_mix->add_option("--n", mix_n, "Dimension")->required();
    lb_mix->add_option("--delta", mix_delta, "Shrink parameter (default 20/n scheme)");
    lb_mix->add_option("--grid-points", mix_grid_points, "Density-check grid size");

    auto* lb_grid = cmd_lb->add_subcommand("grid", "Hyper-rectangle birthday demo")->fallthrough();
    int grid_n = 2;
    std::uint64_t grid_M = 1000000;
    double grid_eps = 0.5;
    int grid_N = 100;
    std::size_t grid_trials = 1000;
    lb_grid->add_option("--n", grid_n, "Dimension");
    lb_grid->add_option("--M", grid_M, "Total cell count (perfect n-th power)");
    lb_grid->add_option("--eps", grid_eps, "Removed-mass fraction");
    lb_grid->add_option("--N", grid_N, "Points per trial");
    lb_grid->add_option("--trials", grid_trials, "Trials");

    auto* lb_power = cmd_lb->add_subcommand("power", "Calibrated power at a budget")->fallthrough();
    std::string lbp_spec;
    std::string lbp_alg = "symm";
    int lbp_T = 0;
    std::size_t lbp_trials = 500;
    lb_power->add_option("--spec", lbp_spec, "Truncation spec JSON file")->required();
    lb_power->add_option("--alg", lbp_alg, "symm | convex | ltf");
    lb_power->add_option("--T", lbp_T, "Sample budget")->required();
    lb_power->add_option("--trials", lbp_trials, "MC trials");

    CLI11_PARSE(app, argc, argv);

    try {
        const Clock clock;
        if (print_defaults) {
            emit(defaults_json().dump(2), out_path);
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 1;
        }
        const std::uint64_t seed = resolve_seed(seed_opt);

        if (cmd_sample->parsed()) {
            const TruncationSpec spec = load_spec(sample_spec);
            const RngStream rng(seed, sample_stream);
            const SampleBatch batch = sample_truncated(spec, sample_T, rng);
            if (sample_binary) {
                if (!out_path) throw InvalidArgument("--binary requires --out");
                save_batch(batch, *out_path, true);
            } else {
                std::ostringstream buf;
                write_batch_csv(batch, buf);
                emit(buf.str(), out_path);
            }
            return 0;
        }

        if (cmd_test->parsed()) {
            const Algorithm alg = algorithm_from_name(test_alg);
            const TestConfig config(test_n, test_eps, test_T);
            SampleBatch batch;
            if (!test_in.empty()) {
                batch = load_batch(test_in);
            } else {
                const int T = config.samples(alg);
                const RngStream rng(seed, 0);
                batch = test_spec.empty() ? gaussian_batch(test_n, T, rng)
                                          : sample_truncated(load_spec(test_spec), T, rng);
            }
            const TestReport r = run_distinguisher(alg, batch, config);
            json j = report_skeleton("test", seed, clock);
            j["algorithm"] = test_alg;
            j["config"] = {{"n", config.n}, {"eps", config.eps}, {"T", r.T},
                           {"c_sym", config.c_sym}, {"c_sample", config.c_sample},
                           {"l_threshold", config.l_threshold}};
            j["results"] = test_report_json(r);
            emit(j.dump(2), out_path);
            return 0;
        }

        if (cmd_cal->parsed()) {
            const Algorithm alg = algorithm_from_name(cal_alg);
            const TestConfig config(cal_n, cal_eps, cal_T);
            const int T = config.samples(alg);
            const double c = calibrate_threshold(alg, cal_n, cal_eps, T, cal_alpha,
                                                 cal_trials, RngStream(seed, 0));
            json j = report_skeleton("calibrate", seed, clock);
            j["algorithm"] = cal_alg;
            j["config"] = {{"n", cal_n}, {"eps", cal_eps}, {"T", T},
                           {"alpha0", cal_alpha}, {"trials", cal_trials}};
            j["results"] = {{"constant", c}};
            emit(j.dump(2), out_path);
            return 0;
        }

        if (cmd_power->parsed()) {
            const Algorithm alg = algorithm_from_name(power_alg);
            const TruncationSpec spec = load_spec(power_spec);
            if (!power_T_grid.empty()) {
                std::ostringstream csv;
                csv << "T,power,threshold_constant,stderr\n";
                for (std::size_t i = 0; i < power_T_grid.size(); ++i) {
                    const RngStream sub = RngStream(seed, 0).substream(i);
                    const PowerResult r = empirical_power_at_budget(
                        spec, alg, power_T_grid[i], power_trials, sub, workers);
                    const double se = std::sqrt(r.power * (1.0 - r.power) /
                                                static_cast<double>(r.trials));
                    csv << power_T_grid[i] << ',' << r.power << ','
                        << r.threshold_constant << ',' << se << '\n';
                }
                emit(csv.str(), out_path);
                return 0;
            }
            if (power_T < 1) throw InvalidArgument("power: need --T or --T-grid");
            const PowerResult r = empirical_power_at_budget(spec, alg, power_T, power_trials,
                                                            RngStream(seed, 0), workers);
            json j = report_skeleton("power", seed, clock);
            j["algorithm"] = power_alg;
            j["config"] = {{"T", power_T}, {"trials", power_trials}};
            j["results"] = {{"power", r.power},
                            {"threshold_constant", r.threshold_constant}};
            emit(j.dump(2), out_path);
            return 0;
        }

        if (cmd_sweep->parsed()) {
            if (sweep_grid.empty()) throw InvalidArgument("sweep: empty grid");
            if (sweep_param != "eps" && sweep_param != "n" && sweep_param != "T")
                throw InvalidArgument("sweep: --param must be eps, n or T");
            const Algorithm alg = algorithm_from_name(sweep_alg);
            std::ostringstream csv;
            csv << "parameter,estimate,stderr\n";
            for (std::size_t i = 0; i < sweep_grid.size(); ++i) {
                int n = sweep_n;
                double eps = sweep_eps;
                int T = sweep_T;
                if (sweep_param == "eps")
                    eps = sweep_grid[i];
                else if (sweep_param == "n")
                    n = static_cast<int>(sweep_grid[i]);
                else
                    T = static_cast<int>(sweep_grid[i]);
                if (T == 0) T = TestConfig(n, eps).samples(alg);
                const TruncationSpec spec =
                    TruncationSpec::single(sweep_body(sweep_kind, n, eps));
                const RngStream sub = RngStream(seed, 0).substream(i);
                const PowerResult r =
                    empirical_power_at_budget(spec, alg, T, sweep_trials, sub, workers);
                const double se =
                    std::sqrt(r.power * (1.0 - r.power) / static_cast<double>(r.trials));
                csv << sweep_grid[i] << ',' << r.power << ',' << se << '\n';
            }
            emit(csv.str(), out_path);
            return 0;
        }

        if (cmd_moments->parsed()) {
            const TruncatedMoments m = truncated_moments(moments_b);
            json j = report_skeleton("moments", seed, clock);
            j["results"] = {{"b", m.b},     {"mills_ratio", mills_ratio(m.b)},
                            {"M1", m.M1},   {"M2", m.M2},
                            {"M3", m.M3},   {"M4", m.M4}};
            emit(j.dump(2), out_path);
            return 0;
        }

        if (lb_tv->parsed()) {
            const TvEstimate r =
                estimate_tv_wishart(tv_p, tv_n, tv_draws, RngStream(seed, 0), workers);
            json j = report_skeleton("lb wishart-tv", seed, clock);
            j["config"] = {{"p", tv_p}, {"n", tv_n}, {"draws", tv_draws}};
            j["results"] = {{"tv_estimate", r.estimate}, {"stderr", r.stderr_}};
            emit(j.dump(2), out_path);
            return 0;
        }

        if (lb_clt->parsed()) {
            const CltCheck r = logdet_clt_check(clt_p, clt_n, clt_trials, RngStream(seed, 0));
            json j = report_skeleton("lb clt", seed, clock);
            j["config"] = {{"p", clt_p}, {"n", clt_n}, {"trials", clt_trials}};
            j["results"] = {{"mean", r.mean},
                            {"stddev", r.stddev},
                            {"reference_std", r.reference_std}};
            emit(j.dump(2), out_path);
            return 0;
        }

        if (lb_mix->parsed()) {
            const MixtureLbParams params = mix_delta
                                               ? MixtureLbParams::with_delta(mix_n, *mix_delta)
                                               : MixtureLbParams::for_n(mix_n);
            const MixtureLbWeights w = mixture_lb_weights(params);
            std::vector<double> grid(mix_grid_points);
            for (int i = 0; i < mix_grid_points; ++i)
                grid[i] = w.a_star + (3.0 * mix_n - w.a_star) * i /
                                         std::max(1, mix_grid_points - 1);
            const DensityCheck check = mixture_lb_density_check(w, grid);
            json j = report_skeleton("lb mixture", seed, clock);
            j["config"] = {{"n", params.n}, {"delta", params.delta},
                           {"delta_prime", params.delta_prime}};
            j["results"] = {{"a_star", w.a_star},
                            {"max_rel_discrepancy", check.max_rel_discrepancy},
                            {"tail_bound", check.tail_bound}};
            emit(j.dump(2), out_path);
            return 0;
        }

        if (lb_grid->parsed()) {
            const BirthdayResult r = grid_birthday_demo(grid_n, grid_M, grid_eps, grid_N,
                                                        grid_trials, RngStream(seed, 0));
            json j = report_skeleton("lb grid", seed, clock);
            j["config"] = {{"n", grid_n}, {"M", grid_M}, {"eps", grid_eps},
                           {"N", grid_N}, {"trials", grid_trials}};
            j["results"] = {{"distinct_frequency", r.distinct_frequency},
                            {"birthday_bound", r.birthday_bound},
                            {"conditional_m_mean", r.conditional_m_mean},
                            {"conditional_m_stderr", r.conditional_m_stderr},
                            {"distinct_trials", r.distinct_trials}};
            emit(j.dump(2), out_path);
            return 0;
        }

        if (lb_power->parsed()) {
            const TruncationSpec spec = load_spec(lbp_spec);
            const PowerResult r =
                empirical_power_at_budget(spec, algorithm_from_name(lbp_alg), lbp_T,
                                          lbp_trials, RngStream(seed, 0), workers);
            json j = report_skeleton("lb power", seed, clock);
            j["config"] = {{"T", lbp_T}, {"trials", lbp_trials}, {"alg", lbp_alg}};
            j["results"] = {{"power", r.power},
                            {"threshold_constant", r.threshold_constant}};
            emit(j.dump(2), out_path);
            return 0;
        }

        std::cerr << app.help();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
