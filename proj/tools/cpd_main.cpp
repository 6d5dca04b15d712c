#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "cpd/baseline.hpp"
#include "cpd/bounds.hpp"
#include "cpd/calibrate.hpp"
#include "cpd/detect.hpp"
#include "cpd/errors.hpp"
#include "cpd/experiment.hpp"
#include "cpd/json_io.hpp"

namespace {

using cpd::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw cpd::ConfigError("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw cpd::ConfigError("cannot write " + path);
    }
    out << text;
}

json load_json(const std::string& path) { return json::parse(read_file(path)); }

cpd::PlanFunction plan_function_from(const json& j) {
    // Reuse the model-spec parser by wrapping into a single-channel plan.
    json plan = {{"kind", "deterministic"}, {"functions", json::array({j})}};
    json spec = {{"N", 4},
                 {"plan", plan},
                 {"coeffs", {{"segments", json::array({{{"theta", 1.0}, {"coeff", {{1.0}}}}})}}},
                 {"noise", {{"kind", "iid_gaussian"}, {"std", {1.0}}}}};
    return cpd::model_spec_from_json(spec).plan.functions.at(0);
}

std::vector<cpd::PlanFunction> plan_functions_from(const json& arr) {
    std::vector<cpd::PlanFunction> fns;
    for (const auto& j : arr) {
        fns.push_back(plan_function_from(j));
    }
    return fns;
}

cpd::Vector vector_from(const json& arr) {
    std::vector<double> v = arr.get<std::vector<double>>();
    const std::size_t dim = v.size();
    return cpd::Vector(dim, std::move(v));
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int run_simulate(const std::string& spec_path, std::uint64_t seed, const std::string& out) {
    const cpd::ModelSpec spec = cpd::model_spec_from_json(load_json(spec_path));
    const cpd::Sample sample = cpd::simulate(spec, seed);
    write_output(out, cpd::sample_to_csv(sample));
    return 0;
}

int run_detect(const std::string& sample_path, const std::string& config_path,
               const std::string& method, const std::string& out) {
    const cpd::Sample sample = cpd::sample_from_csv(read_file(sample_path));
    cpd::DetectionConfig config;
    if (!config_path.empty()) {
        config = cpd::detection_config_from_json(load_json(config_path));
    }
    if (method == "core") {
        const cpd::DetectionResult result = cpd::detect_multiple(sample, config);
        write_output(out, cpd::to_json(result, sample.N).dump(2) + "\n");
    } else if (method == "wald") {
        const cpd::SupWaldResult result =
            cpd::sup_wald(sample.X, sample.Y, config.beta, config.alpha);
        json j = cpd::to_json(result);
        if (config.threshold.kind == cpd::ThresholdPolicy::Kind::Fixed &&
            config.threshold.value > 0.0) {
            j["threshold"] = config.threshold.value;
            j["detected"] = result.sup_w > config.threshold.value;
        }
        write_output(out, j.dump(2) + "\n");
    } else {
        throw cpd::ConfigError("unknown method: " + method);
    }
    return 0;
}

int run_calibrate(const std::string& spec_path, const std::string& method, double level,
                  std::size_t trials, double beta, double alpha, std::uint64_t seed,
                  std::size_t workers, double lambda, double sigma_max, double fmax,
                  std::size_t grid, std::size_t draws, const std::string& out,
                  const std::string& csv_path) {
    cpd::ThresholdEstimate est;
    std::size_t n = 0;
    const cpd::ModelSpec spec = cpd::model_spec_from_json(load_json(spec_path));
    n = spec.N;
    if (method == "mc") {
        est = cpd::mc_threshold(spec, level, trials, beta, alpha, seed, workers);
    } else if (method == "analytic") {
        est.level = level;
        est.method = cpd::ThresholdEstimate::Method::Analytic;
        est.trials = 0;
        est.value = cpd::analytic_threshold(n, lambda, sigma_max, fmax);
    } else if (method == "limit") {
        if (spec.plan.kind != cpd::RegressionPlan::Kind::Deterministic) {
            throw cpd::WrongKindError("calibrate --method limit needs a deterministic plan");
        }
        if (spec.noise.std_dev.size() != 1) {
            throw cpd::ConfigError("calibrate --method limit needs a single response channel");
        }
        cpd::LimitLawSpec lls;
        lls.plan = spec.plan;
        lls.noise_std = [g = spec.noise.std_dev[0]](double) { return g; };
        est = cpd::limit_threshold(lls, level, grid, draws, seed);
    } else {
        throw cpd::ConfigError("unknown calibration method: " + method);
    }

    write_output(out, cpd::to_json(est).dump(2) + "\n");
    if (!csv_path.empty()) {
        const bool fresh = !std::ifstream(csv_path).good();
        std::ofstream csv(csv_path, std::ios::app);
        if (!csv) {
            throw cpd::ConfigError("cannot append to " + csv_path);
        }
        if (fresh) {
            csv << "N,level,value,stderr,method\n";
        }
        csv << n << "," << fmt6(est.level) << "," << fmt6(est.value) << ","
            << fmt6(est.stderr_value) << "," << method << "\n";
    }
    return 0;
}

std::string report_csv(const cpd::ExperimentReport& report) {
    std::string header = "threshold_used,w_hat,w_hat_stderr";
    std::string row = fmt6(report.threshold_used) + "," + fmt6(report.w_hat) + "," +
                      fmt6(report.w_hat_stderr);
    for (std::size_t i = 0; i < report.theta_hat_mean.size(); ++i) {
        header += ",theta_mean_" + std::to_string(i + 1);
        row += "," + fmt6(report.theta_hat_mean[i]);
    }
    header += ",delta_rms,trials_used,qualifying_trials";
    row += std::string(",") + (report.delta_rms ? fmt6(*report.delta_rms) : "") + "," +
           std::to_string(report.trials_used) + "," + std::to_string(report.qualifying_trials);
    return header + "\n" + row + "\n";
}

int run_experiment_cmd(const std::string& config_path, std::size_t workers,
                       const std::string& out_json, const std::string& out_csv) {
    cpd::ExperimentConfig config = cpd::experiment_config_from_json(load_json(config_path));
    if (workers > 0) {
        config.workers = workers;
    }
    config.keep_trials = false;
    const cpd::ExperimentReport report = cpd::run_experiment(config);
    if (!out_json.empty()) {
        write_output(out_json, cpd::to_json(report).dump(2) + "\n");
    }
    write_output(out_csv, report_csv(report));
    return 0;
}

int run_bound(const std::string& case_name, const std::string& params_path, double theta,
              double eps, const std::vector<std::size_t>& ns, const std::string& out) {
    const json params = load_json(params_path);
    cpd::KlPair pair;
    if (case_name == "trend") {
        pair = cpd::kl_gaussian_trend(plan_function_from(params.at("phi0")),
                                      plan_function_from(params.at("phi1")));
    } else if (case_name == "regression") {
        pair = cpd::kl_gaussian_regression(plan_functions_from(params.at("plan")),
                                           vector_from(params.at("a")),
                                           vector_from(params.at("b")),
                                           params.at("sigma").get<double>());
    } else if (case_name == "stochastic") {
        pair = cpd::kl_gaussian_stochastic(plan_functions_from(params.at("means")),
                                           plan_functions_from(params.at("sds")),
                                           vector_from(params.at("a")),
                                           vector_from(params.at("b")));
    } else {
        throw cpd::ConfigError("unknown bound case: " + case_name);
    }
    const double exponent = cpd::theorem1_exponent(pair, theta, eps);
    std::string csv = "N,exponent,lower_bound\n";
    for (std::size_t n : ns) {
        csv += std::to_string(n) + "," + fmt6(exponent) + "," +
               fmt6(std::exp(-static_cast<double>(n) * exponent)) + "\n";
    }
    write_output(out, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Change-point detection and estimation for multivariate linear models"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::size_t workers = 0;
    std::string out = "-";

    auto* sim = app.add_subcommand("simulate", "Draw a sample from a model spec (JSON in, CSV out)");
    std::string sim_spec;
    sim->add_option("--spec", sim_spec, "ModelSpec JSON file")->required();
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--out", out, "Output path (default stdout)");

    auto* det = app.add_subcommand("detect", "Run detection on a sample CSV");
    std::string det_sample, det_config, det_method = "core";
    det->add_option("--sample", det_sample, "Sample CSV file")->required();
    det->add_option("--config", det_config, "DetectionConfig JSON file");
    det->add_option("--method", det_method, "core | wald");
    det->add_option("--out", out, "Output path (default stdout)");

    auto* cal = app.add_subcommand("calibrate", "Estimate a decision threshold");
    std::string cal_spec, cal_method = "mc", cal_csv;
    double cal_level = 0.95, cal_beta = 0.05, cal_alpha = 0.95;
    std::size_t cal_trials = 2000, cal_grid = 256, cal_draws = 100000;
    double cal_lambda = 1.0, cal_sigma = 1.0, cal_fmax = 1.0;
    cal->add_option("--spec", cal_spec, "Stationary ModelSpec JSON file")->required();
    cal->add_option("--method", cal_method, "mc | analytic | limit");
    cal->add_option("--level", cal_level, "Quantile level");
    cal->add_option("--trials", cal_trials, "Monte Carlo trials");
    cal->add_option("--beta", cal_beta, "Window start fraction");
    cal->add_option("--alpha", cal_alpha, "Window end fraction");
    cal->add_option("--seed", seed, "RNG seed");
    cal->add_option("--workers", workers, "Worker threads (0 = auto)");
    cal->add_option("--lambda", cal_lambda, "Calibration factor (analytic)");
    cal->add_option("--sigma-max", cal_sigma, "Max noise std (analytic)");
    cal->add_option("--fmax", cal_fmax, "Max |plan function| (analytic)");
    cal->add_option("--grid", cal_grid, "t-grid size (limit)");
    cal->add_option("--draws", cal_draws, "Gaussian draws (limit)");
    cal->add_option("--out", out, "Estimate JSON output (default stdout)");
    cal->add_option("--csv", cal_csv, "CSV file to append (N,level,value,stderr,method)");

    auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a config");
    std::string exp_config, exp_json;
    exp->add_option("--config", exp_config, "ExperimentConfig JSON file")->required();
    exp->add_option("--workers", workers, "Worker threads (0 = auto)");
    exp->add_option("--out", out, "Report CSV output (default stdout)");
    exp->add_option("--out-json", exp_json, "Report JSON output path");

    auto* tab = app.add_subcommand("table", "Emit a bundled experiment preset as CSV");
    std::string tab_id;
    double tab_scale = 1.0;
    tab->add_option("--id", tab_id, "Preset id, T1..T9")->required();
    tab->add_option("--scale", tab_scale, "Trial-count multiplier in (0,1]");
    tab->add_option("--seed", seed, "RNG seed");
    tab->add_option("--workers", workers, "Worker threads (0 = auto)");
    tab->add_option("--out", out, "Output path (default stdout)");

    auto* bnd = app.add_subcommand("bound", "Evaluate estimation-error lower bounds");
    std::string bnd_case, bnd_params;
    double bnd_theta = 0.5, bnd_eps = 0.05;
    std::vector<std::size_t> bnd_ns;
    bnd->add_option("--case", bnd_case, "trend | regression | stochastic")->required();
    bnd->add_option("--params", bnd_params, "Case parameters JSON file")->required();
    bnd->add_option("--theta", bnd_theta, "Change-point parameter");
    bnd->add_option("--eps", bnd_eps, "Accuracy half-width");
    bnd->add_option("--N", bnd_ns, "Sample sizes")->required();
    bnd->add_option("--out", out, "Output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return run_simulate(sim_spec, seed, out);
        }
        if (det->parsed()) {
            return run_detect(det_sample, det_config, det_method, out);
        }
        if (cal->parsed()) {
            return run_calibrate(cal_spec, cal_method, cal_level, cal_trials, cal_beta, cal_alpha,
                                 seed, workers, cal_lambda, cal_sigma, cal_fmax, cal_grid,
                                 cal_draws, out, cal_csv);
        }
        if (exp->parsed()) {
            return run_experiment_cmd(exp_config, workers, exp_json, out);
        }
        if (tab->parsed()) {
            const std::string csv =
                cpd::reproduce_table(cpd::parse_table_id(tab_id), tab_scale, seed, workers);
            write_output(out, csv);
            return 0;
        }
        if (bnd->parsed()) {
            return run_bound(bnd_case, bnd_params, bnd_theta, bnd_eps, bnd_ns, out);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
