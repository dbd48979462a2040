#include "netcpd_cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "netcpd/errors.hpp"
#include "netcpd/harness.hpp"
#include "netcpd/random.hpp"
#include "netcpd_cli/config.hpp"
#include "netcpd_cli/io.hpp"

namespace netcpd::cli {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSimulateModelTag = 0x6d6f64656c;    // "model"
constexpr std::uint64_t kSimulateSampleTag = 0x73616d706c;   // "sampl"

struct CommonArgs {
    std::vector<std::string> configs;
    std::string output;
    unsigned workers = 0;
};

RunConfig load(const CommonArgs& args) {
    return parse_run_config(load_config_files(args.configs));
}

std::string output_path(const CommonArgs& args, const RunConfig& cfg, const std::string& command) {
    if (!args.output.empty()) {
        return args.output;
    }
    if (cfg.output) {
        return *cfg.output;
    }
    throw ConfigError(command + " needs --output or an 'output' config key");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    return out;
}

ModelFactory factory(const ModelSpec& spec) {
    return [spec](std::uint64_t seed) { return spec.build(seed); };
}

json truth_document(const ProbabilitySequence& q, std::uint64_t seed) {
    const GroundTruth truth = ground_truth(q);
    json doc;
    doc["n"] = q.node_count();
    doc["T"] = q.layer_count();
    doc["seed"] = seed;
    doc["change_points"] = truth.change_points;
    doc["cushion"] = truth.cushion;
    doc["signal"] = truth.signal;
    doc["sparsity"] = truth.sparsity;
    doc["d"] = truth.pop_d;
    doc["frak_d"] = truth.pop_frakd;
    return doc;
}

int cmd_simulate(const CommonArgs& args, std::ostream& out) {
    const RunConfig cfg = load(args);
    const std::uint64_t seed = cfg.require_seed("simulate");
    const ModelSpec& spec = cfg.require_model("simulate");
    const std::string path = output_path(args, cfg, "simulate");

    const ProbabilitySequence q = spec.build(derive_seed(seed, {kSimulateModelTag}));
    const AdjacencySequence seq = sample_mirgram(q, derive_seed(seed, {kSimulateSampleTag}));
    write_edge_list_file(path, seq);
    std::ofstream sidecar = open_output(path + ".truth.json");
    sidecar << truth_document(q, seed).dump(2) << '\n';
    out << "wrote " << path << " (" << seq.total_edges() << " edges, " << seq.layer_count() << " layers) and "
        << path << ".truth.json\n";
    return kExitOk;
}

int cmd_detect(const CommonArgs& args, const std::string& input, const std::string& algorithm_flag,
               std::ostream& out) {
    const RunConfig cfg = load(args);
    Algorithm algorithm = cfg.algorithm.value_or(Algorithm::window);
    if (!algorithm_flag.empty()) {
        algorithm = *parse_algorithm(algorithm_flag);
    }
    DetectorConfig detector = cfg.detector;
    if (algorithm == Algorithm::wbs) {
        detector.seed = cfg.require_seed("detect --algorithm wbs");
    } else {
        detector.seed = cfg.seed.value_or(0);
    }
    detector.workers = args.workers;
    const std::string path = output_path(args, cfg, "detect");

    const AdjacencySequence seq = read_edge_list_file(input);
    try {
        detector.validate(algorithm, seq.layer_count());
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("detector: ") + e.what());
    }
    const auto started = std::chrono::steady_clock::now();
    const DetectionReport report = detect(seq, detector, algorithm);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    std::ofstream table = open_output(path);
    table << "algorithm,tau_hat,lambda,interval_start,interval_end,stat,threshold\n";
    for (const Detection& d : report.detections) {
        table << to_string(algorithm) << ',' << d.tau_hat << ',' << d.window << ',' << d.interval.start << ','
              << d.interval.end << ',' << format_number(d.stat) << ',' << format_number(d.threshold) << '\n';
    }
    out << "K_hat=" << report.estimated_K << " runtime_s=" << format_number(seconds) << '\n';
    return kExitOk;
}

int cmd_calibrate(const CommonArgs& args, const std::string& algorithm_flag, std::ostream& out) {
    const RunConfig cfg = load(args);
    const std::uint64_t seed = cfg.require_seed("calibrate");
    const ModelSpec& null_spec = cfg.harness.null_model ? *cfg.harness.null_model : cfg.require_model("calibrate");
    const std::string path = output_path(args, cfg, "calibrate");
    Algorithm algorithm = cfg.algorithm.value_or(Algorithm::window);
    if (!algorithm_flag.empty()) {
        algorithm = *parse_algorithm(algorithm_flag);
    }
    try {
        cfg.detector.validate(algorithm, null_spec.T, false);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("detector: ") + e.what());
    }
    HarnessOptions opts;
    opts.replicates = cfg.harness.replicates;
    opts.seed = seed;
    opts.workers = args.workers;
    const CalibrationResult result = calibrate_theta(factory(null_spec), algorithm, cfg.detector,
                                                     cfg.harness.target_type_i, opts, cfg.harness.theta_grid);
    json doc;
    doc["detector"]["theta_mu"] = result.theta_mu;
    std::ofstream file = open_output(path);
    file << doc.dump(2) << '\n';
    out << "theta_mu=" << format_number(result.theta_mu) << " type_i=" << format_number(result.type_i)
        << " replicates=" << opts.replicates << '\n';
    return kExitOk;
}

int cmd_bench(const CommonArgs& args, const std::string& algorithm_flag, std::ostream& out) {
    const RunConfig cfg = load(args);
    const std::uint64_t seed = cfg.require_seed("bench");
    if (!cfg.sweep) {
        throw ConfigError("'sweep' is required by bench");
    }
    const std::string path = output_path(args, cfg, "bench");
    Algorithm algorithm = cfg.algorithm.value_or(Algorithm::window);
    if (!algorithm_flag.empty()) {
        algorithm = *parse_algorithm(algorithm_flag);
    }
    HarnessOptions opts;
    opts.replicates = cfg.harness.replicates;
    opts.seed = seed;
    opts.workers = args.workers;
    std::vector<SweepRow> rows;
    try {
        rows = phase_sweep(*cfg.sweep, algorithm, cfg.detector, opts);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("sweep: ") + e.what());
    }
    std::ofstream table = open_output(path);
    table << "alpha,rho,kappa,cushion,signal,sparsity,boundary_ratio,type_i,type_ii,pi_hat,ci,localized_rate,"
             "seconds\n";
    for (const SweepRow& r : rows) {
        table << format_number(r.alpha) << ',' << format_number(r.rho) << ',' << r.kappa << ',' << r.cushion << ','
              << format_number(r.signal) << ',' << format_number(r.sparsity) << ','
              << format_number(r.boundary_ratio) << ',' << format_number(r.risk.type_i) << ','
              << format_number(r.risk.type_ii) << ',' << format_number(r.risk.pi_hat) << ','
              << format_number(r.risk.ci_half_width) << ',' << format_number(r.localized_rate) << ','
              << format_number(r.seconds) << '\n';
    }
    out << "wrote " << rows.size() << " sweep rows to " << path << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Change-point detection in sequences of networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "netcpd 0.1.0");

    CommonArgs common;
    std::string input;
    std::string algorithm;
    const auto algorithm_check = CLI::IsMember({"window", "wbs"});

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("-c,--config", common.configs, "JSON run config; repeat to merge left to right");
        if (needs_config) {
            opt->required();
        }
        sub->add_option("-o,--output", common.output, "output file (overrides the 'output' key)");
        sub->add_option("-w,--workers", common.workers, "worker threads; 0 uses every hardware thread")
            ->default_val(0);
    };

    auto* simulate = app.add_subcommand("simulate", "sample a network sequence and its ground truth");
    add_common(simulate, true);
    auto* detect_cmd = app.add_subcommand("detect", "run a detector on an edge-list file");
    add_common(detect_cmd, false);
    detect_cmd->add_option("-i,--input", input, "edge-list file")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("-a,--algorithm", algorithm, "window or wbs")->check(algorithm_check);
    auto* calibrate = app.add_subcommand("calibrate", "calibrate theta_mu on the null model");
    add_common(calibrate, true);
    calibrate->add_option("-a,--algorithm", algorithm, "window or wbs")->check(algorithm_check);
    auto* bench = app.add_subcommand("bench", "Monte Carlo phase sweep");
    add_common(bench, true);
    bench->add_option("-a,--algorithm", algorithm, "window or wbs")->check(algorithm_check);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << "netcpd 0.1.0\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(common, out);
        }
        if (detect_cmd->parsed()) {
            return cmd_detect(common, input, algorithm, out);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(common, algorithm, out);
        }
        return cmd_bench(common, algorithm, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const ConvergenceError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const CalibrationError& e) {
        err << "calibration error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DegenerateModelError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace netcpd::cli
