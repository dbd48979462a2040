#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "netcpd/detectors.hpp"
#include "netcpd/errors.hpp"
#include "netcpd_cli/commands.hpp"
#include "netcpd_cli/config.hpp"
#include "netcpd_cli/io.hpp"
#include "oracles.hpp"

using namespace netcpd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
    const fs::path dir = fs::path(NETCPD_TEST_TMPDIR);
    fs::create_directories(dir);
    return dir;
}

std::string path_of(const std::string& name) { return (workdir() / name).string(); }

std::string write_json(const std::string& name, const json& doc) {
    const std::string path = path_of(name);
    std::ofstream(path) << doc.dump(2);
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = cli::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(line);
    }
    return out;
}

json two_segment_model() {
    return {{"kind", "piecewise"},
            {"n", 20},
            {"T", 30},
            {"segments", json::array({{{"end", 15}, {"p", 0.1}}, {{"end", 30}, {"p", 0.5}}})}};
}

// Everything after the last comma is the timing column.
std::string without_last_column(const std::string& line) { return line.substr(0, line.rfind(',')); }

}  // namespace

TEST_SUITE("edge list io") {
    TEST_CASE("round trip through text") {
        const auto seq = oracle::sequence_of({GraphLayer(5, {{0, 1}, {3, 4}}), GraphLayer(5), GraphLayer(5, {{1, 4}})});
        std::stringstream ss;
        cli::write_edge_list(ss, seq);
        CHECK(ss.str() == "netcpd-layers v1 n=5 T=3\n1 1 2\n1 4 5\n3 2 5\n");
        CHECK(cli::read_edge_list(ss) == seq);
    }

    TEST_CASE("comments and blank lines are ignored") {
        std::istringstream in("# produced by hand\nnetcpd-layers v1 n=3 T=2\n\n2 1 3  # trailing\n");
        const auto seq = cli::read_edge_list(in);
        CHECK(seq.layer(1).has_edge(0, 2));
        CHECK(seq.total_edges() == 1);
    }

    TEST_CASE("malformed input names the line") {
        auto error_of = [](const std::string& text) {
            std::istringstream in(text);
            try {
                (void)cli::read_edge_list(in, "f");
            } catch (const cli::InputError& e) {
                return std::string(e.what());
            }
            return std::string();
        };
        CHECK(error_of("netcpd-layers v1 n=3 T=2\n1 1 2\n1 2 x\n").find("f:3") != std::string::npos);
        CHECK(error_of("netcpd-layers v1 n=3 T=2\n3 1 2\n").find("f:2") != std::string::npos);
        CHECK(error_of("netcpd-layers v1 n=3 T=2\n1 2 1\n").find("f:2") != std::string::npos);
        CHECK(error_of("netcpd-layers v1 n=3 T=2\n1 1 4\n").find("f:2") != std::string::npos);
        CHECK(error_of("netcpd-layers v1 n=3 T=2\n1 1 2\n1 1 2\n").find("f:3") != std::string::npos);
        CHECK_FALSE(error_of("layers n=3 T=2\n").empty());
    }

    TEST_CASE("numbers keep twelve significant digits") {
        CHECK(cli::format_number(1.0 / 3.0) == "0.333333333333");
        CHECK(cli::format_number(2.0) == "2");
    }
}

TEST_SUITE("config") {
    TEST_CASE("unknown keys are named with their path") {
        try {
            (void)cli::parse_run_config(json{{"detector", {{"kapa", 3}}}});
            FAIL("expected a config error");
        } catch (const cli::ConfigError& e) {
            CHECK(std::string(e.what()).find("detector.kapa") != std::string::npos);
        }
        CHECK_THROWS_AS(cli::parse_run_config(json{{"bogus", 1}}), cli::ConfigError);
    }

    TEST_CASE("detector constraints are enforced at parse time") {
        CHECK_THROWS_AS(cli::parse_run_config(json{{"detector", {{"kappa", 6}, {"lambda_range", {7}}}}}),
                        cli::ConfigError);
        CHECK_THROWS_AS(cli::parse_run_config(json{{"detector", {{"M", 0}}}}), cli::ConfigError);
        CHECK_THROWS_AS(cli::parse_run_config(json{{"harness", {{"target_type_i", 1.5}}}}), cli::ConfigError);
        const auto cfg = cli::parse_run_config(
            json{{"seed", 4}, {"detector", {{"kappa", 9}, {"theta_mu", 2.5}, {"algorithm", "wbs"}}}});
        CHECK(cfg.detector.kappa == 9);
        CHECK(cfg.detector.theta_mu == 2.5);
        CHECK(cfg.algorithm == Algorithm::wbs);
        CHECK(cfg.seed == 4u);
    }

    TEST_CASE("later files override earlier ones") {
        const auto a = write_json("merge_a.json", {{"seed", 1}, {"detector", {{"kappa", 9}, {"zeta", 2.0}}}});
        const auto b = write_json("merge_b.json", {{"detector", {{"theta_mu", 0.7}, {"zeta", 3.0}}}});
        const auto cfg = cli::parse_run_config(cli::load_config_files({a, b}));
        CHECK(cfg.detector.kappa == 9);
        CHECK(cfg.detector.zeta == 3.0);
        CHECK(cfg.detector.theta_mu == 0.7);
    }
}

TEST_SUITE("cli simulate") {
    TEST_CASE("zero density gives no edge lines") {
        const auto config = write_json(
            "zero.json", {{"seed", 3},
                          {"model",
                           {{"kind", "piecewise"}, {"n", 10}, {"T", 5}, {"segments", json::array({{{"end", 5}, {"p", 0.0}}})}}}});
        const auto out = path_of("zero.edges");
        const auto r = run({"simulate", "-c", config, "-o", out});
        REQUIRE(r.code == 0);
        CHECK(lines_of(slurp(out)) == std::vector<std::string>{"netcpd-layers v1 n=10 T=5"});
        const json truth = json::parse(slurp(out + ".truth.json"));
        CHECK(truth["change_points"].empty());
        CHECK(truth["seed"] == 3);
    }

    TEST_CASE("deterministic and readable back") {
        const auto config = write_json("sim.json", {{"seed", 11}, {"model", two_segment_model()}});
        const auto a = path_of("sim_a.edges");
        const auto b = path_of("sim_b.edges");
        REQUIRE(run({"simulate", "-c", config, "-o", a}).code == 0);
        REQUIRE(run({"simulate", "-c", config, "-o", b}).code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(slurp(a + ".truth.json") == slurp(b + ".truth.json"));

        const auto seq = cli::read_edge_list_file(a);
        CHECK(seq.node_count() == 20);
        CHECK(seq.layer_count() == 30);
        std::stringstream again;
        cli::write_edge_list(again, seq);
        CHECK(again.str() == slurp(a));
        const json truth = json::parse(slurp(a + ".truth.json"));
        CHECK(truth["change_points"] == json::array({15}));
        CHECK(truth["cushion"] == 15);
        CHECK(truth["sparsity"].get<double>() == doctest::Approx(0.5));
    }

    TEST_CASE("missing seed and bad keys are usage errors") {
        const auto no_seed = write_json("noseed.json", {{"model", two_segment_model()}});
        const auto r = run({"simulate", "-c", no_seed, "-o", path_of("x.edges")});
        CHECK(r.code == 1);
        CHECK(r.err.find("seed") != std::string::npos);

        json bad = two_segment_model();
        bad["density"] = 0.3;
        const auto typo = write_json("typo.json", {{"seed", 1}, {"model", bad}});
        const auto t = run({"simulate", "-c", typo, "-o", path_of("x.edges")});
        CHECK(t.code == 1);
        CHECK(t.err.find("model.density") != std::string::npos);
    }
}

TEST_SUITE("cli detect") {
    TEST_CASE("staircase rows equal the in-process report") {
        std::vector<GraphLayer> layers;
        for (std::size_t i = 0; i < 40; ++i) {
            layers.push_back(i < 20 ? GraphLayer(20) : oracle::complete_layer(20));
        }
        const AdjacencySequence seq(20, layers);
        const auto input = path_of("stair.edges");
        cli::write_edge_list_file(input, seq);
        const auto config = write_json("stair.json", {{"detector", {{"kappa", 12}, {"theta_mu", 1.0}}}});
        const auto out = path_of("stair.csv");
        const auto r = run({"detect", "-i", input, "-c", config, "-o", out, "-w", "2"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("K_hat=1") != std::string::npos);

        DetectorConfig dc;
        dc.kappa = 12;
        dc.theta_mu = 1.0;
        const auto report = detect_window(seq, dc);
        const auto rows = lines_of(slurp(out));
        REQUIRE(rows.size() == report.detections.size() + 1);
        CHECK(rows[0] == "algorithm,tau_hat,lambda,interval_start,interval_end,stat,threshold");
        for (std::size_t i = 0; i < report.detections.size(); ++i) {
            const auto& d = report.detections[i];
            const std::string expected = "window," + std::to_string(d.tau_hat) + "," + std::to_string(d.window) + "," +
                                         std::to_string(d.interval.start) + "," + std::to_string(d.interval.end) + "," +
                                         cli::format_number(d.stat) + "," + cli::format_number(d.threshold);
            CHECK(rows[i + 1] == expected);
        }
    }

    TEST_CASE("empty graphs give a header-only table") {
        const AdjacencySequence seq(8, std::vector<GraphLayer>(20, GraphLayer(8)));
        const auto input = path_of("empty.edges");
        cli::write_edge_list_file(input, seq);
        const auto config = write_json("empty.json", {{"seed", 1}, {"detector", {{"kappa", 9}, {"theta_mu", 1.0}}}});
        for (const char* alg : {"window", "wbs"}) {
            const auto out = path_of(std::string("empty_") + alg + ".csv");
            const auto r = run({"detect", "-i", input, "-c", config, "-o", out, "-a", alg});
            REQUIRE(r.code == 0);
            CHECK(lines_of(slurp(out)).size() == 1);
            CHECK(r.out.find("K_hat=0") != std::string::npos);
        }
    }

    TEST_CASE("usage and input errors map to exit codes") {
        const auto input = path_of("tiny.edges");
        std::ofstream(input) << "netcpd-layers v1 n=4 T=6\n1 1 2\n2 1 9\n";
        const auto config = write_json("tiny.json", {{"detector", {{"kappa", 3}, {"theta_mu", 1.0}}}});
        const auto bad_alg = run({"detect", "-i", input, "-c", config, "-o", path_of("t.csv"), "-a", "binary"});
        CHECK(bad_alg.code == 1);
        const auto bad_line = run({"detect", "-i", input, "-c", config, "-o", path_of("t.csv")});
        CHECK(bad_line.code == 2);
        CHECK(bad_line.err.find(":3") != std::string::npos);
        CHECK(run({"detect", "-c", config}).code == 1);
        CHECK(run({"frobnicate"}).code == 1);

        std::ofstream(input) << "netcpd-layers v1 n=4 T=6\n1 1 2\n";
        const auto no_theta = write_json("notheta.json", {{"detector", {{"kappa", 3}}}});
        const auto r = run({"detect", "-i", input, "-c", no_theta, "-o", path_of("t.csv")});
        CHECK(r.code == 1);
        CHECK(r.err.find("theta_mu") != std::string::npos);
        const auto wbs_no_seed = run({"detect", "-i", input, "-c", config, "-o", path_of("t.csv"), "-a", "wbs"});
        CHECK(wbs_no_seed.code == 1);
    }

    TEST_CASE("input files are left untouched") {
        const auto input = path_of("keep.edges");
        std::ofstream(input) << "netcpd-layers v1 n=4 T=6\n# note\n1 1 2\n";
        const std::string before = slurp(input);
        const auto config = write_json("keep.json", {{"detector", {{"kappa", 3}, {"theta_mu", 1.0}}}});
        CHECK(run({"detect", "-i", input, "-c", config, "-o", path_of("keep.csv")}).code == 0);
        CHECK(slurp(input) == before);
        CHECK(slurp(config).find("theta_mu") != std::string::npos);
    }
}

TEST_SUITE("cli calibrate") {
    json calibration_config(double target) {
        return {{"seed", 21},
                {"model", two_segment_model()},
                {"detector", {{"kappa", 9}}},
                {"harness",
                 {{"replicates", 30},
                  {"target_type_i", target},
                  {"null",
                   {{"kind", "piecewise"}, {"n", 20}, {"T", 30}, {"segments", json::array({{{"end", 30}, {"p", 0.2}}})}}}}}};
    }

    TEST_CASE("repeatable and mergeable") {
        const auto config = write_json("cal.json", calibration_config(0.1));
        const auto a = path_of("cal_a.json");
        const auto b = path_of("cal_b.json");
        const auto ra = run({"calibrate", "-c", config, "-o", a});
        REQUIRE(ra.code == 0);
        REQUIRE(run({"calibrate", "-c", config, "-o", b}).code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(ra.out.find("theta_mu=") != std::string::npos);
        const double theta = json::parse(slurp(a))["detector"]["theta_mu"].get<double>();
        CHECK(theta > 0.0);
        // The fragment merges into a run config.
        const auto merged = cli::parse_run_config(cli::load_config_files({config, a}));
        CHECK(merged.detector.theta_mu == theta);
    }

    TEST_CASE("looser targets give smaller thresholds") {
        const auto strict = write_json("cal_strict.json", calibration_config(0.05));
        const auto loose = write_json("cal_loose.json", calibration_config(0.5));
        REQUIRE(run({"calibrate", "-c", strict, "-o", path_of("s.json")}).code == 0);
        REQUIRE(run({"calibrate", "-c", loose, "-o", path_of("l.json")}).code == 0);
        const double s = json::parse(slurp(path_of("s.json")))["detector"]["theta_mu"].get<double>();
        const double l = json::parse(slurp(path_of("l.json")))["detector"]["theta_mu"].get<double>();
        CHECK(l <= s);
    }

    TEST_CASE("target outside the unit interval is rejected") {
        const auto config = write_json("cal_bad.json", calibration_config(1.0));
        CHECK(run({"calibrate", "-c", config, "-o", path_of("bad.json")}).code == 1);
        const auto zero = write_json("cal_zero.json", calibration_config(0.0));
        CHECK(run({"calibrate", "-c", zero, "-o", path_of("bad.json")}).code == 1);
    }

    TEST_CASE("unreachable targets are numerical errors") {
        json doc = calibration_config(0.05);
        doc["harness"]["theta_grid"] = {{"min", 1e-9}, {"max", 1e-8}, {"points", 3}};
        const auto config = write_json("cal_grid.json", doc);
        CHECK(run({"calibrate", "-c", config, "-o", path_of("bad.json")}).code == 3);
    }
}

TEST_SUITE("cli bench") {
    json bench_config(std::vector<double> alphas) {
        return {{"seed", 5},
                {"detector", {{"theta_mu", 1.0}}},
                {"harness", {{"replicates", 4}}},
                {"sweep", {{"alphas", alphas}, {"rhos", {0.2}}, {"kappas", {9}}, {"n", 16}, {"T", 27}}}};
    }

    TEST_CASE("one cell gives one row") {
        const auto config = write_json("bench1.json", bench_config({0.5}));
        const auto out = path_of("bench1.csv");
        REQUIRE(run({"bench", "-c", config, "-o", out}).code == 0);
        const auto rows = lines_of(slurp(out));
        REQUIRE(rows.size() == 2);
        CHECK(rows[0] ==
              "alpha,rho,kappa,cushion,signal,sparsity,boundary_ratio,type_i,type_ii,pi_hat,ci,localized_rate,seconds");
        CHECK(rows[1].rfind("0.5,0.2,9,9,", 0) == 0);
    }

    TEST_CASE("alpha ascending and numerically reproducible") {
        const auto config = write_json("bench3.json", bench_config({0.8, 0.0, 0.4}));
        const auto a = path_of("bench_a.csv");
        const auto b = path_of("bench_b.csv");
        REQUIRE(run({"bench", "-c", config, "-o", a, "-w", "1"}).code == 0);
        REQUIRE(run({"bench", "-c", config, "-o", b, "-w", "3"}).code == 0);
        const auto ra = lines_of(slurp(a));
        const auto rb = lines_of(slurp(b));
        REQUIRE(ra.size() == 4);
        REQUIRE(rb.size() == 4);
        CHECK(ra[1].rfind("0,", 0) == 0);
        CHECK(ra[2].rfind("0.4,", 0) == 0);
        CHECK(ra[3].rfind("0.8,", 0) == 0);
        for (std::size_t i = 0; i < ra.size(); ++i) {
            CHECK(without_last_column(ra[i]) == without_last_column(rb[i]));
        }
    }

    TEST_CASE("sweep is required") {
        const auto config = write_json("nosweep.json", {{"seed", 5}, {"detector", {{"theta_mu", 1.0}}}});
        const auto r = run({"bench", "-c", config, "-o", path_of("x.csv")});
        CHECK(r.code == 1);
        CHECK(r.err.find("sweep") != std::string::npos);
    }
}
