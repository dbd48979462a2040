#include <doctest.h>

#include "netcpd/errors.hpp"
#include "netcpd/model.hpp"
#include "oracles.hpp"

using namespace netcpd;

namespace {

Eigen::MatrixXd off_diagonal_ones(std::size_t n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.diagonal().setZero();
    return m;
}

ProbabilitySequence two_segments(std::size_t n, double p1, double p2, std::size_t tau, std::size_t T) {
    return ProbabilitySequence(
        {{ProbabilityMatrix::erdos_renyi(n, p1), tau}, {ProbabilityMatrix::erdos_renyi(n, p2), T}});
}

}  // namespace

TEST_SUITE("probability sequences") {
    TEST_CASE("matrices must be symmetric, zero-diagonal probabilities") {
        Eigen::MatrixXd m = off_diagonal_ones(3) * 0.5;
        CHECK_NOTHROW(ProbabilityMatrix{m});
        Eigen::MatrixXd asym = m;
        asym(0, 1) = 0.2;
        CHECK_THROWS_AS(ProbabilityMatrix{asym}, InvalidArgument);
        Eigen::MatrixXd diag = m;
        diag(1, 1) = 0.1;
        CHECK_THROWS_AS(ProbabilityMatrix{diag}, InvalidArgument);
        CHECK_THROWS_AS(ProbabilityMatrix::erdos_renyi(4, 1.5), InvalidArgument);
    }

    TEST_CASE("segment ends must increase and adjacent segments must differ") {
        const auto a = ProbabilityMatrix::erdos_renyi(4, 0.2);
        const auto b = ProbabilityMatrix::erdos_renyi(4, 0.3);
        CHECK_THROWS_AS(ProbabilitySequence({{a, 5}, {b, 5}}), InvalidArgument);
        CHECK_THROWS_AS(ProbabilitySequence({{a, 3}, {a, 6}}), InvalidArgument);
        CHECK_THROWS_AS(ProbabilitySequence({{a, 0}}), InvalidArgument);
        const ProbabilitySequence q({{a, 3}, {b, 6}, {a, 8}});
        CHECK(q.change_points() == std::vector<std::size_t>{3, 6});
        CHECK(q.layer_count() == 8);
        CHECK(q.matrix_at(2) == a);
        CHECK(q.matrix_at(3) == b);
        CHECK(q.matrix_at(7) == a);
    }

    TEST_CASE("block model fills blocks and zeroes the diagonal") {
        const auto m = ProbabilityMatrix::block_model({2, 3}, {{0.5, 0.1}, {0.1, 0.4}});
        CHECK(m.node_count() == 5);
        CHECK(m(0, 1) == 0.5);
        CHECK(m(0, 4) == 0.1);
        CHECK(m(3, 4) == 0.4);
        CHECK(m(2, 2) == 0.0);
    }
}

TEST_SUITE("ground_truth") {
    TEST_CASE("constant model has no signal and the whole horizon as cushion") {
        const auto truth = ground_truth(ProbabilitySequence::constant(ProbabilityMatrix::erdos_renyi(5, 0.3), 12));
        CHECK(truth.change_points.empty());
        CHECK(truth.signal == 0.0);
        CHECK(truth.cushion == 12);
        CHECK(truth.sparsity == 0.3);
    }

    TEST_CASE("single change between two Erdos-Renyi layers on six vertices") {
        const auto truth = ground_truth(two_segments(6, 0.5, 0.1, 4, 10));
        CHECK(truth.cushion == 4);
        CHECK(truth.sparsity == 0.5);
        // 0.4 (J - I) on six vertices has top eigenvalue 0.4 * 5.
        CHECK(truth.signal == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(truth.pop_d == doctest::Approx(3.0));
        CHECK(truth.pop_frakd == doctest::Approx(2.5));
        CHECK(truth.pop_frakd <= truth.pop_d);
        REQUIRE(truth.frobenius_jumps.size() == 1);
        CHECK(truth.frobenius_jumps[0] == doctest::Approx(0.4 * std::sqrt(30.0)));
    }

    TEST_CASE("cushion counts the boundary segments") {
        const auto a = ProbabilityMatrix::erdos_renyi(4, 0.2);
        const auto b = ProbabilityMatrix::erdos_renyi(4, 0.6);
        CHECK(ground_truth(ProbabilitySequence({{a, 7}, {b, 9}, {a, 20}})).cushion == 2);
        CHECK(ground_truth(ProbabilitySequence({{a, 1}, {b, 9}, {a, 20}})).cushion == 1);
    }

    TEST_CASE("entrywise scaling scales sparsity and signal, not the cushion") {
        const auto q = two_segments(8, 0.6, 0.2, 5, 11);
        const auto base = ground_truth(q);
        for (double c : {0.25, 0.5, 1.0}) {
            const auto scaled = ground_truth(q.scaled(c));
            CHECK(scaled.sparsity == doctest::Approx(c * base.sparsity));
            CHECK(scaled.signal == doctest::Approx(c * base.signal));
            CHECK(scaled.cushion == base.cushion);
        }
    }
}

TEST_SUITE("sample_mirgram") {
    TEST_CASE("all-zero and all-one probabilities") {
        const auto empty = sample_mirgram(ProbabilitySequence::constant(ProbabilityMatrix::erdos_renyi(7, 0.0), 3), 1);
        CHECK(empty.total_edges() == 0);
        const auto full = sample_mirgram(ProbabilitySequence::constant(ProbabilityMatrix::erdos_renyi(7, 1.0), 3), 1);
        for (const auto& layer : full.layers()) {
            CHECK(layer.edge_count() == 21);
        }
    }

    TEST_CASE("edge frequency within three standard errors of p") {
        const std::size_t n = 200;
        const std::size_t T = 50;
        const double p = 0.3;
        const auto seq = sample_mirgram(ProbabilitySequence::constant(ProbabilityMatrix::erdos_renyi(n, p), T), 77);
        const double pairs = static_cast<double>(n * (n - 1) / 2 * T);
        const double freq = static_cast<double>(seq.total_edges()) / pairs;
        CHECK(std::abs(freq - p) <= 3.0 * std::sqrt(p * (1.0 - p) / pairs));
    }

    TEST_CASE("same seed gives identical samples, different seeds differ") {
        const auto q = two_segments(30, 0.2, 0.4, 3, 6);
        CHECK(sample_mirgram(q, 5) == sample_mirgram(q, 5));
        CHECK_FALSE(sample_mirgram(q, 5) == sample_mirgram(q, 6));
    }

    TEST_CASE("samples are valid binary symmetric layers") {
        const auto seq = sample_mirgram(two_segments(25, 0.1, 0.5, 2, 4), 3);
        CHECK(seq.layer_count() == 4);
        for (const auto& layer : seq.layers()) {
            const Eigen::MatrixXd d = layer.to_dense();
            CHECK(d == d.transpose());
            CHECK(d.diagonal().isZero());
            CHECK((d.array() * (1.0 - d.array())).isZero());
        }
    }

    TEST_CASE("segment structure survives sampling") {
        const auto q = two_segments(10, 0.2, 0.7, 5, 12);
        CHECK(ground_truth(q).change_points.size() == q.change_count());
        CHECK(sample_mirgram(q, 1).layer_count() == q.layer_count());
    }
}

TEST_SUITE("hard instances") {
    TEST_CASE("alpha zero yields a constant sequence") {
        const auto q = hard_instance_detect(10, 20, 5, 0.2, 0.0, 1);
        CHECK(q.change_count() == 0);
        CHECK(q.layer_count() == 20);
    }

    TEST_CASE("perturbed entries take the two values rho (1 +- alpha)") {
        const double rho = 0.2;
        const double alpha = 0.5;
        const auto q = hard_instance_detect(12, 20, 5, rho, alpha, 3);
        REQUIRE(q.change_points() == std::vector<std::size_t>{5});
        const auto& m = q.segments()[0].matrix;
        for (std::size_t i = 0; i < 12; ++i) {
            for (std::size_t j = 0; j < 12; ++j) {
                if (i == j) {
                    CHECK(m(i, j) == 0.0);
                } else {
                    const bool low = std::abs(m(i, j) - rho * (1 - alpha)) < 1e-15;
                    const bool high = std::abs(m(i, j) - rho * (1 + alpha)) < 1e-15;
                    CHECK((low || high));
                }
            }
        }
        CHECK(q.segments()[1].matrix == ProbabilityMatrix::erdos_renyi(12, rho));
    }

    TEST_CASE("detect perturbation is rank one apart from the zeroed diagonal") {
        const std::size_t n = 40;
        const double rho = 0.1;
        const double alpha = 0.8;
        const auto q = hard_instance_detect(n, 10, 4, rho, alpha, 9);
        const Eigen::MatrixXd delta = q.segments()[0].matrix.values() - q.segments()[1].matrix.values();
        // delta = alpha rho (u u^T - I).
        const Eigen::VectorXd ev = oracle::eigenvalues(delta);
        CHECK(ev(ev.size() - 1) == doctest::Approx(alpha * rho * (n - 1)).epsilon(1e-10));
        for (Eigen::Index i = 0; i + 1 < ev.size(); ++i) {
            CHECK(ev(i) == doctest::Approx(-alpha * rho).epsilon(1e-9));
        }
        CHECK(ground_truth(q).signal == doctest::Approx(alpha * rho * (n - 1)).epsilon(1e-10));
    }

    TEST_CASE("signal grows strictly with alpha") {
        double previous = 0.0;
        for (double alpha : {0.1, 0.3, 0.6, 0.9}) {
            const double s = ground_truth(hard_instance_detect(20, 10, 4, 0.3, alpha, 2)).signal;
            CHECK(s > previous);
            previous = s;
        }
    }

    TEST_CASE("out-of-range probabilities are an error naming alpha and rho") {
        try {
            (void)hard_instance_detect(10, 20, 5, 0.6, 0.9, 1);
            FAIL("expected an error");
        } catch (const InvalidArgument& e) {
            const std::string what = e.what();
            CHECK(what.find("alpha") != std::string::npos);
            CHECK(what.find("rho") != std::string::npos);
        }
        CHECK_THROWS_AS(hard_instance_detect(10, 20, 20, 0.2, 0.5, 1), InvalidArgument);
        CHECK_THROWS_AS(hard_instance_detect(10, 20, 5, 0.0, 0.5, 1), InvalidArgument);
    }

    TEST_CASE("localize with rank one is the detect construction at a third of the scale") {
        const auto loc = hard_instance_localize(15, 20, 6, 0.2, 0.9, 1, ChangeSide::early, 4);
        const auto det = hard_instance_detect(15, 20, 6, 0.2, 0.3, 4);
        const Eigen::MatrixXd a = loc.segments()[0].matrix.values() - loc.segments()[1].matrix.values();
        const Eigen::MatrixXd b = det.segments()[0].matrix.values() - det.segments()[1].matrix.values();
        // Same sign vector drawn from the same seed.
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
    }

    TEST_CASE("early and late sides differ only in where the change sits") {
        const std::size_t T = 30;
        const std::size_t kappa = 8;
        const auto early = hard_instance_localize(10, T, kappa, 0.2, 0.5, 2, ChangeSide::early, 6);
        const auto late = hard_instance_localize(10, T, kappa, 0.2, 0.5, 2, ChangeSide::late, 6);
        CHECK(early.change_points() == std::vector<std::size_t>{kappa});
        CHECK(late.change_points() == std::vector<std::size_t>{T - kappa});
        CHECK(late.change_points()[0] - early.change_points()[0] == T - 2 * kappa);
        CHECK(early.segments()[0].matrix == late.segments()[1].matrix);
        CHECK(early.segments()[1].matrix == late.segments()[0].matrix);
    }

    TEST_CASE("rank three perturbation has numerical rank three") {
        const std::size_t n = 40;
        const double rho = 0.2;
        const double alpha = 0.5;
        const auto q = hard_instance_localize(n, 20, 5, rho, alpha, 3, ChangeSide::early, 12);
        Eigen::MatrixXd delta = q.segments()[0].matrix.values() - q.segments()[1].matrix.values();
        // Undo the zeroed diagonal: each U_i U_i^T contributes 3^-i there.
        const double diagonal = alpha * rho * (1.0 / 3 + 1.0 / 9 + 1.0 / 27);
        delta.diagonal().setConstant(diagonal);
        const Eigen::VectorXd ev = oracle::eigenvalues(delta);
        int large = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            large += std::abs(ev(i)) > 1e-8 * static_cast<double>(n) ? 1 : 0;
        }
        CHECK(large == 3);
    }

    TEST_CASE("fixed seed reproduces hard instances") {
        const auto a = hard_instance_localize(20, 15, 4, 0.2, 0.5, 2, ChangeSide::late, 8);
        const auto b = hard_instance_localize(20, 15, 4, 0.2, 0.5, 2, ChangeSide::late, 8);
        CHECK(a.segments()[1].matrix == b.segments()[1].matrix);
        CHECK_THROWS_AS(hard_instance_localize(5, 15, 4, 0.2, 0.5, 6, ChangeSide::late, 8), InvalidArgument);
    }
}
