#include <catch2/catch_amalgamated.hpp>

#include "nullhom/null_homology.hpp"
#include "nullhom/sampler.hpp"
#include "nullhom/schauder.hpp"
#include "nullhom/tightness.hpp"
#include "support/oracles.hpp"

using namespace nullhom;

namespace {

MarkovChainSpec symmetric_two_state() {
    Eigen::MatrixXd P(2, 2);
    P << 0.5, 0.5, 0.5, 0.5;
    return MarkovChainSpec::validate(P);
}

SamplerHandle coboundary_sampler() {
    auto chain = symmetric_two_state();
    auto f = make_null_homologous(chain, ShiftFunction<double>{{{0.0}, {1.0}}});
    return make_mrw_sampler(std::move(chain), std::move(f));
}

SamplerHandle biased_iid_sampler(double mean) {
    // +/-1 increments with P(+1) = (1+mean)/2.
    Eigen::VectorXd up(1), down(1);
    up << 1.0;
    down << -1.0;
    return make_iid_sampler({up, down}, {(1.0 + mean) / 2, (1.0 - mean) / 2}, "biased");
}

}  // namespace

TEST_CASE("tightness diagnostic separates bounded from diffusive growth") {
    std::vector<int> horizons{32, 64, 128, 256, 512, 1024};
    std::vector<double> levels{0.9, 0.99};

    SECTION("coboundary walks read tight-consistent with quantiles <= 2") {
        auto rep = tightness_diagnostic(coboundary_sampler(), horizons, 400, levels,
                                        RandomSource(101, 0));
        REQUIRE(rep.verdict == kVerdictTight);
        REQUIRE(rep.quantiles.maxCoeff() <= 2.0);
        REQUIRE(std::abs(rep.growth_exponent) < 0.05);
    }

    SECTION("centered +/-1 increments read growing with exponent near 1/2") {
        auto rep = tightness_diagnostic(make_srw_sampler(1), horizons, 400, levels,
                                        RandomSource(102, 0));
        REQUIRE(rep.verdict == kVerdictGrowing);
        REQUIRE(rep.growth_exponent > 0.35);
        REQUIRE(rep.growth_exponent < 0.65);
    }

    SECTION("mean-0.2 increments read growing with exponent approaching 1") {
        auto rep = tightness_diagnostic(biased_iid_sampler(0.2), horizons, 400, levels,
                                        RandomSource(103, 0));
        REQUIRE(rep.verdict == kVerdictGrowing);
        REQUIRE(rep.growth_exponent > 0.6);
    }

    SECTION("SRW exponent drifts toward 1/2 as the horizon range doubles") {
        double prev_gap = 1e9;
        for (int top : {128, 512, 2048}) {
            std::vector<int> hs;
            for (int h = 4; h <= top; h *= 2) hs.push_back(h);
            auto rep = tightness_diagnostic(make_srw_sampler(1), hs, 800, levels,
                                            RandomSource(104, 0));
            double gap = std::abs(rep.growth_exponent - 0.5);
            REQUIRE(gap <= prev_gap + 0.02);
            prev_gap = gap;
        }
        REQUIRE(prev_gap < 0.08);
    }

    SECTION("identical seeds give identical reports for any thread count") {
        auto a = tightness_diagnostic(make_srw_sampler(2), horizons, 300, levels,
                                      RandomSource(105, 9), 1);
        auto b = tightness_diagnostic(make_srw_sampler(2), horizons, 300, levels,
                                      RandomSource(105, 9), 3);
        REQUIRE(a.quantiles == b.quantiles);
        REQUIRE(a.verdict == b.verdict);
        REQUIRE(a.growth_exponent == b.growth_exponent);
    }

    SECTION("input validation") {
        REQUIRE_THROWS_AS(tightness_diagnostic(make_srw_sampler(1), horizons, 50, levels,
                                               RandomSource(1)),
                          InsufficientReps);
        REQUIRE_THROWS_AS(tightness_diagnostic(make_srw_sampler(1), {8, 8, 16}, 200, levels,
                                               RandomSource(1)),
                          InvalidBounds);
    }
}

TEST_CASE("Lp boundedness check") {
    std::vector<int> horizons{16, 32, 64, 128, 256};

    SECTION("coboundary moments are bounded by (2 max|xi|)^p") {
        auto rep = lp_bound_check(coboundary_sampler(), 2.0, horizons, 300, RandomSource(111, 0));
        REQUIRE(rep.bounded);
        for (double m : rep.moments) REQUIRE(m <= 4.0 + 1e-12);
    }

    SECTION("SRW second moment grows like n") {
        auto rep = lp_bound_check(make_srw_sampler(1), 2.0, horizons, 2000, RandomSource(112, 0));
        REQUIRE_FALSE(rep.bounded);
        // E S_n^2 = n exactly; the empirical value should sit nearby.
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            double n = horizons[h];
            REQUIRE(rep.moments[h] > 0.8 * n);
            REQUIRE(rep.moments[h] < 1.2 * n);
        }
    }

    SECTION("constant increments give E|S_n| = n c exactly") {
        Eigen::VectorXd c(1);
        c << 0.25;
        auto rep = lp_bound_check(make_iid_sampler({c}, {1.0}), 1.0, horizons, 10,
                                  RandomSource(113, 0));
        for (std::size_t h = 0; h < horizons.size(); ++h)
            REQUIRE(rep.moments[h] == Catch::Approx(0.25 * horizons[h]).epsilon(1e-12));
        REQUIRE_FALSE(rep.bounded);
    }
}

TEST_CASE("theorem equivalence experiment") {
    auto chain = symmetric_two_state();
    EquivalenceConfig cfg;
    cfg.reps = 300;

    SECTION("coboundary: exact YES and tight-consistent") {
        auto f = make_null_homologous(chain, ShiftFunction<double>{{{0.0}, {1.0}}});
        auto rep = theorem_equivalence_experiment(chain, f, cfg, RandomSource(121, 0));
        REQUIRE(rep.null_homologous);
        REQUIRE(rep.hard_assertion_applicable);
        REQUIRE(rep.hard_assertion_holds);
        REQUIRE(rep.mu_mean_norm <= 1e-15);
    }

    SECTION("zero increments: exact YES and tight-consistent") {
        IncrementFunction<double> z;
        z.dim = 1;
        for (auto [s, t] : chain.edges()) z.edge_values[{s, t}] = {0.0};
        auto rep = theorem_equivalence_experiment(chain, z, cfg, RandomSource(122, 0));
        REQUIRE(rep.null_homologous);
        REQUIRE(rep.hard_assertion_holds);
    }

    SECTION("perturbed coboundary with drift: exact NO and growing") {
        auto f = make_null_homologous(chain, ShiftFunction<double>{{{0.0}, {1.0}}});
        f.edge_values[{1, 0}][0] += 0.5;  // non-tree edge: breaks the cocycle
        auto rep = theorem_equivalence_experiment(chain, f, cfg, RandomSource(123, 0));
        REQUIRE_FALSE(rep.null_homologous);
        REQUIRE(rep.counterexample.has_value());
        REQUIRE(rep.counterexample->cycle_sum[0] == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(rep.mu_mean_norm > 0.05);
        REQUIRE(rep.hard_assertion_applicable);
        REQUIRE(rep.hard_assertion_holds);
    }

    SECTION("zero-mean violation stays report-only") {
        // Antisymmetric perturbation on both directions keeps the stationary
        // mean at zero while breaking the coboundary equations.
        Eigen::MatrixXd P(2, 2);
        P << 0.5, 0.5, 0.5, 0.5;
        auto c2 = MarkovChainSpec::validate(P);
        IncrementFunction<double> f;
        f.dim = 1;
        f.edge_values[{0, 0}] = {0.5};
        f.edge_values[{0, 1}] = {0.0};
        f.edge_values[{1, 0}] = {0.0};
        f.edge_values[{1, 1}] = {-0.5};
        auto rep = theorem_equivalence_experiment(c2, f, cfg, RandomSource(124, 0));
        REQUIRE_FALSE(rep.null_homologous);
        REQUIRE(rep.mu_mean_norm <= 1e-15);
        REQUIRE_FALSE(rep.hard_assertion_applicable);
    }
}

TEST_CASE("schauder map identities hold exactly on integer windows") {
    SECTION("zero sequence") {
        auto z = PathWindow<long long>::scalars(-3, std::vector<long long>(12, 0));
        auto rep = schauder_map_checks(z, 5);
        REQUIRE(rep.all_ok());
    }

    SECTION("random integer windows, k_max = 5") {
        RandomSource src(311);
        for (int rep_i = 0; rep_i < 100; ++rep_i) {
            RandomSource r = src.substream(static_cast<std::uint64_t>(rep_i));
            long long offset = -8 + static_cast<long long>(r.uniform() * 10);
            std::size_t len = 8 + static_cast<std::size_t>(r.uniform() * 6);
            std::size_t dim = 1 + static_cast<std::size_t>(r.uniform() * 2);
            std::vector<long long> vals(len * dim);
            for (auto& v : vals) v = static_cast<long long>(r.uniform() * 41) - 20;
            auto w = PathWindow<long long>(offset, dim, std::move(vals));
            auto rep = schauder_map_checks(w, 5);
            REQUIRE(rep.lambda_composition_ok);
            REQUIRE(rep.shift_commutes_ok);
            REQUIRE(rep.y_recursion_ok);
        }
    }

    SECTION("lambda_1 is (Tx, x)") {
        auto w = PathWindow<long long>::scalars(0, {3, 1, 4, 1, 5});
        auto p = lambda_map(w, 1);
        REQUIRE(p.x == shift(w));
        REQUIRE(p.y == w);
    }

    SECTION("window too short throws") {
        auto w = PathWindow<long long>::scalars(0, {1, 2, 3});
        REQUIRE_THROWS_AS(schauder_map_checks(w, 5), WindowTooShort);
    }
}
