#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "saddle/wellposed.hpp"
#include "support/instances.hpp"

using namespace saddle;
using namespace testsupport;

namespace {

SpacePtr pair_space() {
    return validate_metric({{0.0, 1.0}, {1.0, 0.0}});
}

BiFunction table(const SpacePtr& x, const SpacePtr& y,
                 std::vector<std::vector<ExtReal>> rows) {
    return BiFunction::from_rows(x, y, std::move(rows));
}

ScalarField zeros(const SpacePtr& s) { return ScalarField::constant(s, ExtReal(0.0)); }

} // namespace

TEST_CASE("optimizing verdicts track marginal errors and their envelope") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    SECTION("a sequence that settles on the saddle is optimizing") {
        const PairSequence seq{{{0, 1}, {1, 1}, {1, 0}}};
        const OptimizingVerdict v = is_optimizing(f, seq, 0.0);
        CHECK(v.optimizing);
        CHECK(v.gap == 0.0);
        // Errors: step 1: max(3-1, 4-3)=2; step 2: max(0, 1)=1; step 3: 0.
        CHECK(v.step_errors == std::vector<double>{2.0, 1.0, 0.0});
        CHECK(v.envelope == std::vector<double>{2.0, 1.0, 0.0});
        CHECK(v.first_violation == std::size_t{0});
    }
    SECTION("a sequence that ends away from the saddle is not") {
        const PairSequence seq{{{1, 0}, {0, 1}}};
        const OptimizingVerdict v = is_optimizing(f, seq, 0.0);
        CHECK_FALSE(v.optimizing);
        CHECK(v.step_errors.back() == 2.0);
        CHECK(v.reason.find("final marginal error") != std::string::npos);
    }
    SECTION("a nonzero gap blocks the verdict no matter the sequence") {
        const BiFunction g = table(s, s, {{ExtReal(0.0), ExtReal(1.0)},
                                          {ExtReal(1.0), ExtReal(0.0)}});
        const OptimizingVerdict v = is_optimizing(g, PairSequence{{{0, 0}}}, 0.0);
        CHECK_FALSE(v.optimizing);
        CHECK(v.reason.find("duality gap") != std::string::npos);
    }
    SECTION("an undefined gap is reported, not computed around") {
        const BiFunction g = table(s, s, {{ExtReal::neg_inf(), ExtReal::neg_inf()},
                                          {ExtReal::neg_inf(), ExtReal::neg_inf()}});
        const OptimizingVerdict v = is_optimizing(g, PairSequence{{{0, 0}}}, 0.0);
        CHECK_FALSE(v.optimizing);
        CHECK_FALSE(v.gap.has_value());
    }
    CHECK_THROWS_AS(is_optimizing(f, PairSequence{}, 0.0), input_error);
}

TEST_CASE("optimizing implies maximinimizing, not conversely") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    const PairSequence settle{{{0, 1}, {1, 0}}};
    const OptimizingVerdict opt = is_optimizing(f, settle, 0.0);
    const MaximinimizingVerdict mm = is_maximinimizing(f, settle, 0.0);
    REQUIRE(opt.optimizing);
    CHECK(mm.maximinimizing);
    // Step spreads: w(y1)-v(x0)=4-1=3, then w(y0)-v(x1)=3-3=0.
    CHECK(mm.step_gaps == std::vector<double>{3.0, 0.0});

    // With a positive gap a sequence can close the envelope spread down to
    // the gap but is never optimizing.
    const BiFunction g = table(s, s, {{ExtReal(0.0), ExtReal(1.0)},
                                      {ExtReal(1.0), ExtReal(0.0)}});
    const MaximinimizingVerdict loose = is_maximinimizing(g, PairSequence{{{0, 0}}}, 1.0);
    CHECK(loose.maximinimizing); // spread 1 <= tol 1
    const OptimizingVerdict never = is_optimizing(g, PairSequence{{{0, 0}}}, 0.5);
    CHECK_FALSE(never.optimizing);
}

TEST_CASE("modulus diameters are nonincreasing and flag unique limits") {
    const SpacePtr s = pair_space();
    SECTION("constant payoff never localizes") {
        const BiFunction f = table(s, s, {{ExtReal(0.0), ExtReal(0.0)},
                                          {ExtReal(0.0), ExtReal(0.0)}});
        const WellPosednessModulus m = modulus(f, {1.0, 0.5, 0.25}, 0.0);
        CHECK(m.eps == std::vector<double>{1.0, 0.5, 0.25});
        CHECK(m.diameter == std::vector<double>{1.0, 1.0, 1.0});
        CHECK(m.pair_counts == std::vector<std::size_t>{4, 4, 4});
        CHECK_FALSE(m.unique_pair);
    }
    SECTION("strictly separated saddle localizes immediately") {
        const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                          {ExtReal(3.0), ExtReal(4.0)}});
        const WellPosednessModulus m = modulus(f, {2.0, 1.0}, 0.0);
        CHECK(m.diameter.back() == 0.0);
        REQUIRE(m.unique_pair);
        CHECK(*m.unique_pair == std::pair<std::size_t, std::size_t>{1, 0});
    }
    SECTION("grids are deduplicated and sorted descending") {
        const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                          {ExtReal(3.0), ExtReal(4.0)}});
        const WellPosednessModulus m = modulus(f, {0.5, 2.0, 0.5}, 0.0);
        CHECK(m.eps == std::vector<double>{2.0, 0.5});
    }
    SECTION("bad grids are rejected") {
        const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                          {ExtReal(3.0), ExtReal(4.0)}});
        CHECK_THROWS_AS(modulus(f, {}, 0.0), input_error);
        CHECK_THROWS_AS(modulus(f, {1.0, -1.0}, 0.0), input_error);
    }
}

TEST_CASE("solution map returns the saddles of the shifted payoff") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    const auto base = solution_map(f, zeros(s), zeros(s), 0.0);
    REQUIRE(base.size() == 1);
    CHECK(base[0].x0 == 1);
    CHECK(base[0].y0 == 0);

    // Shift x-row 1 down hard: the saddle moves to row 0.
    const ScalarField push(s, {ExtReal(0.0), ExtReal(-5.0)});
    const auto moved = solution_map(f, push, zeros(s), 0.0);
    REQUIRE(moved.size() == 1);
    CHECK(moved[0].x0 == 0);
    CHECK(moved[0].y0 == 0);
}

TEST_CASE("probe on a strictly separated saddle stays contained") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    ProbeOptions opts;
    opts.rho = 0.125; // well below the margin 1
    opts.trials = 8;
    opts.seed = 99;
    opts.tol = 0.0;
    const SolutionMapProbe probe =
        usc_adversary_probe(f, zeros(s), zeros(s), {1}, {0}, opts);
    CHECK_FALSE(probe.escaped);
    CHECK(probe.base_solutions.size() == 1);
    REQUIRE(probe.value_margin);
    CHECK(*probe.value_margin == 1.0);
    CHECK(probe.adversary_used);
    CHECK(probe.samples.size() >= 1u + 8u);
    for (const auto& sample : probe.samples) {
        CHECK(sample.move_norm < opts.rho);
        CHECK(sample.contained);
    }
}

TEST_CASE("probe reports escape when the target box excludes a reachable pair") {
    const SpacePtr s = pair_space();
    // Two saddles tie at value 0: columns y0 and y1 are both optimal.
    const BiFunction f = table(s, s, {{ExtReal(0.0), ExtReal(0.0)},
                                      {ExtReal(-1.0), ExtReal(-1.0)}});
    ProbeOptions opts;
    opts.rho = 0.25;
    opts.trials = 32;
    opts.seed = 4;
    opts.tol = 0.0;
    // Claim the solution set is only (0,0); the tie at (0,1) breaks out.
    const SolutionMapProbe probe =
        usc_adversary_probe(f, zeros(s), zeros(s), {0}, {0}, opts);
    CHECK(probe.escaped);
    REQUIRE(probe.witness);
    const ProbeSample& w = probe.samples[*probe.witness];
    CHECK(w.move_norm < opts.rho);
    // Replay the witness shift and confirm a solution leaves the box.
    const auto replay = solution_map(f, w.shift_x, w.shift_y, 0.0);
    bool outside = false;
    for (const auto& c : replay) {
        outside = outside || !(c.x0 == 0 && c.y0 == 0);
    }
    CHECK(outside);
}

TEST_CASE("adversary synthesizes an escape within the probe radius") {
    const SpacePtr s = pair_space();
    // Unique saddle at (0,0), but x1 is within rho/3 of optimal: the
    // adversary can relocate the saddle there with a sub-rho perturbation.
    const BiFunction f = table(s, s, {{ExtReal(0.0), ExtReal(5.0)},
                                      {ExtReal(-0.125), ExtReal(5.0)}});
    ProbeOptions opts;
    opts.rho = 0.5;
    opts.trials = 0; // adversary only; no random phase
    opts.seed = 0;
    opts.tol = 0.0;
    const SolutionMapProbe probe =
        usc_adversary_probe(f, zeros(s), zeros(s), {0}, {0}, opts);
    CHECK(probe.adversary_used);
    CHECK(probe.escaped);
    REQUIRE(probe.witness);
    const ProbeSample& w = probe.samples[*probe.witness];
    CHECK(w.origin == "adversary");
    CHECK(w.move_norm > 0.0);
    CHECK(w.move_norm < opts.rho);
    const auto replay = solution_map(f, w.shift_x, w.shift_y, 0.0);
    REQUIRE_FALSE(replay.empty());
    bool outside = false;
    for (const auto& c : replay) outside = outside || !(c.x0 == 0 && c.y0 == 0);
    CHECK(outside);
}

TEST_CASE("probe runs are deterministic for a fixed seed") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    ProbeOptions opts;
    opts.rho = 0.5;
    opts.trials = 6;
    opts.seed = 31337;
    opts.tol = 0.0;
    const SolutionMapProbe a = usc_adversary_probe(f, zeros(s), zeros(s), {1}, {0}, opts);
    const SolutionMapProbe b = usc_adversary_probe(f, zeros(s), zeros(s), {1}, {0}, opts);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].origin == b.samples[i].origin);
        CHECK(a.samples[i].move_norm == b.samples[i].move_norm);
        CHECK(a.samples[i].solutions == b.samples[i].solutions);
    }
}

TEST_CASE("joint probe accepts an arbitrary finite center") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    const BiFunction z = table(s, s, {{ExtReal(0.0), ExtReal(0.0)},
                                      {ExtReal(0.0), ExtReal(0.0)}});
    ProbeOptions opts;
    opts.rho = 0.125;
    opts.trials = 5;
    opts.seed = 11;
    opts.tol = 0.0;
    const ProductProbe probe = product_usc_probe(f, z, {1}, {0}, opts);
    CHECK_FALSE(probe.escaped);
    CHECK(probe.base_solutions.size() == 1);
    for (const auto& sample : probe.samples) {
        CHECK(sample.move_norm < opts.rho);
    }
}

TEST_CASE("probe options are validated") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    ProbeOptions opts;
    opts.rho = 0.0;
    CHECK_THROWS_AS(usc_adversary_probe(f, zeros(s), zeros(s), {1}, {0}, opts), input_error);
    opts.rho = 0.5;
    opts.trials = -1;
    CHECK_THROWS_AS(usc_adversary_probe(f, zeros(s), zeros(s), {1}, {0}, opts), input_error);
    opts.trials = 1;
    CHECK_THROWS_AS(usc_adversary_probe(f, zeros(s), zeros(s), {}, {0}, opts), input_error);
    CHECK_THROWS_AS(usc_adversary_probe(f, zeros(s), zeros(s), {1}, {5}, opts), input_error);
}

TEST_CASE("wellposed sharpener survives probes smaller than a quarter margin") {
    std::mt19937_64 rng(808080);
    for (int trial = 0; trial < 10; ++trial) {
        const SpacePtr x = discrete_space(rng, 3 + trial % 3);
        const SpacePtr y = discrete_space(rng, 2 + trial % 4);
        const std::size_t x0 = rng() % x->size();
        const std::size_t y0 = rng() % y->size();
        const BiFunction f = random_payoff_with_saddle(rng, x, y, x0, y0);
        const WellposedPerturbation wp =
            wellposed_perturbation(f, x0, y0, 0.5, 0.5, 0.5, 53, 0.0);
        const BiFunction& g = wp.sharpener.combined;
        const double margin = saddle_value_margin(g, x0, y0);
        REQUIRE(margin > 0.0);

        ProbeOptions opts;
        opts.rho = margin / 8.0; // strictly below margin/4
        opts.trials = 8;
        opts.seed = 1000 + trial;
        opts.tol = 0.0;
        const SolutionMapProbe probe = usc_adversary_probe(
            g, ScalarField::constant(x, ExtReal(0.0)), ScalarField::constant(y, ExtReal(0.0)),
            {x0}, {y0}, opts);
        CHECK_FALSE(probe.escaped);
    }
}
