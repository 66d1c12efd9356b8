#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "saddle/perturb.hpp"
#include "saddle/wellposed.hpp"
#include "support/instances.hpp"

using namespace saddle;
using namespace testsupport;

namespace {

SpacePtr pair_space() {
    return validate_metric({{0.0, 1.0}, {1.0, 0.0}});
}

SpacePtr uniform_space(std::size_t n) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
    return validate_metric(std::move(d));
}

BiFunction table(const SpacePtr& x, const SpacePtr& y,
                 std::vector<std::vector<ExtReal>> rows) {
    return BiFunction::from_rows(x, y, std::move(rows));
}

ScalarField field(const SpacePtr& s, std::vector<double> vals) {
    std::vector<ExtReal> v;
    v.reserve(vals.size());
    for (double d : vals) v.emplace_back(d);
    return ScalarField(s, std::move(v));
}

} // namespace

TEST_CASE("min-attainment perturbation hits its budget with equality") {
    const SpacePtr s = uniform_space(3);
    const ScalarField f1 = field(s, {2.0, 1.0, 0.0});
    const Perturbation h = kr_min_perturbation(f1, 0, Axis::X, 0.0);
    CHECK(h.kind == "min-attainment");
    CHECK(h.field.values() == std::vector<ExtReal>{ExtReal(0.0), ExtReal(1.0), ExtReal(2.0)});
    CHECK(h.norm == 2.0);
    CHECK(h.budget.relation == Budget::Relation::Equal);
    CHECK(h.budget.bound == 2.0);
    // Perturbed function is constant at f1(x0): the anchor attains the min.
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(ext_shift(f1[i], h.field[i].value()) == ExtReal(2.0));
    }

    const ScalarField top(s, {ExtReal::pos_inf(), ExtReal(0.0), ExtReal(0.0)});
    CHECK_THROWS_AS(kr_min_perturbation(top, 0, Axis::X, 0.0), precondition_error);
    const ScalarField bottomless(s, {ExtReal(0.0), ExtReal::neg_inf(), ExtReal(0.0)});
    CHECK_THROWS_AS(kr_min_perturbation(bottomless, 0, Axis::X, 0.0), precondition_error);
}

TEST_CASE("strong-min perturbation makes the anchor the unique minimizer") {
    const SpacePtr s = uniform_space(3);
    const ScalarField f1 = field(s, {2.0, 1.0, 0.0});
    const Perturbation h = kr_strong_min_perturbation(f1, 0, 2.0, Axis::X, 0.0);
    CHECK(h.kind == "strong-min-attainment");
    // kr part (0,1,2) plus the bump (eps/2) d/(1+d) = 0.5 off-anchor.
    CHECK(h.field.values() == std::vector<ExtReal>{ExtReal(0.0), ExtReal(1.5), ExtReal(2.5)});
    CHECK(h.budget.relation == Budget::Relation::LessThan);
    CHECK(h.budget.bound == 4.0);
    CHECK(h.norm == 2.5);
    for (std::size_t i = 1; i < 3; ++i) {
        CHECK(ext_shift(f1[i], h.field[i].value()) > ExtReal(2.0));
    }
    CHECK_THROWS_AS(kr_strong_min_perturbation(f1, 0, 0.0, Axis::X, 0.0), input_error);
}

TEST_CASE("supinf pair reproduces the worked 2x2 example") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    const PerturbationPair pair = supinf_perturbation(f, 1, 1, 1.0, 2.0, 0.0);
    CHECK(pair.on_x.kind == "supinf-attainment");
    CHECK(pair.on_x.field.values() == std::vector<ExtReal>{ExtReal(0.0), ExtReal(0.0)});
    CHECK(pair.on_y.field.values() == std::vector<ExtReal>{ExtReal(1.0), ExtReal(0.0)});
    CHECK(pair.on_x.norm < 1.0);
    CHECK(pair.on_y.norm < 2.0);

    // The perturbed lower envelope attains its supremum at x0 with value
    // f(x0,y0), so the near-maximizer became exact.
    const MinimaxSummary after = summarize(pair.combined);
    CHECK(after.sup_inf == ExtReal(4.0));
    CHECK(after.v[1] == ExtReal(4.0));
    CHECK(std::find(after.sup_argset.begin(), after.sup_argset.end(), 1) !=
          after.sup_argset.end());

    // Near-maximizer precondition: v(x0) > V - eps fails for x0 = 0.
    CHECK_THROWS_AS(supinf_perturbation(f, 0, 0, 1.0, 2.0, 0.0), precondition_error);
    // Near-infimal precondition: f(x0,y0) < v(x0) + delta fails for tiny delta.
    CHECK_THROWS_AS(supinf_perturbation(f, 1, 1, 1.0, 0.5, 0.0), precondition_error);
}

TEST_CASE("infsup pair mirrors the construction on the other side") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    const PerturbationPair pair = infsup_perturbation(f, 0, 1, 2.0, 3.0, 0.0);
    CHECK(pair.on_x.kind == "infsup-attainment");
    CHECK(pair.on_x.field.values() == std::vector<ExtReal>{ExtReal(0.0), ExtReal(2.0)});
    CHECK(pair.on_y.field.values() == std::vector<ExtReal>{ExtReal(1.0), ExtReal(0.0)});

    const MinimaxSummary after = summarize(pair.combined);
    CHECK(after.inf_sup == ExtReal(2.0));
    CHECK(after.w[1] == ExtReal(2.0));

    CHECK_THROWS_AS(infsup_perturbation(f, 0, 1, 0.5, 3.0, 0.0), precondition_error);
    CHECK_THROWS_AS(infsup_perturbation(f, 0, 1, 2.0, 1.0, 0.0), precondition_error);
}

TEST_CASE("saddle creation closes the unit gap of the cyclic table") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(0.0), ExtReal(1.0)},
                                      {ExtReal(1.0), ExtReal(0.0)}});
    const PerturbationPair pair = saddle_perturbation(f, 1, 1, 0.5, 0.5, 0.0);
    CHECK(pair.on_x.kind == "saddle-creation");
    CHECK(pair.on_x.field.values() == std::vector<ExtReal>{ExtReal(1.0), ExtReal(0.0)});
    CHECK(pair.on_y.field.values() == std::vector<ExtReal>{ExtReal(0.0), ExtReal(0.0)});
    CHECK(pair.on_x.norm == 1.0);
    CHECK(pair.on_x.budget.bound == 2.5); // 2 eps1 + eps2 + gap
    CHECK(pair.on_y.budget.bound == 2.5); // eps1 + 2 eps2 + gap
    CHECK(pair.on_x.norm < pair.on_x.budget.bound);

    CHECK(pair.combined(0, 0) == ExtReal(-1.0));
    CHECK(pair.combined(0, 1) == ExtReal(0.0));
    CHECK(pair.combined(1, 0) == ExtReal(1.0));
    CHECK(pair.combined(1, 1) == ExtReal(0.0));
    // The anchor keeps its original payoff value exactly.
    CHECK(pair.combined(1, 1) == f(1, 1));

    const SaddleCertificate cert = is_saddle(pair.combined, 1, 1, 0.0);
    CHECK(cert.valid);
    CHECK(cert.value == 0.0);
}

TEST_CASE("saddle creation needs a finite payoff value at the anchor") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(0.0), ExtReal::pos_inf()},
                                      {ExtReal(1.0), ExtReal(0.0)}});
    CHECK_THROWS_AS(saddle_perturbation(f, 0, 1, 0.5, 0.5, 0.0), precondition_error);
    CHECK_THROWS_AS(saddle_perturbation(f, 0, 0, 0.0, 0.5, 0.0), input_error);
}

TEST_CASE("eps-saddle relocation stays strictly inside the eps budget") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});

    SECTION("relocating to the saddle itself costs nothing") {
        const PerturbationPair pair = eps_saddle_perturbation(f, 1, 0, 1.0, 0.0);
        CHECK(pair.on_x.norm == 0.0);
        CHECK(pair.on_y.norm == 0.0);
        CHECK(pair.on_x.kind == "eps-saddle-relocation");
    }
    SECTION("relocating to a proper eps-saddle pair") {
        const PerturbationPair pair = eps_saddle_perturbation(f, 1, 1, 3.5, 0.0);
        CHECK(pair.on_x.norm < 3.5);
        CHECK(pair.on_y.norm < 3.5);
        CHECK(pair.on_x.budget.bound == 3.5);
        const SaddleCertificate cert = is_saddle(pair.combined, 1, 1, 0.0);
        CHECK(cert.valid);
    }
    SECTION("non-members are rejected up front") {
        CHECK_THROWS_AS(eps_saddle_perturbation(f, 0, 0, 1.0, 0.0), precondition_error);
    }
    SECTION("a nonzero duality gap is rejected up front") {
        const BiFunction g = table(s, s, {{ExtReal(0.0), ExtReal(1.0)},
                                          {ExtReal(1.0), ExtReal(0.0)}});
        CHECK_THROWS_AS(eps_saddle_perturbation(g, 0, 0, 1.0, 0.0), precondition_error);
    }
}

TEST_CASE("series weight matches hand-computed partial sums") {
    CHECK(detail::series_weight(0.0) == 0.0);
    CHECK(detail::series_weight(-1.0) == 0.0);
    CHECK(detail::series_weight(1.0) == 1.0);
    CHECK(detail::series_weight(7.5) == 1.0);
    CHECK(detail::series_weight(0.5) == 0.75);
    // d = 1/3: terms (1/2)(1/3) + (1/4)(2/3) + sum_{m>=3} 2^-m = 7/12.
    CHECK(detail::series_weight(1.0 / 3.0) == Catch::Approx(7.0 / 12.0).epsilon(1e-15));
    // Tiny d behaves like 2d.
    CHECK(detail::series_weight(1e-9) == Catch::Approx(2e-9).epsilon(1e-6));
    // Monotone in d.
    double prev = 0.0;
    for (double d = 0.05; d <= 1.25; d += 0.05) {
        const double w = detail::series_weight(d);
        CHECK(w >= prev);
        CHECK(w <= 1.0);
        prev = w;
    }
}

TEST_CASE("well-posedness sharpener leaves a unique saddle") {
    const SpacePtr s = pair_space();
    const BiFunction f = table(s, s, {{ExtReal(1.0), ExtReal(2.0)},
                                      {ExtReal(3.0), ExtReal(4.0)}});
    const WellposedPerturbation wp = wellposed_perturbation(f, 1, 0, 0.5, 0.5, 0.25, 53, 0.0);
    CHECK(wp.base.on_x.norm == 0.0); // already a saddle; base pair is free
    CHECK(wp.sharpener.on_x.kind == "wellposed-sharpener");
    // Distance 1 from the anchor: weight 1, amplitude delta.
    CHECK(wp.sharpener.on_x.field.values() ==
          std::vector<ExtReal>{ExtReal(0.25), ExtReal(0.0)});
    CHECK(wp.sharpener.on_y.field.values() ==
          std::vector<ExtReal>{ExtReal(0.0), ExtReal(0.25)});
    CHECK(wp.sharpener.on_x.budget.relation == Budget::Relation::AtMost);
    CHECK(wp.sharpener.on_x.budget.bound == 0.25);
    CHECK(wp.unique_saddle.x0 == 1);
    CHECK(wp.unique_saddle.y0 == 0);
    CHECK(wp.unique_saddle.value == 3.0);
    CHECK(wp.n_terms == 53);
    CHECK(wp.truncation_bound == 0.25 * std::ldexp(1.0, -53));

    const auto all = enumerate_saddles(wp.sharpener.combined, 0.0);
    REQUIRE(all.size() == 1);
    CHECK(all[0].x0 == 1);
    CHECK(all[0].y0 == 0);

    CHECK_THROWS_AS(wellposed_perturbation(f, 1, 0, 0.5, 0.5, 0.25, 0, 0.0), input_error);
    CHECK_THROWS_AS(wellposed_perturbation(f, 1, 0, 0.5, 0.5, 0.25, 2000, 0.0), input_error);
}

TEST_CASE("regularity witness is the characteristic function of the target") {
    const SpacePtr s = uniform_space(4);
    const Perturbation h = characteristic_regularity_witness(s, {1, 3}, 0);
    CHECK(h.kind == "regularity-witness");
    CHECK(h.field.values() == std::vector<ExtReal>{ExtReal(0.0), ExtReal(1.0),
                                                   ExtReal(0.0), ExtReal(1.0)});
    CHECK(h.norm == 1.0);
    CHECK(h.budget.relation == Budget::Relation::Equal);
    CHECK(h.budget.bound == 1.0);
    CHECK(h.anchor == 0);

    CHECK_THROWS_AS(characteristic_regularity_witness(s, {0, 1}, 0), precondition_error);
    CHECK_THROWS_AS(characteristic_regularity_witness(s, {}, 0), input_error);
}

TEST_CASE("local base sets are nested and collapse to the anchor") {
    const SpacePtr s = uniform_space(3);
    const LocalBaseFamily fam = local_base_sets(s, 0, 1.0, 6);
    CHECK(fam.eps == 1.0);
    // Gauge: 0 at the anchor, (eps/2) d/(1+d) = 0.25 at distance 1.
    CHECK(fam.gauge[0] == ExtReal(0.0));
    CHECK(fam.gauge[1] == ExtReal(0.25));
    REQUIRE(fam.sets.size() == 6);
    const std::vector<std::size_t> everyone{0, 1, 2};
    const std::vector<std::size_t> just_anchor{0};
    CHECK(fam.sets[0] == everyone);      // 0.25 < 1
    CHECK(fam.sets[1] == everyone);      // 0.25 < 1/2
    CHECK(fam.sets[2] == everyone);      // 0.25 < 1/3
    CHECK(fam.sets[3] == just_anchor);   // 0.25 < 1/4 fails
    CHECK(fam.sets[4] == just_anchor);
    CHECK(fam.sets[5] == just_anchor);
}

TEST_CASE("dense separable adjustment finds attained optima at zero cost") {
    const SpacePtr x = uniform_space(3);
    const SpacePtr y = pair_space();
    const ScalarField f1 = field(x, {0.0, -1.0, 2.0});
    const ScalarField f2 = field(y, {5.0, 4.0});
    const ScalarField khat = field(x, {0.5, 0.0, 0.25});
    const ScalarField rhat = field(y, {0.0, 0.125});

    const DenseSeparableResult res =
        dense_separable_perturbation(f1, f2, khat, rhat, 0.5, 0.0);
    CHECK(res.x_star == 2);
    CHECK(res.y_star == 1);
    CHECK(res.deviation_x == 0.0);
    CHECK(res.deviation_y == 0.0);
    CHECK(res.k.values() == khat.values());
    CHECK(res.r.values() == rhat.values());
    REQUIRE(res.saddle_points.size() == 1);
    CHECK(res.saddle_points[0] == std::pair<std::size_t, std::size_t>{2, 1});
    CHECK(res.combined(2, 1) == ExtReal(2.25 + 4.125));
    CHECK(res.correction_x.kind == "dense-separable-correction");

    const ScalarField bad(x, {ExtReal::pos_inf(), ExtReal(0.0), ExtReal(0.0)});
    CHECK_THROWS_AS(dense_separable_perturbation(bad, f2, khat, rhat, 0.5, 0.0),
                    precondition_error);
}

TEST_CASE("verification machinery rejects a doctored budget") {
    const SpacePtr s = pair_space();
    const ScalarField ok = field(s, {0.0, 2.0});
    CHECK_THROWS_AS(make_perturbation(Axis::X, ok, 0,
                                      Budget{Budget::Relation::LessThan, 1.0, "doctored"},
                                      "unit-test"),
                    verification_error);
    const ScalarField negative = field(s, {0.0, -1.0});
    CHECK_THROWS_AS(make_perturbation(Axis::X, negative, 0,
                                      Budget{Budget::Relation::AtMost, 1.0, "unit"},
                                      "unit-test"),
                    verification_error);
    const ScalarField off_anchor = field(s, {0.5, 1.0});
    CHECK_THROWS_AS(make_perturbation(Axis::X, off_anchor, 0,
                                      Budget{Budget::Relation::AtMost, 1.0, "unit"},
                                      "unit-test"),
                    verification_error);
}

TEST_CASE("synthesized saddles verify at zero tolerance on random lattices") {
    std::mt19937_64 rng(606060);
    int accepted = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const SpacePtr x = random_space(rng, 2 + trial % 5);
        const SpacePtr y = random_space(rng, 2 + (trial / 2) % 4);
        const BiFunction f = random_payoff(rng, x, y, trial % 4 == 0 ? 0.1 : 0.0);
        const MinimaxSummary m = summarize(f);
        if (!m.gap_defined() || !m.gap->is_finite()) continue;

        // Alternate between exactly optimal anchors under tight budgets and
        // arbitrary anchors under budgets wide enough to admit any row/column.
        std::size_t x0, y0;
        double e1, e2;
        if (trial % 2 == 0) {
            x0 = m.sup_argset[rng() % m.sup_argset.size()];
            y0 = m.inf_argset[rng() % m.inf_argset.size()];
            e1 = 0.5;
            e2 = 0.25;
        } else {
            x0 = rng() % x->size();
            y0 = rng() % y->size();
            e1 = 21.0;
            e2 = 20.5;
        }
        if (!f(x0, y0).is_finite()) continue;

        const std::optional<PerturbationPair> pair = [&]() -> std::optional<PerturbationPair> {
            try {
                return saddle_perturbation(f, x0, y0, e1, e2, 0.0);
            } catch (const precondition_error&) {
                return std::nullopt;
            }
        }();
        if (!pair) continue;
        ++accepted;

        const SaddleCertificate cert = is_saddle(pair->combined, x0, y0, 0.0);
        CHECK(cert.valid);
        CHECK(pair->combined(x0, y0) == f(x0, y0));
        CHECK(pair->on_x.norm < pair->on_x.budget.bound);
        CHECK(pair->on_y.norm < pair->on_y.budget.bound);
    }
    // The generator must not silently starve the property of cases.
    CHECK(accepted > 100);
}
