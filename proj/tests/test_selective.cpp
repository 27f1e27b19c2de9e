#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <uqeval/rng.hpp>
#include <uqeval/selective.hpp>
#include <uqeval/synth.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using helpers::make_set;
using uqeval::DominanceRelation;

namespace {

const std::vector<std::pair<double, int>> six_records = {
    {0.9, 1}, {0.8, 0}, {0.7, 1}, {0.6, 1}, {0.5, 0}, {0.4, 0}};

} // namespace

TEST_CASE("roc: perfect separation gives AUROC 1") {
    CHECK(uqeval::auroc(make_set({{0.1, 0}, {0.9, 1}})) == 1.0);
}

TEST_CASE("roc: a single tie group gives AUROC 0.5") {
    const auto set = make_set({{0.5, 1}, {0.5, 0}, {0.5, 1}, {0.5, 0}});
    const auto curve = uqeval::roc_curve(set);
    CHECK_THAT(curve.area, WithinAbs(0.5, 1e-15));
    CHECK(curve.points.size() == 2); // (0,0) and (1,1)
}

TEST_CASE("roc: six-record rank statistic") {
    const auto set = make_set(six_records);
    // 7 of the 9 (wrong, correct) pairs are ranked correctly
    CHECK_THAT(uqeval::auroc(set), WithinAbs(7.0 / 9.0, 1e-12));
    CHECK_THAT(uqeval::auroc(set), WithinAbs(oracles::auroc_pair_count(set), 1e-12));
}

TEST_CASE("roc: endpoints and monotone points") {
    uqeval::Rng rng(21);
    const auto set = helpers::random_tied_set(rng, 150);
    const auto curve = uqeval::roc_curve(set);
    CHECK(curve.points.front().x == 0.0);
    CHECK(curve.points.front().y == 0.0);
    CHECK(curve.points.back().x == 1.0);
    CHECK(curve.points.back().y == 1.0);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].x >= curve.points[i - 1].x);
        CHECK(curve.points[i].y >= curve.points[i - 1].y);
    }
}

TEST_CASE("roc and pr reject degenerate classes") {
    const auto all_correct = make_set({{0.9, 1}, {0.8, 1}});
    const auto all_wrong = make_set({{0.9, 0}, {0.8, 0}});
    for (const auto* set : {&all_correct, &all_wrong}) {
        try {
            uqeval::roc_curve(*set);
            FAIL("expected an exception");
        } catch (const uqeval::error& e) {
            CHECK(e.code() == uqeval::errc::degenerate_classes);
        }
    }
    CHECK_THROWS_AS(uqeval::pr_curve(all_correct), uqeval::error);
    CHECK_NOTHROW(uqeval::pr_curve(all_wrong)); // positives exist
}

TEST_CASE("pr: all-wrong set has precision 1 everywhere") {
    const auto set = make_set({{0.9, 0}, {0.5, 0}, {0.1, 0}});
    const auto curve = uqeval::pr_curve(set);
    for (const auto& point : curve.points) CHECK(point.y == 1.0);
    CHECK(curve.area == 1.0);
}

TEST_CASE("pr: perfect separation gives AUPR 1") {
    CHECK(uqeval::aupr(make_set({{0.1, 0}, {0.2, 0}, {0.8, 1}, {0.9, 1}})) == 1.0);
}

TEST_CASE("pr: six-record step area") {
    const auto set = make_set(six_records);
    CHECK_THAT(uqeval::aupr(set), WithinAbs(13.0 / 15.0, 1e-12));
    CHECK_THAT(uqeval::aupr(set), WithinAbs(oracles::aupr_threshold_enum(set), 1e-12));
}

TEST_CASE("rc: all correct is zero risk everywhere") {
    const auto curve = uqeval::rc_curve(make_set({{0.9, 1}, {0.8, 1}, {0.7, 1}}));
    for (const auto& point : curve.points) CHECK(point.y == 0.0);
    CHECK(curve.area == 0.0);
}

TEST_CASE("rc: all wrong has AURC 1") {
    CHECK(uqeval::aurc(make_set({{0.9, 0}, {0.8, 0}})) == 1.0);
}

TEST_CASE("rc: four-record polyline") {
    const auto set = make_set({{0.9, 1}, {0.8, 1}, {0.7, 0}, {0.6, 1}});
    const auto curve = uqeval::rc_curve(set);
    REQUIRE(curve.points.size() == 4);
    CHECK(curve.points[0].x == 0.25);
    CHECK(curve.points[0].y == 0.0);
    CHECK(curve.points[1].x == 0.5);
    CHECK(curve.points[1].y == 0.0);
    CHECK(curve.points[2].x == 0.75);
    CHECK_THAT(curve.points[2].y, WithinAbs(1.0 / 3.0, 1e-15));
    CHECK(curve.points[3].x == 1.0);
    CHECK(curve.points[3].y == 0.25);
    CHECK_THAT(curve.area, WithinAbs(11.0 / 96.0, 1e-15));
}

TEST_CASE("rc: risk uses the per-item loss when present") {
    std::vector<uqeval::PredictionRecord> records(2);
    records[0].confidence = 0.9;
    records[0].correctness = 1;
    records[0].loss = 0.2; // e.g. 1 - Dice for a good segmentation
    records[1].confidence = 0.4;
    records[1].correctness = 0;
    records[1].loss = 0.8;
    const auto set = uqeval::validate(std::move(records));
    const auto curve = uqeval::rc_curve(set);
    CHECK(curve.points[0].y == 0.2);
    CHECK(curve.points[1].y == 0.5);
    CHECK(curve.points.back().y == set.mean_loss());
}

TEST_CASE("rc: last point equals full-coverage risk, the accuracy complement") {
    uqeval::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto set = helpers::random_tied_set(rng, 10 + rng.next_below(200));
        const auto curve = uqeval::rc_curve(set);
        CHECK(curve.points.back().x == 1.0);
        CHECK_THAT(curve.points.back().y, WithinAbs(1.0 - set.accuracy(), 1e-12));
    }
}

TEST_CASE("area wrappers equal the curve areas") {
    const auto set = make_set(six_records);
    CHECK(uqeval::aurc(set) == uqeval::rc_curve(set).area);
    CHECK(uqeval::auroc(set) == uqeval::roc_curve(set).area);
    CHECK(uqeval::aupr(set) == uqeval::pr_curve(set).area);
    const auto report = uqeval::selective_report(set);
    CHECK(report.aurc == uqeval::aurc(set));
    CHECK(report.full_coverage_risk == uqeval::rc_curve(set).points.back().y);
}

TEST_CASE("random sets match the brute-force oracles") {
    uqeval::Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto set = helpers::random_tied_set(rng, 5 + rng.next_below(196));
        CHECK_THAT(uqeval::auroc(set), WithinAbs(oracles::auroc_pair_count(set), 1e-9));
        CHECK_THAT(uqeval::aupr(set), WithinAbs(oracles::aupr_threshold_enum(set), 1e-9));
        CHECK_THAT(uqeval::aurc(set), WithinAbs(oracles::aurc_threshold_enum(set), 1e-9));
    }
}

TEST_CASE("strictly monotone confidence transforms leave areas unchanged") {
    uqeval::Rng rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        const auto set = helpers::random_tied_set(rng, 20 + rng.next_below(150));
        auto transformed = set.records();
        for (auto& rec : transformed) rec.confidence = (rec.confidence + 1.0) / 3.0;
        const auto mapped = uqeval::validate(std::move(transformed));
        CHECK_THAT(uqeval::auroc(mapped), WithinAbs(uqeval::auroc(set), 1e-12));
        CHECK_THAT(uqeval::aupr(mapped), WithinAbs(uqeval::aupr(set), 1e-12));
        CHECK_THAT(uqeval::aurc(mapped), WithinAbs(uqeval::aurc(set), 1e-12));
    }
}

TEST_CASE("dominates: a curve equals itself") {
    const auto curve = uqeval::roc_curve(make_set(six_records));
    CHECK(uqeval::dominates(curve, curve) == DominanceRelation::equal);
}

TEST_CASE("dominates: zero-risk curve dominates any mixed one") {
    const auto perfect = uqeval::rc_curve(make_set({{0.9, 1}, {0.8, 1}}));
    const auto mixed = uqeval::rc_curve(make_set({{0.9, 1}, {0.8, 0}}));
    CHECK(uqeval::dominates(perfect, mixed) == DominanceRelation::a_dominates);
    CHECK(uqeval::dominates(mixed, perfect) == DominanceRelation::b_dominates);
}

TEST_CASE("dominates: kind mismatch is rejected") {
    const auto set = make_set(six_records);
    CHECK_THROWS_AS(uqeval::dominates(uqeval::roc_curve(set), uqeval::rc_curve(set)),
                    uqeval::error);
}

TEST_CASE("dominance transfers between ROC and RC space for equal accuracy") {
    uqeval::Rng rng(61);
    int dominant_pairs = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto [a, b] = helpers::equal_accuracy_pair(rng, trial % 2 == 0);
        const auto roc = uqeval::dominates(uqeval::roc_curve(a), uqeval::roc_curve(b));
        const auto rc = uqeval::dominates(uqeval::rc_curve(a), uqeval::rc_curve(b));
        CHECK((roc == DominanceRelation::a_dominates) ==
              (rc == DominanceRelation::a_dominates));
        CHECK((roc == DominanceRelation::b_dominates) ==
              (rc == DominanceRelation::b_dominates));
        if (roc == DominanceRelation::a_dominates || roc == DominanceRelation::b_dominates)
            ++dominant_pairs;
    }
    CHECK(dominant_pairs > 10); // the harness must exercise genuine dominance
}

TEST_CASE("dominance is antisymmetric under input swap") {
    uqeval::Rng rng(62);
    const auto mirror = [](DominanceRelation r) {
        if (r == DominanceRelation::a_dominates) return DominanceRelation::b_dominates;
        if (r == DominanceRelation::b_dominates) return DominanceRelation::a_dominates;
        return r;
    };
    for (int trial = 0; trial < 50; ++trial) {
        auto [a, b] = helpers::equal_accuracy_pair(rng, trial % 2 == 0);
        for (const auto& [ca, cb] :
             {std::pair{uqeval::roc_curve(a), uqeval::roc_curve(b)},
              std::pair{uqeval::rc_curve(a), uqeval::rc_curve(b)}}) {
            CHECK(uqeval::dominates(cb, ca) == mirror(uqeval::dominates(ca, cb)));
        }
    }
}

TEST_CASE("perturb_m: m = 0 is the identity") {
    uqeval::Rng rng(71);
    const auto set = helpers::random_tied_set(rng, 64);
    const auto same = uqeval::perturb_m(set, 0);
    CHECK(same.accuracy() == set.accuracy());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(same.records()[i].confidence == set.records()[i].confidence);
        CHECK(same.records()[i].correctness == set.records()[i].correctness);
    }
}

TEST_CASE("perturb_m: flipping every correct prediction zeroes accuracy") {
    const auto set = make_set({{0.9, 1}, {0.8, 1}, {0.2, 0}});
    const auto flipped = uqeval::perturb_m(set, 2);
    CHECK(flipped.accuracy() == 0.0);
    CHECK_THROWS_AS(uqeval::perturb_m(set, 3), uqeval::error);
}

TEST_CASE("perturb_m: flips the least confident correct records, input order on ties") {
    const auto set = make_set({{0.5, 1}, {0.5, 1}, {0.9, 1}, {0.1, 0}});
    const auto flipped = uqeval::perturb_m(set, 1);
    CHECK(flipped.records()[0].correctness == 0); // first of the tied pair
    CHECK(flipped.records()[1].correctness == 1);
    CHECK(flipped.records()[2].correctness == 1);
}

TEST_CASE("perturb_m: reproduces the accuracy ladder on a 10^4 record set") {
    const auto base = uqeval::gen_scored_model(10'000, 0.953, 2.2, 77);
    CHECK(uqeval::perturb_m(base, 20).accuracy() == 0.9510);
    CHECK(uqeval::perturb_m(base, 100).accuracy() == 0.9430);
    CHECK(uqeval::perturb_m(base, 300).accuracy() == 0.9230);
}

TEST_CASE("perturb_m: risk-coverage curves are monotone in m") {
    const auto base = uqeval::gen_scored_model(2'000, 0.9, 2.0, 78);
    const auto rc_small = uqeval::rc_curve(uqeval::perturb_m(base, 10));
    const auto rc_large = uqeval::rc_curve(uqeval::perturb_m(base, 80));
    const auto relation = uqeval::dominates(rc_small, rc_large);
    CHECK((relation == DominanceRelation::a_dominates ||
           relation == DominanceRelation::equal));
    CHECK(rc_small.area <= rc_large.area);
}

TEST_CASE("perturb_m: flipped records drop their logits") {
    std::vector<uqeval::PredictionRecord> records(2);
    records[0].confidence = 0.6;
    records[0].correctness = 1;
    records[0].logits = {0.0, 1.0};
    records[0].label = 1;
    records[1].confidence = 0.9;
    records[1].correctness = 1;
    records[1].logits = {1.0, 0.0};
    records[1].label = 0;
    const auto set = uqeval::validate(std::move(records));
    const auto flipped = uqeval::perturb_m(set, 1);
    CHECK(flipped.records()[0].correctness == 0);
    CHECK_FALSE(flipped.records()[0].has_logits());
    CHECK(flipped.records()[1].has_logits());
}

TEST_CASE("brier: exact confidences give zero, constant half gives a quarter") {
    CHECK(uqeval::brier(make_set({{1.0, 1}, {0.0, 0}})) == 0.0);
    CHECK(uqeval::brier(make_set({{0.5, 1}, {0.5, 0}})) == 0.25);
}

TEST_CASE("binary nll matches the direct formula") {
    const auto set = make_set({{0.8, 1}, {0.6, 0}});
    CHECK_THAT(uqeval::nll(set),
               WithinAbs(-(std::log(0.8) + std::log(0.4)) / 2.0, 1e-12));
}

TEST_CASE("nll: forced multiclass without logits is an error") {
    const auto set = make_set({{0.8, 1}});
    try {
        uqeval::nll(set, uqeval::NllMode::multiclass);
        FAIL("expected an exception");
    } catch (const uqeval::error& e) {
        CHECK(e.code() == uqeval::errc::missing_logits);
    }
}

TEST_CASE("nll: automatic mode uses logits when every record has them") {
    const auto set = uqeval::gen_logits(200, 4, 1.0, 81);
    const double multi = uqeval::nll(set, uqeval::NllMode::multiclass);
    CHECK(uqeval::nll(set) == multi);
    CHECK(multi > 0.0);
}
