#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <uqeval/calibration.hpp>
#include <uqeval/selective.hpp>
#include <uqeval/synth.hpp>

using Catch::Matchers::WithinAbs;

namespace {

bool identical_sets(const uqeval::EvaluationSet& a, const uqeval::EvaluationSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& ra = a.records()[i];
        const auto& rb = b.records()[i];
        if (ra.confidence != rb.confidence || ra.correctness != rb.correctness ||
            ra.loss != rb.loss || ra.logits != rb.logits || ra.label != rb.label)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("generators are pure functions of their seed") {
    CHECK(identical_sets(
        uqeval::gen_calibrated(2'000, uqeval::ConfidenceShape::uniform(), 7),
        uqeval::gen_calibrated(2'000, uqeval::ConfidenceShape::uniform(), 7)));
    CHECK(identical_sets(uqeval::gen_undetectable_error(10'000, 7),
                         uqeval::gen_undetectable_error(10'000, 7)));
    CHECK(identical_sets(uqeval::gen_discrete({{0.3, 0.5, 50}, {0.8, 0.9, 50}}, 7),
                         uqeval::gen_discrete({{0.3, 0.5, 50}, {0.8, 0.9, 50}}, 7)));
    CHECK(identical_sets(uqeval::gen_logits(500, 5, 2.0, 7),
                         uqeval::gen_logits(500, 5, 2.0, 7)));
    CHECK(identical_sets(uqeval::gen_scored_model(500, 0.8, 2.0, 7),
                         uqeval::gen_scored_model(500, 0.8, 2.0, 7)));

    CHECK_FALSE(identical_sets(
        uqeval::gen_calibrated(2'000, uqeval::ConfidenceShape::uniform(), 7),
        uqeval::gen_calibrated(2'000, uqeval::ConfidenceShape::uniform(), 8)));
}

TEST_CASE("gen_calibrated: single record and shape validation") {
    const auto tiny = uqeval::gen_calibrated(1, uqeval::ConfidenceShape::uniform(), 1);
    CHECK(tiny.size() == 1);
    CHECK_THROWS_AS(uqeval::ConfidenceShape::beta(0.0, 1.0), uqeval::error);
    CHECK_THROWS_AS(uqeval::ConfidenceShape::beta(2.0, -1.0), uqeval::error);
}

TEST_CASE("gen_calibrated: uniform confidences are nearly calibrated at scale") {
    const auto set =
        uqeval::gen_calibrated(100'000, uqeval::ConfidenceShape::uniform(), 13);
    const auto report = uqeval::calibration_report(
        set, uqeval::BinningScheme::equal_range(10));
    CHECK(report.ece <= 0.01);
}

TEST_CASE("gen_calibrated: beta confidences stay in range") {
    const auto set =
        uqeval::gen_calibrated(5'000, uqeval::ConfidenceShape::beta(50.0, 1.5), 14);
    double low = 1.0;
    for (const auto& rec : set.records()) {
        CHECK(rec.confidence >= 0.0);
        CHECK(rec.confidence <= 1.0);
        low = std::min(low, rec.confidence);
    }
    CHECK(low > 0.5); // concentrated near 1
}

TEST_CASE("gen_undetectable_error: rejects small sets") {
    try {
        uqeval::gen_undetectable_error(5'000, 1);
        FAIL("expected an exception");
    } catch (const uqeval::error& e) {
        CHECK(e.code() == uqeval::errc::n_too_small);
    }
}

TEST_CASE("gen_undetectable_error: the stratum really is miscalibrated") {
    const auto set = uqeval::gen_undetectable_error(100'000, 5);

    std::size_t stratum_count = 0, stratum_correct = 0;
    for (const auto& rec : set.records()) {
        if (rec.confidence >= 0.90 && rec.confidence <= 0.91) {
            ++stratum_count;
            stratum_correct += static_cast<std::size_t>(rec.correctness);
        }
    }
    REQUIRE(stratum_count >= 100);
    const double stratum_accuracy =
        static_cast<double>(stratum_correct) / static_cast<double>(stratum_count);
    CHECK_THAT(stratum_accuracy, WithinAbs(0.5, 0.05));

    const auto bins =
        uqeval::bin_partition(set, uqeval::BinningScheme::equal_range(10));
    CHECK(std::abs(bins.back().gap) <= 0.03);
}

TEST_CASE("gen_discrete: exact per-level accuracy with deterministic rounding") {
    const auto set = uqeval::gen_discrete({{0.7, 0.7, 10}}, 3);
    CHECK(uqeval::true_ece_discrete(set) == 0.0);
    CHECK(set.accuracy() == 0.7);

    const auto rounded = uqeval::gen_discrete({{0.5, 1.0 / 3.0, 3}}, 3);
    CHECK(rounded.accuracy() == 1.0 / 3.0); // floor(3 * 1/3 + 0.5) = 1 correct

    const auto two = uqeval::gen_discrete({{0.4, 0.6, 100}, {0.8, 0.8, 100}}, 3);
    CHECK_THAT(uqeval::true_ece_discrete(two), WithinAbs(0.1, 1e-12));
}

TEST_CASE("gen_discrete: level validation") {
    CHECK_THROWS_AS(uqeval::gen_discrete({}, 1), uqeval::error);
    CHECK_THROWS_AS(uqeval::gen_discrete({{0.5, 0.5, 0}}, 1), uqeval::error);
    CHECK_THROWS_AS(uqeval::gen_discrete({{0.5, 1.5, 10}}, 1), uqeval::error);
    CHECK_THROWS_AS(uqeval::gen_discrete({{1.5, 0.5, 10}}, 1), uqeval::error);
    CHECK_THROWS_AS(uqeval::gen_discrete({{0.5, 0.5, 10}, {0.5, 0.7, 10}}, 1),
                    uqeval::error);
}

TEST_CASE("gen_logits: records satisfy the model invariants by construction") {
    const auto set = uqeval::gen_logits(2'000, 7, 1.7, 15);
    for (const auto& rec : set.records()) {
        REQUIRE(rec.has_logits());
        CHECK(rec.logits.size() == 7);
        CHECK((uqeval::argmax(rec.logits) == static_cast<std::size_t>(*rec.label)) ==
              (rec.correctness == 1));
    }
    CHECK_THROWS_AS(uqeval::gen_logits(10, 1, 1.0, 15), uqeval::error);
    CHECK_THROWS_AS(uqeval::gen_logits(10, 5, 0.0, 15), uqeval::error);
}

TEST_CASE("gen_scored_model: accuracy is hit exactly") {
    const auto set = uqeval::gen_scored_model(10'000, 0.953, 2.2, 16);
    CHECK(set.accuracy() == 0.9530);
    CHECK_THROWS_AS(uqeval::gen_scored_model(100, 0.0, 1.0, 16), uqeval::error);
    CHECK_THROWS_AS(uqeval::gen_scored_model(100, 0.5, -1.0, 16), uqeval::error);
}

TEST_CASE("gen_scored_model: separability controls the ranking quality") {
    const auto useless = uqeval::gen_scored_model(10'000, 0.7, 0.0, 17);
    CHECK_THAT(uqeval::auroc(useless), WithinAbs(0.5, 0.02));

    const auto sharp = uqeval::gen_scored_model(10'000, 0.7, 8.0, 18);
    CHECK(uqeval::auroc(sharp) > 0.999);
}
