#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <uqeval/core.hpp>
#include <uqeval/rng.hpp>

namespace helpers {

inline uqeval::EvaluationSet make_set(
    const std::vector<std::pair<double, int>>& rows, std::string name = "test") {
    std::vector<uqeval::PredictionRecord> records;
    records.reserve(rows.size());
    for (const auto& [confidence, correct] : rows) {
        uqeval::PredictionRecord rec;
        rec.confidence = confidence;
        rec.correctness = correct;
        records.push_back(rec);
    }
    return uqeval::validate(std::move(records), std::move(name));
}

// Random set with grid-valued confidences (plenty of ties) and at least
// one record of each class.
inline uqeval::EvaluationSet random_tied_set(uqeval::Rng& rng, std::size_t n,
                                             std::size_t grid = 40,
                                             double accuracy = 0.7) {
    std::vector<std::pair<double, int>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double conf =
            static_cast<double>(rng.next_below(grid + 1)) / static_cast<double>(grid);
        rows.emplace_back(conf, rng.next_bernoulli(accuracy) ? 1 : 0);
    }
    rows[0].second = 1;
    rows[rows.size() / 2].second = 0;
    return make_set(rows);
}

// Random pair sharing the same size and the same number of correct
// predictions. When `degrade` is set, the second set reuses the first
// set's confidences but swaps some of them between correct and wrong
// records, which often produces genuine curve dominance.
inline std::pair<uqeval::EvaluationSet, uqeval::EvaluationSet> equal_accuracy_pair(
    uqeval::Rng& rng, bool degrade) {
    const std::size_t n = 30 + rng.next_below(120);
    const std::size_t correct = 1 + rng.next_below(n - 1);

    std::vector<std::pair<double, int>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double base = i < correct ? 0.4 : -0.4;
        const double score = base + rng.next_normal();
        const double conf =
            std::floor((1.0 / (1.0 + std::exp(-score))) * 50.0) / 50.0;
        rows.emplace_back(conf, i < correct ? 1 : 0);
    }
    auto first = make_set(rows, "a");

    if (degrade) {
        auto degraded = rows;
        const std::size_t swaps = 1 + rng.next_below(8);
        for (std::size_t s = 0; s < swaps; ++s) {
            const std::size_t i = rng.next_below(correct);           // a correct row
            const std::size_t j = correct + rng.next_below(n - correct); // a wrong row
            if (degraded[i].first > degraded[j].first)
                std::swap(degraded[i].first, degraded[j].first);
        }
        return {std::move(first), make_set(degraded, "b")};
    }

    std::vector<std::pair<double, int>> other;
    other.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double base = i < correct ? 0.4 : -0.4;
        const double score = base + rng.next_normal();
        const double conf =
            std::floor((1.0 / (1.0 + std::exp(-score))) * 50.0) / 50.0;
        other.emplace_back(conf, i < correct ? 1 : 0);
    }
    return {std::move(first), make_set(other, "b")};
}

} // namespace helpers
