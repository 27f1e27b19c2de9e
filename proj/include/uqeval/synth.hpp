#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uqeval/core.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {

/// Confidence distribution on [0,1] for the calibrated sampler.
struct ConfidenceShape {
    enum class Kind { uniform, beta };

    Kind kind = Kind::uniform;
    double a = 1.0;
    double b = 1.0;

    static ConfidenceShape uniform() { return {Kind::uniform, 1.0, 1.0}; }

    static ConfidenceShape beta(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0))
            raise(errc::bad_shape, "beta shape parameters must be positive");
        return {Kind::beta, a, b};
    }
};

namespace detail {

inline double draw_confidence(Rng& rng, const ConfidenceShape& shape) {
    switch (shape.kind) {
        case ConfidenceShape::Kind::uniform: return rng.next_unit();
        case ConfidenceShape::Kind::beta: return rng.next_beta(shape.a, shape.b);
    }
    raise(errc::bad_shape, "unknown confidence shape");
}

} // namespace detail

/// Perfectly calibrated sampler: r is drawn from the shape and
/// correctness from Bernoulli(r), so the expected accuracy at every
/// confidence value equals that value.
inline EvaluationSet gen_calibrated(std::size_t n, const ConfidenceShape& shape,
                                    std::uint64_t seed,
                                    std::string name = "calibrated") {
    if (shape.kind == ConfidenceShape::Kind::beta && (!(shape.a > 0.0) || !(shape.b > 0.0)))
        raise(errc::bad_shape, "gen_calibrated: beta shape parameters must be positive");
    Rng rng(seed);
    std::vector<PredictionRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PredictionRecord rec;
        rec.confidence = detail::draw_confidence(rng, shape);
        rec.correctness = rng.next_bernoulli(rec.confidence) ? 1 : 0;
        records.push_back(std::move(rec));
    }
    return validate(std::move(records), std::move(name));
}

/// Accuracy profile of the miscalibrated stratum in the
/// undetectable-error construction: 50% at the bottom of [0.9,0.96],
/// rising to 73% at the top.
inline double undetectable_stratum_accuracy(double confidence) {
    if (confidence <= 0.91) return 0.5;
    return 0.5 + 0.23 * (confidence - 0.91) / 0.05;
}

/// Set whose wide top confidence interval looks calibrated on average
/// while the thin stratum at [0.9,0.96] is badly miscalibrated:
/// ~97% of the mass sits calibrated in [0.98,1.0], 2.5% follows the
/// stratum profile above, and the rest is spread calibrated over
/// [0,0.9). Equal-range binning averages the defect away; adaptive
/// binning isolates it.
inline EvaluationSet gen_undetectable_error(std::size_t n, std::uint64_t seed,
                                            std::string name = "undetectable-error") {
    if (n < 10'000)
        raise(errc::n_too_small,
              "gen_undetectable_error: need at least 10000 samples so the "
              "sparse stratum is populated");
    Rng rng(seed);
    std::vector<PredictionRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        PredictionRecord rec;
        if (u < 0.97) {
            rec.confidence = 0.98 + 0.02 * rng.next_unit();
            rec.correctness = rng.next_bernoulli(rec.confidence) ? 1 : 0;
        } else if (u < 0.995) {
            rec.confidence = 0.90 + 0.06 * rng.next_unit();
            const double acc = undetectable_stratum_accuracy(rec.confidence);
            rec.correctness = rng.next_bernoulli(acc) ? 1 : 0;
        } else {
            rec.confidence = 0.90 * rng.next_unit();
            rec.correctness = rng.next_bernoulli(rec.confidence) ? 1 : 0;
        }
        records.push_back(std::move(rec));
    }
    return validate(std::move(records), std::move(name));
}

/// One stratum of a discrete-confidence set: `count` records at exactly
/// `confidence`, of which floor(count * accuracy + 0.5) are correct.
struct DiscreteLevel {
    double confidence = 0.5;
    double accuracy = 0.5;
    std::size_t count = 1;
};

/// Set whose confidences take finitely many exact values with exact
/// per-value empirical accuracies (deterministic rounding). The seed
/// only shuffles the order of correct/wrong flags inside each level.
inline EvaluationSet gen_discrete(const std::vector<DiscreteLevel>& levels,
                                  std::uint64_t seed,
                                  std::string name = "discrete") {
    if (levels.empty()) raise(errc::bad_level, "gen_discrete: no levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& lvl = levels[i];
        const std::string at = "level " + std::to_string(i) + ": ";
        if (!(lvl.confidence >= 0.0 && lvl.confidence <= 1.0))
            raise(errc::bad_level, at + "confidence outside [0,1]");
        if (!(lvl.accuracy >= 0.0 && lvl.accuracy <= 1.0))
            raise(errc::bad_level, at + "accuracy outside [0,1]");
        if (lvl.count < 1) raise(errc::bad_level, at + "count must be at least 1");
        for (std::size_t j = 0; j < i; ++j)
            if (levels[j].confidence == lvl.confidence)
                raise(errc::bad_level, at + "duplicate confidence value");
    }

    Rng rng(seed);
    std::vector<PredictionRecord> records;
    for (const auto& lvl : levels) {
        const auto correct = static_cast<std::size_t>(
            std::floor(static_cast<double>(lvl.count) * lvl.accuracy + 0.5));
        std::vector<int> flags(lvl.count, 0);
        for (std::size_t i = 0; i < correct; ++i) flags[i] = 1;
        for (std::size_t i = flags.size(); i > 1; --i)
            std::swap(flags[i - 1], flags[rng.next_below(i)]);
        for (int flag : flags) {
            PredictionRecord rec;
            rec.confidence = lvl.confidence;
            rec.correctness = flag;
            records.push_back(std::move(rec));
        }
    }
    return validate(std::move(records), std::move(name));
}

/// Class-score spread of the logits generator; larger values give a
/// sharper, more accurate synthetic classifier.
inline constexpr double logits_spread = 2.5;

/// Calibrated K-class scores scaled by a known temperature. Raw scores z
/// are iid normal, the label is drawn from softmax(z), and the emitted
/// logits are z * true_temperature, so minimizing the NLL of
/// softmax(logits / T) recovers T = true_temperature.
inline EvaluationSet gen_logits(std::size_t n, int k, double true_temperature,
                                std::uint64_t seed, std::string name = "logits") {
    if (k < 2) raise(errc::bad_params, "gen_logits: need at least 2 classes");
    if (!(true_temperature > 0.0))
        raise(errc::bad_params, "gen_logits: temperature must be positive");

    Rng rng(seed);
    std::vector<PredictionRecord> records;
    records.reserve(n);
    std::vector<double> z(static_cast<std::size_t>(k));
    std::vector<double> posterior(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : z) v = logits_spread * rng.next_normal();
        const double m = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            posterior[j] = std::exp(z[j] - m);
            sum += posterior[j];
        }
        for (auto& p : posterior) p /= sum;

        const double u = rng.next_unit();
        int label = k - 1;
        double cumulative = 0.0;
        for (std::size_t j = 0; j < posterior.size(); ++j) {
            cumulative += posterior[j];
            if (u < cumulative) {
                label = static_cast<int>(j);
                break;
            }
        }

        PredictionRecord rec;
        rec.logits.resize(z.size());
        for (std::size_t j = 0; j < z.size(); ++j)
            rec.logits[j] = z[j] * true_temperature;
        rec.label = label;
        rec.correctness = argmax(z) == static_cast<std::size_t>(label) ? 1 : 0;
        double denom = 0.0;
        const double lm = *std::max_element(rec.logits.begin(), rec.logits.end());
        for (double v : rec.logits) denom += std::exp(v - lm);
        rec.confidence = 1.0 / denom;
        records.push_back(std::move(rec));
    }
    return validate(std::move(records), std::move(name));
}

/// Parametric stand-in for a scored classifier: exactly
/// floor(n * accuracy + 0.5) correct predictions, confidences drawn from
/// two logistic-normal distributions whose means are separability apart,
/// so separability 0 is an uninformative ranking and large values
/// approach perfect separation.
inline EvaluationSet gen_scored_model(std::size_t n, double accuracy,
                                      double separability, std::uint64_t seed,
                                      std::string name = "scored-model") {
    if (!(accuracy > 0.0 && accuracy < 1.0))
        raise(errc::bad_params, "gen_scored_model: accuracy must lie in (0,1)");
    if (!(separability >= 0.0))
        raise(errc::bad_params, "gen_scored_model: separability must be nonnegative");

    Rng rng(seed);
    const auto correct = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * accuracy + 0.5));
    std::vector<int> flags(n, 0);
    for (std::size_t i = 0; i < correct && i < n; ++i) flags[i] = 1;
    for (std::size_t i = flags.size(); i > 1; --i)
        std::swap(flags[i - 1], flags[rng.next_below(i)]);

    std::vector<PredictionRecord> records;
    records.reserve(n);
    for (int flag : flags) {
        const double shift = (flag == 1 ? 0.5 : -0.5) * separability;
        const double score = shift + rng.next_normal();
        PredictionRecord rec;
        rec.confidence = 1.0 / (1.0 + std::exp(-score));
        rec.correctness = flag;
        records.push_back(std::move(rec));
    }
    return validate(std::move(records), std::move(name));
}

} // namespace uqeval
