#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uqeval {

enum class errc {
    empty_set,
    out_of_range,
    inconsistent_logits,
    degenerate_classes,
    kind_mismatch,
    m_too_large,
    too_many_bins,
    missing_logits,
    bad_shape,
    n_too_small,
    bad_level,
    bad_params,
    parse_error,
    io_error,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw error(code, message);
}

/// One scored prediction: a confidence in [0,1], a 0/1 correctness flag,
/// and optionally a per-item loss in [0,1] (defaults to 1 - correctness)
/// plus raw class scores with the true label.
struct PredictionRecord {
    double confidence = 0.0;
    int correctness = 0;
    std::optional<double> loss{};
    std::vector<double> logits{};
    std::optional<int> label{};

    bool has_logits() const { return !logits.empty(); }

    double effective_loss() const {
        return loss ? *loss : 1.0 - static_cast<double>(correctness);
    }
};

/// Index of the first maximum, the tie rule used everywhere a predicted
/// class is derived from logits.
inline std::size_t argmax(const std::vector<double>& values) {
    return static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
}

namespace detail {

inline void check_record(const PredictionRecord& rec, std::size_t index) {
    const std::string at = "record " + std::to_string(index) + ": ";
    if (!(rec.confidence >= 0.0 && rec.confidence <= 1.0))
        raise(errc::out_of_range, at + "confidence outside [0,1]");
    if (rec.correctness != 0 && rec.correctness != 1)
        raise(errc::out_of_range, at + "correctness must be 0 or 1");
    if (rec.loss && !(*rec.loss >= 0.0 && *rec.loss <= 1.0))
        raise(errc::out_of_range, at + "loss outside [0,1]");
    if (rec.has_logits()) {
        if (rec.logits.size() < 2)
            raise(errc::inconsistent_logits, at + "logits need at least 2 classes");
        for (double v : rec.logits)
            if (!std::isfinite(v))
                raise(errc::inconsistent_logits, at + "non-finite logit");
        if (!rec.label)
            raise(errc::inconsistent_logits, at + "logits present but label missing");
        if (*rec.label < 0 || static_cast<std::size_t>(*rec.label) >= rec.logits.size())
            raise(errc::inconsistent_logits, at + "label outside [0,K)");
        const bool predicted_correct =
            argmax(rec.logits) == static_cast<std::size_t>(*rec.label);
        if (predicted_correct != (rec.correctness == 1))
            raise(errc::inconsistent_logits,
                  at + "correctness disagrees with argmax(logits) == label");
    } else if (rec.label) {
        raise(errc::inconsistent_logits, at + "label present but logits missing");
    }
}

} // namespace detail

class EvaluationSet;
inline EvaluationSet validate(std::vector<PredictionRecord> records,
                              std::string name = {});

/// Immutable, validated collection of records; the unit every metric
/// consumes. Record order is preserved and acts as the deterministic
/// tie-breaker downstream.
class EvaluationSet {
public:
    const std::string& name() const { return name_; }
    const std::vector<PredictionRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    double accuracy() const {
        std::size_t correct = 0;
        for (const auto& rec : records_) correct += static_cast<std::size_t>(rec.correctness);
        return static_cast<double>(correct) / static_cast<double>(records_.size());
    }

    /// Mean per-item loss over all records (the full-coverage risk).
    double mean_loss() const {
        double total = 0.0;
        for (const auto& rec : records_) total += rec.effective_loss();
        return total / static_cast<double>(records_.size());
    }

    bool all_have_logits() const {
        return std::all_of(records_.begin(), records_.end(),
                           [](const PredictionRecord& r) { return r.has_logits(); });
    }

private:
    friend EvaluationSet validate(std::vector<PredictionRecord>, std::string);

    EvaluationSet(std::vector<PredictionRecord> records, std::string name)
        : records_(std::move(records)), name_(std::move(name)) {}

    std::vector<PredictionRecord> records_;
    std::string name_;
};

/// Checks every record invariant and returns the set with order preserved.
inline EvaluationSet validate(std::vector<PredictionRecord> records, std::string name) {
    if (records.empty())
        raise(errc::empty_set, "evaluation set must contain at least one record");
    for (std::size_t i = 0; i < records.size(); ++i)
        detail::check_record(records[i], i);
    return EvaluationSet(std::move(records), std::move(name));
}

enum class CurveKind { roc, pr, rc };

inline const char* curve_kind_name(CurveKind kind) {
    switch (kind) {
        case CurveKind::roc: return "roc";
        case CurveKind::pr: return "pr";
        case CurveKind::rc: return "rc";
    }
    return "?";
}

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

/// A named polyline with its area. Axis semantics depend on the kind:
/// ROC is (FPR, TPR), PR is (recall, precision), RC is (coverage, risk).
/// Points are emitted with nondecreasing x.
struct Curve {
    CurveKind kind = CurveKind::roc;
    std::vector<CurvePoint> points{};
    double area = 0.0;
};

} // namespace uqeval
