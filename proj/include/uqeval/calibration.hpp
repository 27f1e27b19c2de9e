#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "uqeval/core.hpp"
#include "uqeval/normal.hpp"

namespace uqeval {

/// One confidence interval with the statistics of its member records.
/// gap = mean_confidence - empirical_accuracy; positive means
/// over-confident.
struct Bin {
    int index = 0;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 0;
    double mean_confidence = 0.0;
    double empirical_accuracy = 0.0;
    double gap = 0.0;
};

/// Aggregates the member records of one bin. For equal-range bins the
/// caller overrides lo/hi with the interval bounds; everywhere else the
/// bounds are the member min/max confidences.
inline Bin make_bin(std::span<const PredictionRecord> members, int index = 0) {
    if (members.empty()) raise(errc::empty_set, "make_bin: bin has no members");
    Bin bin;
    bin.index = index;
    bin.count = members.size();
    double sum_conf = 0.0;
    std::size_t correct = 0;
    double lo = members.front().confidence, hi = members.front().confidence;
    for (const auto& rec : members) {
        sum_conf += rec.confidence;
        correct += static_cast<std::size_t>(rec.correctness);
        lo = std::min(lo, rec.confidence);
        hi = std::max(hi, rec.confidence);
    }
    bin.lo = lo;
    bin.hi = hi;
    bin.mean_confidence = sum_conf / static_cast<double>(bin.count);
    bin.empirical_accuracy =
        static_cast<double>(correct) / static_cast<double>(bin.count);
    bin.gap = bin.mean_confidence - bin.empirical_accuracy;
    return bin;
}

struct BinningScheme {
    enum class Kind { equal_range, equal_size, adaptive };

    Kind kind = Kind::equal_range;
    int bin_count = 10;
    double alpha = 0.2;

    static BinningScheme equal_range(int n) {
        if (n < 1) raise(errc::bad_params, "equal_range: n must be at least 1");
        return {Kind::equal_range, n, 0.0};
    }
    static BinningScheme equal_size(int n) {
        if (n < 1) raise(errc::bad_params, "equal_size: n must be at least 1");
        return {Kind::equal_size, n, 0.0};
    }
    static BinningScheme adaptive(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            raise(errc::bad_params, "adaptive: alpha must lie in (0,1)");
        return {Kind::adaptive, 0, alpha};
    }

    std::string to_string() const;
};

namespace detail {

/// Equal-range membership: first bin [0, 1/n], then ((j-1)/n, j/n];
/// r = 1 lands in the last bin.
inline int equal_range_index(double confidence, int n) {
    if (confidence <= 0.0) return 0;
    const int j = static_cast<int>(std::ceil(confidence * n)) - 1;
    return std::clamp(j, 0, n - 1);
}

struct BinAccum {
    std::size_t count = 0;
    double sum_conf = 0.0;
    std::size_t correct = 0;
    double lo = 0.0;
    double hi = 0.0;

    void add(const PredictionRecord& rec) {
        if (count == 0) {
            lo = hi = rec.confidence;
        } else {
            lo = std::min(lo, rec.confidence);
            hi = std::max(hi, rec.confidence);
        }
        count += 1;
        sum_conf += rec.confidence;
        correct += static_cast<std::size_t>(rec.correctness);
    }

    void merge(const BinAccum& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        count += other.count;
        sum_conf += other.sum_conf;
        correct += other.correct;
        lo = std::min(lo, other.lo);
        hi = std::max(hi, other.hi);
    }

    Bin finish(int index) const {
        Bin bin;
        bin.index = index;
        bin.lo = lo;
        bin.hi = hi;
        bin.count = count;
        bin.mean_confidence = sum_conf / static_cast<double>(count);
        bin.empirical_accuracy =
            static_cast<double>(correct) / static_cast<double>(count);
        bin.gap = bin.mean_confidence - bin.empirical_accuracy;
        return bin;
    }
};

inline std::vector<std::size_t> order_by_confidence(const EvaluationSet& set,
                                                    bool descending) {
    const auto& records = set.records();
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return descending ? records[b].confidence < records[a].confidence
                          : records[a].confidence < records[b].confidence;
    });
    return order;
}

} // namespace detail

/// Width floor for the adaptive closing condition; a zero-width bin
/// (point mass) could otherwise never satisfy it.
inline constexpr double adaptive_width_floor = 1e-3;

/// Greedy adaptive partition: scan records by confidence descending and
/// close the open bin once its sample count reaches
/// 0.25 * (z_score(alpha) / eps)^2 where eps is the bin width, floored
/// at adaptive_width_floor. Records sharing a confidence value enter a
/// bin atomically (the condition is checked at tie-group boundaries), so
/// the partition depends only on the multiset of records. Samples left
/// over when the scan ends merge into the last closed bin, or form the
/// only bin if none closed. Bins are returned in ascending confidence
/// order.
inline std::vector<Bin> adaptive_bins(const EvaluationSet& set, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        raise(errc::bad_params, "adaptive_bins: alpha must lie in (0,1)");
    if (set.size() == 0) raise(errc::empty_set, "adaptive_bins: empty set");

    const double z = z_score(alpha);
    const auto& records = set.records();
    const auto order = detail::order_by_confidence(set, /*descending=*/true);

    std::vector<detail::BinAccum> closed;
    detail::BinAccum open;
    for (std::size_t i = 0; i < order.size();) {
        const double value = records[order[i]].confidence;
        while (i < order.size() && records[order[i]].confidence == value) {
            open.add(records[order[i]]);
            ++i;
        }
        const double eps = std::max(open.hi - open.lo, adaptive_width_floor);
        const double needed = 0.25 * (z / eps) * (z / eps);
        if (static_cast<double>(open.count) >= needed) {
            closed.push_back(open);
            open = detail::BinAccum{};
        }
    }
    if (open.count > 0) {
        if (closed.empty()) closed.push_back(open);
        else closed.back().merge(open);
    }

    std::vector<Bin> bins;
    bins.reserve(closed.size());
    for (auto it = closed.rbegin(); it != closed.rend(); ++it)
        bins.push_back(it->finish(static_cast<int>(bins.size())));
    return bins;
}

/// Partitions the set under the given scheme. Every record lands in
/// exactly one bin; empty equal-range intervals are omitted from the
/// output (their index j still identifies the interval).
inline std::vector<Bin> bin_partition(const EvaluationSet& set,
                                      const BinningScheme& scheme) {
    if (set.size() == 0) raise(errc::empty_set, "bin_partition: empty set");
    const auto& records = set.records();

    switch (scheme.kind) {
        case BinningScheme::Kind::equal_range: {
            const int n = scheme.bin_count;
            std::vector<detail::BinAccum> accums(static_cast<std::size_t>(n));
            for (const auto& rec : records)
                accums[static_cast<std::size_t>(
                           detail::equal_range_index(rec.confidence, n))]
                    .add(rec);
            std::vector<Bin> bins;
            for (int j = 0; j < n; ++j) {
                const auto& acc = accums[static_cast<std::size_t>(j)];
                if (acc.count == 0) continue;
                Bin bin = acc.finish(j);
                bin.lo = static_cast<double>(j) / n;
                bin.hi = static_cast<double>(j + 1) / n;
                bins.push_back(bin);
            }
            return bins;
        }
        case BinningScheme::Kind::equal_size: {
            const std::size_t n = static_cast<std::size_t>(scheme.bin_count);
            if (n > set.size())
                raise(errc::too_many_bins,
                      "equal_size: more bins than records");
            const auto order = detail::order_by_confidence(set, /*descending=*/false);
            const std::size_t base = set.size() / n;
            const std::size_t extra = set.size() % n;
            std::vector<Bin> bins;
            bins.reserve(n);
            std::size_t pos = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t group = base + (j < extra ? 1 : 0);
                detail::BinAccum acc;
                for (std::size_t i = 0; i < group; ++i) acc.add(records[order[pos + i]]);
                pos += group;
                bins.push_back(acc.finish(static_cast<int>(j)));
            }
            return bins;
        }
        case BinningScheme::Kind::adaptive:
            return adaptive_bins(set, scheme.alpha);
    }
    raise(errc::bad_params, "bin_partition: unknown scheme");
}

/// Binned expected calibration error: the count-weighted mean absolute
/// gap, sum_j (|D_j|/total) * |gap_j|. Opposite-sign gaps cancel inside a
/// bin, never across bins.
inline double ece(const std::vector<Bin>& bins, std::size_t total) {
    if (total == 0) raise(errc::empty_set, "ece: total must be positive");
    double sum = 0.0;
    for (const auto& bin : bins)
        sum += static_cast<double>(bin.count) * std::abs(bin.gap);
    return sum / static_cast<double>(total);
}

/// Maximum absolute gap over the sample-bearing bins.
inline double mce(const std::vector<Bin>& bins) {
    if (bins.empty()) raise(errc::empty_set, "mce: no bins");
    double worst = 0.0;
    for (const auto& bin : bins) worst = std::max(worst, std::abs(bin.gap));
    return worst;
}

/// Ground-truth discrete calibration error: partition by exact
/// confidence value and weight each value's |accuracy - confidence| by
/// its mass. Any interval binning of the same set can only report a
/// value at or below this one.
inline double true_ece_discrete(const EvaluationSet& set) {
    const auto& records = set.records();
    const auto order = detail::order_by_confidence(set, /*descending=*/false);
    double sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double value = records[order[i]].confidence;
        std::size_t count = 0, correct = 0;
        while (i < order.size() && records[order[i]].confidence == value) {
            correct += static_cast<std::size_t>(records[order[i]].correctness);
            ++count;
            ++i;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(count);
        sum += static_cast<double>(count) * std::abs(acc - value);
    }
    return sum / static_cast<double>(set.size());
}

struct CalibrationReport {
    BinningScheme scheme{};
    std::vector<Bin> bins{};
    double ece = 0.0;
    double mce = 0.0;
    int n_bins_used = 0;
};

inline CalibrationReport calibration_report(const EvaluationSet& set,
                                            const BinningScheme& scheme) {
    CalibrationReport report;
    report.scheme = scheme;
    report.bins = bin_partition(set, scheme);
    report.ece = ece(report.bins, set.size());
    report.mce = mce(report.bins);
    report.n_bins_used = static_cast<int>(report.bins.size());
    return report;
}

struct ReliabilityRow {
    int bin = 0;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 0;
    double mean_confidence = 0.0;
    double empirical_accuracy = 0.0;
    double gap = 0.0;
    double density = 0.0;
};

/// Per-bin rows backing a reliability diagram, including each bin's
/// share of the sample mass.
inline std::vector<ReliabilityRow> reliability_data(const std::vector<Bin>& bins,
                                                    std::size_t total) {
    if (bins.empty()) raise(errc::empty_set, "reliability_data: no bins");
    if (total == 0) raise(errc::empty_set, "reliability_data: total must be positive");
    std::vector<ReliabilityRow> rows;
    rows.reserve(bins.size());
    for (const auto& bin : bins)
        rows.push_back({bin.index, bin.lo, bin.hi, bin.count, bin.mean_confidence,
                        bin.empirical_accuracy, bin.gap,
                        static_cast<double>(bin.count) / static_cast<double>(total)});
    return rows;
}

struct TemperatureModel {
    double temperature = 1.0;
};

/// Mean NLL of softmax(logits / temperature) against the stored labels.
inline double temperature_nll(const EvaluationSet& set, double temperature) {
    if (!(temperature > 0.0))
        raise(errc::bad_params, "temperature_nll: temperature must be positive");
    if (!set.all_have_logits())
        raise(errc::missing_logits, "temperature_nll: logits required on every record");
    double total = 0.0;
    for (const auto& rec : set.records()) {
        const auto& l = rec.logits;
        const double m = *std::max_element(l.begin(), l.end());
        double sum = 0.0;
        for (double v : l) sum += std::exp((v - m) / temperature);
        total += std::log(sum) -
                 (l[static_cast<std::size_t>(*rec.label)] - m) / temperature;
    }
    return total / static_cast<double>(set.size());
}

/// Fits the temperature minimizing the mean NLL by golden-section search
/// on log T over [1e-2, 1e2]. The NLL is unimodal in T, so the bounded
/// bracket converges to within 1e-4 of the optimum.
inline TemperatureModel fit_temperature(const EvaluationSet& set) {
    if (!set.all_have_logits())
        raise(errc::missing_logits, "fit_temperature: logits required on every record");

    const auto objective = [&](double u) { return temperature_nll(set, std::exp(u)); };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(1e-2), b = std::log(1e2);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > 1e-7) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    return {std::exp(0.5 * (a + b))};
}

/// Replaces every confidence with the max softmax probability of
/// logits / T. The predicted class is invariant under positive scaling,
/// so correctness, labels and losses are untouched.
inline EvaluationSet apply_temperature(const EvaluationSet& set,
                                       const TemperatureModel& model) {
    if (!(model.temperature > 0.0))
        raise(errc::bad_params, "apply_temperature: temperature must be positive");
    if (!set.all_have_logits())
        raise(errc::missing_logits, "apply_temperature: logits required on every record");

    auto records = set.records();
    for (auto& rec : records) {
        const auto& l = rec.logits;
        const double m = *std::max_element(l.begin(), l.end());
        double sum = 0.0;
        for (double v : l) sum += std::exp((v - m) / model.temperature);
        rec.confidence = 1.0 / sum;
    }
    return validate(std::move(records), set.name());
}

inline std::string BinningScheme::to_string() const {
    switch (kind) {
        case Kind::equal_range: return "equal-range:" + std::to_string(bin_count);
        case Kind::equal_size: return "equal-size:" + std::to_string(bin_count);
        case Kind::adaptive: {
            // trim the trailing zeros std::to_string(double) would add
            std::string a = std::to_string(alpha);
            a.erase(a.find_last_not_of('0') + 1);
            if (!a.empty() && a.back() == '.') a.pop_back();
            return "adaptive:" + a;
        }
    }
    return "?";
}

} // namespace uqeval
