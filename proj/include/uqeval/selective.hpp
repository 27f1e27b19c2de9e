#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "uqeval/core.hpp"

namespace uqeval {

namespace detail {

/// Records sharing one confidence value, in threshold-sweep order.
/// Tied samples always enter or leave the covered set atomically.
struct TieGroup {
    double confidence = 0.0;
    std::size_t count = 0;
    std::size_t wrong = 0;
    double loss_sum = 0.0;
};

inline std::vector<TieGroup> tie_groups_ascending(const EvaluationSet& set) {
    const auto& records = set.records();
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].confidence < records[b].confidence;
    });

    std::vector<TieGroup> groups;
    for (std::size_t idx : order) {
        const auto& rec = records[idx];
        if (groups.empty() || groups.back().confidence != rec.confidence)
            groups.push_back({rec.confidence, 0, 0, 0.0});
        auto& g = groups.back();
        g.count += 1;
        g.wrong += static_cast<std::size_t>(rec.correctness == 0);
        g.loss_sum += rec.effective_loss();
    }
    return groups;
}

} // namespace detail

/// ROC curve for detecting misclassifications: wrong predictions are the
/// positive class and the detection score is low confidence, so the
/// threshold sweeps confidence ascending. One point per distinct
/// confidence value plus the (0,0) endpoint; area by trapezoid across
/// tie groups, which reproduces the rank statistic with half-credit ties.
inline Curve roc_curve(const EvaluationSet& set) {
    const auto groups = detail::tie_groups_ascending(set);
    std::size_t wrong_total = 0;
    for (const auto& g : groups) wrong_total += g.wrong;
    const std::size_t correct_total = set.size() - wrong_total;
    if (wrong_total == 0 || correct_total == 0)
        raise(errc::degenerate_classes,
              "roc_curve: needs at least one correct and one wrong prediction");

    Curve curve{CurveKind::roc, {}, 0.0};
    curve.points.reserve(groups.size() + 1);
    curve.points.push_back({0.0, 0.0});

    std::size_t cum_wrong = 0, cum_correct = 0;
    double prev_x = 0.0, prev_y = 0.0;
    for (const auto& g : groups) {
        cum_wrong += g.wrong;
        cum_correct += g.count - g.wrong;
        const double x = static_cast<double>(cum_correct) / static_cast<double>(correct_total);
        const double y = static_cast<double>(cum_wrong) / static_cast<double>(wrong_total);
        curve.area += (x - prev_x) * (y + prev_y) * 0.5;
        curve.points.push_back({x, y});
        prev_x = x;
        prev_y = y;
    }
    return curve;
}

/// Precision/recall of misclassification detection over the same
/// ascending-confidence sweep. The area uses step interpolation:
/// precision is held constant back to the previous achieved recall
/// level, so the area equals sum((R_i - R_{i-1}) * P_i).
inline Curve pr_curve(const EvaluationSet& set) {
    const auto groups = detail::tie_groups_ascending(set);
    std::size_t wrong_total = 0;
    for (const auto& g : groups) wrong_total += g.wrong;
    if (wrong_total == 0)
        raise(errc::degenerate_classes, "pr_curve: no misclassified predictions");

    Curve curve{CurveKind::pr, {}, 0.0};
    curve.points.reserve(groups.size());

    std::size_t flagged = 0, flagged_wrong = 0;
    double prev_recall = 0.0;
    for (const auto& g : groups) {
        flagged += g.count;
        flagged_wrong += g.wrong;
        const double recall =
            static_cast<double>(flagged_wrong) / static_cast<double>(wrong_total);
        const double precision =
            static_cast<double>(flagged_wrong) / static_cast<double>(flagged);
        curve.area += (recall - prev_recall) * precision;
        curve.points.push_back({recall, precision});
        prev_recall = recall;
    }
    return curve;
}

/// Risk-coverage curve: records sorted by confidence descending, one
/// point per tie-group boundary at (covered fraction, mean loss of the
/// covered records). The area is the trapezoid over the emitted points
/// with the curve extended left as a constant from its first point down
/// to zero coverage, where the risk is otherwise undefined.
inline Curve rc_curve(const EvaluationSet& set) {
    auto groups = detail::tie_groups_ascending(set);
    std::reverse(groups.begin(), groups.end());
    const std::size_t n = set.size();

    Curve curve{CurveKind::rc, {}, 0.0};
    curve.points.reserve(groups.size());

    std::size_t covered = 0;
    double loss_sum = 0.0;
    double prev_x = 0.0, prev_y = 0.0;
    bool first = true;
    for (const auto& g : groups) {
        covered += g.count;
        loss_sum += g.loss_sum;
        const double x = static_cast<double>(covered) / static_cast<double>(n);
        const double y = loss_sum / static_cast<double>(covered);
        if (first) {
            curve.area += x * y; // constant extension over [0, x)
            first = false;
        } else {
            curve.area += (x - prev_x) * (y + prev_y) * 0.5;
        }
        curve.points.push_back({x, y});
        prev_x = x;
        prev_y = y;
    }
    return curve;
}

inline double auroc(const EvaluationSet& set) { return roc_curve(set).area; }
inline double aupr(const EvaluationSet& set) { return pr_curve(set).area; }
inline double aurc(const EvaluationSet& set) { return rc_curve(set).area; }

/// The three curves and their areas for one model.
struct SelectiveReport {
    double auroc = 0.0;
    double aupr = 0.0;
    double aurc = 0.0;
    double full_coverage_risk = 0.0;
    Curve roc{};
    Curve pr{};
    Curve rc{};
};

inline SelectiveReport selective_report(const EvaluationSet& set) {
    SelectiveReport report;
    report.roc = roc_curve(set);
    report.pr = pr_curve(set);
    report.rc = rc_curve(set);
    report.auroc = report.roc.area;
    report.aupr = report.pr.area;
    report.aurc = report.rc.area;
    report.full_coverage_risk = report.rc.points.back().y;
    return report;
}

enum class DominanceRelation { a_dominates, b_dominates, incomparable, equal };

namespace detail {

/// One-sided values of a piecewise-linear curve at x: the limit coming
/// from the left and the limit leaving to the right. They differ only on
/// vertical segments (repeated x). Outside the stored range the curve is
/// extended as a constant.
struct EdgeValues {
    double enter = 0.0;
    double exit = 0.0;
};

inline EdgeValues curve_values_at(const Curve& curve, double x) {
    const auto& pts = curve.points;
    if (x < pts.front().x) return {pts.front().y, pts.front().y};
    if (x > pts.back().x) return {pts.back().y, pts.back().y};

    auto it = std::lower_bound(pts.begin(), pts.end(), x,
                               [](const CurvePoint& p, double v) { return p.x < v; });
    if (it != pts.end() && it->x == x) {
        auto last = it;
        while (last + 1 != pts.end() && (last + 1)->x == x) ++last;
        return {it->y, last->y};
    }
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (x - lo.x) / (hi.x - lo.x);
    const double y = lo.y + t * (hi.y - lo.y);
    return {y, y};
}

} // namespace detail

namespace detail {

/// Comparison slack absorbing interpolation round-off; genuine metric
/// differences on finite sets are orders of magnitude larger.
inline constexpr double dominance_tolerance = 1e-12;

inline DominanceRelation compare_pointwise(const Curve& a, const Curve& b,
                                           bool lower_better) {
    std::vector<double> xs;
    xs.reserve(a.points.size() + b.points.size());
    for (const auto& p : a.points) xs.push_back(p.x);
    for (const auto& p : b.points) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    bool a_ahead = false, b_ahead = false;
    for (double x : xs) {
        const auto va = curve_values_at(a, x);
        const auto vb = curve_values_at(b, x);
        for (const double diff : {va.enter - vb.enter, va.exit - vb.exit}) {
            const double advantage = lower_better ? -diff : diff;
            if (advantage > dominance_tolerance) a_ahead = true;
            if (advantage < -dominance_tolerance) b_ahead = true;
        }
    }
    if (a_ahead && b_ahead) return DominanceRelation::incomparable;
    if (a_ahead) return DominanceRelation::a_dominates;
    if (b_ahead) return DominanceRelation::b_dominates;
    return DominanceRelation::equal;
}

/// The RC polyline drawn in (coverage, risk) space bends between
/// achievable operating points, but the set of operating points mixes a
/// tie group linearly in sample counts. Cumulative loss
/// (coverage * risk) is linear along that mixing, so RC curves are
/// compared through it; this is what keeps dominance consistent with the
/// ROC-space comparison of the same models.
inline Curve cumulative_loss_view(const Curve& curve) {
    Curve view{CurveKind::rc, {}, 0.0};
    view.points.reserve(curve.points.size() + 1);
    view.points.push_back({0.0, 0.0});
    for (const auto& p : curve.points) view.points.push_back({p.x, p.x * p.y});
    return view;
}

} // namespace detail

/// Pointwise comparison of two same-kind curves on the union of their
/// x-breakpoints (both one-sided limits, so vertical segments are
/// compared exactly). Higher is better for ROC/PR; RC curves compare
/// with lower-better through the cumulative-loss view, which evaluates
/// the risk ordering at every achievable coverage. A dominates B when A
/// is at least as good everywhere and strictly better somewhere.
inline DominanceRelation dominates(const Curve& a, const Curve& b) {
    if (a.kind != b.kind)
        raise(errc::kind_mismatch, "dominates: curves must have the same kind");
    if (a.kind == CurveKind::rc)
        return detail::compare_pointwise(detail::cumulative_loss_view(a),
                                         detail::cumulative_loss_view(b),
                                         /*lower_better=*/true);
    return detail::compare_pointwise(a, b, /*lower_better=*/false);
}

/// Counterfactual model that turns the m least-confident correct
/// predictions wrong (ties broken by input order). Confidences are
/// untouched; flipped records drop logits and label since the stored
/// class scores no longer describe the altered prediction. Explicit
/// per-item losses pass through unchanged; defaulted losses follow the
/// new correctness.
inline EvaluationSet perturb_m(const EvaluationSet& set, std::size_t m) {
    auto records = set.records();

    std::vector<std::size_t> correct_indices;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].correctness == 1) correct_indices.push_back(i);
    if (m > correct_indices.size())
        raise(errc::m_too_large, "perturb_m: m exceeds the number of correct predictions");

    std::stable_sort(correct_indices.begin(), correct_indices.end(),
                     [&](std::size_t a, std::size_t b) {
                         return records[a].confidence < records[b].confidence;
                     });
    for (std::size_t i = 0; i < m; ++i) {
        auto& rec = records[correct_indices[i]];
        rec.correctness = 0;
        rec.logits.clear();
        rec.label.reset();
    }
    return validate(std::move(records), set.name());
}

/// Mean squared gap between confidence and correctness. Supplementary:
/// rewards sharp prediction as much as calibration.
inline double brier(const EvaluationSet& set) {
    double total = 0.0;
    for (const auto& rec : set.records()) {
        const double diff = rec.confidence - static_cast<double>(rec.correctness);
        total += diff * diff;
    }
    return total / static_cast<double>(set.size());
}

enum class NllMode { automatic, binary, multiclass };

/// Mean negative log likelihood. Multiclass mode scores softmax(logits)
/// at the true label; binary mode scores the confidence as a Bernoulli
/// probability of being correct. Automatic picks multiclass when every
/// record carries logits. Probabilities are floored at 1e-300 so an
/// exactly-wrong extreme confidence stays finite.
inline double nll(const EvaluationSet& set, NllMode mode = NllMode::automatic) {
    const bool all_logits = set.all_have_logits();
    if (mode == NllMode::automatic)
        mode = all_logits ? NllMode::multiclass : NllMode::binary;
    if (mode == NllMode::multiclass && !all_logits)
        raise(errc::missing_logits, "nll: multiclass mode needs logits on every record");

    double total = 0.0;
    if (mode == NllMode::multiclass) {
        for (const auto& rec : set.records()) {
            const auto& l = rec.logits;
            const double m = *std::max_element(l.begin(), l.end());
            double sum = 0.0;
            for (double v : l) sum += std::exp(v - m);
            total += std::log(sum) - (l[static_cast<std::size_t>(*rec.label)] - m);
        }
    } else {
        for (const auto& rec : set.records()) {
            const double p = rec.correctness == 1 ? rec.confidence : 1.0 - rec.confidence;
            total += -std::log(std::max(p, 1e-300));
        }
    }
    return total / static_cast<double>(set.size());
}

} // namespace uqeval
