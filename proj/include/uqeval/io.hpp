#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "uqeval/calibration.hpp"
#include "uqeval/core.hpp"

namespace uqeval {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

enum class DumpFormat { csv, jsonl };

/// Picks the format from the file extension; anything but .jsonl reads
/// as CSV.
inline DumpFormat detect_dump_format(const std::filesystem::path& path) {
    return path.extension() == ".jsonl" ? DumpFormat::jsonl : DumpFormat::csv;
}

struct DumpReadOptions {
    std::optional<DumpFormat> format{};
    std::string loss_column = "loss";
    std::string name{};
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::filesystem::path& path,
                                    std::size_t line, const std::string& message) {
    raise(errc::parse_error,
          path.string() + ": parse error at line " + std::to_string(line) + ": " + message);
}

inline double parse_number(std::string_view token, const std::filesystem::path& path,
                           std::size_t line, const char* what) {
    double value = 0.0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc{} || result.ptr != token.data() + token.size())
        parse_fail(path, line, std::string("invalid ") + what + " '" + std::string(token) + "'");
    return value;
}

inline long parse_integer(std::string_view token, const std::filesystem::path& path,
                          std::size_t line, const char* what) {
    long value = 0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc{} || result.ptr != token.data() + token.size())
        parse_fail(path, line, std::string("invalid ") + what + " '" + std::string(token) + "'");
    return value;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

struct CsvLayout {
    std::ptrdiff_t confidence = -1;
    std::ptrdiff_t correct = -1;
    std::ptrdiff_t loss = -1;
    std::ptrdiff_t label = -1;
    std::vector<std::ptrdiff_t> logits; // column of logit_k at position k
};

inline CsvLayout resolve_csv_header(const std::vector<std::string_view>& header,
                                    const std::string& loss_column,
                                    const std::filesystem::path& path) {
    CsvLayout layout;
    std::vector<std::pair<long, std::ptrdiff_t>> logit_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string_view name = header[i];
        const auto col = static_cast<std::ptrdiff_t>(i);
        if (name == "confidence") layout.confidence = col;
        else if (name == "correct") layout.correct = col;
        else if (name == loss_column) layout.loss = col;
        else if (name == "label") layout.label = col;
        else if (name.starts_with("logit_")) {
            const long k = parse_integer(name.substr(6), path, 1, "logit column index");
            logit_cols.emplace_back(k, col);
        }
        // unrecognized columns are ignored
    }
    if (layout.confidence < 0) parse_fail(path, 1, "missing column 'confidence'");
    if (layout.correct < 0) parse_fail(path, 1, "missing column 'correct'");
    std::sort(logit_cols.begin(), logit_cols.end());
    for (std::size_t k = 0; k < logit_cols.size(); ++k) {
        if (logit_cols[k].first != static_cast<long>(k))
            parse_fail(path, 1, "logit columns must be contiguous logit_0..logit_{K-1}");
        layout.logits.push_back(logit_cols[k].second);
    }
    if (!layout.logits.empty() && layout.label < 0)
        parse_fail(path, 1, "logit columns present but column 'label' missing");
    return layout;
}

inline EvaluationSet read_csv_dump(const std::filesystem::path& path,
                                   const DumpReadOptions& options) {
    const auto lines = read_lines(path);
    if (lines.empty()) parse_fail(path, 1, "empty file, expected a header row");
    const auto layout = resolve_csv_header(split_csv_line(lines[0]),
                                           options.loss_column, path);

    std::vector<PredictionRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        if (lines[li].empty() && li + 1 == lines.size()) break; // trailing newline
        const auto fields = split_csv_line(lines[li]);
        const auto field = [&](std::ptrdiff_t col) -> std::string_view {
            if (col < 0 || static_cast<std::size_t>(col) >= fields.size())
                parse_fail(path, line_no, "row has too few fields");
            return fields[static_cast<std::size_t>(col)];
        };

        PredictionRecord rec;
        rec.confidence = parse_number(field(layout.confidence), path, line_no, "confidence");
        const long correct_flag = parse_integer(field(layout.correct), path, line_no, "correct");
        if (correct_flag != 0 && correct_flag != 1)
            parse_fail(path, line_no, "'correct' must be 0 or 1");
        rec.correctness = static_cast<int>(correct_flag);
        if (layout.loss >= 0) {
            const auto token = field(layout.loss);
            if (!token.empty()) rec.loss = parse_number(token, path, line_no, "loss");
        }
        if (!layout.logits.empty()) {
            const auto label_token = field(layout.label);
            const bool any_logit = [&] {
                for (auto col : layout.logits)
                    if (!field(col).empty()) return true;
                return false;
            }();
            if (!label_token.empty() || any_logit) {
                rec.label = static_cast<int>(
                    parse_integer(label_token, path, line_no, "label"));
                rec.logits.reserve(layout.logits.size());
                for (std::size_t k = 0; k < layout.logits.size(); ++k)
                    rec.logits.push_back(parse_number(field(layout.logits[k]), path,
                                                      line_no,
                                                      "logit"));
            }
        }
        try {
            detail::check_record(rec, records.size());
        } catch (const error& e) {
            parse_fail(path, line_no, e.what());
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) parse_fail(path, lines.size(), "no records");
    return validate(std::move(records),
                    options.name.empty() ? path.stem().string() : options.name);
}

inline EvaluationSet read_jsonl_dump(const std::filesystem::path& path,
                                     const DumpReadOptions& options) {
    const auto lines = read_lines(path);
    std::vector<PredictionRecord> records;
    records.reserve(lines.size());
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        if (lines[li].empty()) {
            if (li + 1 == lines.size()) break;
            parse_fail(path, line_no, "blank line");
        }
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(lines[li]);
        } catch (const nlohmann::json::exception& e) {
            parse_fail(path, line_no, e.what());
        }
        if (!obj.is_object()) parse_fail(path, line_no, "expected a JSON object");

        PredictionRecord rec;
        try {
            rec.confidence = obj.at("confidence").get<double>();
            if (!obj.at("correct").is_number_integer())
                parse_fail(path, line_no, "'correct' must be an integer");
            rec.correctness = obj.at("correct").get<int>();
            if (obj.contains(options.loss_column) && !obj[options.loss_column].is_null())
                rec.loss = obj[options.loss_column].get<double>();
            if (obj.contains("logits") && !obj["logits"].is_null()) {
                rec.logits = obj["logits"].get<std::vector<double>>();
                if (obj.contains("label") && !obj["label"].is_null()) {
                    if (!obj["label"].is_number_integer())
                        parse_fail(path, line_no, "'label' must be an integer");
                    rec.label = obj["label"].get<int>();
                }
            }
        } catch (const nlohmann::json::exception& e) {
            parse_fail(path, line_no, e.what());
        }
        if (rec.correctness != 0 && rec.correctness != 1)
            parse_fail(path, line_no, "'correct' must be 0 or 1");
        try {
            check_record(rec, records.size());
        } catch (const error& e) {
            parse_fail(path, line_no, e.what());
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) parse_fail(path, 1, "no records");
    return validate(std::move(records),
                    options.name.empty() ? path.stem().string() : options.name);
}

} // namespace detail

/// Loads a prediction dump. Parse failures and invariant violations are
/// reported as parse errors naming the offending line.
inline EvaluationSet read_dump(const std::filesystem::path& path,
                               const DumpReadOptions& options = {}) {
    const DumpFormat format = options.format.value_or(detect_dump_format(path));
    return format == DumpFormat::csv ? detail::read_csv_dump(path, options)
                                     : detail::read_jsonl_dump(path, options);
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot open " + path.string() + " for writing");
    return out;
}

} // namespace detail

/// Writes the set in the dump schema. Optional columns appear only when
/// some record carries them; absent values stay empty (CSV) or omitted
/// (JSONL). All logit-bearing records must agree on the class count.
inline void write_dump(const EvaluationSet& set, const std::filesystem::path& path,
                       std::optional<DumpFormat> format = {}) {
    const DumpFormat fmt = format.value_or(detect_dump_format(path));
    const auto& records = set.records();

    std::size_t classes = 0;
    bool any_loss = false;
    for (const auto& rec : records) {
        if (rec.loss) any_loss = true;
        if (rec.has_logits()) {
            if (classes == 0) classes = rec.logits.size();
            else if (classes != rec.logits.size())
                raise(errc::bad_params, "write_dump: records disagree on logit count");
        }
    }

    auto out = detail::open_out(path);
    if (fmt == DumpFormat::csv) {
        out << "confidence,correct";
        if (any_loss) out << ",loss";
        if (classes > 0) {
            out << ",label";
            for (std::size_t k = 0; k < classes; ++k) out << ",logit_" << k;
        }
        out << '\n';
        for (const auto& rec : records) {
            out << format_double(rec.confidence) << ',' << rec.correctness;
            if (any_loss) {
                out << ',';
                if (rec.loss) out << format_double(*rec.loss);
            }
            if (classes > 0) {
                out << ',';
                if (rec.label) out << *rec.label;
                for (std::size_t k = 0; k < classes; ++k) {
                    out << ',';
                    if (rec.has_logits()) out << format_double(rec.logits[k]);
                }
            }
            out << '\n';
        }
    } else {
        for (const auto& rec : records) {
            out << "{\"confidence\":" << format_double(rec.confidence)
                << ",\"correct\":" << rec.correctness;
            if (rec.loss) out << ",\"loss\":" << format_double(*rec.loss);
            if (rec.has_logits()) {
                out << ",\"label\":" << *rec.label << ",\"logits\":[";
                for (std::size_t k = 0; k < rec.logits.size(); ++k) {
                    if (k > 0) out << ',';
                    out << format_double(rec.logits[k]);
                }
                out << ']';
            }
            out << "}\n";
        }
    }
}

/// Two-column CSV with axis names chosen by the curve kind.
inline void write_curve_csv(const Curve& curve, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    switch (curve.kind) {
        case CurveKind::roc: out << "fpr,tpr\n"; break;
        case CurveKind::pr: out << "recall,precision\n"; break;
        case CurveKind::rc: out << "coverage,risk\n"; break;
    }
    for (const auto& point : curve.points)
        out << format_double(point.x) << ',' << format_double(point.y) << '\n';
}

inline void write_reliability_csv(const std::vector<ReliabilityRow>& rows,
                                  const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "bin,lo,hi,count,mean_confidence,empirical_accuracy,gap,density\n";
    for (const auto& row : rows) {
        out << row.bin << ',' << format_double(row.lo) << ',' << format_double(row.hi)
            << ',' << row.count << ',' << format_double(row.mean_confidence) << ','
            << format_double(row.empirical_accuracy) << ',' << format_double(row.gap)
            << ',' << format_double(row.density) << '\n';
    }
}

} // namespace uqeval
