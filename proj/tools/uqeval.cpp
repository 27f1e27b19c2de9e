// Command-line front end: evaluates prediction dumps, sweeps model
// families, renders reliability diagrams, fits temperature scaling and
// emits synthetic dumps. Every output is a deterministic function of the
// input bytes and flags; no timestamps or host details are embedded.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <uqeval/uqeval.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

// exit codes shared by all subcommands
constexpr int kExitOk = 0;
constexpr int kExitAllFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitDegenerate = 3;

int parse_int(const std::string& text, const char* what) {
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        uqeval::raise(uqeval::errc::bad_params,
                      std::string("invalid ") + what + " '" + text + "'");
    return value;
}

double parse_double(const std::string& text, const char* what) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        uqeval::raise(uqeval::errc::bad_params,
                      std::string("invalid ") + what + " '" + text + "'");
    return value;
}

uqeval::DumpFormat parse_format(const std::string& text) {
    if (text == "csv") return uqeval::DumpFormat::csv;
    if (text == "jsonl") return uqeval::DumpFormat::jsonl;
    uqeval::raise(uqeval::errc::bad_params,
                  "unknown format '" + text + "' (expected csv or jsonl)");
}

uqeval::BinningScheme parse_scheme(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "equal-range")
        return uqeval::BinningScheme::equal_range(arg.empty() ? 10 : parse_int(arg, "bin count"));
    if (kind == "equal-size")
        return uqeval::BinningScheme::equal_size(arg.empty() ? 10 : parse_int(arg, "bin count"));
    if (kind == "adaptive")
        return uqeval::BinningScheme::adaptive(arg.empty() ? 0.2 : parse_double(arg, "alpha"));
    uqeval::raise(uqeval::errc::bad_params,
                  "unknown scheme '" + text +
                      "' (expected equal-range:N, equal-size:N or adaptive:ALPHA)");
}

std::string scheme_file_tag(const uqeval::BinningScheme& scheme) {
    std::string tag = scheme.to_string();
    for (auto& ch : tag)
        if (ch == ':') ch = '-';
    return tag;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) uqeval::raise(uqeval::errc::io_error, "cannot open " + path.string());
    out << content;
}

uqeval::DumpReadOptions make_read_options(const std::string& format,
                                          const std::string& loss_column) {
    uqeval::DumpReadOptions options;
    if (!format.empty()) options.format = parse_format(format);
    options.loss_column = loss_column;
    return options;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
    std::string dump;
    std::string format;
    std::vector<std::string> schemes;
    std::string loss_column = "loss";
    std::string out_dir = ".";
    bool curves = false;
    bool reliability = false;
};

int run_eval(const EvalOptions& opt) {
    const auto set = uqeval::read_dump(opt.dump, make_read_options(opt.format, opt.loss_column));

    std::vector<uqeval::BinningScheme> schemes;
    if (opt.schemes.empty()) {
        schemes.push_back(uqeval::BinningScheme::equal_range(10));
        schemes.push_back(uqeval::BinningScheme::adaptive(0.2));
    } else {
        for (const auto& text : opt.schemes) schemes.push_back(parse_scheme(text));
    }

    bool degenerate = false;
    std::optional<uqeval::Curve> roc, pr;
    try {
        roc = uqeval::roc_curve(set);
    } catch (const uqeval::error& e) {
        if (e.code() != uqeval::errc::degenerate_classes) throw;
        degenerate = true;
    }
    try {
        pr = uqeval::pr_curve(set);
    } catch (const uqeval::error& e) {
        if (e.code() != uqeval::errc::degenerate_classes) throw;
        degenerate = true;
    }
    const auto rc = uqeval::rc_curve(set);

    ordered_json report;
    report["schema_version"] = kSchemaVersion;
    report["model"] = set.name();
    report["records"] = set.size();
    report["accuracy"] = set.accuracy();
    ordered_json selective;
    selective["auroc"] = roc ? ordered_json(roc->area) : ordered_json(nullptr);
    selective["aupr"] = pr ? ordered_json(pr->area) : ordered_json(nullptr);
    selective["aurc"] = rc.area;
    selective["full_coverage_risk"] = rc.points.back().y;
    report["selective"] = selective;
    ordered_json supplementary;
    supplementary["brier"] = uqeval::brier(set);
    supplementary["nll"] = uqeval::nll(set);
    report["supplementary"] = supplementary;

    std::vector<uqeval::CalibrationReport> calibrations;
    ordered_json calibration = ordered_json::array();
    for (const auto& scheme : schemes) {
        calibrations.push_back(uqeval::calibration_report(set, scheme));
        const auto& rep = calibrations.back();
        ordered_json entry;
        entry["scheme"] = scheme.to_string();
        entry["n_bins_used"] = rep.n_bins_used;
        entry["ece"] = rep.ece;
        entry["mce"] = rep.mce;
        calibration.push_back(entry);
    }
    report["calibration"] = calibration;

    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    write_text_file(out_dir / "report.json", report.dump(2) + "\n");

    if (opt.curves) {
        if (roc) uqeval::write_curve_csv(*roc, out_dir / "roc.csv");
        if (pr) uqeval::write_curve_csv(*pr, out_dir / "pr.csv");
        uqeval::write_curve_csv(rc, out_dir / "rc.csv");
    }
    if (opt.reliability) {
        for (const auto& rep : calibrations) {
            const auto rows = uqeval::reliability_data(rep.bins, set.size());
            const std::string tag = scheme_file_tag(rep.scheme);
            uqeval::write_reliability_csv(rows, out_dir / ("reliability_" + tag + ".csv"));
            write_text_file(out_dir / ("reliability_" + tag + ".svg"),
                            uqeval::reliability_diagram_svg(
                                rows, set.name() + " (" + rep.scheme.to_string() + ")"));
        }
    }
    return degenerate ? kExitDegenerate : kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
    std::string manifest;
    std::string out_dir = ".";
};

struct SweepRow {
    std::string name;
    long long parameters = 0;
    fs::path dump_path;
    bool loaded = false;
    std::optional<double> accuracy, auroc, aupr, aurc, ece, aece, mce, amce;
};

int run_sweep(const SweepOptions& opt) {
    std::ifstream in(opt.manifest, std::ios::binary);
    if (!in) uqeval::raise(uqeval::errc::io_error, "cannot open " + opt.manifest);
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        uqeval::raise(uqeval::errc::parse_error, opt.manifest + ": " + e.what());
    }
    if (!manifest.is_object() || !manifest.contains("models") ||
        !manifest["models"].is_array() || manifest["models"].empty())
        uqeval::raise(uqeval::errc::parse_error,
                      opt.manifest + ": manifest needs a non-empty 'models' array");

    static const std::vector<std::string> all_metrics = {
        "accuracy", "auroc", "aupr", "aurc", "ece", "aece", "mce", "amce"};
    std::vector<std::string> metrics = all_metrics;
    if (manifest.contains("metrics")) {
        metrics.clear();
        for (const auto& m : manifest["metrics"]) {
            const auto name = m.get<std::string>();
            if (std::find(all_metrics.begin(), all_metrics.end(), name) == all_metrics.end())
                uqeval::raise(uqeval::errc::parse_error,
                              opt.manifest + ": unknown metric '" + name + "'");
            metrics.push_back(name);
        }
    }

    std::vector<SweepRow> rows;
    for (const auto& model : manifest["models"]) {
        SweepRow row;
        try {
            row.name = model.at("name").get<std::string>();
            row.parameters = model.at("parameters").get<long long>();
            row.dump_path = model.at("path").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            uqeval::raise(uqeval::errc::parse_error, opt.manifest + ": " + e.what());
        }
        if (row.parameters <= 0)
            uqeval::raise(uqeval::errc::parse_error,
                          opt.manifest + ": model '" + row.name +
                              "' needs a positive parameter count");
        for (const auto& other : rows)
            if (other.dump_path == row.dump_path)
                uqeval::raise(uqeval::errc::parse_error,
                              opt.manifest + ": duplicate dump path " +
                                  row.dump_path.string());
        rows.push_back(std::move(row));
    }

    for (auto& row : rows) {
        try {
            const auto set = uqeval::read_dump(row.dump_path);
            row.loaded = true;
            row.accuracy = set.accuracy();
            try {
                row.auroc = uqeval::auroc(set);
                row.aupr = uqeval::aupr(set);
            } catch (const uqeval::error& e) {
                if (e.code() != uqeval::errc::degenerate_classes) throw;
            }
            row.aurc = uqeval::aurc(set);
            const auto er = uqeval::calibration_report(
                set, uqeval::BinningScheme::equal_range(10));
            const auto ad = uqeval::calibration_report(
                set, uqeval::BinningScheme::adaptive(0.2));
            row.ece = er.ece;
            row.mce = er.mce;
            row.aece = ad.ece;
            row.amce = ad.mce;
        } catch (const uqeval::error&) {
            row.loaded = false; // row stays null
        }
    }

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.parameters > b.parameters;
    });

    const auto cell = [](const std::optional<double>& v) {
        return v ? uqeval::format_double(*v) : std::string{};
    };
    std::string csv = "name,parameter_count";
    for (const auto& m : metrics) csv += "," + m;
    csv += "\n";
    for (const auto& row : rows) {
        csv += row.name + "," + std::to_string(row.parameters);
        for (const auto& m : metrics) {
            csv += ",";
            if (m == "accuracy") csv += cell(row.accuracy);
            else if (m == "auroc") csv += cell(row.auroc);
            else if (m == "aupr") csv += cell(row.aupr);
            else if (m == "aurc") csv += cell(row.aurc);
            else if (m == "ece") csv += cell(row.ece);
            else if (m == "aece") csv += cell(row.aece);
            else if (m == "mce") csv += cell(row.mce);
            else if (m == "amce") csv += cell(row.amce);
        }
        csv += "\n";
    }

    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    write_text_file(out_dir / "sweep.csv", csv);

    const bool all_failed = std::none_of(rows.begin(), rows.end(),
                                         [](const SweepRow& r) { return r.loaded; });
    return all_failed ? kExitAllFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// diagram

struct DiagramOptions {
    std::string dump;
    std::string format;
    std::string scheme = "equal-range:10";
    std::string loss_column = "loss";
    std::string out_dir = ".";
};

int run_diagram(const DiagramOptions& opt) {
    const auto set = uqeval::read_dump(opt.dump, make_read_options(opt.format, opt.loss_column));
    const auto scheme = parse_scheme(opt.scheme);
    const auto report = uqeval::calibration_report(set, scheme);
    const auto rows = uqeval::reliability_data(report.bins, set.size());

    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    const std::string tag = scheme_file_tag(scheme);
    uqeval::write_reliability_csv(rows, out_dir / ("reliability_" + tag + ".csv"));
    write_text_file(out_dir / ("reliability_" + tag + ".svg"),
                    uqeval::reliability_diagram_svg(
                        rows, set.name() + " (" + scheme.to_string() + ")"));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateOptions {
    std::string dump;
    std::string format;
    std::string out_dir = ".";
};

int run_calibrate(const CalibrateOptions& opt) {
    const auto set = uqeval::read_dump(opt.dump, make_read_options(opt.format, "loss"));
    if (!set.all_have_logits())
        uqeval::raise(uqeval::errc::missing_logits,
                      opt.dump + ": every record needs logits and a label");

    const auto model = uqeval::fit_temperature(set);
    const auto calibrated = uqeval::apply_temperature(set, model);

    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    const uqeval::DumpFormat fmt = opt.format.empty()
                                       ? uqeval::detect_dump_format(opt.dump)
                                       : parse_format(opt.format);
    const char* ext = fmt == uqeval::DumpFormat::csv ? ".csv" : ".jsonl";
    uqeval::write_dump(calibrated, out_dir / (std::string("calibrated") + ext), fmt);

    ordered_json result;
    result["schema_version"] = kSchemaVersion;
    result["temperature"] = model.temperature;
    write_text_file(out_dir / "temperature.json", result.dump(2) + "\n");

    std::cout << uqeval::format_double(model.temperature) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
    std::string kind;
    std::size_t records = 10000;
    std::uint64_t seed = 0;
    std::string name;
    std::string shape = "uniform";
    std::string levels;
    int classes = 10;
    double temperature = 1.0;
    double accuracy = 0.9;
    double separability = 2.0;
    std::string format = "csv";
    std::string out_dir = ".";
};

uqeval::ConfidenceShape parse_shape(const std::string& text) {
    if (text == "uniform") return uqeval::ConfidenceShape::uniform();
    if (text.starts_with("beta:")) {
        const std::string args = text.substr(5);
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            uqeval::raise(uqeval::errc::bad_shape,
                          "beta shape needs two parameters, e.g. beta:2,5");
        return uqeval::ConfidenceShape::beta(
            parse_double(args.substr(0, comma), "beta parameter"),
            parse_double(args.substr(comma + 1), "beta parameter"));
    }
    uqeval::raise(uqeval::errc::bad_shape,
                  "unknown shape '" + text + "' (expected uniform or beta:A,B)");
}

std::vector<uqeval::DiscreteLevel> parse_levels(const std::string& text) {
    std::vector<uqeval::DiscreteLevel> levels;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string triple = text.substr(start, end - start);
        const auto c1 = triple.find(':');
        const auto c2 = triple.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            uqeval::raise(uqeval::errc::bad_level,
                          "level '" + triple + "' must be confidence:accuracy:count");
        uqeval::DiscreteLevel level;
        level.confidence = parse_double(triple.substr(0, c1), "level confidence");
        level.accuracy = parse_double(triple.substr(c1 + 1, c2 - c1 - 1), "level accuracy");
        const int count = parse_int(triple.substr(c2 + 1), "level count");
        if (count < 1) uqeval::raise(uqeval::errc::bad_level, "level count must be positive");
        level.count = static_cast<std::size_t>(count);
        levels.push_back(level);
        start = end + 1;
    }
    return levels;
}

int run_synth(const SynthOptions& opt) {
    const std::string name = opt.name.empty() ? opt.kind : opt.name;
    std::optional<uqeval::EvaluationSet> set;
    if (opt.kind == "calibrated") {
        set = uqeval::gen_calibrated(opt.records, parse_shape(opt.shape), opt.seed, name);
    } else if (opt.kind == "undetectable-error") {
        set = uqeval::gen_undetectable_error(opt.records, opt.seed, name);
    } else if (opt.kind == "discrete") {
        if (opt.levels.empty())
            uqeval::raise(uqeval::errc::bad_level, "kind 'discrete' needs --levels");
        set = uqeval::gen_discrete(parse_levels(opt.levels), opt.seed, name);
    } else if (opt.kind == "logits") {
        set = uqeval::gen_logits(opt.records, opt.classes, opt.temperature, opt.seed, name);
    } else if (opt.kind == "scored-model") {
        set = uqeval::gen_scored_model(opt.records, opt.accuracy, opt.separability,
                                       opt.seed, name);
    } else {
        uqeval::raise(uqeval::errc::bad_params,
                      "unknown kind '" + opt.kind +
                          "' (expected calibrated, undetectable-error, discrete, "
                          "logits or scored-model)");
    }

    const uqeval::DumpFormat fmt = parse_format(opt.format);
    const char* ext = fmt == uqeval::DumpFormat::csv ? ".csv" : ".jsonl";
    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    uqeval::write_dump(*set, out_dir / (name + ext), fmt);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uqeval - uncertainty estimation evaluation toolkit"};
    app.require_subcommand(1);

    EvalOptions eval_opt;
    auto* eval_cmd = app.add_subcommand(
        "eval", "evaluate one prediction dump and write a JSON report");
    eval_cmd->add_option("dump", eval_opt.dump, "prediction dump file")->required();
    eval_cmd->add_option("--format", eval_opt.format, "dump format: csv or jsonl");
    eval_cmd->add_option("--scheme", eval_opt.schemes,
                         "binning scheme (repeatable), e.g. equal-range:10");
    eval_cmd->add_option("--loss-column", eval_opt.loss_column, "name of the loss column");
    eval_cmd->add_option("--out", eval_opt.out_dir, "output directory");
    eval_cmd->add_flag("--curves", eval_opt.curves, "also write roc/pr/rc CSV files");
    eval_cmd->add_flag("--reliability", eval_opt.reliability,
                       "also write per-scheme reliability CSV and SVG");

    SweepOptions sweep_opt;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "evaluate a manifest of models into one CSV table");
    sweep_cmd->add_option("manifest", sweep_opt.manifest, "JSON manifest file")->required();
    sweep_cmd->add_option("--out", sweep_opt.out_dir, "output directory");

    DiagramOptions diagram_opt;
    auto* diagram_cmd = app.add_subcommand(
        "diagram", "write a reliability diagram (CSV + SVG) for one dump");
    diagram_cmd->add_option("dump", diagram_opt.dump, "prediction dump file")->required();
    diagram_cmd->add_option("--format", diagram_opt.format, "dump format: csv or jsonl");
    diagram_cmd->add_option("--scheme", diagram_opt.scheme, "binning scheme");
    diagram_cmd->add_option("--loss-column", diagram_opt.loss_column,
                            "name of the loss column");
    diagram_cmd->add_option("--out", diagram_opt.out_dir, "output directory");

    CalibrateOptions calibrate_opt;
    auto* calibrate_cmd = app.add_subcommand(
        "calibrate", "fit temperature scaling and write the calibrated dump");
    calibrate_cmd->add_option("dump", calibrate_opt.dump, "dump with label and logits")
        ->required();
    calibrate_cmd->add_option("--format", calibrate_opt.format, "dump format: csv or jsonl");
    calibrate_cmd->add_option("--out", calibrate_opt.out_dir, "output directory");

    SynthOptions synth_opt;
    auto* synth_cmd = app.add_subcommand("synth", "emit a synthetic prediction dump");
    synth_cmd->add_option("--kind", synth_opt.kind,
                          "calibrated | undetectable-error | discrete | logits | scored-model")
        ->required();
    synth_cmd->add_option("-n,--records", synth_opt.records, "number of records");
    synth_cmd->add_option("--seed", synth_opt.seed, "64-bit generator seed");
    synth_cmd->add_option("--name", synth_opt.name, "model name and output file stem");
    synth_cmd->add_option("--shape", synth_opt.shape,
                          "confidence shape for 'calibrated': uniform or beta:A,B");
    synth_cmd->add_option("--levels", synth_opt.levels,
                          "levels for 'discrete': conf:acc:count,...");
    synth_cmd->add_option("--classes", synth_opt.classes, "class count for 'logits'");
    synth_cmd->add_option("--temperature", synth_opt.temperature,
                          "true temperature for 'logits'");
    synth_cmd->add_option("--accuracy", synth_opt.accuracy,
                          "target accuracy for 'scored-model'");
    synth_cmd->add_option("--separability", synth_opt.separability,
                          "ranking quality for 'scored-model'");
    synth_cmd->add_option("--format", synth_opt.format, "output format: csv or jsonl");
    synth_cmd->add_option("--out", synth_opt.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (eval_cmd->parsed()) return run_eval(eval_opt);
        if (sweep_cmd->parsed()) return run_sweep(sweep_opt);
        if (diagram_cmd->parsed()) return run_diagram(diagram_opt);
        if (calibrate_cmd->parsed()) return run_calibrate(calibrate_opt);
        if (synth_cmd->parsed()) return run_synth(synth_opt);
    } catch (const uqeval::error& e) {
        std::cerr << "uqeval: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "uqeval: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
