// io.hpp
// Experiment configuration, figure presets and distribution output
// (CSV, JSON, SVG). Output is a pure function of the configuration: no
// timestamps, fixed key order, 17 significant digits.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qw4/coin.hpp"
#include "qw4/embedding.hpp"
#include "qw4/tensor.hpp"
#include "qw4/walk.hpp"

namespace qw4::io {

using json = nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "qw4.distribution/1";

enum class ErrorCode {
    malformed,
    unknown_field,
    unknown_coin,
    bad_coin_file,
    non_unitary_coin,
    bad_initial,
    negative_steps,
    even_n,
    step_budget,
    bad_shifts,
    bad_mode,
    bad_format,
    unknown_preset,
};

inline std::string_view to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::malformed: return "malformed";
        case ErrorCode::unknown_field: return "unknown_field";
        case ErrorCode::unknown_coin: return "unknown_coin";
        case ErrorCode::bad_coin_file: return "bad_coin_file";
        case ErrorCode::non_unitary_coin: return "non_unitary_coin";
        case ErrorCode::bad_initial: return "bad_initial";
        case ErrorCode::negative_steps: return "negative_steps";
        case ErrorCode::even_n: return "even_n";
        case ErrorCode::step_budget: return "step_budget";
        case ErrorCode::bad_shifts: return "bad_shifts";
        case ErrorCode::bad_mode: return "bad_mode";
        case ErrorCode::bad_format: return "bad_format";
        case ErrorCode::unknown_preset: return "unknown_preset";
    }
    return "unknown";
}

class ConfigError : public std::runtime_error {
public:
    ConfigError(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { walk1d, walk2d };
enum class Format { csv, json, svg };

inline std::string_view to_string(Mode m) { return m == Mode::walk1d ? "walk1d" : "walk2d"; }
inline std::string_view to_string(Format f) {
    switch (f) {
        case Format::csv: return "csv";
        case Format::json: return "json";
        case Format::svg: return "svg";
    }
    return "csv";
}

inline Format parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    if (s == "svg") return Format::svg;
    throw ConfigError(ErrorCode::bad_format, "format must be csv, json or svg, got '" + std::string(s) + "'");
}

struct ExperimentConfig {
    std::string coin_label = "grover4";
    CoinOperator coin = grover4();
    bool apply_sagnac_swap = false;
    ShiftVector shifts{};
    int steps = 12;
    std::string initial_label = "basis:0";
    CoinVec initial = CoinVec::basis(0);
    Position initial_position = 0;
    bool recenter = false;
    Mode mode = Mode::walk1d;
    Position N = 21;
    AxisAssignment axes{};
    std::string output;
    Format format = Format::csv;
};

// ---------------------------------------------------------------------------
// Named states and coins.

inline std::optional<CoinVec> named_state(std::string_view name) {
    if (name == "phi1") return CoinVec{{0.5, 0.5, -0.5, -0.5}};
    if (name == "phi2") return CoinVec{{0.5, 0.5, 0.5, 0.5}};
    if (name == "phi3") return CoinVec{{0.5, 0.5, 0.5 * kI, 0.5 * kI}};
    if (name.starts_with("basis:")) {
        const auto idx = name.substr(6);
        std::size_t k = 0;
        const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), k);
        if (ec == std::errc{} && ptr == idx.data() + idx.size() && k < 4) return CoinVec::basis(k);
    }
    return std::nullopt;
}

inline Matrix4 matrix_from_json(const json& j) {
    std::vector<json> pairs;
    if (!j.is_array()) throw ConfigError(ErrorCode::bad_coin_file, "coin matrix must be a JSON array");
    if (j.size() == 4 && j[0].is_array() && j[0].size() == 4 && j[0][0].is_array()) {
        for (const auto& row : j) {
            if (!row.is_array() || row.size() != 4) throw ConfigError(ErrorCode::bad_coin_file, "coin matrix rows must have 4 entries");
            for (const auto& e : row) pairs.push_back(e);
        }
    } else {
        pairs.assign(j.begin(), j.end());
    }
    if (pairs.size() != 16) throw ConfigError(ErrorCode::bad_coin_file, "coin matrix needs 16 [re, im] pairs");
    Matrix4 m;
    for (std::size_t i = 0; i < 16; ++i) {
        const auto& p = pairs[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError(ErrorCode::bad_coin_file, "coin matrix entries must be [re, im] number pairs");
        m(i / 4, i % 4) = cplx{p[0].get<double>(), p[1].get<double>()};
    }
    if (!m.finite()) throw ConfigError(ErrorCode::bad_coin_file, "coin matrix has non-finite entries");
    return m;
}

inline json matrix_to_json(const Matrix4& m) {
    json out = json::array();
    for (const auto& e : m.entries()) out.push_back(json::array({e.real(), e.imag()}));
    return out;
}

inline CoinOperator make_coin(std::string label, const Matrix4& m) {
    if (!is_unitary(m, kAlgebraicTol)) throw ConfigError(ErrorCode::non_unitary_coin, "coin '" + label + "' is not unitary");
    return {std::move(label), m};
}

// "hadamard4", "grover4", "sagnac_swap" or "file:<path>".
inline CoinOperator resolve_coin(const std::string& spec) {
    if (spec == "hadamard4") return hadamard4();
    if (spec == "grover4") return grover4();
    if (spec == "sagnac_swap") return sagnac_swap();
    if (spec.starts_with("file:")) {
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw ConfigError(ErrorCode::bad_coin_file, "cannot open coin file '" + path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(ErrorCode::bad_coin_file, std::string("coin file is not JSON: ") + e.what());
        }
        return make_coin(spec, matrix_from_json(j));
    }
    throw ConfigError(ErrorCode::unknown_coin, "unknown coin '" + spec + "'");
}

inline std::pair<std::string, CoinVec> parse_initial(const json& j) {
    CoinVec v;
    std::string label;
    if (j.is_string()) {
        label = j.get<std::string>();
        const auto s = named_state(label);
        if (!s) throw ConfigError(ErrorCode::bad_initial, "unknown initial state '" + label + "'");
        v = *s;
    } else if (j.is_array() && j.size() == 8) {
        for (std::size_t i = 0; i < 4; ++i) {
            if (!j[2 * i].is_number() || !j[2 * i + 1].is_number())
                throw ConfigError(ErrorCode::bad_initial, "initial components must be numbers");
            v[i] = cplx{j[2 * i].get<double>(), j[2 * i + 1].get<double>()};
        }
        label = "custom";
    } else {
        throw ConfigError(ErrorCode::bad_initial, "initial must be a state name or 8 numbers [re0, im0, ..., re3, im3]");
    }
    const double n2 = v.norm2();
    if (!v.finite() || !(n2 > 0.0) || !std::isfinite(n2))
        throw ConfigError(ErrorCode::bad_initial, "initial state cannot be normalized");
    v = cplx{1.0 / std::sqrt(n2)} * v;
    if (std::abs(v.norm2() - 1.0) > 1e-9) throw ConfigError(ErrorCode::bad_initial, "initial state cannot be normalized");
    return {label, v};
}

// ---------------------------------------------------------------------------
// Config parsing.

inline ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError(ErrorCode::malformed, "config must be a JSON object");
    static const std::array<std::string_view, 13> known{"coin", "apply_sagnac_swap", "shifts", "steps", "initial",
                                                        "initial_position", "recenter", "mode", "N", "axes",
                                                        "output", "format", "comment"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(ErrorCode::unknown_field, "unknown config field '" + key + "'");

    auto typed = [&](const char* key, auto check, const char* what) -> const json* {
        if (!j.contains(key)) return nullptr;
        const json& v = j.at(key);
        if (!check(v)) throw ConfigError(ErrorCode::malformed, std::string("field '") + key + "' must be " + what);
        return &v;
    };
    auto is_bool = [](const json& v) { return v.is_boolean(); };
    auto is_int = [](const json& v) { return v.is_number_integer(); };
    auto is_str = [](const json& v) { return v.is_string(); };

    ExperimentConfig cfg;

    if (const json* m = typed("mode", is_str, "a string")) {
        const auto s = m->get<std::string>();
        if (s == "walk1d") cfg.mode = Mode::walk1d;
        else if (s == "walk2d") cfg.mode = Mode::walk2d;
        else throw ConfigError(ErrorCode::bad_mode, "mode must be walk1d or walk2d, got '" + s + "'");
    }

    if (j.contains("coin")) {
        const json& c = j.at("coin");
        if (c.is_string()) {
            cfg.coin_label = c.get<std::string>();
            cfg.coin = resolve_coin(cfg.coin_label);
        } else if (c.is_array()) {
            cfg.coin_label = "inline";
            cfg.coin = make_coin("inline", matrix_from_json(c));
        } else {
            throw ConfigError(ErrorCode::malformed, "field 'coin' must be a name or a matrix");
        }
    }

    if (const json* v = typed("apply_sagnac_swap", is_bool, "a boolean")) cfg.apply_sagnac_swap = v->get<bool>();
    if (const json* v = typed("recenter", is_bool, "a boolean")) cfg.recenter = v->get<bool>();
    if (const json* v = typed("initial_position", is_int, "an integer")) cfg.initial_position = v->get<Position>();
    if (const json* v = typed("output", is_str, "a string")) cfg.output = v->get<std::string>();
    if (const json* v = typed("format", is_str, "a string")) cfg.format = parse_format(v->get<std::string>());

    if (j.contains("initial")) std::tie(cfg.initial_label, cfg.initial) = parse_initial(j.at("initial"));

    if (const json* v = typed("N", is_int, "an integer")) cfg.N = v->get<Position>();
    if (cfg.mode == Mode::walk2d && (cfg.N < 3 || cfg.N % 2 == 0))
        throw ConfigError(ErrorCode::even_n, "walk2d needs an odd N >= 3, got " + std::to_string(cfg.N));

    if (cfg.mode == Mode::walk2d) cfg.steps = static_cast<int>((cfg.N - 1) / 2);
    if (const json* v = typed("steps", is_int, "an integer")) {
        const auto s = v->get<long long>();
        if (s < 0) throw ConfigError(ErrorCode::negative_steps, "steps must be >= 0, got " + std::to_string(s));
        if (s > 1'000'000) throw ConfigError(ErrorCode::malformed, "steps is unreasonably large");
        cfg.steps = static_cast<int>(s);
    }

    if (const json* v = typed("axes", [](const json& x) { return x.is_array() && x.size() == 4; }, "4 integers")) {
        for (std::size_t k = 0; k < 4; ++k) {
            if (!(*v)[k].is_number_integer()) throw ConfigError(ErrorCode::malformed, "axes entries must be integers 0..3");
            const auto r = (*v)[k].get<long long>();
            if (r < 0 || r > 3) throw ConfigError(ErrorCode::malformed, "axes entries must be integers 0..3");
            cfg.axes.role[k] = static_cast<Axis>(r);
        }
        try {
            cfg.axes.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(ErrorCode::malformed, e.what());
        }
    }

    if (cfg.mode == Mode::walk2d) {
        if (j.contains("shifts")) throw ConfigError(ErrorCode::bad_shifts, "walk2d derives shifts from N; remove 'shifts'");
        if (cfg.steps > (cfg.N - 1) / 2)
            throw ConfigError(ErrorCode::step_budget,
                              "walk2d steps must be <= (N-1)/2 = " + std::to_string((cfg.N - 1) / 2));
        cfg.shifts = embedded_shifts(cfg.N, cfg.axes);
    } else if (const json* v = typed("shifts", [](const json& x) { return x.is_array() && x.size() == 4; }, "4 integers")) {
        for (std::size_t k = 0; k < 4; ++k) {
            if (!(*v)[k].is_number_integer()) throw ConfigError(ErrorCode::bad_shifts, "shifts must be integers");
            cfg.shifts.e[k] = (*v)[k].get<Position>();
        }
    }
    return cfg;
}

inline ExperimentConfig parse_config_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(ErrorCode::malformed, std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Presets.

inline constexpr std::array<std::string_view, 5> kPresetNames{
    "fig_grover_localized", "fig_grover_spreading", "fig_hadamard_phi3", "fig_2d_hadamard", "fig_2d_grover"};

inline json preset_json(std::string_view name) {
    if (name == "fig_grover_localized") return {{"coin", "grover4"}, {"initial", "phi1"}, {"steps", 12}};
    if (name == "fig_grover_spreading") return {{"coin", "grover4"}, {"initial", "phi2"}, {"steps", 12}};
    if (name == "fig_hadamard_phi3") return {{"coin", "hadamard4"}, {"initial", "phi3"}, {"steps", 12}};
    if (name == "fig_2d_hadamard")
        return {{"coin", "hadamard4"}, {"initial", "phi2"}, {"mode", "walk2d"}, {"N", 21}, {"steps", 10}};
    if (name == "fig_2d_grover")
        return {{"coin", "grover4"}, {"initial", "phi1"}, {"mode", "walk2d"}, {"N", 21}, {"steps", 10}};
    throw ConfigError(ErrorCode::unknown_preset, "unknown preset '" + std::string(name) + "'");
}

inline ExperimentConfig preset_config(std::string_view name) { return parse_config(preset_json(name)); }

// ---------------------------------------------------------------------------
// Records and running.

struct DistributionRecord {
    int step = 0;
    Position position = 0;
    std::array<double, 4> p{};
    double p_total = 0.0;
    friend bool operator==(const DistributionRecord&, const DistributionRecord&) = default;
};

struct CellRecord {
    Position x = 0;
    Position y = 0;
    double p = 0.0;
    friend bool operator==(const CellRecord&, const CellRecord&) = default;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct ExperimentResult {
    Mode mode = Mode::walk1d;
    Metadata metadata;
    std::vector<WalkState> trajectory;
    std::vector<DistributionRecord> records;  // walk1d, every step
    std::vector<CellRecord> cells;            // walk2d, final step
    OverlapReport overlap;                    // walk2d
    Position N = 0;
    int steps = 0;
};

inline std::string format_shifts(const ShiftVector& s) {
    std::string out;
    for (std::size_t j = 0; j < 4; ++j) {
        if (j) out += ',';
        if (s[j] >= 0) out += '+';
        out += std::to_string(s[j]);
    }
    return out;
}

inline std::vector<DistributionRecord> records_from(const std::vector<WalkState>& trajectory) {
    std::vector<DistributionRecord> out;
    for (const auto& s : trajectory)
        for (const auto& [n, v] : s.amplitudes) {
            DistributionRecord r{s.step_index, n, {}, 0.0};
            for (std::size_t j = 0; j < 4; ++j) r.p[j] = std::norm(v[j]);
            r.p_total = v.norm2();
            out.push_back(r);
        }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return std::pair{a.step, a.position} < std::pair{b.step, b.position}; });
    return out;
}

inline Metadata metadata_for(const ExperimentConfig& cfg, std::string_view preset = {}) {
    Metadata m{{"schema", std::string(kSchemaVersion)}};
    if (!preset.empty()) m.emplace_back("preset", std::string(preset));
    m.emplace_back("mode", std::string(to_string(cfg.mode)));
    m.emplace_back("coin", cfg.coin_label);
    m.emplace_back("sagnac_swap", cfg.apply_sagnac_swap ? "true" : "false");
    m.emplace_back("initial", cfg.initial_label);
    m.emplace_back("basis", "H+,H-,V+,V-");
    m.emplace_back("shifts", format_shifts(cfg.shifts));
    m.emplace_back("steps", std::to_string(cfg.steps));
    if (cfg.mode == Mode::walk1d) {
        m.emplace_back("initial_position", std::to_string(cfg.initial_position));
        m.emplace_back("recenter", cfg.recenter ? "true" : "false");
    } else {
        m.emplace_back("N", std::to_string(cfg.N));
    }
    return m;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::string_view preset = {}) {
    ExperimentResult out;
    out.mode = cfg.mode;
    out.metadata = metadata_for(cfg, preset);
    out.steps = cfg.steps;
    if (cfg.mode == Mode::walk1d) {
        WalkConfig w;
        w.coin = cfg.coin;
        w.apply_sagnac_swap = cfg.apply_sagnac_swap;
        w.shifts = cfg.shifts;
        w.steps = cfg.steps;
        w.initial_position = cfg.initial_position;
        w.initial_coin = cfg.initial;
        w.recenter = cfg.recenter;
        out.trajectory = evolve(w);
        out.records = records_from(out.trajectory);
        return out;
    }
    if (cfg.apply_sagnac_swap || cfg.recenter || cfg.initial_position != 0)
        throw ConfigError(ErrorCode::malformed, "walk2d does not support sagnac swap, recentering or an initial offset");
    const EmbeddingParams p{cfg.N, cfg.steps, cfg.axes};
    auto run = run_embedded_2d_full(cfg.coin, cfg.initial, p);
    out.N = cfg.N;
    out.trajectory = std::move(run.trajectory);
    out.overlap = run.overlap;
    for (const auto& [cell, prob] : run.distribution) out.cells.push_back({cell.x, cell.y, prob});
    return out;
}

inline ExperimentResult run_preset(std::string_view name) { return run_experiment(preset_config(name), name); }

// ---------------------------------------------------------------------------
// Emission.

inline std::string format_double(double x) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(n));
}

inline double parse_double(std::string_view s) {
    const std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) throw IoError("not a number: '" + tmp + "'");
    return v;
}

inline Position parse_position(std::string_view s) {
    Position v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw IoError("not an integer: '" + std::string(s) + "'");
    return v;
}

inline constexpr std::string_view kCsvHeader1D = "step,position,p_Hp,p_Hm,p_Vp,p_Vm,p_total";
inline constexpr std::string_view kCsvHeader2D = "x,y,p";

inline std::string emit_csv(const ExperimentResult& r) {
    std::string out;
    for (const auto& [k, v] : r.metadata) out += "# " + k + "=" + v + "\n";
    if (r.mode == Mode::walk1d) {
        if (r.records.empty()) throw IoError("emit: no records");
        out += std::string(kCsvHeader1D) + "\n";
        for (const auto& rec : r.records) {
            out += std::to_string(rec.step) + "," + std::to_string(rec.position);
            for (double p : rec.p) out += "," + format_double(p);
            out += "," + format_double(rec.p_total) + "\n";
        }
    } else {
        if (r.cells.empty()) throw IoError("emit: no cells");
        out += std::string(kCsvHeader2D) + "\n";
        for (const auto& c : r.cells)
            out += std::to_string(c.x) + "," + std::to_string(c.y) + "," + format_double(c.p) + "\n";
    }
    return out;
}

inline json metadata_json(const Metadata& m) {
    json o = json::object();
    for (const auto& [k, v] : m) o[k] = v;
    return o;
}

inline std::string emit_json(const ExperimentResult& r) {
    json o;
    o["metadata"] = metadata_json(r.metadata);
    if (r.mode == Mode::walk1d) {
        if (r.records.empty()) throw IoError("emit: no records");
        json recs = json::array();
        for (const auto& rec : r.records)
            recs.push_back({{"step", rec.step}, {"position", rec.position}, {"p_Hp", rec.p[0]}, {"p_Hm", rec.p[1]},
                            {"p_Vp", rec.p[2]}, {"p_Vm", rec.p[3]}, {"p_total", rec.p_total}});
        o["records"] = std::move(recs);
    } else {
        if (r.cells.empty()) throw IoError("emit: no cells");
        o["N"] = r.N;
        o["steps"] = r.steps;
        json cells = json::array();
        for (const auto& c : r.cells) cells.push_back(json::array({c.x, c.y, c.p}));
        o["cells"] = std::move(cells);
    }
    return o.dump(1) + "\n";
}

inline std::string svg_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string fixed(double x, int prec = 2) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.*f", prec, x);
    return std::string(buf, static_cast<std::size_t>(n));
}

// Bar chart of the final step (1D) or a shaded grid of cells (2D).
inline std::string emit_svg(const ExperimentResult& r) {
    constexpr double W = 800, H = 400, margin = 50;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    std::string desc;
    for (const auto& [k, v] : r.metadata) desc += k + "=" + v + "; ";
    os << "<desc>" << svg_escape(desc) << "</desc>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (r.mode == Mode::walk1d) {
        if (r.records.empty()) throw IoError("emit: no records");
        const int last = r.records.back().step;
        std::vector<DistributionRecord> fin;
        std::copy_if(r.records.begin(), r.records.end(), std::back_inserter(fin),
                     [last](const auto& rec) { return rec.step == last; });
        const Position lo = fin.front().position, hi = fin.back().position;
        double pmax = 0.0;
        for (const auto& f : fin) pmax = std::max(pmax, f.p_total);
        if (pmax <= 0.0) pmax = 1.0;
        const double slot = (W - 2 * margin) / static_cast<double>(hi - lo + 1);
        os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">P(n) at step " << last
           << "</text>\n";
        os << "<line x1=\"" << margin << "\" y1=\"" << H - margin << "\" x2=\"" << W - margin << "\" y2=\"" << H - margin
           << "\" stroke=\"black\"/>\n";
        for (const auto& f : fin) {
            const double x = margin + slot * static_cast<double>(f.position - lo);
            const double h = (H - 2 * margin) * f.p_total / pmax;
            os << "<rect x=\"" << fixed(x + 0.1 * slot) << "\" y=\"" << fixed(H - margin - h) << "\" width=\""
               << fixed(0.8 * slot) << "\" height=\"" << fixed(h) << "\" fill=\"steelblue\"><title>n=" << f.position
               << " p=" << format_double(f.p_total) << "</title></rect>\n";
            os << "<text x=\"" << fixed(x + 0.5 * slot) << "\" y=\"" << H - margin + 15
               << "\" text-anchor=\"middle\" font-size=\"9\">" << f.position << "</text>\n";
        }
    } else {
        if (r.cells.empty()) throw IoError("emit: no cells");
        Position ext = 0;
        double pmax = 0.0;
        for (const auto& c : r.cells) {
            ext = std::max({ext, std::abs(c.x), std::abs(c.y)});
            pmax = std::max(pmax, c.p);
        }
        if (pmax <= 0.0) pmax = 1.0;
        const double side = std::min(W, H) - 2 * margin;
        const double cell = side / static_cast<double>(2 * ext + 1);
        const double x0 = (W - side) / 2, y0 = margin;
        os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">P(x, y) at step " << r.steps
           << ", N=" << r.N << "</text>\n";
        for (const auto& c : r.cells) {
            const double x = x0 + cell * static_cast<double>(c.x + ext);
            const double y = y0 + cell * static_cast<double>(ext - c.y);
            os << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(cell) << "\" height=\""
               << fixed(cell) << "\" fill=\"steelblue\" fill-opacity=\"" << fixed(c.p / pmax, 4) << "\"><title>("
               << c.x << "," << c.y << ") p=" << format_double(c.p) << "</title></rect>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

inline std::string emit(const ExperimentResult& r, Format f) {
    switch (f) {
        case Format::csv: return emit_csv(r);
        case Format::json: return emit_json(r);
        case Format::svg: return emit_svg(r);
    }
    return emit_csv(r);
}

// ---------------------------------------------------------------------------
// Reading emitted files back.

struct ParsedDistribution {
    Metadata metadata;
    std::vector<DistributionRecord> records;
    std::vector<CellRecord> cells;
};

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline ParsedDistribution parse_csv(std::string_view text) {
    ParsedDistribution out;
    bool header_seen = false, two_d = false;
    for (auto line : split(text, '\n')) {
        if (line.empty()) continue;
        if (line.starts_with("# ")) {
            const auto body = line.substr(2);
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) throw IoError("bad metadata line");
            out.metadata.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
            continue;
        }
        if (!header_seen) {
            if (line == kCsvHeader1D) two_d = false;
            else if (line == kCsvHeader2D) two_d = true;
            else throw IoError("unrecognized CSV header");
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (two_d) {
            if (f.size() != 3) throw IoError("2D CSV row needs 3 fields");
            out.cells.push_back({parse_position(f[0]), parse_position(f[1]), parse_double(f[2])});
        } else {
            if (f.size() != 7) throw IoError("CSV row needs 7 fields");
            DistributionRecord r;
            r.step = static_cast<int>(parse_position(f[0]));
            r.position = parse_position(f[1]);
            for (std::size_t j = 0; j < 4; ++j) r.p[j] = parse_double(f[2 + j]);
            r.p_total = parse_double(f[6]);
            out.records.push_back(r);
        }
    }
    if (!header_seen) throw IoError("CSV has no header");
    return out;
}

inline ParsedDistribution parse_json(std::string_view text) {
    ParsedDistribution out;
    json o;
    try {
        o = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("distribution JSON: ") + e.what());
    }
    if (o.contains("metadata"))
        for (const auto& [k, v] : o.at("metadata").items()) out.metadata.emplace_back(k, v.get<std::string>());
    if (o.contains("records"))
        for (const auto& rec : o.at("records")) {
            DistributionRecord r;
            r.step = rec.at("step").get<int>();
            r.position = rec.at("position").get<Position>();
            r.p = {rec.at("p_Hp").get<double>(), rec.at("p_Hm").get<double>(), rec.at("p_Vp").get<double>(),
                   rec.at("p_Vm").get<double>()};
            r.p_total = rec.at("p_total").get<double>();
            out.records.push_back(r);
        }
    if (o.contains("cells"))
        for (const auto& c : o.at("cells")) out.cells.push_back({c.at(0).get<Position>(), c.at(1).get<Position>(), c.at(2).get<double>()});
    return out;
}

// Writes to a sibling temp file, then renames over the target.
inline void write_atomic(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into '" + path.string() + "'");
    }
}

}  // namespace qw4::io
