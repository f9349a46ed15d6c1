#include "mtphase/config.hpp"

#include "mtphase/errors.hpp"
#include "mtphase/output.hpp"
#include "mtphase/threshold.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace mtphase {

namespace {

struct Location {
    int line = 0;
    int column = 0;
};

[[noreturn]] void parse_error(const Location& at, const std::string& what) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(at.line) + ", column " + std::to_string(at.column) + ": " + what);
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ValidationError, field + ": " + what, field);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view v, const Location& at) {
    if (v == "pi") return std::numbers::pi;
    double x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
        parse_error(at, "expected a finite number, got '" + std::string(v) + "'");
    }
    return x;
}

template <typename Int>
Int to_integer(std::string_view v, const Location& at) {
    Int x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        parse_error(at, "expected an integer, got '" + std::string(v) + "'");
    }
    return x;
}

bool to_bool(std::string_view v, const Location& at) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    parse_error(at, "expected true/false, got '" + std::string(v) + "'");
}

std::vector<int> to_int_list(std::string_view v, const Location& at) {
    if (v == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<int> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const std::string_view item = trim(v.substr(0, comma));
        out.push_back(to_integer<int>(item, at));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string int_list_text(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

/// One configurable key: how to read it into a RunConfig and how to write it back.
struct KeySpec {
    std::string section;
    std::string key;
    bool required;
    std::function<void(RunConfig&, std::string_view, const Location&)> read;
    std::function<std::string(const RunConfig&)> write;
};

template <typename T>
KeySpec real_key(std::string section, std::string key, bool required, T RunConfig::*part, double T::*field) {
    return {std::move(section), std::move(key), required,
            [=](RunConfig& c, std::string_view v, const Location& at) { (c.*part).*field = to_double(v, at); },
            [=](const RunConfig& c) { return format_double((c.*part).*field); }};
}

template <typename T, typename Int>
KeySpec int_key(std::string section, std::string key, T RunConfig::*part, Int T::*field) {
    return {std::move(section), std::move(key), false,
            [=](RunConfig& c, std::string_view v, const Location& at) { (c.*part).*field = to_integer<Int>(v, at); },
            [=](const RunConfig& c) { return std::to_string((c.*part).*field); }};
}

template <typename T>
KeySpec bool_key(std::string section, std::string key, T RunConfig::*part, bool T::*field) {
    return {std::move(section), std::move(key), false,
            [=](RunConfig& c, std::string_view v, const Location& at) { (c.*part).*field = to_bool(v, at); },
            [=](const RunConfig& c) { return bool_text((c.*part).*field); }};
}

template <typename T>
KeySpec string_key(std::string section, std::string key, T RunConfig::*part, std::string T::*field) {
    return {std::move(section), std::move(key), false,
            [=](RunConfig& c, std::string_view v, const Location&) { (c.*part).*field = std::string(v); },
            [=](const RunConfig& c) { return (c.*part).*field; }};
}

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = [] {
        std::vector<KeySpec> s;
        for (const char* name : {"k1", "k3", "k5", "k7", "C1", "E", "d1", "d2", "d3"}) {
            const Param which = *parse_param(name);
            s.push_back({"model", name, true,
                         [which](RunConfig& c, std::string_view v, const Location& at) {
                             set_param(c.model, which, to_double(v, at));
                         },
                         [which](const RunConfig& c) { return format_double(get_param(c.model, which)); }});
        }
        s.push_back({"domain", "ell", true,
                     [](RunConfig& c, std::string_view v, const Location& at) { c.model.ell = to_double(v, at); },
                     [](const RunConfig& c) { return format_double(c.model.ell); }});
        s.push_back({"domain", "bc", true,
                     [](RunConfig& c, std::string_view v, const Location& at) {
                         const auto bc = parse_boundary_condition(v);
                         if (!bc) parse_error(at, "bc must be dirichlet or neumann_zero_average");
                         c.model.bc = *bc;
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.model.bc)); }});

        s.push_back(int_key("analysis", "M_max", &RunConfig::analysis, &AnalysisConfig::M_max));
        s.push_back(real_key("analysis", "threshold_tol", false, &RunConfig::analysis, &AnalysisConfig::threshold_tol));
        s.push_back(string_key("analysis", "ray_axis", &RunConfig::analysis, &AnalysisConfig::ray_axis));
        s.push_back(real_key("analysis", "ray_lo", false, &RunConfig::analysis, &AnalysisConfig::ray_lo));
        s.push_back(real_key("analysis", "ray_hi", false, &RunConfig::analysis, &AnalysisConfig::ray_hi));

        s.push_back(int_key("simulate", "N", &RunConfig::simulate, &SimulateConfig::N));
        s.push_back(real_key("simulate", "dt", false, &RunConfig::simulate, &SimulateConfig::dt));
        s.push_back(real_key("simulate", "T", false, &RunConfig::simulate, &SimulateConfig::T));
        s.push_back(string_key("simulate", "ic", &RunConfig::simulate, &SimulateConfig::ic));
        s.push_back(real_key("simulate", "ic_epsilon", false, &RunConfig::simulate, &SimulateConfig::ic_epsilon));
        s.push_back(real_key("simulate", "ic_amplitude", false, &RunConfig::simulate, &SimulateConfig::ic_amplitude));
        s.push_back(int_key("simulate", "seed", &RunConfig::simulate, &SimulateConfig::seed));
        s.push_back(int_key("simulate", "record_every", &RunConfig::simulate, &SimulateConfig::record_every));
        s.push_back(bool_key("simulate", "project_mean", &RunConfig::simulate, &SimulateConfig::project_mean));
        s.push_back(bool_key("simulate", "nonlinear", &RunConfig::simulate, &SimulateConfig::nonlinear));
        s.push_back(bool_key("simulate", "stop_on_saturation", &RunConfig::simulate, &SimulateConfig::stop_on_saturation));

        s.push_back(string_key("sweep", "x_axis", &RunConfig::sweep, &SweepConfig::x_axis));
        s.push_back(real_key("sweep", "x_lo", false, &RunConfig::sweep, &SweepConfig::x_lo));
        s.push_back(real_key("sweep", "x_hi", false, &RunConfig::sweep, &SweepConfig::x_hi));
        s.push_back(int_key("sweep", "x_points", &RunConfig::sweep, &SweepConfig::x_points));
        s.push_back(string_key("sweep", "y_axis", &RunConfig::sweep, &SweepConfig::y_axis));
        s.push_back(real_key("sweep", "y_lo", false, &RunConfig::sweep, &SweepConfig::y_lo));
        s.push_back(real_key("sweep", "y_hi", false, &RunConfig::sweep, &SweepConfig::y_hi));
        s.push_back(int_key("sweep", "y_points", &RunConfig::sweep, &SweepConfig::y_points));
        s.push_back(int_key("sweep", "curve_points", &RunConfig::sweep, &SweepConfig::curve_points));

        s.push_back(string_key("output", "directory", &RunConfig::output, &OutputConfig::directory));
        s.push_back(string_key("output", "formats", &RunConfig::output, &OutputConfig::formats));

        s.push_back({"verify", "criteria", false,
                     [](RunConfig& c, std::string_view v, const Location& at) { c.verify.criteria = to_int_list(v, at); },
                     [](const RunConfig& c) { return int_list_text(c.verify.criteria); }});
        return s;
    }();
    return specs;
}

void validate(RunConfig& c) {
    try {
        c.model = validate_params(c.model);
    } catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, e.what(), e.detail().empty() ? "model" : e.detail());
    }

    const auto& a = c.analysis;
    if (a.M_max < 1) invalid("M_max", "must be >= 1");
    if (!(a.threshold_tol > 0)) invalid("threshold_tol", "must be > 0");
    if (a.ray_axis != "d_scale" && !axis_direction(a.ray_axis)) invalid("ray_axis", "unknown axis '" + a.ray_axis + "'");
    if (!(a.ray_lo < a.ray_hi)) invalid("ray_lo", "ray_lo must be < ray_hi");

    const auto& s = c.simulate;
    if (s.N < 16) invalid("N", "must be >= 16");
    if (s.dt < 0) invalid("dt", "must be >= 0 (0 selects the automatic step)");
    if (!(s.T > 0)) invalid("T", "must be > 0");
    if (s.ic != "zero" && s.ic != "aligned" && s.ic != "random") invalid("ic", "must be zero, aligned or random");
    if (s.record_every < 1) invalid("record_every", "must be >= 1");

    const auto& w = c.sweep;
    if (!axis_direction(w.x_axis)) invalid("x_axis", "unknown axis '" + w.x_axis + "'");
    if (!axis_direction(w.y_axis)) invalid("y_axis", "unknown axis '" + w.y_axis + "'");
    if (w.x_axis == w.y_axis) invalid("y_axis", "must differ from x_axis");
    if (!(w.x_lo < w.x_hi)) invalid("x_lo", "x_lo must be < x_hi");
    if (!(w.y_lo < w.y_hi)) invalid("y_lo", "y_lo must be < y_hi");
    if (w.x_points < 1) invalid("x_points", "must be >= 1");
    if (w.y_points < 1) invalid("y_points", "must be >= 1");
    if (w.curve_points < 2) invalid("curve_points", "must be >= 2");

    if (c.output.directory.empty()) invalid("directory", "must not be empty");
    if (c.output.formats != "csv") invalid("formats", "only csv is supported");

    for (int id : c.verify.criteria) {
        if (id < 1 || id > 12) invalid("criteria", "criterion ids are 1..12");
    }
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
    RunConfig c;
    const auto& specs = key_specs();
    std::set<std::string> sections;
    for (const auto& k : specs) sections.insert(k.section);

    std::string section;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        // Comments: whole-line '#'/';' or a '#'/';' preceded by whitespace.
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if ((raw[i] == '#' || raw[i] == ';') && (i == 0 || raw[i - 1] == ' ' || raw[i - 1] == '\t')) {
                raw = raw.substr(0, i);
                break;
            }
        }
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;

        if (line.front() == '[') {
            if (line.back() != ']') parse_error({line_no, indent}, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!sections.count(section)) {
                throw Error(ErrorCode::UnknownKey, "line " + std::to_string(line_no) + ": unknown section [" + section + "]",
                            section);
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) parse_error({line_no, indent}, "expected key = value");
        if (section.empty()) parse_error({line_no, indent}, "key outside of any [section]");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const int value_col = indent + static_cast<int>(line.find_first_not_of(" \t", eq + 1));
        if (key.empty()) parse_error({line_no, indent}, "empty key");

        const auto it = std::find_if(specs.begin(), specs.end(),
                                     [&](const KeySpec& k) { return k.section == section && k.key == key; });
        if (it == specs.end()) {
            throw Error(ErrorCode::UnknownKey,
                        "line " + std::to_string(line_no) + ": unknown key '" + key + "' in [" + section + "]",
                        section + "." + key);
        }
        if (!seen.insert(section + "." + key).second) {
            parse_error({line_no, indent}, "duplicate key '" + key + "'");
        }
        if (value.empty()) parse_error({line_no, value_col}, "missing value for '" + key + "'");
        it->read(c, value, {line_no, value_col});
    }

    for (const auto& k : specs) {
        if (k.required && !seen.count(k.section + "." + k.key)) invalid(k.key, "required key missing from [" + k.section + "]");
    }
    validate(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read config file " + path.string(), path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::string out;
    std::string section;
    for (const auto& k : key_specs()) {
        if (k.section != section) {
            out += (section.empty() ? "[" : "\n[") + k.section + "]\n";
            section = k.section;
        }
        out += k.key + " = " + k.write(c) + "\n";
    }
    return out;
}

}  // namespace mtphase
