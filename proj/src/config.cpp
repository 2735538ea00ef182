#include "lindblad_modes/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/io.hpp"

namespace lindblad {

std::string to_string(Method m) {
    switch (m) {
    case Method::Eigenmode: return "eigenmode";
    case Method::Oracle: return "oracle";
    case Method::ClosedForm: return "closed-form";
    case Method::All: return "all";
    }
    return "unknown";
}

Method parse_method(const std::string& s) {
    for (Method m : {Method::Eigenmode, Method::Oracle, Method::ClosedForm, Method::All})
        if (to_string(m) == s) return m;
    fail(ErrorCode::Parse, "unknown method '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (!v.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last)
        fail(ErrorCode::Parse, key + ": '" + v + "' is not a number");
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        fail(ErrorCode::Parse, key + ": '" + v + "' is not an integer");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    const long x = to_long(key, v);
    if (x < -1000000 || x > 1000000) fail(ErrorCode::Parse, key + ": value out of range");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::Parse, key + ": '" + v + "' is not a boolean");
}

Complex to_complex(const std::string& key, const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) return {to_double(key, trim(v)), 0.0};
    return {to_double(key, trim(v.substr(0, comma))), to_double(key, trim(v.substr(comma + 1)))};
}

std::string complex_text(Complex z) {
    if (z.imag() == 0.0) return format_double(z.real());
    return format_double(z.real()) + "," + format_double(z.imag());
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

StateSpec::Kind parse_kind(const std::string& key, const std::string& v) {
    for (auto k : {StateSpec::Kind::Fock, StateSpec::Kind::Coherent, StateSpec::Kind::Thermal,
                   StateSpec::Kind::TwoLevelThermal, StateSpec::Kind::Product, StateSpec::Kind::Explicit})
        if (to_string(k) == v) return k;
    fail(ErrorCode::Parse, key + ": unknown initial kind '" + v + "'");
}

// Consumes "<prefix>kind", "<prefix>n", ... from kv.
StateSpec read_state(std::map<std::string, std::string>& kv, const std::string& prefix, bool allow_product) {
    auto take = [&](const std::string& k) -> std::optional<std::string> {
        auto it = kv.find(prefix + k);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    StateSpec s;
    const auto kind = take("kind");
    s.kind = kind ? parse_kind(prefix + "kind", *kind) : StateSpec::Kind::Fock;
    if (auto v = take("n")) s.fock_n = to_int(prefix + "n", *v);
    if (auto v = take("alpha")) s.alpha = to_complex(prefix + "alpha", *v);
    if (auto v = take("nbar0")) s.nbar0 = to_double(prefix + "nbar0", *v);
    if (auto v = take("N0")) s.excited_population = to_double(prefix + "N0", *v);
    if (auto v = take("path")) s.path = *v;
    if (s.kind == StateSpec::Kind::Product) {
        if (!allow_product) fail(ErrorCode::Parse, prefix + "kind: nested product states are not supported");
        s.factors = {read_state(kv, prefix + "a.", false), read_state(kv, prefix + "b.", false)};
    }
    return s;
}

void write_state(std::map<std::string, std::string>& kv, const StateSpec& s, const std::string& prefix) {
    kv[prefix + "kind"] = to_string(s.kind);
    switch (s.kind) {
    case StateSpec::Kind::Fock: kv[prefix + "n"] = std::to_string(s.fock_n); break;
    case StateSpec::Kind::Coherent: kv[prefix + "alpha"] = complex_text(s.alpha); break;
    case StateSpec::Kind::Thermal: kv[prefix + "nbar0"] = format_double(s.nbar0); break;
    case StateSpec::Kind::TwoLevelThermal: kv[prefix + "N0"] = format_double(s.excited_population); break;
    case StateSpec::Kind::Explicit: kv[prefix + "path"] = s.path; break;
    case StateSpec::Kind::Product:
        write_state(kv, s.factors.at(0), prefix + "a.");
        write_state(kv, s.factors.at(1), prefix + "b.");
        break;
    }
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(ErrorCode::Parse, "line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second)
            fail(ErrorCode::Parse, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return kv;
}

namespace {

RunConfig parse_unchecked(std::istream& in) {
    std::map<std::string, std::string> kv = parse_key_values(in);
    auto take = [&](const std::string& k) -> std::optional<std::string> {
        auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    RunConfig c;
    ModelSpec& m = c.model;
    if (auto v = take("model.tag")) m.tag = parse_model_tag(*v);
    if (auto v = take("model.omega")) m.omega = to_double("model.omega", *v);
    if (auto v = take("model.gamma")) m.gamma = to_double("model.gamma", *v);
    if (auto v = take("model.nbar")) m.nbar = to_double("model.nbar", *v);
    if (auto v = take("model.omega_a")) m.omega_a = to_double("model.omega_a", *v);
    if (auto v = take("model.omega_b")) m.omega_b = to_double("model.omega_b", *v);
    if (auto v = take("model.gamma_a")) m.gamma_a = to_double("model.gamma_a", *v);
    if (auto v = take("model.gamma_b")) m.gamma_b = to_double("model.gamma_b", *v);
    if (auto v = take("model.g")) m.g = to_complex("model.g", *v);
    if (auto v = take("model.gamma_c")) m.gamma_c = to_complex("model.gamma_c", *v);
    if (auto v = take("model.branch")) {
        if (*v == "principal") m.branch = DeltaBranch::Principal;
        else if (*v == "flipped") m.branch = DeltaBranch::Flipped;
        else fail(ErrorCode::Parse, "model.branch: expected principal or flipped");
    }
    if (auto v = take("truncation.dim")) m.dim = to_int("truncation.dim", *v);
    if (is_two_level(m.tag)) m.dim = 2;
    if (auto v = take("truncation.max_index")) c.max_index = to_int("truncation.max_index", *v);
    if (auto v = take("truncation.strict")) c.strict = to_bool("truncation.strict", *v);
    if (auto v = take("truncation.pad")) c.pad = to_int("truncation.pad", *v);

    c.initial = read_state(kv, "initial.", true);

    if (auto v = take("grid.t0")) c.grid.t0 = to_double("grid.t0", *v);
    if (auto v = take("grid.t1")) c.grid.t1 = to_double("grid.t1", *v);
    if (auto v = take("grid.steps")) c.grid.steps = to_int("grid.steps", *v);
    if (auto v = take("method")) c.method = parse_method(*v);
    if (auto v = take("output.path")) c.output_path = *v;
    if (auto v = take("output.observables")) c.observables = split_list(*v);
    if (auto v = take("output.dump_states")) c.dump_states = to_bool("output.dump_states", *v);
    if (auto v = take("output.dump_path")) c.dump_path = *v;
    if (auto v = take("oracle.kind")) {
        try {
            c.oracle_kind = parse_oracle_kind(*v);
        } catch (const Error& e) {
            fail(ErrorCode::Parse, std::string("oracle.kind: ") + e.what());
        }
    }
    if (auto v = take("oracle.step")) c.oracle_step = to_double("oracle.step", *v);
    if (auto v = take("seed")) {
        const long s = to_long("seed", *v);
        if (s < 0) fail(ErrorCode::Parse, "seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (!kv.empty()) fail(ErrorCode::Parse, "unknown key '" + kv.begin()->first + "'");
    return c;
}

} // namespace

RunConfig parse_config(std::istream& in) {
    RunConfig c = parse_unchecked(in);
    validate(c);
    return c;
}

RunConfig parse_config_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::Parse, "cannot open config '" + path + "'");
    RunConfig c = parse_unchecked(f);
    // relative explicit-state paths resolve against the config's directory
    const auto base = std::filesystem::path(path).parent_path();
    auto fix = [&](StateSpec& s) {
        if (s.kind == StateSpec::Kind::Explicit && std::filesystem::path(s.path).is_relative() && !base.empty())
            s.path = (base / s.path).string();
    };
    fix(c.initial);
    for (StateSpec& f2 : c.initial.factors) fix(f2);
    validate(c);
    return c;
}

std::string serialize(const RunConfig& c) {
    std::map<std::string, std::string> kv;
    const ModelSpec& m = c.model;
    kv["model.tag"] = to_string(m.tag);
    if (is_two_mode(m.tag)) {
        kv["model.omega_a"] = format_double(m.omega_a);
        kv["model.omega_b"] = format_double(m.omega_b);
        kv["model.gamma_a"] = format_double(m.gamma_a);
        kv["model.gamma_b"] = format_double(m.gamma_b);
        kv["model.g"] = complex_text(m.g);
        kv["model.gamma_c"] = complex_text(m.gamma_c);
        kv["model.branch"] = m.branch == DeltaBranch::Principal ? "principal" : "flipped";
    } else {
        kv["model.omega"] = format_double(m.omega);
        kv["model.gamma"] = format_double(m.gamma);
    }
    if (is_thermal(m.tag)) kv["model.nbar"] = format_double(m.nbar);
    if (!is_two_level(m.tag)) kv["truncation.dim"] = std::to_string(m.dim);
    kv["truncation.max_index"] = std::to_string(c.max_index);
    kv["truncation.strict"] = c.strict ? "true" : "false";
    kv["truncation.pad"] = std::to_string(c.pad);
    write_state(kv, c.initial, "initial.");
    kv["grid.t0"] = format_double(c.grid.t0);
    kv["grid.t1"] = format_double(c.grid.t1);
    kv["grid.steps"] = std::to_string(c.grid.steps);
    kv["method"] = to_string(c.method);
    if (!c.output_path.empty()) kv["output.path"] = c.output_path;
    if (!c.observables.empty()) {
        std::string list;
        for (const auto& o : c.observables) list += (list.empty() ? "" : ",") + o;
        kv["output.observables"] = list;
    }
    kv["output.dump_states"] = c.dump_states ? "true" : "false";
    if (!c.dump_path.empty()) kv["output.dump_path"] = c.dump_path;
    kv["oracle.kind"] = to_string(c.oracle_kind);
    kv["oracle.step"] = format_double(c.oracle_step);
    kv["seed"] = std::to_string(c.seed);
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

void validate(const RunConfig& c) {
    try {
        validate(c.model);
        validate(c.initial);
        validate(c.grid);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Parse) throw;
        fail(ErrorCode::Parse, e.what());
    }
    const auto check_path = [](const StateSpec& s) {
        if (s.kind == StateSpec::Kind::Explicit && !std::filesystem::exists(s.path))
            fail(ErrorCode::Parse, "initial state file '" + s.path + "' does not exist");
    };
    check_path(c.initial);
    for (const StateSpec& f : c.initial.factors) check_path(f);
    const bool product = c.initial.kind == StateSpec::Kind::Product;
    if (is_two_mode(c.model.tag) != product && c.initial.kind != StateSpec::Kind::Explicit)
        fail(ErrorCode::Parse, is_two_mode(c.model.tag) ? "two-mode models need a product or explicit initial state"
                                                       : "product initial states need a two-mode model");
    if (c.initial.kind == StateSpec::Kind::TwoLevelThermal && !is_two_level(c.model.tag))
        fail(ErrorCode::Parse, "two-level-thermal initial state needs the two-level model");
    if (is_two_level(c.model.tag) && c.initial.kind != StateSpec::Kind::TwoLevelThermal &&
        c.initial.kind != StateSpec::Kind::Explicit &&
        !(c.initial.kind == StateSpec::Kind::Fock && c.initial.fock_n <= 1))
        fail(ErrorCode::Parse, "two-level model needs a two-level-thermal, fock 0/1 or explicit initial state");
    if (c.max_index < -1) fail(ErrorCode::Parse, "truncation.max_index must be >= -1");
    if (c.pad < 0) fail(ErrorCode::Parse, "truncation.pad must be >= 0");
    if (c.pad > 0 && is_two_level(c.model.tag)) fail(ErrorCode::Parse, "truncation.pad does not apply to two levels");
    if (c.oracle_step < 0.0) fail(ErrorCode::Parse, "oracle.step must be >= 0");
    if (c.method == Method::ClosedForm && !closed_form_supported(c.model, c.initial))
        fail(ErrorCode::Parse, "closed-form method does not support this (model, initial) pair");
    static const std::set<std::string> known = {"trace",  "purity",  "mean_n",  "populations",
                                                "min_eig", "leakage", "fidelity"};
    for (const auto& o : c.observables) {
        if (!known.count(o)) fail(ErrorCode::Parse, "unknown observable '" + o + "'");
        if (o == "fidelity" && !closed_form_supported(c.model, c.initial))
            fail(ErrorCode::Parse, "fidelity is measured against the closed form, unsupported for this pair");
    }
}

} // namespace lindblad
