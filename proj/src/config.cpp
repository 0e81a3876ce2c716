#include "cklab/config.hpp"

#include "cklab/errors.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cklab {

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"check-exponents", "conjugation-test", "solve",
                                                "verify-energy",   "verify-strichartz", "semilinear"};
    return names;
}

double default_t_max(const std::string& subcommand) {
    return subcommand == "verify-strichartz" || subcommand == "verify-energy" ? 5.0 : 6.0;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        out.push_back(item);
    }
    return out;
}

namespace {

using Json = nlohmann::json;
using Setter = std::function<void(RunConfig&, const Json&)>;

template <class T>
T as(const Json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const Json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

// Exponents may be given as numbers or strings ("inf", "5/2").
std::string exponent_text(const Json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    }
    throw ConfigError("config key '" + key + "' must be a number or a string");
}

std::string list_text(const Json& v, const std::string& key) {
    if (!v.is_array()) return exponent_text(v, key);
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + exponent_text(e, key);
    return out;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"subcommand", [](RunConfig& c, const Json& v) { c.subcommand = as<std::string>(v, "subcommand"); }},
        {"chart", [](RunConfig& c, const Json& v) { c.chart.name = as<std::string>(v, "chart"); }},
        {"n", [](RunConfig& c, const Json& v) { c.chart.n = as<int>(v, "n"); }},
        {"section", [](RunConfig& c, const Json& v) { c.chart.section = parse_section(as<std::string>(v, "section")); }},
        {"grid", [](RunConfig& c, const Json& v) { c.chart.grid = as<int>(v, "grid"); }},
        {"amplitude", [](RunConfig& c, const Json& v) { c.chart.amplitude = as<double>(v, "amplitude"); }},
        {"linear_amplitude", [](RunConfig& c, const Json& v) { c.chart.linear_amplitude = as<double>(v, "linear_amplitude"); }},
        {"custom", [](RunConfig& c, const Json& v) { c.chart.custom = as<std::vector<std::vector<double>>>(v, "custom"); }},
        {"p", [](RunConfig& c, const Json& v) { c.p = exponent_text(v, "p"); }},
        {"q", [](RunConfig& c, const Json& v) { c.q = exponent_text(v, "q"); }},
        {"s", [](RunConfig& c, const Json& v) { c.s = exponent_text(v, "s"); }},
        {"triple", [](RunConfig& c, const Json& v) { c.triple = list_text(v, "triple"); }},
        {"dual", [](RunConfig& c, const Json& v) { c.dual = list_text(v, "dual"); }},
        {"ensemble", [](RunConfig& c, const Json& v) { c.ensemble = as<std::size_t>(v, "ensemble"); }},
        {"seed", [](RunConfig& c, const Json& v) { c.seed = as<std::uint64_t>(v, "seed"); }},
        {"steps", [](RunConfig& c, const Json& v) { c.steps = as<int>(v, "steps"); }},
        {"t_max", [](RunConfig& c, const Json& v) { c.t_max = as<double>(v, "t_max"); }},
        {"t0", [](RunConfig& c, const Json& v) { c.t0 = as<double>(v, "t0"); }},
        {"record_every", [](RunConfig& c, const Json& v) { c.record_every = as<int>(v, "record_every"); }},
        {"modes", [](RunConfig& c, const Json& v) { c.modes = as<int>(v, "modes"); }},
        {"refine", [](RunConfig& c, const Json& v) { c.refine = as<bool>(v, "refine"); }},
        {"forcing", [](RunConfig& c, const Json& v) { c.forcing = as<bool>(v, "forcing"); }},
        {"zero_data", [](RunConfig& c, const Json& v) { c.zero_data = as<bool>(v, "zero_data"); }},
        {"grids", [](RunConfig& c, const Json& v) { c.grids = as<std::vector<int>>(v, "grids"); }},
        {"x", [](RunConfig& c, const Json& v) { c.x = as<double>(v, "x"); }},
        {"k", [](RunConfig& c, const Json& v) { c.k = as<double>(v, "k"); }},
        {"epsilon", [](RunConfig& c, const Json& v) { c.epsilon = as<double>(v, "epsilon"); }},
        {"auto_epsilon", [](RunConfig& c, const Json& v) { c.auto_epsilon = as<bool>(v, "auto_epsilon"); }},
        {"max_iter", [](RunConfig& c, const Json& v) { c.max_iter = as<int>(v, "max_iter"); }},
        {"tol", [](RunConfig& c, const Json& v) { c.tol = as<double>(v, "tol"); }},
        {"table_u", [](RunConfig& c, const Json& v) { c.table_u = as<std::vector<double>>(v, "table_u"); }},
        {"table_f", [](RunConfig& c, const Json& v) { c.table_f = as<std::vector<double>>(v, "table_f"); }},
        {"output", [](RunConfig& c, const Json& v) { c.output = as<std::string>(v, "output"); }},
        {"out_dir", [](RunConfig& c, const Json& v) { c.out_dir = as<std::string>(v, "out_dir"); }},
    };
    return table;
}

}  // namespace

void apply_json(RunConfig& cfg, const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    const std::string expected = cfg.subcommand;
    for (const auto& [key, value] : doc.items()) {
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(cfg, value);
    }
    if (!expected.empty() && cfg.subcommand != expected) {
        throw ConfigError("config is for '" + cfg.subcommand + "', not '" + expected + "'");
    }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed config '" + path + "': " + e.what());
    }
    apply_json(base, doc);
    return base;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["subcommand"] = cfg.subcommand;
    j["chart"] = cfg.chart.name;
    j["n"] = cfg.chart.n;
    j["section"] = section_name(cfg.chart.section);
    j["grid"] = cfg.chart.grid;
    j["amplitude"] = cfg.chart.amplitude;
    j["linear_amplitude"] = cfg.chart.linear_amplitude;
    j["custom"] = cfg.chart.custom;
    j["p"] = cfg.p;
    j["q"] = cfg.q;
    j["s"] = cfg.s;
    j["triple"] = cfg.triple;
    j["dual"] = cfg.dual;
    j["ensemble"] = cfg.ensemble;
    j["seed"] = cfg.seed;
    j["steps"] = cfg.steps;
    j["t_max"] = cfg.t_max.value_or(default_t_max(cfg.subcommand));
    j["t0"] = cfg.t0;
    j["record_every"] = cfg.record_every;
    j["modes"] = cfg.modes;
    j["refine"] = cfg.refine;
    j["forcing"] = cfg.forcing;
    j["zero_data"] = cfg.zero_data;
    j["grids"] = cfg.grids;
    j["x"] = cfg.x;
    j["k"] = cfg.k ? nlohmann::ordered_json(*cfg.k) : nlohmann::ordered_json();
    j["epsilon"] = cfg.epsilon ? nlohmann::ordered_json(*cfg.epsilon) : nlohmann::ordered_json();
    j["auto_epsilon"] = cfg.auto_epsilon;
    j["max_iter"] = cfg.max_iter;
    j["tol"] = cfg.tol;
    j["table_u"] = cfg.table_u;
    j["table_f"] = cfg.table_f;
    j["output"] = cfg.output;
    return j;
}

}  // namespace cklab
