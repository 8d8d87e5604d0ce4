#include "tdqho/config.hpp"

#include <numbers>
#include <set>

#include "tdqho/errors.hpp"

namespace tdqho {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double number(const json& j, const std::string& field, const std::string& where, double fallback) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number()) throw ConfigError(where + "." + field + ": expected a number");
    return j.at(field).get<double>();
}

double required(const json& j, const std::string& field, const std::string& where) {
    if (!j.contains(field)) throw ConfigError(where + ": missing '" + field + "'");
    return number(j, field, where, 0.0);
}

std::vector<double> numbers(const json& j, const std::string& field, const std::string& where) {
    if (!j.contains(field) || !j.at(field).is_array())
        throw ConfigError(where + ": '" + field + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number()) throw ConfigError(where + "." + field + ": non-numeric entry");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

TimeFunction time_function_from_json(const json& j, const std::string& key) {
    if (j.is_number()) return TimeFunction::constant(j.get<double>());
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(key + ": expected a number or an object with a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        reject_unknown(j, {"kind", "value"}, key);
        return TimeFunction::constant(required(j, "value", key));
    }
    if (kind == "cosine") {
        reject_unknown(j, {"kind", "amplitude", "frequency", "phase", "offset"}, key);
        return TimeFunction::cosine(required(j, "amplitude", key), required(j, "frequency", key),
                                    number(j, "phase", key, 0.0), number(j, "offset", key, 0.0));
    }
    if (kind == "exponential") {
        reject_unknown(j, {"kind", "prefactor", "rate", "offset"}, key);
        return TimeFunction::exponential(required(j, "prefactor", key), required(j, "rate", key),
                                         number(j, "offset", key, 0.0));
    }
    if (kind == "polynomial") {
        reject_unknown(j, {"kind", "coefficients"}, key);
        return TimeFunction::polynomial(numbers(j, "coefficients", key));
    }
    if (kind == "tabulated") {
        reject_unknown(j, {"kind", "times", "values", "order"}, key);
        const int order = static_cast<int>(number(j, "order", key, 3.0));
        try {
            return TimeFunction::tabulated(numbers(j, "times", key), numbers(j, "values", key), order);
        } catch (const DomainError& e) {
            throw ConfigError(key + ": " + e.what());
        }
    }
    throw ConfigError(key + ": unknown kind '" + kind + "'");
}

json to_json(const TimeFunction& f) {
    json j;
    j["kind"] = f.kind_name();
    std::visit(
        [&j](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, TimeFunction::Constant>) {
                j["value"] = k.value;
            } else if constexpr (std::is_same_v<K, TimeFunction::Cosine>) {
                j["amplitude"] = k.amplitude;
                j["frequency"] = k.frequency;
                j["phase"] = k.phase;
                j["offset"] = k.offset;
            } else if constexpr (std::is_same_v<K, TimeFunction::Exponential>) {
                j["prefactor"] = k.prefactor;
                j["rate"] = k.rate;
                j["offset"] = k.offset;
            } else if constexpr (std::is_same_v<K, TimeFunction::Polynomial>) {
                j["coefficients"] = k.coefficients;
            } else {
                j["times"] = k.times;
                j["values"] = k.values;
                j["order"] = k.order;
            }
        },
        f.kind());
    return j;
}

QuadraticParams params_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("params: expected an object");
    reject_unknown(j, {"hbar", "horizon", "m", "omega", "alpha_x", "alpha_p", "alpha_xp", "alpha_0"},
                   "params");
    QuadraticParams p;
    p.hbar = number(j, "hbar", "params", 1.0);
    p.horizon = number(j, "horizon", "params", 1.0);
    if (!(p.hbar > 0.0)) throw ConfigError("params.hbar: must be positive");
    if (!(p.horizon > 0.0)) throw ConfigError("params.horizon: must be positive");
    auto field = [&](const char* key, TimeFunction& target) {
        if (j.contains(key)) target = time_function_from_json(j.at(key), key);
    };
    field("m", p.m);
    field("omega", p.omega);
    field("alpha_x", p.alpha_x);
    field("alpha_p", p.alpha_p);
    field("alpha_xp", p.alpha_xp);
    field("alpha_0", p.alpha_0);
    return p;
}

json to_json(const QuadraticParams& p) {
    return {{"hbar", p.hbar},           {"horizon", p.horizon},         {"m", to_json(p.m)},
            {"omega", to_json(p.omega)}, {"alpha_x", to_json(p.alpha_x)}, {"alpha_p", to_json(p.alpha_p)},
            {"alpha_xp", to_json(p.alpha_xp)}, {"alpha_0", to_json(p.alpha_0)}};
}

StaticParams static_params_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("static params: expected an object");
    reject_unknown(j, {"m", "omega", "alpha_x", "alpha_p", "alpha_xp", "alpha_0"}, "static params");
    StaticParams s;
    s.m = number(j, "m", "static params", 1.0);
    s.omega = number(j, "omega", "static params", 1.0);
    s.alpha_x = number(j, "alpha_x", "static params", 0.0);
    s.alpha_p = number(j, "alpha_p", "static params", 0.0);
    s.alpha_xp = number(j, "alpha_xp", "static params", 0.0);
    s.alpha_0 = number(j, "alpha_0", "static params", 0.0);
    return s;
}

json to_json(const StaticDiagResult& r) {
    return {{"beta_x", r.beta_x},         {"beta_p", r.beta_p},         {"l", r.l},
            {"theta_x_sq", r.theta_x_sq}, {"theta_p_sq", r.theta_p_sq}, {"M", r.M},
            {"Omega_sq", r.Omega_sq}};
}

json to_json(const ValidityReport& r) {
    json v = json::array();
    for (const auto& x : r.violations)
        v.push_back({{"t", x.t}, {"constraint", x.constraint}, {"value", x.value}});
    return {{"valid", r.valid}, {"samples", r.grid.size()}, {"violations", v}};
}

json to_json(const MomentState& s) {
    return {{"t", s.t},         {"mean_x", s.mean_x}, {"mean_p", s.mean_p},
            {"var_x", s.var_x}, {"var_p", s.var_p},   {"cov_xp", s.cov_xp}};
}

ScenarioPreset scenario_preset(const std::string& name) {
    ScenarioPreset s;
    s.name = name;
    if (name == "driven") {
        s.driven.strength = 0.1;
        s.driven.drive_frequency = 1.0;
    } else if (name == "ck") {
        s.ck.gamma = -0.25;
    } else {
        throw ConfigError("scenario: unknown name '" + name + "' (expected driven or ck)");
    }
    return s;
}

double default_horizon(const ScenarioPreset& preset) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (preset.name == "driven") return 6.0 * two_pi / preset.driven.omega;
    const double w = preset.ck.omega, g = preset.ck.gamma;
    const double w5sq = w * w - g * g / 4.0;
    return w5sq > 0.0 ? two_pi / std::sqrt(w5sq) : two_pi / w;
}

namespace {

ScenarioPreset scenario_from_json(const json& j, std::optional<double>& horizon) {
    if (j.is_string()) return scenario_preset(j.get<std::string>());
    if (!j.is_object() || !j.contains("name")) throw ConfigError("scenario: expected {\"name\": ...}");
    ScenarioPreset s = scenario_preset(j.at("name").get<std::string>());
    if (s.name == "driven") {
        reject_unknown(j, {"name", "m", "omega", "strength", "omega_d", "hbar", "horizon"}, "scenario");
        auto& d = s.driven;
        d.m = number(j, "m", "scenario", d.m);
        d.omega = number(j, "omega", "scenario", d.omega);
        d.strength = number(j, "strength", "scenario", d.strength);
        d.drive_frequency = number(j, "omega_d", "scenario", d.drive_frequency);
        d.hbar = number(j, "hbar", "scenario", d.hbar);
    } else {
        reject_unknown(j, {"name", "m", "omega", "gamma", "hbar", "horizon"}, "scenario");
        auto& c = s.ck;
        c.m = number(j, "m", "scenario", c.m);
        c.omega = number(j, "omega", "scenario", c.omega);
        c.gamma = number(j, "gamma", "scenario", c.gamma);
        c.hbar = number(j, "hbar", "scenario", c.hbar);
    }
    if (j.contains("horizon")) horizon = number(j, "horizon", "scenario", 0.0);
    return s;
}

InitialStateSpec initial_from_json(const json& j) {
    InitialStateSpec s;
    const std::string kind = j.is_string() ? j.get<std::string>() : j.value("kind", std::string());
    if (kind == "ground") return s;
    if (kind == "coherent") {
        s.kind = InitialStateSpec::Kind::Coherent;
        const auto& a = j.at("alpha");
        if (a.is_number()) s.alpha = a.get<double>();
        else if (a.is_array() && a.size() == 2) s.alpha = {a[0].get<double>(), a[1].get<double>()};
        else throw ConfigError("initial.alpha: expected a number or [re, im]");
        return s;
    }
    if (kind == "moments") {
        reject_unknown(j, {"kind", "mean_x", "mean_p", "var_x", "var_p", "cov_xp"}, "initial");
        s.kind = InitialStateSpec::Kind::Moments;
        s.moments.mean_x = number(j, "mean_x", "initial", 0.0);
        s.moments.mean_p = number(j, "mean_p", "initial", 0.0);
        s.moments.var_x = required(j, "var_x", "initial");
        s.moments.var_p = required(j, "var_p", "initial");
        s.moments.cov_xp = number(j, "cov_xp", "initial", 0.0);
        return s;
    }
    throw ConfigError("initial: unknown kind '" + kind + "'");
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    RunConfig c;
    // a bare parameter document is accepted as {"params": doc}
    if (j.contains("m") || j.contains("omega") || j.contains("alpha_x") || j.contains("alpha_p") ||
        j.contains("alpha_xp") || j.contains("alpha_0")) {
        c.params = params_from_json(j);
        return c;
    }
    reject_unknown(j, {"params", "scenario", "initial", "grid", "oracle", "output", "density",
                       "threshold", "abs_floor", "mode"},
                   "config");
    try {
        if (j.contains("params")) c.params = params_from_json(j.at("params"));
        if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"), c.horizon);
        if (j.contains("initial")) c.initial = initial_from_json(j.at("initial"));
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            reject_unknown(g, {"samples", "horizon"}, "grid");
            c.samples = static_cast<int>(number(g, "samples", "grid", c.samples));
            if (g.contains("horizon")) c.horizon = number(g, "horizon", "grid", 0.0);
        }
        if (j.contains("oracle")) {
            const auto& o = j.at("oracle");
            reject_unknown(o, {"enabled", "n", "dt"}, "oracle");
            c.oracle.enabled = o.value("enabled", true);
            c.oracle.n = static_cast<int>(number(o, "n", "oracle", c.oracle.n));
            if (o.contains("dt")) c.oracle.dt = number(o, "dt", "oracle", 0.0);
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            reject_unknown(o, {"dir"}, "output");
            c.out_dir = o.value("dir", c.out_dir);
        }
        if (j.contains("density")) {
            const auto& d = j.at("density");
            reject_unknown(d, {"enabled", "x_points", "every", "x_min", "x_max"}, "density");
            c.density.enabled = d.value("enabled", true);
            c.density.x_points = static_cast<int>(number(d, "x_points", "density", c.density.x_points));
            c.density.every = static_cast<int>(number(d, "every", "density", c.density.every));
            if (d.contains("x_min")) c.density.x_min = number(d, "x_min", "density", 0.0);
            if (d.contains("x_max")) c.density.x_max = number(d, "x_max", "density", 0.0);
        }
        c.threshold = number(j, "threshold", "config", c.threshold);
        if (j.contains("abs_floor")) c.abs_floor = number(j, "abs_floor", "config", 0.0);
        if (j.contains("mode")) c.compare_mode = j.at("mode").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

void RunConfig::check() const {
    if (params.has_value() == scenario.has_value())
        throw ConfigError("config: exactly one of 'params' or 'scenario' must be given");
    if (samples < 2) throw ConfigError("grid.samples: need at least 2");
    if (horizon && !(*horizon > 0.0)) throw ConfigError("grid.horizon: must be positive");
    if (oracle.n < 4) throw ConfigError("oracle.n: need at least 4 levels");
    if (oracle.dt && !(*oracle.dt > 0.0)) throw ConfigError("oracle.dt: must be positive");
    if (!(threshold > 0.0)) throw ConfigError("threshold: must be positive");
    if (compare_mode != "oracle" && compare_mode != "rwa")
        throw ConfigError("mode: expected 'oracle' or 'rwa'");
    if (density.x_points < 2 || density.every < 1) throw ConfigError("density: bad grid settings");
}

QuadraticParams RunConfig::resolved_params() const {
    check();
    if (params) {
        QuadraticParams p = *params;
        if (horizon) p.horizon = *horizon;
        return p;
    }
    const double T = horizon.value_or(default_horizon(*scenario));
    if (scenario->name == "driven") {
        DrivenSpec d = scenario->driven;
        d.horizon = T;
        return driven_params(d);
    }
    CKSpec c = scenario->ck;
    c.horizon = T;
    return ck_params(c);
}

MomentState RunConfig::initial_moments() const {
    const QuadraticParams p = resolved_params();
    const double m0 = p.m.value(0.0), w0 = p.omega.value(0.0);
    switch (initial.kind) {
        case InitialStateSpec::Kind::Ground:
            return MomentState::ground(m0, w0, p.hbar);
        case InitialStateSpec::Kind::Coherent: {
            const double mw = m0 * w0;
            return MomentState::coherent(m0, w0, std::sqrt(2.0 * p.hbar / mw) * initial.alpha.real(),
                                         std::sqrt(2.0 * mw * p.hbar) * initial.alpha.imag(), p.hbar);
        }
        case InitialStateSpec::Kind::Moments:
            if (!initial.moments.physical(p.hbar))
                throw ConfigError("initial: moments violate the uncertainty bound");
            return initial.moments;
    }
    return {};
}

double RunConfig::oracle_dt() const {
    if (oracle.dt) return *oracle.dt;
    const QuadraticParams p = resolved_params();
    return 1e-3 * 2.0 * std::numbers::pi / p.omega.value(0.0);
}

}  // namespace tdqho
