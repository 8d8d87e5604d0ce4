#pragma once

#include <complex>
#include <optional>
#include <string>

#include "json.hpp"
#include "tdqho/model.hpp"
#include "tdqho/scenarios.hpp"
#include "tdqho/static_diag.hpp"

namespace tdqho {

/// {"kind": "constant" | "cosine" | "exponential" | "polynomial" | "tabulated", ...}
/// or a bare number. Throws ConfigError naming `key` on unknown kinds or fields.
TimeFunction time_function_from_json(const nlohmann::json& j, const std::string& key);
nlohmann::json to_json(const TimeFunction& f);

/// {"hbar", "horizon", "m", "omega", "alpha_x", "alpha_p", "alpha_xp", "alpha_0"}
QuadraticParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QuadraticParams& p);

StaticParams static_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StaticDiagResult& r);
nlohmann::json to_json(const ValidityReport& r);
nlohmann::json to_json(const MomentState& s);

struct InitialStateSpec {
    enum class Kind { Ground, Coherent, Moments };
    Kind kind = Kind::Ground;
    std::complex<double> alpha{0.0, 0.0};
    MomentState moments;
};

struct ScenarioPreset {
    std::string name;  // "driven" | "ck"
    DrivenSpec driven;
    CKSpec ck;
};

struct OracleSettings {
    bool enabled = false;
    int n = 64;
    std::optional<double> dt;  // default: 1e-3 reference periods
};

struct DensitySettings {
    bool enabled = false;
    int x_points = 201;
    int every = 20;
    std::optional<double> x_min, x_max;
};

struct RunConfig {
    std::optional<QuadraticParams> params;
    std::optional<ScenarioPreset> scenario;
    InitialStateSpec initial;
    int samples = 2000;
    std::optional<double> horizon;
    OracleSettings oracle;
    DensitySettings density;
    std::string out_dir = ".";
    double threshold = 1e-4;
    std::optional<double> abs_floor;
    std::string compare_mode = "oracle";  // "oracle" | "rwa"

    /// Throws ConfigError unless exactly one of params / scenario is set.
    void check() const;
    /// Effective parameter set with the horizon override applied.
    QuadraticParams resolved_params() const;
    /// Initial moments (ground / coherent relative to m(0), omega(0)).
    MomentState initial_moments() const;
    double oracle_dt() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
ScenarioPreset scenario_preset(const std::string& name);

/// Default horizons: six drive periods for "driven", one full effective
/// period (two uncertainty minima) for "ck".
double default_horizon(const ScenarioPreset& preset);

}  // namespace tdqho
