#include "tdqho/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "tdqho/errors.hpp"
#include "tdqho/scenarios.hpp"
#include "tdqho/static_diag.hpp"

namespace tdqho {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_row(std::ostream& out, const std::vector<double>& row) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
}

std::vector<double> moment_row(const MomentState& s) {
    return {s.t,      s.mean_x,          s.mean_p, std::sqrt(s.var_x), std::sqrt(s.var_p),
            s.cov_xp, s.var_x * s.var_p};
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path);
    if (!f) throw ConfigError("output: cannot write " + path.string());
    return f;
}

std::vector<MomentState> pipeline_moments(const RunConfig& config, PipelineSolution* keep = nullptr) {
    const QuadraticParams p = config.resolved_params();
    const MomentState s0 = config.initial_moments();
    PipelineSolution sol = solve_pipeline(p, uniform_grid(p.horizon, config.samples));
    auto moments = propagate_series(sol, s0);
    if (keep) *keep = std::move(sol);
    return moments;
}

const std::vector<std::pair<std::string, double MomentState::*>>& compared_fields() {
    static const std::vector<std::pair<std::string, double MomentState::*>> f = {
        {"mean_x", &MomentState::mean_x}, {"mean_p", &MomentState::mean_p},
        {"var_x", &MomentState::var_x},   {"var_p", &MomentState::var_p},
        {"cov_xp", &MomentState::cov_xp}};
    return f;
}

}  // namespace

const std::vector<std::string>& moment_columns() {
    static const std::vector<std::string> cols = {
        "t", "mean_x", "mean_p", "sigma_x", "sigma_p", "cov_xp", "uncertainty_product", "A",
        "B", "D",      "E",      "rho",     "Phi",     "beta_x", "beta_p",              "global_phase"};
    return cols;
}

const std::vector<std::string>& oracle_columns() {
    static const std::vector<std::string> cols = {"norm", "top_population"};
    return cols;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_moment_csv(std::ostream& out, const PipelineSolution& sol,
                      const std::vector<MomentState>& moments) {
    write_header(out, moment_columns());
    for (Eigen::Index i = 0; i < sol.size(); ++i) {
        const auto c = coefficients(sol, i);
        auto row = moment_row(moments[static_cast<std::size_t>(i)]);
        row.insert(row.end(), {c.A, c.B, c.D, c.E, sol.ermakov.rho(i), sol.ermakov.Phi(i),
                               c.beta_x, c.beta_p, global_phase(sol.ermakov, i, sol.params.hbar)});
        write_row(out, row);
    }
}

void write_oracle_csv(std::ostream& out, const OracleRun& run) {
    auto cols = moment_columns();
    cols.insert(cols.end(), oracle_columns().begin(), oracle_columns().end());
    write_header(out, cols);
    for (std::size_t i = 0; i < run.moments.size(); ++i) {
        auto row = moment_row(run.moments[i]);
        row.resize(moment_columns().size(), kNaN);
        row.push_back(run.norm[i]);
        row.push_back(run.top_population[i]);
        write_row(out, row);
    }
}

void write_density_csv(std::ostream& out, const std::vector<MomentState>& moments,
                       const DensitySettings& settings) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : moments) {
        const double w = 6.0 * std::sqrt(s.var_x);
        lo = std::min(lo, s.mean_x - w);
        hi = std::max(hi, s.mean_x + w);
    }
    lo = settings.x_min.value_or(lo);
    hi = settings.x_max.value_or(hi);
    if (!(hi > lo)) throw ConfigError("density: x_max must exceed x_min");
    std::vector<double> xs(static_cast<std::size_t>(settings.x_points));
    for (std::size_t k = 0; k < xs.size(); ++k)
        xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(xs.size() - 1);

    out << "t,x,value\n";
    for (std::size_t i = 0; i < moments.size(); ++i) {
        if (i % static_cast<std::size_t>(settings.every) != 0 && i + 1 != moments.size()) continue;
        const auto rho = gaussian_density(moments[i], xs);
        for (std::size_t k = 0; k < xs.size(); ++k)
            write_row(out, {moments[i].t, xs[k], rho[k]});
    }
}

RunSummary summarize(const std::vector<MomentState>& moments) {
    RunSummary s;
    s.min_uncertainty = std::numeric_limits<double>::infinity();
    for (const auto& m : moments) {
        const double u = m.var_x * m.var_p;
        s.max_uncertainty = std::max(s.max_uncertainty, u);
        s.min_uncertainty = std::min(s.min_uncertainty, u);
        s.max_abs_mean_x = std::max(s.max_abs_mean_x, std::abs(m.mean_x));
        s.max_abs_mean_p = std::max(s.max_abs_mean_p, std::abs(m.mean_p));
        s.max_sigma_x = std::max(s.max_sigma_x, std::sqrt(m.var_x));
        s.max_sigma_p = std::max(s.max_sigma_p, std::sqrt(m.var_p));
    }
    return s;
}

json to_json(const RunSummary& s) {
    return {{"max_uncertainty", s.max_uncertainty}, {"min_uncertainty", s.min_uncertainty},
            {"max_abs_mean_x", s.max_abs_mean_x},   {"max_abs_mean_p", s.max_abs_mean_p},
            {"max_sigma_x", s.max_sigma_x},         {"max_sigma_p", s.max_sigma_p}};
}

EvolveResult evolve(const RunConfig& config) {
    EvolveResult r;
    r.moments = pipeline_moments(config, &r.solution);
    r.summary = summarize(r.moments);
    return r;
}

int ComparisonReport::exit_code() const {
    if (!reliable) return kExitUnreliable;
    return pass ? kExitOk : kExitComparison;
}

json to_json(const ComparisonReport& r) {
    json series = json::array();
    for (const auto& s : r.series)
        series.push_back({{"name", s.name},
                          {"max_abs_error", s.max_abs},
                          {"max_rel_error", s.max_rel},
                          {"t_at_max", s.t_at_max},
                          {"abs_tolerance", s.tolerance_abs},
                          {"pass", s.pass}});
    return {{"mode", r.mode},         {"threshold", r.threshold},
            {"pass", r.pass},         {"reliable", r.reliable},
            {"max_top_population", r.max_top_population}, {"series", series}};
}

ComparisonReport compare_moments(const std::vector<MomentState>& actual,
                                 const std::vector<MomentState>& reference, double rel,
                                 std::optional<double> abs_floor) {
    if (actual.size() != reference.size()) throw DomainError("compare: series lengths differ");
    ComparisonReport report;
    report.threshold = rel;
    double sup_vx = 0.0, sup_vp = 0.0;
    for (const auto& r : reference) {
        sup_vx = std::max(sup_vx, r.var_x);
        sup_vp = std::max(sup_vp, r.var_p);
    }
    for (const auto& [name, field] : compared_fields()) {
        SeriesError e;
        e.name = name;
        double sup = 0.0;
        for (const auto& r : reference) sup = std::max(sup, std::abs(r.*field));
        // natural scale keeps identically-zero series comparable
        double scale = std::sqrt(sup_vx * sup_vp);
        if (field == &MomentState::mean_x) scale = std::sqrt(sup_vx);
        if (field == &MomentState::mean_p) scale = std::sqrt(sup_vp);
        if (field == &MomentState::var_x) scale = sup_vx;
        if (field == &MomentState::var_p) scale = sup_vp;
        e.tolerance_abs = abs_floor.value_or(rel * std::max(sup, scale));
        for (std::size_t i = 0; i < actual.size(); ++i) {
            const double a = actual[i].*field, r = reference[i].*field;
            const double err = std::abs(a - r);
            if (!std::isnan(e.max_abs) && !(err <= e.max_abs)) {
                e.max_abs = err;
                e.t_at_max = reference[i].t;
            }
            if (std::abs(r) > e.tolerance_abs) e.max_rel = std::max(e.max_rel, err / std::abs(r));
            if (!(err <= std::max(rel * std::abs(r), e.tolerance_abs))) e.pass = false;
        }
        report.pass = report.pass && e.pass;
        report.series.push_back(e);
    }
    return report;
}

OracleRun run_oracle_only(const RunConfig& config) {
    const QuadraticParams p = config.resolved_params();
    const double m0 = p.m.value(0.0), w0 = p.omega.value(0.0);
    const FockOperators ops = build_operators(config.oracle.n, m0, w0, p.hbar);

    PreparedState prepared;
    switch (config.initial.kind) {
        case InitialStateSpec::Kind::Ground:
            prepared = ground_state(ops);
            break;
        case InitialStateSpec::Kind::Coherent:
            prepared = coherent_state(ops, config.initial.alpha);
            break;
        case InitialStateSpec::Kind::Moments:
            try {
                prepared = gaussian_state(ops, config.initial_moments());
            } catch (const DomainError& e) {
                throw ConfigError(std::string("initial: ") + e.what());
            }
            break;
    }
    OracleOptions opts;
    opts.dt = config.oracle_dt();
    OracleRun run = propagate_state(prepared.psi, p, uniform_grid(p.horizon, config.samples), ops, opts);
    if (prepared.truncated) run.reliable = false;
    return run;
}

CompareResult compare(const RunConfig& config) {
    CompareResult out;
    if (config.compare_mode == "rwa") {
        if (!config.scenario || config.scenario->name != "driven")
            throw ConfigError("mode rwa: needs the driven scenario");
        const MomentState s0 = config.initial_moments();
        const QuadraticParams p = config.resolved_params();
        DrivenSpec spec = config.scenario->driven;
        spec.horizon = p.horizon;
        const MomentState vac = MomentState::ground(spec.m, spec.omega, spec.hbar);
        if (std::abs(s0.var_x - vac.var_x) > 1e-12 * vac.var_x ||
            std::abs(s0.var_p - vac.var_p) > 1e-12 * vac.var_p || s0.cov_xp != 0.0)
            throw ConfigError("mode rwa: initial state must be coherent");
        const auto alpha0 = coherent_amplitude(spec, s0);
        for (double t : uniform_grid(p.horizon, config.samples)) {
            out.reference.push_back(driven_moments_exact(spec, s0, t));
            out.actual.push_back(driven_moments_rwa(spec, alpha0, t));
        }
        out.report = compare_moments(out.actual, out.reference, config.threshold, config.abs_floor);
        out.report.mode = "rwa";
        return out;
    }
    out.reference = pipeline_moments(config);
    const OracleRun run = run_oracle_only(config);
    out.actual = run.moments;
    out.report = compare_moments(out.actual, out.reference, config.threshold, config.abs_floor);
    out.report.mode = "oracle";
    out.report.reliable = run.reliable;
    out.report.max_top_population = run.max_top_population;
    return out;
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v;
    if (count == 1) return {lo};
    for (int k = 0; k < count; ++k) v.push_back(lo + (hi - lo) * k / (count - 1));
    return v;
}

SweepAxis parse_sweep_axis(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 4) throw ConfigError("sweep: expected param:lo:hi:count, got '" + text + "'");
    SweepAxis a;
    a.param = parts[0];
    try {
        std::size_t used = 0;
        a.lo = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("lo");
        a.hi = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("hi");
        a.count = std::stoi(parts[3], &used);
        if (used != parts[3].size()) throw std::invalid_argument("count");
    } catch (const std::exception&) {
        throw ConfigError("sweep: cannot parse '" + text + "'");
    }
    if (a.count < 1) throw ConfigError("sweep: count must be at least 1");
    return a;
}

namespace {

RunConfig with_sweep_value(const RunConfig& base, const std::string& param, double v) {
    RunConfig c = base;
    auto& s = *c.scenario;
    if (s.name == "driven") {
        if (param == "omega_d") s.driven.drive_frequency = v;
        else if (param == "strength") s.driven.strength = v;
        else if (param == "omega") s.driven.omega = v;
        else if (param == "m") s.driven.m = v;
        else throw ConfigError("sweep: driven scenario has no parameter '" + param + "'");
    } else {
        if (param == "gamma") s.ck.gamma = v;
        else if (param == "omega") s.ck.omega = v;
        else if (param == "m") s.ck.m = v;
        else throw ConfigError("sweep: ck scenario has no parameter '" + param + "'");
    }
    return c;
}

}  // namespace

std::vector<SweepPoint> sweep(const RunConfig& config, const SweepAxis& axis, unsigned workers) {
    config.check();
    if (!config.scenario) throw ConfigError("sweep: needs a scenario preset");
    const auto values = axis.values();
    // surface unknown parameter names before any work starts
    with_sweep_value(config, axis.param, values.front());

    std::vector<SweepPoint> points(values.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < values.size();) {
            SweepPoint& pt = points[k];
            pt.value = values[k];
            try {
                pt.summary = evolve(with_sweep_value(config, axis.param, values[k])).summary;
                pt.ok = true;
            } catch (const std::exception& e) {
                pt.message = e.what();
            }
        }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(values.size()));
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    return points;
}

void write_sweep_csv(std::ostream& out, const SweepAxis& axis, const std::vector<SweepPoint>& points) {
    out << axis.param
        << ",status,max_uncertainty,min_uncertainty,max_abs_mean_x,max_abs_mean_p,max_sigma_x,"
           "max_sigma_p,message\n";
    for (const auto& p : points) {
        out << format_number(p.value) << ',' << (p.ok ? "ok" : "error");
        const auto& s = p.summary;
        for (double v : {s.max_uncertainty, s.min_uncertainty, s.max_abs_mean_x, s.max_abs_mean_p,
                         s.max_sigma_x, s.max_sigma_p})
            out << ',' << (p.ok ? format_number(v) : "nan");
        std::string msg = p.message;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        out << ",\"" << msg << "\"\n";
    }
}

int run_validate(const RunConfig& config, std::ostream& out) {
    const ValidityReport report = validate(config.resolved_params());
    out << to_json(report).dump(2) << '\n';
    return report.valid ? kExitOk : kExitValidity;
}

int run_static_diag(const StaticParams& params, const std::string& branch, std::ostream& out) {
    StaticDiagResult r;
    if (branch == "theta_p_zero") r = diag_branch_theta_p_zero(params);
    else if (branch == "theta_x_zero") r = diag_branch_theta_x_zero(params);
    else throw ConfigError("branch: expected theta_p_zero or theta_x_zero");
    out << to_json(r).dump(2) << '\n';
    return kExitOk;
}

int run_evolve(const RunConfig& config, std::ostream& log) {
    const EvolveResult r = evolve(config);
    {
        auto f = open_output(config.out_dir, "moments.csv");
        write_moment_csv(f, r.solution, r.moments);
    }
    if (config.density.enabled) {
        auto f = open_output(config.out_dir, "density.csv");
        write_density_csv(f, r.moments, config.density);
    }
    log << to_json(r.summary).dump(2) << '\n';
    return kExitOk;
}

int run_oracle(const RunConfig& config, std::ostream& log) {
    const OracleRun run = run_oracle_only(config);
    auto f = open_output(config.out_dir, "oracle.csv");
    write_oracle_csv(f, run);
    log << json{{"steps", run.steps},
                {"max_top_population", run.max_top_population},
                {"reliable", run.reliable}}
               .dump(2)
        << '\n';
    return run.reliable ? kExitOk : kExitUnreliable;
}

int run_compare(const RunConfig& config, std::ostream& log) {
    const CompareResult r = compare(config);
    const bool rwa = r.report.mode == "rwa";
    const std::string ref = rwa ? "exact" : "pipeline";
    const std::string act = rwa ? "rwa" : "oracle";
    {
        auto f = open_output(config.out_dir, "compare.csv");
        f << "t";
        for (const auto& [name, field] : compared_fields())
            f << ',' << name << '_' << ref << ',' << name << '_' << act << ',' << name << "_abs_err";
        f << '\n';
        for (std::size_t i = 0; i < r.reference.size(); ++i) {
            std::vector<double> row{r.reference[i].t};
            for (const auto& [name, field] : compared_fields()) {
                const double a = r.actual[i].*field, b = r.reference[i].*field;
                row.insert(row.end(), {b, a, std::abs(a - b)});
            }
            write_row(f, row);
        }
    }
    const std::string text = to_json(r.report).dump(2);
    auto f = open_output(config.out_dir, "report.json");
    f << text << '\n';
    log << text << '\n';
    return r.report.exit_code();
}

int run_sweep(const RunConfig& config, const SweepAxis& axis, std::ostream& log) {
    const auto points = sweep(config, axis);
    auto f = open_output(config.out_dir, "sweep.csv");
    write_sweep_csv(f, axis, points);
    const auto failed = std::count_if(points.begin(), points.end(), [](const auto& p) { return !p.ok; });
    log << points.size() << " points, " << failed << " failed\n";
    return kExitOk;
}

}  // namespace tdqho
