#include "acldp/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "acldp/action.hpp"
#include "acldp/energy.hpp"
#include "acldp/errors.hpp"
#include "acldp/io.hpp"
#include "acldp/ldp.hpp"
#include "acldp/spde.hpp"

#ifndef ACLDP_VERSION
#define ACLDP_VERSION "unknown"
#endif

namespace acldp {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(std::string const& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text)
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string version_string() { return "acldp " ACLDP_VERSION; }

int thread_count(ExperimentConfig const& cfg)
{
    if (char const* env = std::getenv("ACLDP_THREADS"))
    {
        char* end = nullptr;
        long const v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<int>(v);
    }
    return cfg.threads;
}

std::vector<std::string> const& run_commands()
{
    static std::vector<std::string> const c{"profile", "energy", "flow", "sde", "invariant", "action", "mam", "ldp-tail"};
    return c;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Context
{
    ExperimentConfig cfg;
    Domain d;
    fs::path dir;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    std::ostream& log;

    bool wants(std::string const& format) const
    {
        return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
    }

    void csv(std::string const& name, CsvTable const& t)
    {
        if (!wants("csv"))
            return;
        write_csv((dir / name).string(), t);
        outputs.push_back(name);
    }

    void data_json(std::string const& name, json const& j)
    {
        if (!wants("json"))
            return;
        write_json((dir / name).string(), j);
        outputs.push_back(name);
    }

    void field(std::string const& name, Field const& f)
    {
        if (!wants("csv"))
            return;
        write_field_csv((dir / name).string(), d, f);
        outputs.push_back(name);
    }

    void path(std::string const& name, Path const& p)
    {
        if (!wants("csv"))
            return;
        write_path_csv((dir / name).string(), d, p);
        outputs.push_back(name);
    }
};

double h1_distance(Domain const& d, Field const& a, Field const& b)
{
    Field diff = a;
    for (std::size_t j = 0; j < diff.values.size(); ++j)
        diff.values[j] -= b.values[j];
    return std::sqrt(h1_norm_squared(d, diff));
}

void cmd_profile(Context& c)
{
    Profile const p = compute_profile(c.d);
    ProfileEnergy const pe = profile_energy(c.d, p);
    CsvTable t;
    t.header = {"xi", "m", "m_minus_psi"};
    auto const grid = c.d.grid();
    auto const psi = c.d.ramp();
    for (int j = 0; j < c.d.size(); ++j)
        t.rows.push_back({grid[j], p.m.values[j], p.m.values[j] - psi[j]});
    c.csv("profile.csv", t);
    c.data_json("profile.json", {{"L", c.cfg.L},
                                 {"n", c.cfg.n},
                                 {"e_L", p.e_L},
                                 {"energy_value", p.energy_value},
                                 {"energy_direct", pe.direct},
                                 {"relative_gap", pe.relative_gap},
                                 {"first_integral_defect", first_integral_defect(c.d, p)}});
    c.log << "e_L = " << format_number(p.e_L) << ", E_L(m_L) = " << format_number(p.energy_value) << "\n";
}

void cmd_energy(Context& c, std::string const& input)
{
    if (input.empty())
        throw ConfigError("energy: --input field.csv is required");
    Profile const p = compute_profile(c.d);
    Field const u = read_field_csv(input, c.d);
    EnergyReport const r = energy_report(c.d, u, p);
    json j{{"energy_star", r.value},
           {"gradient_norm", r.gradient_norm},
           {"dist_to_profile", profile_distance(c.d, u, p)},
           {"proximity_bound", r.proximity ? json(*r.proximity) : json(nullptr)}};
    c.data_json("energy.json", j);
    c.log << "E* = " << format_number(r.value) << "\n";
}

Field initial_state(Context const& c, Profile const& p)
{
    if (c.cfg.flow_init == "zero")
        return zero_field(c.d);
    if (c.cfg.flow_init == "profile")
        return remove_ramp(c.d, p.m);
    return read_field_csv(c.cfg.flow_init, c.d);
}

void cmd_flow(Context& c)
{
    Profile const p = compute_profile(c.d);
    FlowOptions o;
    o.dt = c.cfg.flow_dt;
    o.T = c.cfg.flow_T;
    o.stop_tol = c.cfg.flow_stop_tol;
    o.save_every = std::max(1, static_cast<int>(std::lround(0.01 / o.dt)));
    FlowResult const r = gradient_flow(c.d, initial_state(c, p), o);
    CsvTable t;
    t.header = {"t", "energy_star", "grad_norm", "dist_to_profile"};
    for (int i = 0; i <= r.path.steps(); ++i)
    {
        Field const& z = r.path.fields[i];
        t.rows.push_back({r.path.time(i), energy_star(c.d, z, p), resolved_gradient_norm(c.d, z),
                          profile_distance(c.d, z, p)});
    }
    c.csv("flow.csv", t);
    c.field("final_state.csv", r.final_state);
    Field const target = remove_ramp(c.d, p.m);
    c.data_json("flow.json", {{"t_final", r.t_final},
                              {"converged", r.converged},
                              {"energy_star_final", energy_star(c.d, r.final_state, p)},
                              {"dist_to_profile", profile_distance(c.d, r.final_state, p)},
                              {"h1_distance", h1_distance(c.d, r.final_state, target)}});
}

SdeParams sde_params(ExperimentConfig const& cfg, double eps)
{
    SdeParams s;
    s.eps = eps;
    s.dt = cfg.dt;
    s.modes_noise = cfg.modes_noise;
    s.lambda = cfg.lambda;
    s.seed = cfg.seed;
    s.blowup = cfg.blowup;
    s.kstar = cfg.kstar;
    s.pstar = cfg.pstar;
    return s;
}

void cmd_sde(Context& c)
{
    Profile const p = compute_profile(c.d);
    SdeParams s = sde_params(c.cfg, c.cfg.eps.front());
    s.record_every = std::max(1, static_cast<int>(std::lround(0.01 / s.dt)));
    Trajectory const tr = sde_run(c.d, zero_field(c.d), c.cfg.noise(), s, c.cfg.T, &p);
    CsvTable t;
    t.header = {"t", "sup_norm", "dist_to_profile", "energy_star", "sobolev_norm"};
    for (auto const& o : tr.observables)
        t.rows.push_back({o.t, o.sup_norm, o.dist_to_profile, o.energy_star, o.sobolev_norm});
    c.csv("trajectory.csv", t);
    c.field("final_state.csv", tr.final_state);
    c.data_json("sde.json", {{"eps", s.eps},
                             {"dt", s.dt},
                             {"T", c.cfg.T},
                             {"seed", s.seed},
                             {"min_intensity", tr.min_intensity},
                             {"final_sup_norm", tr.observables.back().sup_norm},
                             {"final_dist_to_profile", tr.observables.back().dist_to_profile}});
}

SamplingPlan sampling_plan(Context& c)
{
    SamplingPlan plan;
    plan.stride = c.cfg.stride;
    plan.samples_per_chain = c.cfg.samples_per_chain;
    plan.n_chains = c.cfg.n_chains;
    plan.threads = thread_count(c.cfg);
    try
    {
        plan.relaxation = relaxation_time(c.d);
    }
    catch (NumericalError const& e)
    {
        if (c.cfg.burn_in < 0.0)
            throw NumericalError(std::string("automatic burn-in needs the relaxation time: ") + e.what() +
                                 "; set sde.burn_in explicitly");
        c.warnings.push_back(std::string("relaxation time unavailable: ") + e.what());
    }
    plan.burn_in = c.cfg.burn_in < 0.0 ? 10.0 * plan.relaxation : c.cfg.burn_in;
    return plan;
}

double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    double const pos = q * (v.size() - 1);
    auto const lo = static_cast<std::size_t>(std::floor(pos));
    auto const hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

json interval_json(Interval const& i) { return json{{"lo", i.lo}, {"hi", i.hi}}; }

void add_samples(CsvTable& t, EmpiricalMeasure const& em)
{
    for (auto const& s : em.samples)
        t.rows.push_back({em.eps, static_cast<double>(s.chain), s.obs.t, s.obs.sup_norm, s.obs.dist_to_profile,
                          s.obs.energy_star, s.obs.sobolev_norm});
}

CsvTable samples_table()
{
    CsvTable t;
    t.header = {"eps", "chain", "t", "sup_norm", "dist_to_profile", "energy_star", "sobolev_norm"};
    return t;
}

void cmd_invariant(Context& c)
{
    Profile const p = compute_profile(c.d);
    SamplingPlan const plan = sampling_plan(c);
    CsvTable samples = samples_table();
    json summary = json::array();
    for (double eps : c.cfg.eps)
    {
        EmpiricalMeasure const em = sample_invariant(c.d, c.cfg.noise(), sde_params(c.cfg, eps), plan, p);
        add_samples(samples, em);
        for (auto const& w : em.warnings)
            c.warnings.push_back(w);
        std::vector<double> sup, dist, en, sob;
        for (auto const& s : em.samples)
        {
            sup.push_back(s.obs.sup_norm);
            dist.push_back(s.obs.dist_to_profile);
            en.push_back(s.obs.energy_star);
            sob.push_back(s.obs.sobolev_norm);
        }
        auto mean = [](std::vector<double> const& v) {
            double s = 0.0;
            for (double x : v)
                s += x;
            return s / v.size();
        };
        json q;
        for (double level : {0.05, 0.25, 0.5, 0.75, 0.95})
        {
            std::ostringstream key;
            key << "q" << std::setw(2) << std::setfill('0') << static_cast<int>(std::lround(level * 100));
            q[key.str()] = {{"dist_to_profile", quantile(dist, level)}, {"sobolev_norm", quantile(sob, level)}};
        }
        json tails = json::array();
        if (em.samples.size() >= 100)
            for (double delta : {0.1, 0.2, 0.3, 0.4, 0.5})
            {
                TailEstimate const te = tail_probability(em, delta);
                tails.push_back({{"delta", delta}, {"count", te.count}, {"p_hat", te.p_hat}, {"ci", interval_json(te.ci)}});
            }
        summary.push_back({{"eps", eps},
                           {"samples", em.samples.size()},
                           {"burn_in", em.burn_in},
                           {"stride", em.stride},
                           {"min_intensity", em.min_intensity},
                           {"mean",
                            {{"sup_norm", mean(sup)},
                             {"dist_to_profile", mean(dist)},
                             {"energy_star", mean(en)},
                             {"sobolev_norm", mean(sob)}}},
                           {"quantiles", q},
                           {"tail_counts", tails}});
    }
    c.csv("samples.csv", samples);
    c.data_json("summary.json", {{"relaxation_time", number_or_null(plan.relaxation)}, {"measures", summary}});
}

json sandwich_json(Context const& c, Profile const& p, Path const& path, double value)
{
    NoiseModel const nm = c.cfg.noise();
    double const e_end = energy_star(c.d, path.fields.back(), p);
    double const e_start = energy_star(c.d, path.fields.front(), p);
    double const C = lower_sandwich_constant(path, nm);
    double const tol = 0.05;
    double const g0 = nm.g0;
    return json{{"energy_star", e_end},
                {"energy_star_start", e_start},
                {"upper",
                 {{"lhs", g0 * value}, {"rhs", 2.0 * e_end}, {"tolerance", tol}, {"holds", g0 * value <= 2.0 * e_end * (1.0 + tol)}}},
                {"upper_g0_squared",
                 {{"lhs", g0 * g0 * value},
                  {"rhs", 2.0 * e_end},
                  {"tolerance", tol},
                  {"holds", g0 * g0 * value <= 2.0 * e_end * (1.0 + tol)}}},
                {"lower",
                 {{"constant", C},
                  {"lhs", e_end - e_start},
                  {"rhs", C * value},
                  {"tolerance", tol},
                  {"holds", e_end - e_start <= C * value * (1.0 + tol)}}}};
}

void cmd_action(Context& c, std::string const& input)
{
    if (input.empty())
        throw ConfigError("action: --path path.csv is required");
    Profile const p = compute_profile(c.d);
    Path const path = read_path_csv(input, c.d);
    ActionResult const r = action(c.d, path, c.cfg.noise());
    c.data_json("action.json", {{"value", r.value},
                                {"iterations", 0},
                                {"converged", true},
                                {"steps", path.steps()},
                                {"horizon", path.horizon()},
                                {"sandwich_check", sandwich_json(c, p, path, r.value)}});
    CsvTable t;
    t.header = {"t_mid", "residual_norm"};
    for (int i = 0; i < path.steps(); ++i)
        t.rows.push_back({path.time(i) + 0.5 * path.dt, r.residual_series[i]});
    c.csv("residuals.csv", t);
    c.log << "action = " << format_number(r.value) << "\n";
}

void cmd_mam(Context& c, std::string const& input)
{
    if (input.empty())
        throw ConfigError("mam: --target zeta.csv is required");
    Profile const p = compute_profile(c.d);
    Field const zeta = read_field_csv(input, c.d);
    MamOptions o;
    o.max_iterations = c.cfg.action_max_iter;
    o.function_tolerance = c.cfg.action_tol;
    o.gradient_tolerance = c.cfg.action_tol;
    LadderResult const r = mam_ladder(c.d, p, zeta, c.cfg.noise(), c.cfg.action_T0, c.cfg.action_rungs, c.cfg.action_dt, o);
    if (!r.best.converged)
        c.warnings.push_back("minimum action: best rung did not converge (" + r.best.message + ")");
    c.data_json("mam.json", {{"value", r.best.value},
                             {"iterations", r.best.iterations},
                             {"converged", r.best.converged},
                             {"message", r.best.message},
                             {"horizon", r.best.path.horizon()},
                             {"ladder",
                              {{"horizons", r.horizons}, {"values", r.values}, {"initial_values", r.initial_values}}},
                             {"sandwich_check", sandwich_json(c, p, r.best.path, r.best.value)}});
    c.path("mam_path.csv", r.best.path);
    c.log << "minimum action = " << format_number(r.best.value) << "\n";
}

json tail_report_json(TailReport const& r)
{
    json cells = json::array();
    for (auto const& e : r.p_hat)
        cells.push_back({{"eps", e.eps},
                         {"delta", e.delta},
                         {"count", e.count},
                         {"n", e.n},
                         {"p_hat", e.p_hat},
                         {"ci", interval_json(e.ci)},
                         {"upper_bound_only", e.upper_bound_only}});
    return json{{"eps_grid", r.eps_grid},
                {"delta", r.delta},
                {"p_hat", cells},
                {"slope", r.slope ? json(*r.slope) : json(nullptr)},
                {"r2", r.r2 ? json(*r.r2) : json(nullptr)},
                {"flagged", r.flagged}};
}

void cmd_ldp_tail(Context& c)
{
    Profile const p = compute_profile(c.d);
    ConcentrationPlan plan;
    plan.eps = c.cfg.eps;
    plan.delta = c.cfg.ldp_delta;
    plan.R = c.cfg.ldp_R;
    plan.min_count = c.cfg.ldp_min_count;
    plan.sde = sde_params(c.cfg, 0.0);
    plan.sampling = sampling_plan(c);
    ConcentrationResult const r = run_concentration(c.d, c.cfg.noise(), p, plan);
    for (auto const& w : r.warnings)
        c.warnings.push_back(w);

    CsvTable samples = samples_table();
    for (auto const& em : r.measures)
        add_samples(samples, em);
    c.csv("samples.csv", samples);

    CsvTable tail;
    tail.header = {"eps", "delta", "p_hat", "lo", "hi"};
    for (auto const* rep : {&r.tail_delta, &r.tail_2delta})
        for (auto const& e : rep->p_hat)
            tail.rows.push_back({e.eps, e.delta, e.p_hat, e.ci.lo, e.ci.hi});
    c.csv("tail.csv", tail);

    json cells = json::array();
    for (auto const& t : r.tightness)
        cells.push_back({{"eps", t.eps},
                         {"count", t.count},
                         {"n", t.n},
                         {"fraction", t.fraction},
                         {"sigma", t.sigma},
                         {"ci", interval_json(t.ci)}});
    c.data_json("tail_report.json",
                {{"reports", json::array({tail_report_json(r.tail_delta), tail_report_json(r.tail_2delta)})},
                 {"delta", r.tail_delta.delta},
                 {"scaling_ratio", r.scaling_ratio ? json(*r.scaling_ratio) : json(nullptr)},
                 {"tightness",
                  {{"R", r.R}, {"kstar", c.cfg.kstar}, {"pstar", c.cfg.pstar}, {"cells", cells}, {"monotone", r.tightness_monotone}}},
                 {"warnings", r.warnings}});
}

void dispatch(Context& c, RunRequest const& req)
{
    std::string const& cmd = req.command;
    if (cmd == "profile")
        cmd_profile(c);
    else if (cmd == "energy")
        cmd_energy(c, req.input);
    else if (cmd == "flow")
        cmd_flow(c);
    else if (cmd == "sde")
        cmd_sde(c);
    else if (cmd == "invariant")
        cmd_invariant(c);
    else if (cmd == "action")
        cmd_action(c, req.input);
    else if (cmd == "mam")
        cmd_mam(c, req.input);
    else if (cmd == "ldp-tail")
        cmd_ldp_tail(c);
    else
        throw ConfigError("unknown command '" + cmd + "'");
}

std::string hex(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace

RunOutcome run(RunRequest const& request, std::ostream& log)
{
    auto const start = std::chrono::steady_clock::now();
    RunOutcome out;
    ExperimentConfig cfg;
    try
    {
        cfg = request.config_path.empty() ? ExperimentConfig{} : load_config(request.config_path);
        for (auto const& [k, v] : request.overrides)
            set_config_value(cfg, k, v);
        validate_config(cfg);
        if (std::find(run_commands().begin(), run_commands().end(), request.command) == run_commands().end())
            throw ConfigError("unknown command '" + request.command + "'");
        fs::create_directories(cfg.out_dir);
    }
    catch (ConfigError const& e)
    {
        out.exit_code = 2;
        out.message = e.what();
        log << "configuration error: " << e.what() << "\n";
        return out;
    }
    catch (std::exception const& e)
    {
        out.exit_code = 2;
        out.message = e.what();
        log << "configuration error: " << e.what() << "\n";
        return out;
    }

    std::string const resolved = resolved_config_text(cfg);
    Context c{cfg, cfg.domain(), fs::path(cfg.out_dir), {}, {}, log};
    std::string error;
    try
    {
        dispatch(c, request);
    }
    catch (ConfigError const& e)
    {
        out.exit_code = 2;
        error = e.what();
    }
    catch (NumericalError const& e)
    {
        out.exit_code = 1;
        error = e.what();
    }
    catch (std::exception const& e)
    {
        out.exit_code = 1;
        error = e.what();
    }

    bool const partial = out.exit_code != 0;
    if (!partial || !c.outputs.empty())
    {
        {
            std::ofstream f(c.dir / "config.resolved", std::ios::binary);
            f << resolved;
        }
        double const wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json manifest{{"command", request.command},
                      {"config_hash", "fnv1a64:" + hex(fnv1a(resolved))},
                      {"version", version_string()},
                      {"wall_time_seconds", wall},
                      {"seed", cfg.seed},
                      {"threads", thread_count(cfg)},
                      {"partial", partial},
                      {"outputs", c.outputs},
                      {"warnings", c.warnings}};
        if (!request.input.empty())
            manifest["input"] = request.input;
        if (partial)
            manifest["error"] = error;
        write_json((c.dir / "manifest.json").string(), manifest);
    }
    for (auto const& w : c.warnings)
        log << "warning: " << w << "\n";
    if (partial)
        log << (out.exit_code == 2 ? "configuration error: " : "numerical failure: ") << error << "\n";
    out.message = error;
    out.outputs = c.outputs;
    return out;
}

}  // namespace acldp
