#include "acldp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "acldp/errors.hpp"

namespace acldp {

namespace {

std::string trim(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v)
{
    char buf[64];
    auto const r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(std::string const& key, std::string const& text)
{
    std::string const t = trim(text);
    double v = 0.0;
    auto const r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

long long parse_int(std::string const& key, std::string const& text)
{
    std::string const t = trim(text);
    long long v = 0;
    auto const r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

std::vector<std::string> split_list(std::string const& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

void require(bool ok, std::string const& key, std::string const& what)
{
    if (!ok)
        throw ConfigError(key + ": " + what);
}

struct Entry
{
    std::string key;
    std::function<void(ExperimentConfig&, std::string const&)> set;
    std::function<std::string(ExperimentConfig const&)> get;
};

Entry real(std::string key, double ExperimentConfig::*field, std::function<bool(double)> ok, std::string what)
{
    return Entry{key,
                 [=](ExperimentConfig& c, std::string const& v) {
                     double const x = parse_double(key, v);
                     require(ok(x), key, what);
                     c.*field = x;
                 },
                 [=](ExperimentConfig const& c) { return fmt(c.*field); }};
}

template <class Int>
Entry integer(std::string key, Int ExperimentConfig::*field, long long lo, std::string what)
{
    return Entry{key,
                 [=](ExperimentConfig& c, std::string const& v) {
                     long long const x = parse_int(key, v);
                     require(x >= lo, key, what);
                     require(x <= static_cast<long long>(std::numeric_limits<Int>::max()), key, "is too large");
                     c.*field = static_cast<Int>(x);
                 },
                 [=](ExperimentConfig const& c) { return std::to_string(c.*field); }};
}

auto const positive = [](double x) { return x > 0.0; };
auto const nonnegative = [](double x) { return x >= 0.0; };

std::vector<Entry> const& entries()
{
    static std::vector<Entry> const table = [] {
        std::vector<Entry> t;
        t.push_back(real("domain.L", &ExperimentConfig::L, positive, "must be > 0"));
        t.push_back(integer("domain.n", &ExperimentConfig::n, 8, "must be >= 8"));
        t.push_back(integer("domain.modes", &ExperimentConfig::modes, 0, "must be >= 0 (0: (n+1)/2)"));

        t.push_back(Entry{"noise.kind",
                          [](ExperimentConfig& c, std::string const& v) {
                              try
                              {
                                  c.noise_kind = parse_noise_kind(trim(v));
                              }
                              catch (ConfigError const& e)
                              {
                                  throw ConfigError(std::string("noise.kind: ") + e.what());
                              }
                          },
                          [](ExperimentConfig const& c) { return noise_kind_name(c.noise_kind); }});
        t.push_back(real("noise.g0", &ExperimentConfig::g0, positive, "must be > 0"));
        t.push_back(real("noise.c", &ExperimentConfig::c, nonnegative, "must be >= 0"));
        t.push_back(Entry{"noise.lip",
                          [](ExperimentConfig& c, std::string const& v) {
                              double const x = parse_double("noise.lip", v);
                              double const lip = c.noise_lipschitz();
                              require(std::abs(x - lip) <= 1e-12 * std::max(1.0, lip), "noise.lip",
                                      "is derived from noise.kind and noise.c (" + fmt(lip) +
                                          "); set noise.c instead");
                          },
                          [](ExperimentConfig const& c) { return fmt(c.noise_lipschitz()); }});

        t.push_back(Entry{"sde.eps",
                          [](ExperimentConfig& c, std::string const& v) {
                              std::vector<double> eps;
                              for (auto const& s : split_list(v))
                              {
                                  double const x = parse_double("sde.eps", s);
                                  require(x >= 0.0, "sde.eps", "values must be >= 0");
                                  eps.push_back(x);
                              }
                              require(!eps.empty(), "sde.eps", "needs at least one value");
                              c.eps = eps;
                          },
                          [](ExperimentConfig const& c) {
                              std::string s;
                              for (std::size_t i = 0; i < c.eps.size(); ++i)
                                  s += (i ? "," : "") + fmt(c.eps[i]);
                              return s;
                          }});
        t.push_back(real("sde.dt", &ExperimentConfig::dt, positive, "must be > 0"));
        t.push_back(real("sde.T", &ExperimentConfig::T, positive, "must be > 0"));
        t.push_back(real("sde.burn_in", &ExperimentConfig::burn_in, [](double) { return true; }, ""));
        t.push_back(integer("sde.n_chains", &ExperimentConfig::n_chains, 1, "must be >= 1"));
        t.push_back(real("sde.stride", &ExperimentConfig::stride, positive, "must be > 0"));
        t.push_back(integer("sde.samples_per_chain", &ExperimentConfig::samples_per_chain, 1, "must be >= 1"));
        t.push_back(Entry{"sde.seed",
                          [](ExperimentConfig& c, std::string const& v) {
                              std::string const x = trim(v);
                              std::uint64_t seed = 0;
                              auto const r = std::from_chars(x.data(), x.data() + x.size(), seed);
                              require(r.ec == std::errc() && r.ptr == x.data() + x.size() && !x.empty(), "sde.seed",
                                      "expected an integer in [0, 2^64), got '" + v + "'");
                              c.seed = seed;
                          },
                          [](ExperimentConfig const& c) { return std::to_string(c.seed); }});
        t.push_back(integer("sde.modes_noise", &ExperimentConfig::modes_noise, 0, "must be >= 0"));
        t.push_back(real("sde.lambda", &ExperimentConfig::lambda, nonnegative, "must be >= 0"));
        t.push_back(real("sde.blowup", &ExperimentConfig::blowup, positive, "must be > 0"));

        t.push_back(real("sobolev.kstar", &ExperimentConfig::kstar, nonnegative, "must be >= 0"));
        t.push_back(integer("sobolev.pstar", &ExperimentConfig::pstar, 2, "must be >= 2"));
        t.push_back(real("sobolev.alpha", &ExperimentConfig::alpha, [](double a) { return a > 0.0 && a < 1.0; },
                         "must lie in (0, 1)"));

        t.push_back(real("flow.dt", &ExperimentConfig::flow_dt, positive, "must be > 0"));
        t.push_back(real("flow.T", &ExperimentConfig::flow_T, positive, "must be > 0"));
        t.push_back(real("flow.stop_tol", &ExperimentConfig::flow_stop_tol, nonnegative, "must be >= 0"));
        t.push_back(Entry{"flow.init",
                          [](ExperimentConfig& c, std::string const& v) {
                              require(!trim(v).empty(), "flow.init", "must be zero, profile, or a CSV path");
                              c.flow_init = trim(v);
                          },
                          [](ExperimentConfig const& c) { return c.flow_init; }});

        t.push_back(real("action.T0", &ExperimentConfig::action_T0, [](double x) { return x > 1.0; },
                         "must exceed 1 (the bridge takes one time unit)"));
        t.push_back(integer("action.rungs", &ExperimentConfig::action_rungs, 1, "must be >= 1"));
        t.push_back(real("action.dt", &ExperimentConfig::action_dt, positive, "must be > 0"));
        t.push_back(integer("action.max_iter", &ExperimentConfig::action_max_iter, 1, "must be >= 1"));
        t.push_back(real("action.tol", &ExperimentConfig::action_tol, nonnegative, "must be >= 0"));

        t.push_back(real("ldp.delta", &ExperimentConfig::ldp_delta, nonnegative, "must be >= 0 (0: automatic)"));
        t.push_back(real("ldp.R", &ExperimentConfig::ldp_R, nonnegative, "must be >= 0 (0: automatic)"));
        t.push_back(integer("ldp.min_count", &ExperimentConfig::ldp_min_count, 1, "must be >= 1"));

        t.push_back(Entry{"output.directory",
                          [](ExperimentConfig& c, std::string const& v) {
                              require(!trim(v).empty(), "output.directory", "must not be empty");
                              c.out_dir = trim(v);
                          },
                          [](ExperimentConfig const& c) { return c.out_dir; }});
        t.push_back(Entry{"output.formats",
                          [](ExperimentConfig& c, std::string const& v) {
                              auto const f = split_list(v);
                              for (auto const& s : f)
                                  require(s == "csv" || s == "json", "output.formats",
                                          "entries must be csv or json, got '" + s + "'");
                              require(!f.empty(), "output.formats", "needs at least one format");
                              c.formats = f;
                          },
                          [](ExperimentConfig const& c) {
                              std::string s;
                              for (std::size_t i = 0; i < c.formats.size(); ++i)
                                  s += (i ? "," : "") + c.formats[i];
                              return s;
                          }});
        t.push_back(integer("run.threads", &ExperimentConfig::threads, 1, "must be >= 1"));
        return t;
    }();
    return table;
}

}  // namespace

NoiseModel ExperimentConfig::noise() const
{
    return noise_kind == NoiseKind::constant ? NoiseModel::constant(g0)
                                             : NoiseModel::smooth_bounded_below(g0, c);
}

void set_config_value(ExperimentConfig& cfg, std::string const& key, std::string const& value)
{
    std::string const k = trim(key);
    for (auto const& e : entries())
        if (e.key == k)
        {
            e.set(cfg, value);
            return;
        }
    throw ConfigError("unknown configuration key '" + k + "'");
}

ExperimentConfig parse_config(std::string const& text, std::string const& origin)
{
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    // noise.lip is checked after the whole file so it can precede noise.c.
    std::string lip;
    while (std::getline(ss, line))
    {
        ++lineno;
        auto const hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string const key = trim(line.substr(0, eq));
        std::string const value = trim(line.substr(eq + 1));
        try
        {
            if (key == "noise.lip")
                lip = value;
            else
                set_config_value(cfg, key, value);
        }
        catch (ConfigError const& e)
        {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!lip.empty())
        set_config_value(cfg, "noise.lip", lip);
    return cfg;
}

ExperimentConfig load_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void validate_config(ExperimentConfig const& cfg)
{
    require(cfg.resolved_modes() <= cfg.n, "domain.modes", "must not exceed domain.n");
    cfg.domain();
    cfg.noise().validate();
    require(cfg.modes_noise <= cfg.resolved_modes(), "sde.modes_noise", "must not exceed the resolved modes");
    for (std::size_t i = 0; i < cfg.eps.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.eps.size(); ++j)
            require(cfg.eps[i] != cfg.eps[j], "sde.eps", "values must be distinct");
    double const unit = 1.0 / cfg.action_dt;
    require(std::abs(unit - std::round(unit)) < 1e-9, "action.dt", "1/dt must be an integer");
}

std::string resolved_config_text(ExperimentConfig const& cfg)
{
    std::string out;
    for (auto const& e : entries())
        out += e.key + " = " + e.get(cfg) + "\n";
    return out;
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (auto const& e : entries())
        keys.push_back(e.key);
    return keys;
}

}  // namespace acldp
