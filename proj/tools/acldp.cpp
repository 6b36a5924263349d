// acldp: command line front end of the experiment runner.
//
//   acldp <command> [--config FILE] [--set key=value ...] [--out DIR] [options]
//
// Exit codes: 0 ok, 1 numerical failure, 2 configuration error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "acldp/io.hpp"
#include "acldp/runner.hpp"

namespace {

struct Common
{
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config, "configuration file (key = value lines)");
    sub->add_option("--set", c.sets, "override, key=value (repeatable)");
    sub->add_option("--out", c.out, "output directory (output.directory)");
    sub->add_option("--seed", c.seed, "sde.seed");
    sub->add_option("--threads", c.threads, "run.threads (ACLDP_THREADS takes precedence)");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic Allen-Cahn large-deviation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", acldp::version_string());

    Common common;
    acldp::RunRequest req;
    std::optional<double> L, T;
    std::optional<int> rungs;
    std::string init;

    auto* profile = app.add_subcommand("profile", "stationary profile m_L, e_L and E_L(m_L)");
    profile->add_option("--L", L, "half length of the domain");

    auto* energy = app.add_subcommand("energy", "shifted energy report of a field");
    energy->add_option("--input", req.input, "field CSV (xi,value), zero-Dirichlet")->required();

    auto* flow = app.add_subcommand("flow", "deterministic gradient flow");
    flow->add_option("--L", L, "half length of the domain");
    flow->add_option("--T", T, "horizon");
    flow->add_option("--init", init, "zero, profile, or a field CSV");

    auto* sde = app.add_subcommand("sde", "one SPDE trajectory at the first eps");
    sde->add_option("--T", T, "horizon");

    auto* invariant = app.add_subcommand("invariant", "empirical invariant measures over the eps list");

    auto* action = app.add_subcommand("action", "action functional of a stored path");
    action->add_option("--path", req.input, "path CSV (t,u1..un)")->required();

    auto* mam = app.add_subcommand("mam", "minimum action over a ladder of horizons");
    mam->add_option("--target", req.input, "target field CSV (xi,value)")->required();
    mam->add_option("--T-ladder", rungs, "number of horizons T0 * 2^i");

    auto* tail = app.add_subcommand("ldp-tail", "tail probabilities, decay fit and tightness");

    for (auto* sub : {profile, energy, flow, sde, invariant, action, mam, tail})
        add_common(sub, common);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    req.command = app.get_subcommands().front()->get_name();
    req.config_path = common.config;
    for (auto const& s : common.sets)
    {
        auto const eq = s.find('=');
        if (eq == std::string::npos)
        {
            std::cerr << "configuration error: --set expects key=value, got '" << s << "'\n";
            return 2;
        }
        req.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    auto set = [&](std::string const& key, std::string const& value) { req.overrides.emplace_back(key, value); };
    if (L)
        set("domain.L", acldp::format_number(*L));
    if (T)
        set(req.command == "flow" ? "flow.T" : "sde.T", acldp::format_number(*T));
    if (!init.empty())
        set("flow.init", init);
    if (rungs)
        set("action.rungs", std::to_string(*rungs));
    if (!common.out.empty())
        set("output.directory", common.out);
    if (common.seed)
        set("sde.seed", std::to_string(*common.seed));
    if (common.threads)
        set("run.threads", std::to_string(*common.threads));

    acldp::RunOutcome const r = acldp::run(req, std::cerr);
    return r.exit_code;
}
