#include "blowup/cli.hpp"

#include "blowup/barriers.hpp"
#include "blowup/errors.hpp"
#include "blowup/io.hpp"
#include "blowup/orbits.hpp"
#include "blowup/parameters.hpp"
#include "blowup/phase_field.hpp"
#include "blowup/profiles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace blowup {

using nlohmann::json;

std::string tool_version() { return "1.0.0"; }

namespace {

struct Common {
    double m = 1.5;
    double sigma = 3.0;
    std::string format = "csv";
    std::string out_path;
    std::string config_path;
    bool timing = false;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_time = 0.0; // non-positive: command default
};

struct Outcome {
    json results = json::object();
    json config = json::object();
    std::vector<std::string> warnings;
    int code = exit_ok;
};

Params cli_params(double m, double sigma)
{
    const Params p = validate_params(m, sigma);
    if (sigma < cli_sigma_min)
        throw ConstraintError("sigma must exceed 2; the command line requires sigma >= " + format_double(cli_sigma_min));
    return p;
}

IntegrationControls controls_from(const Common& c, double default_max_time)
{
    IntegrationControls ctl;
    ctl.rel_tol = c.rel_tol;
    ctl.abs_tol = c.abs_tol;
    ctl.max_time = c.max_time > 0.0 ? c.max_time : default_max_time;
    ctl.validate();
    return ctl;
}

json number_or_null(std::optional<double> v)
{
    if (v && std::isfinite(*v))
        return *v;
    return nullptr;
}

// lambda_hat maps to an interface point only strictly inside the parabola arc.
std::optional<double> interface_of(std::optional<double> lambda, const Params& p)
{
    if (!lambda || !(*lambda > -beta_over_alpha(p)) || !(*lambda < 0.0))
        return std::nullopt;
    return interface_xi_of_lambda(*lambda, p);
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows)
{
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i)
            flatten(v[i], prefix + "." + std::to_string(i), rows);
    } else if (v.is_number_float()) {
        rows.emplace_back(prefix, format_double(v.get<double>()));
    } else if (v.is_string()) {
        rows.emplace_back(prefix, v.get<std::string>());
    } else if (v.is_null()) {
        rows.emplace_back(prefix, "nan");
    } else {
        rows.emplace_back(prefix, v.dump());
    }
}

void emit_report(std::ostream& out, const std::string& command, const Common& c, const Outcome& o, double wall)
{
    json rep;
    rep["schema"] = 1;
    rep["tool"] = "blowup";
    rep["version"] = tool_version();
    rep["command"] = command;
    json cfg = o.config;
    cfg["m"] = c.m;
    if (command != "sigma-star" && command != "sweep")
        cfg["sigma"] = c.sigma;
    rep["config"] = cfg;
    rep["results"] = o.results;
    rep["warnings"] = o.warnings;
    rep["exit_code"] = o.code;
    if (c.timing)
        rep["wall_time_s"] = wall;

    if (c.format == "json") {
        out << dump_json(rep) << '\n';
        return;
    }
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(rep, "", rows);
    CsvTable t;
    t.header = {"key", "value"};
    for (auto& [k, v] : rows) {
        std::replace(v.begin(), v.end(), ',', ';');
        t.rows.push_back({k, v});
    }
    write_csv(out, t);
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConstraintError("cannot open '" + path + "' for writing");
    f << text;
}

CsvTable trajectory_table(const std::vector<std::pair<double, PhasePoint>>& pts)
{
    CsvTable t;
    t.header = {"eta", "X", "Y", "Z"};
    for (const auto& [eta, p] : pts)
        t.add_row({eta, p.x, p.y, p.z});
    return t;
}

json fate_json(const OrbitFate& f, const Params& p)
{
    json j;
    j["fate"] = to_string(f.kind);
    j["reason"] = f.reason;
    j["lambda_hat"] = number_or_null(f.lambda_hat);
    j["xi0"] = number_or_null(interface_of(f.lambda_hat, p));
    j["entry_point"] = {f.entry_point.x, f.entry_point.y, f.entry_point.z};
    return j;
}

// ---------------------------------------------------------------------------

Outcome cmd_params(const Common& c)
{
    const Params p = cli_params(c.m, c.sigma);
    const Exponents ex = derive_exponents(p);
    const PhasePoint p2 = p2_coordinates(p);
    Outcome o;
    auto& r = o.results;
    r["p"] = p.p;
    r["alpha"] = ex.alpha;
    r["beta"] = ex.beta;
    r["xi_max"] = ex.xi_max;
    r["z_max"] = ex.z_max;
    r["beta_over_alpha"] = beta_over_alpha(p);
    r["P2"] = {p2.x, p2.y, p2.z};
    r["p2_unstable_eigenvalue"] = p2_unstable_eigenvalue(p);
    const PhasePoint e3 = p2_unstable_direction(p);
    r["p2_unstable_direction"] = {e3.x, e3.y, e3.z};
    r["parabola"] = {{"lambda_min", -beta_over_alpha(p)},
                     {"lambda_max", 0.0},
                     {"vertex_lambda", vertex_lambda(p)},
                     {"vertex_z", ex.z_max},
                     {"vertex_xi0", xi_of_z(ex.z_max, p)}};
    return o;
}

struct ClassifyOpts {
    std::string source = "p2";
    double K = 1.0;
    double z0 = 1e-6;
    double delta = 0.0;
};

Outcome cmd_classify(const Common& c, const ClassifyOpts& a)
{
    const Params p = cli_params(c.m, c.sigma);
    Outcome o;
    o.config["source"] = a.source;
    std::vector<std::pair<double, PhasePoint>> pts;
    OrbitFate fate;

    if (a.source == "p2") {
        const double delta = a.delta > 0.0 ? a.delta : default_delta;
        o.config["delta"] = delta;
        const IntegrationControls ctl = controls_from(c, 1e4);
        const OrbitRun run = run_from_P2(p, ctl, delta);
        fate = run.fate;
        for (const auto& s : run.trajectory.samples)
            pts.emplace_back(s.eta, s.point);
    } else if (a.source == "p0") {
        o.config["K"] = a.K;
        o.config["z0"] = a.z0;
        const IntegrationControls ctl = controls_from(c, 1e6);
        const OrbitRun run = run_orbit(p, launch_from_P0(a.K, a.z0, p), ctl);
        fate = run.fate;
        for (const auto& s : run.trajectory.samples)
            pts.emplace_back(s.eta, s.point);
    } else if (a.source == "q1") {
        // Inside the invariant plane z = 0 the orbit tangent to (1, 1, 0) ends at P2; the run stays
        // in the chart so that the approach to P2 is resolved.
        const double delta = a.delta > 0.0 ? a.delta : 1e-5;
        o.config["delta"] = delta;
        const IntegrationControls ctl = controls_from(c, 1e4);
        const ChartRun run = run_from_Q1(p, launch_from_Q1_chart(Q1Mode::TangentV1, delta, p), ctl, 0.0);
        for (const auto& s : run.chart.samples)
            if (s.point.x > 0.0)
                pts.emplace_back(s.eta, chart_to_phase(ChartPoint{s.point.x, s.point.y, s.point.z}));
        const PhasePoint end = run.chart.samples.back().point;
        const ChartPoint target = p2_chart_coordinates(p);
        const double rel = std::hypot(end.x - target.w, end.y - target.y) / std::hypot(target.w, target.y);
        o.config["rel_tol"] = c.rel_tol;
        o.config["abs_tol"] = c.abs_tol;
        o.results["fate"] = rel < 1e-3 ? "ConnectsToP2" : "Inconclusive";
        o.results["chart_end"] = {end.x, end.y, end.z};
        o.results["p2_chart"] = {target.w, target.y, target.z};
        o.results["relative_distance_to_p2"] = rel;
        o.results["samples"] = pts.size();
        if (!c.out_path.empty()) {
            write_csv_file(c.out_path, trajectory_table(pts));
            o.results["trajectory_csv"] = c.out_path;
        }
        if (rel >= 1e-3) {
            o.warnings.push_back("chart orbit from Q1 did not settle on P2");
            o.code = exit_inconclusive;
        }
        return o;
    } else {
        throw CLI::ValidationError("--source", "must be one of p2, p0, q1");
    }

    o.config["rel_tol"] = c.rel_tol;
    o.config["abs_tol"] = c.abs_tol;
    o.results = fate_json(fate, p);
    o.results["samples"] = pts.size();
    if (!c.out_path.empty()) {
        write_csv_file(c.out_path, trajectory_table(pts));
        o.results["trajectory_csv"] = c.out_path;
    }
    if (fate.kind == FateKind::Inconclusive) {
        o.warnings.push_back("fate Inconclusive: " + fate.reason);
        o.code = exit_inconclusive;
    }
    return o;
}

struct SigmaStarOpts {
    double lo = 3.0;
    double hi = 3.4;
    double tol = 1e-3;
};

Outcome cmd_sigma_star(const Common& c, const SigmaStarOpts& a)
{
    cli_params(c.m, a.lo);
    cli_params(c.m, a.hi);
    Outcome o;
    o.config["lo"] = a.lo;
    o.config["hi"] = a.hi;
    o.config["tol"] = a.tol;
    ShootResult res;
    try {
        res = sigma_star(c.m, {a.lo, a.hi}, a.tol, controls_from(c, 1e4));
    } catch (const BracketError& e) {
        throw BracketError(std::string(e.what())
                           + "; choose lo with a parabola fate and hi with fate EntersQ3 (at m=1.5, e.g. 3.0 and 3.4)");
    }
    o.results["sigma_star"] = res.sigma_star;
    o.results["bracket"] = {res.bracket.first, res.bracket.second};
    o.results["iterations"] = res.iterations;
    o.results["retries"] = res.retries;
    o.results["fate_lo"] = to_string(res.fate_at_ends.first.kind);
    o.results["fate_hi"] = to_string(res.fate_at_ends.second.kind);
    return o;
}

struct ProfileOpts {
    std::string origin = "p2";
    double a = 1.0;
    std::vector<double> a_bracket;
    double a_tol = 1e-6;
    double K = 1.0;
    double xi_start = 1e-4;
    double output_step = 0.0;
};

Outcome cmd_profile(const Common& c, const ProfileOpts& a)
{
    const Params p = cli_params(c.m, c.sigma);
    const IntegrationControls ctl = controls_from(c, 1e4);
    ProfileOptions popt;
    popt.xi_start = a.xi_start;
    popt.output_step = a.output_step;
    Outcome o;
    o.config["origin"] = a.origin;
    o.config["xi_start"] = a.xi_start;
    o.config["output_step"] = a.output_step;

    ProfileRun run;
    if (a.origin == "p2") {
        run = integrate_ssode(ProfileOrigin::p2(), p, ctl, popt);
    } else if (a.origin == "p0") {
        o.config["K"] = a.K;
        run = integrate_ssode(ProfileOrigin::p0(a.K), p, ctl, popt);
    } else if (a.origin == "p1") {
        if (!a.a_bracket.empty()) {
            if (a.a_bracket.size() != 2)
                throw CLI::ValidationError("--a-bracket", "takes two values");
            o.config["a_bracket"] = a.a_bracket;
            o.config["a_tol"] = a.a_tol;
            GoodProfile g;
            try {
                g = find_good_profile_P1(p, {a.a_bracket[0], a.a_bracket[1]}, a.a_tol, ctl, popt);
            } catch (const BracketError& e) {
                std::string hint;
                const auto scan = scan_P1(p, 1e-14, 1e2, 33, ctl, popt);
                if (const auto br = coarse_bracket_P1(scan))
                    hint = "; a coarse scan over [1e-14, 1e2] switches between a=" + format_double(br->first)
                           + " and a=" + format_double(br->second);
                throw BracketError(std::string(e.what()) + hint);
            }
            run = g.run;
            o.results["a_star"] = g.a_star;
            o.results["a_bracket_final"] = {g.bracket.first, g.bracket.second};
            o.results["iterations"] = g.iterations;
            o.results["fate_lo"] = to_string(g.fate_lo);
            o.results["fate_hi"] = to_string(g.fate_hi);
        } else {
            o.config["a"] = a.a;
            run = integrate_ssode(ProfileOrigin::p1(a.a), p, ctl, popt);
        }
    } else {
        throw CLI::ValidationError("--origin", "must be one of p1, p2, p0");
    }

    const ProfileFate& f = run.fate;
    o.results["fate"] = to_string(f.kind);
    o.results["reason"] = f.reason;
    o.results["samples"] = run.samples.size();
    o.results["xi_max"] = derive_exponents(p).xi_max;
    if (f.kind == ProfileFateKind::Interface || f.kind == ProfileFateKind::SignChange) {
        o.results["xi0"] = f.xi0;
        o.results["g_slope"] = f.g_slope;
        o.results["interface_residual"] = interface_residual(f.xi0, f.g_slope, p);
    }
    try {
        o.results["ssode_residual"] = ssode_residual(run.samples, p);
    } catch (const ConstraintError& e) {
        o.warnings.push_back(std::string("residual not computed: ") + e.what());
    }
    if (!c.out_path.empty()) {
        CsvTable t;
        t.header = {"xi", "f", "df"};
        for (const auto& s : run.samples)
            t.add_row({s.xi, s.f, s.df});
        write_csv_file(c.out_path, t);
        o.results["profile_csv"] = c.out_path;
    }
    if (f.kind == ProfileFateKind::Inconclusive) {
        o.warnings.push_back("profile fate Inconclusive: " + f.reason);
        o.code = exit_inconclusive;
    }
    return o;
}

struct VerifyOpts {
    std::vector<std::string> barriers;
    bool all = false;
    std::size_t n = 10000;
    std::uint64_t seed = 42;
};

Outcome cmd_verify(const Common& c, const VerifyOpts& a)
{
    const Params p = cli_params(c.m, c.sigma);
    const auto ids = barrier_ids();
    std::vector<std::string> chosen = a.all || a.barriers.empty() ? ids : a.barriers;
    for (const auto& id : chosen) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
            std::string list;
            for (const auto& k : ids)
                list += (list.empty() ? "" : ", ") + k;
            throw CLI::ValidationError("--barrier", "unknown barrier '" + id + "'; catalog: " + list);
        }
    }
    if (a.n < 100)
        throw CLI::ValidationError("--n", "must be at least 100");

    Outcome o;
    o.config["barriers"] = chosen;
    o.config["n"] = a.n;
    o.config["seed"] = a.seed;

    std::vector<VerificationReport> reports;
    for (const auto& all : verify_catalog(p, a.n, a.seed))
        if (std::find(chosen.begin(), chosen.end(), all.id) != chosen.end())
            reports.push_back(all);

    json list = json::array();
    for (const auto& r : reports) {
        json j;
        j["id"] = r.id;
        j["applicable"] = r.applicable;
        j["gate_reason"] = r.gate_reason;
        j["samples_tested"] = r.samples_tested;
        j["boundary_samples"] = r.boundary_samples;
        j["violation_count"] = r.violation_count;
        j["worst_margin"] = r.samples_tested > r.boundary_samples ? json(r.worst_margin) : json(nullptr);
        j["oracle_gap"] = r.oracle_gap;
        j["status"] = r.violation_count > 0 ? "fail" : (r.samples_tested == 0 ? "gated" : "pass");
        json v = json::array();
        for (const auto& x : r.violations)
            v.push_back({{"point", {x.point[0], x.point[1], x.point[2]}}, {"value", x.value}});
        j["violations"] = v;
        list.push_back(j);
        if (r.samples_tested == 0)
            o.warnings.push_back(r.id + " gated out: " + r.gate_reason);
    }
    const SmallSigmaHypotheses h = small_sigma_hypotheses(p);
    o.results["small_sigma_hypotheses"] = {{"p2_x_below_x_star", h.p2_x_below_x_star},
                                           {"p2_y_below_half", h.p2_y_below_half},
                                           {"r2_right_of_r1", h.r2_right_of_r1}};
    o.results["plane3_certificate"] = plane3_certificate(p);
    o.results["reports"] = list;
    const bool ok = catalog_passed(reports);
    o.results["passed"] = ok;
    if (!c.out_path.empty()) {
        json payload = {{"schema", 1}, {"m", c.m}, {"sigma", c.sigma}, {"seed", a.seed}, {"n", a.n}, {"reports", list}};
        write_text_file(c.out_path, dump_json(payload) + "\n");
    }
    if (!ok)
        o.code = exit_violation;
    return o;
}

struct SweepOpts {
    std::vector<double> sigmas;
    int jobs = 1;
};

Outcome cmd_sweep(const Common& c, const SweepOpts& a)
{
    if (a.sigmas.empty())
        throw CLI::ValidationError("--sigmas", "the sigma grid is empty");
    if (a.jobs < 1)
        throw CLI::ValidationError("--jobs", "must be at least 1");
    for (double s : a.sigmas)
        cli_params(c.m, s);
    const IntegrationControls ctl = controls_from(c, 1e4);

    Outcome o;
    o.config["sigmas"] = a.sigmas;

    std::vector<LambdaOfSigma> res(a.sigmas.size());
    std::vector<std::string> errors(a.sigmas.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < a.sigmas.size(); i = next++) {
            try {
                res[i] = lambda_of_sigma(c.m, a.sigmas[i], ctl);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int n_threads = std::min<int>(a.jobs, static_cast<int>(a.sigmas.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    CsvTable t;
    t.header = {"sigma", "fate", "lambda_hat", "xi0"};
    json rows = json::array();
    for (std::size_t i = 0; i < a.sigmas.size(); ++i) {
        const Params p = validate_params(c.m, a.sigmas[i]);
        const OrbitFate& f = res[i].fate;
        if (!errors[i].empty()) {
            o.warnings.push_back("sigma=" + format_double(a.sigmas[i]) + ": " + errors[i]);
            o.code = exit_inconclusive;
        } else if (f.kind == FateKind::Inconclusive) {
            o.warnings.push_back("sigma=" + format_double(a.sigmas[i]) + ": Inconclusive (" + f.reason + ")");
            o.code = exit_inconclusive;
        }
        const std::string kind = errors[i].empty() ? to_string(f.kind) : "Error";
        const auto xi0 = interface_of(f.lambda_hat, p);
        t.rows.push_back({format_double(a.sigmas[i]), kind, format_double(f.lambda_hat.value_or(NAN)),
                          format_double(xi0.value_or(NAN))});
        rows.push_back({{"sigma", a.sigmas[i]}, {"fate", kind}, {"lambda_hat", number_or_null(f.lambda_hat)},
                        {"xi0", number_or_null(xi0)}});
    }
    o.results["rows"] = rows;
    if (!c.out_path.empty()) {
        write_csv_file(c.out_path, t);
        o.results["sweep_csv"] = c.out_path;
    }
    return o;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, Common& c, bool with_sigma = true)
{
    sub->add_option("--m", c.m, "diffusion exponent, 1 < m < 2")->capture_default_str();
    if (with_sigma)
        sub->add_option("--sigma", c.sigma, "weight exponent, sigma > 2")->capture_default_str();
    sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--out", c.out_path, "data output file");
    sub->add_option("--config", c.config_path, "key=value file; flags take precedence");
    sub->add_flag("--timing", c.timing, "add wall time to the report (makes it non-reproducible)");
    sub->add_option("--rel-tol", c.rel_tol, "integrator relative tolerance")->capture_default_str();
    sub->add_option("--abs-tol", c.abs_tol, "integrator absolute tolerance")->capture_default_str();
    sub->add_option("--max-time", c.max_time, "integration time limit (0: command default; P2 launches raise it to 60/lambda3)");
}

// Finds the subcommand name and the --config value in raw arguments.
std::pair<std::string, std::string> peek(const std::vector<std::string>& args)
{
    std::string sub, cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (sub.empty() && !a.empty() && a[0] != '-')
            sub = a;
        if (a == "--config" && i + 1 < args.size())
            cfg = args[i + 1];
        else if (a.rfind("--config=", 0) == 0)
            cfg = a.substr(9);
    }
    return {sub, cfg};
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& key)
{
    const std::string flag = "--" + key;
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0)
            return true;
    return false;
}

// Config entries become flags placed before the real ones, skipping keys that the command line sets.
std::vector<std::string> merge_config(const std::vector<std::string>& args)
{
    const auto [sub, cfg] = peek(args);
    if (cfg.empty() || sub.empty())
        return args;
    const auto kv = read_config_file(cfg);
    std::vector<std::string> merged;
    bool inserted = false;
    for (const auto& a : args) {
        merged.push_back(a);
        if (!inserted && a == sub) {
            inserted = true;
            for (const auto& [k, v] : kv) {
                if (k == "config" || given_on_command_line(args, k))
                    continue;
                merged.push_back("--" + k);
                std::istringstream ss(v);
                std::string tok;
                while (ss >> tok)
                    merged.push_back(tok);
            }
        }
    }
    return merged;
}

} // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Self-similar blow-up profiles: phase-space analysis and profile shooting", "blowup"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Common c;
    ClassifyOpts co;
    SigmaStarOpts so;
    ProfileOpts po;
    VerifyOpts vo;
    SweepOpts wo;

    auto* params = app.add_subcommand("params", "print exponents, P2 and the critical parabola");
    add_common(params, c);

    auto* classify = app.add_subcommand("classify", "integrate one orbit and classify its fate");
    add_common(classify, c);
    classify->add_option("--source", co.source, "p2, p0 or q1")->check(CLI::IsMember({"p2", "p0", "q1"}))->capture_default_str();
    classify->add_option("--K", co.K, "center family parameter for --source p0")->capture_default_str();
    classify->add_option("--z0", co.z0, "starting Z for --source p0")->capture_default_str();
    classify->add_option("--delta", co.delta, "launch offset (0: default)");

    auto* sstar = app.add_subcommand("sigma-star", "bisection for the sigma where the P2 orbit meets the vertex");
    add_common(sstar, c, false);
    sstar->add_option("--lo", so.lo, "lower end of the sigma bracket")->capture_default_str();
    sstar->add_option("--hi", so.hi, "upper end of the sigma bracket")->capture_default_str();
    sstar->add_option("--tol", so.tol, "bracket width at which bisection stops")->capture_default_str();

    auto* profile = app.add_subcommand("profile", "integrate a profile from the origin");
    add_common(profile, c);
    profile->add_option("--origin", po.origin, "p1, p2 or p0")->check(CLI::IsMember({"p1", "p2", "p0"}))->capture_default_str();
    profile->add_option("--a", po.a, "f(0) for --origin p1")->capture_default_str();
    profile->add_option("--a-bracket", po.a_bracket, "bisect f(0) between two values")->expected(2)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    profile->add_option("--a-tol", po.a_tol, "relative tolerance of the bisection")->capture_default_str();
    profile->add_option("--K", po.K, "f ~ K xi^((sigma+2)/(2(m-1))) for --origin p0")->capture_default_str();
    profile->add_option("--xi-start", po.xi_start, "first xi after the origin expansion")->capture_default_str();
    profile->add_option("--output-step", po.output_step, "uniform xi spacing of the output (0: accepted steps)");

    auto* verify = app.add_subcommand("verify", "check barrier sign claims on seeded samples");
    add_common(verify, c);
    verify->add_option("--barrier", vo.barriers, "barrier id (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    verify->add_flag("--all", vo.all, "the whole catalog");
    verify->add_option("--n", vo.n, "samples per barrier")->capture_default_str();
    verify->add_option("--seed", vo.seed, "sampling seed")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "fate of the P2 orbit over a sigma grid");
    add_common(sweep, c, false);
    sweep->add_option("--sigmas", wo.sigmas, "comma-separated sigma grid")->delimiter(',')->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sweep->add_option("--jobs", wo.jobs, "worker threads")->capture_default_str();

    std::vector<std::string> args;
    try {
        args = merge_config(raw_args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        Outcome o;
        if (name == "params")
            o = cmd_params(c);
        else if (name == "classify")
            o = cmd_classify(c, co);
        else if (name == "sigma-star")
            o = cmd_sigma_star(c, so);
        else if (name == "profile")
            o = cmd_profile(c, po);
        else if (name == "verify")
            o = cmd_verify(c, vo);
        else
            o = cmd_sweep(c, wo);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit_report(out, name, c, o, wall);
        for (const auto& w : o.warnings)
            err << "warning: " << w << '\n';
        return o.code;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConstraintError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const BracketError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_inconclusive;
    }
}

} // namespace blowup
