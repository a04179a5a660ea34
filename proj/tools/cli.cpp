#include "cli.hpp"

#include "ncring/analysis.hpp"
#include "ncring/errors.hpp"
#include "ncring/experiment.hpp"
#include "ncring/phasespace.hpp"
#include "ncring/ring.hpp"
#include "ncring/signatures.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace ncring::cli {
namespace {

using json = nlohmann::ordered_json;
using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat key=value file, '#' starts a comment line.
KeyValues read_key_values(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open config file '" + path + "'");
    KeyValues kv;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidInput(fmt::format("{}:{}: expected key=value", path, n));
        kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return kv;
}

std::string option_key(const std::string& long_name)
{
    std::string k = long_name;
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

struct RingOptions {
    double radius_m = 1e-6;
    long long n_electrons = 100001;
    double alpha = 1.0;
    double theta_tilde = 1.76e-61;
    double theta = 0.0;
    CLI::Option* theta_opt = nullptr;
    double mass_kg = codata2018.m_e;
    std::string constraint = "standard";
};

ConstraintVariant parse_constraint(const std::string& s)
{
    return s == "heisenberg-closing" ? ConstraintVariant::heisenberg_closing : ConstraintVariant::standard;
}

void add_nc_options(CLI::App* app, RingOptions& o)
{
    app->add_option("--alpha", o.alpha, "Map scale alpha in (0, 1]");
    app->add_option("--theta-tilde", o.theta_tilde, "Momentum noncommutativity (kg^2 m^2 s^-2)");
    o.theta_opt = app->add_option("--theta", o.theta, "Position noncommutativity (m^2); from the constraint when omitted")
                      ->default_str("");
    app->add_option("--constraint", o.constraint, "Constraint used to derive theta")
        ->check(CLI::IsMember({"standard", "heisenberg-closing"}));
}

void add_ring_options(CLI::App* app, RingOptions& o)
{
    app->add_option("--radius-m", o.radius_m, "Ring radius (m)");
    app->add_option("--n-electrons", o.n_electrons, "Electron number N");
    app->add_option("--mass-kg", o.mass_kg, "Bare electron mass (kg)")->default_str(format_double(o.mass_kg));
    add_nc_options(app, o);
}

NCParameters to_nc(const RingOptions& o)
{
    NCParameters nc;
    nc.alpha = o.alpha;
    nc.theta_tilde = o.theta_tilde;
    if (o.theta_opt && o.theta_opt->count() > 0)
        nc.theta = o.theta;
    else
        nc.theta = (o.alpha == 1.0) ? 0.0 : theta_from_constraint(o.alpha, o.theta_tilde, codata2018,
                                                                  parse_constraint(o.constraint));
    nc.validate();
    return nc;
}

RingConfig to_ring(const RingOptions& o)
{
    RingConfig ring;
    ring.radius = o.radius_m;
    ring.mass = o.mass_kg;
    ring.n_electrons = o.n_electrons;
    ring.nc = to_nc(o);
    ring.validate();
    if (!(f_nc(ring) < 0.5))
        throw InvalidParameter(fmt::format("effective flux f_nc = {} must be below 1/2", f_nc(ring)));
    return ring;
}

struct GridOptions {
    double f_min = 0.01;
    double f_max = 0.5;
    std::size_t n_points = 64;
    std::string spacing = "log";
};

void add_grid_options(CLI::App* app, GridOptions& g)
{
    app->add_option("--f-min", g.f_min, "Smallest flux (phi0 units)");
    app->add_option("--f-max", g.f_max, "Largest flux (phi0 units)");
    app->add_option("--n-points", g.n_points, "Number of grid points");
    app->add_option("--spacing", g.spacing, "Grid spacing")->check(CLI::IsMember({"linear", "log"}));
}

GridSpacing to_spacing(const std::string& s)
{
    return s == "linear" ? GridSpacing::linear : GridSpacing::log;
}

// Key/value echo of every option of the active subcommand, in declaration order.
KeyValues effective_config(const CLI::App* sub)
{
    KeyValues kv;
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty() && opt->get_positional() == false)
            continue;
        const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        if (name == "help")
            continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& r = opt->results();
            value = r.empty() ? "true" : r.back();
        } else {
            value = opt->get_default_str();
        }
        if (value.empty())
            continue;
        kv.emplace_back(option_key(name), value);
    }
    return kv;
}

void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw InvalidInput("cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw InvalidInput("failed writing '" + path + "'");
}

void write_config_comments(std::ostream& os, const KeyValues& config)
{
    for (const auto& [k, v] : config)
        os << "# config." << k << '=' << v << '\n';
}

std::string fmt_log_abs(double v)
{
    return format_double(std::log10(std::abs(v)));
}

json fit_json(const std::optional<FitResult>& fit)
{
    if (!fit)
        return nullptr;
    json j;
    j["amplitude"] = fit->amplitude;
    j["exponent"] = fit->exponent;
    j["r_squared"] = fit->r_squared;
    j["n_points_used"] = fit->n_points_used;
    j["amplitude_stderr"] = fit->amplitude_stderr;
    return j;
}

json config_json(const KeyValues& config)
{
    json j = json::object();
    for (const auto& [k, v] : config)
        j[k] = v;
    return j;
}

DetectionThresholds read_thresholds(const std::string& path)
{
    DetectionThresholds t;
    const std::map<std::string, double*> fields{
        {"exponent_target", &t.criterion.exponent_target},
        {"exponent_tolerance", &t.criterion.exponent_tolerance},
        {"r_squared_clean", &t.r_squared_clean},
        {"r_squared_noisy", &t.r_squared_noisy},
        {"amplitude_floor", &t.criterion.amplitude_floor},
        {"significance_z", &t.criterion.significance_z},
        {"amplitude_match_tolerance", &t.criterion.amplitude_match_tolerance},
        {"max_f_nc", &t.criterion.max_f_nc},
        {"f_floor", &t.f_floor},
    };
    for (const auto& [key, value] : read_key_values(path)) {
        const auto it = fields.find(key);
        if (it == fields.end())
            throw InvalidInput("thresholds file: unknown key '" + key + "'");
        try {
            std::size_t used = 0;
            *it->second = std::stod(value, &used);
            if (used != value.size())
                throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw InvalidInput("thresholds file: '" + key + "' is not a number: " + value);
        }
    }
    return t;
}

std::optional<std::string> find_config_flag(std::span<const std::string> args)
{
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0)
            return args[i].substr(9);
    }
    return std::nullopt;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err, const std::string& config_env)
{
    CLI::App app{"Noncommutative phase-space ring simulator and detection pipeline", "ncring"};
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    // Lets --config appear after the subcommand name too.
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (default: $NCRING_CONFIG)");

    // simulate
    RingOptions sim_ring;
    GridOptions sim_grid{0.0, 1.0, 101, "linear"};
    std::string sim_out = "-";
    auto* simulate = app.add_subcommand("simulate", "Ground-state energy and persistent current versus flux");
    add_ring_options(simulate, sim_ring);
    add_grid_options(simulate, sim_grid);
    simulate->add_option("--output,-o", sim_out, "Output CSV ('-' for stdout)");

    // signatures
    RingOptions sig_ring;
    GridOptions sig_grid;
    std::string sig_out = "-";
    auto* signatures = app.add_subcommand("signatures", "Closed-form lambda and sigma versus flux");
    add_ring_options(signatures, sig_ring);
    add_grid_options(signatures, sig_grid);
    signatures->add_option("--output,-o", sig_out, "Output CSV ('-' for stdout)");

    // figure-data
    RingOptions fig_ring;
    GridOptions fig_grid;
    int figure = 1;
    std::vector<long long> fig_n;
    std::string fig_out = "-";
    auto* figdata = app.add_subcommand("figure-data", "Signature series for the odd (1) or even (2) figure");
    figdata->add_option("--figure", figure, "1: odd electron number, 2: even")->check(CLI::IsMember({1, 2}));
    figdata->add_option("--n", fig_n, "Electron numbers (default 1e4, 5e4, 1e5 of the figure's parity)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    figdata->add_option("--radius-m", fig_ring.radius_m, "Ring radius (m)");
    figdata->add_option("--mass-kg", fig_ring.mass_kg, "Bare electron mass (kg)")
        ->default_str(format_double(fig_ring.mass_kg));
    add_nc_options(figdata, fig_ring);
    add_grid_options(figdata, fig_grid);
    figdata->add_option("--output,-o", fig_out, "Output CSV ('-' for stdout)");

    // generate
    RingOptions gen_ring;
    GridOptions gen_grid;
    NoiseModel gen_noise;
    bool gen_omit_n = false;
    std::string gen_out = "-";
    auto* generate = app.add_subcommand("generate", "Synthetic noisy persistent-current measurement");
    add_ring_options(generate, gen_ring);
    add_grid_options(generate, gen_grid);
    generate->add_option("--relative-sigma", gen_noise.relative_sigma, "Relative noise sd");
    generate->add_option("--absolute-sigma", gen_noise.absolute_sigma, "Absolute noise sd (A)");
    generate->add_option("--seed", gen_noise.seed, "SplitMix64 seed");
    generate->add_flag("--omit-n", gen_omit_n, "Do not record n_electrons in the header");
    generate->add_option("--output,-o", gen_out, "Output CSV ('-' for stdout)");

    // analyze
    std::string ana_input;
    long long ana_n = 0;
    double ana_radius = 0.0;
    double ana_alpha = 1.0;
    std::string ana_thresholds;
    std::string ana_out = "-";
    std::string ana_sig_csv;
    std::string ana_smoothing = "auto";
    double ana_penalty = 0.0;
    auto* analyze = app.add_subcommand("analyze", "Detection pipeline on a measurement CSV");
    analyze->add_option("input", ana_input, "Measurement CSV")->required();
    auto* ana_n_opt = analyze->add_option("--n-electrons", ana_n, "Known electron number")->default_str("");
    auto* ana_r_opt = analyze->add_option("--radius-m", ana_radius, "Ring radius (m); default from file metadata")
                         ->default_str("");
    analyze->add_option("--alpha", ana_alpha, "Map scale alpha used for theta_tilde");
    analyze->add_option("--thresholds", ana_thresholds, "key=value thresholds file");
    analyze->add_option("--smoothing", ana_smoothing, "auto, none or gcv")
        ->check(CLI::IsMember({"auto", "none", "gcv"}));
    auto* ana_p_opt = analyze->add_option("--penalty", ana_penalty, "Fixed smoothing penalty (with --smoothing gcv)")
                         ->default_str("");
    analyze->add_option("--output,-o", ana_out, "Report JSON ('-' for stdout)");
    analyze->add_option("--signatures-csv", ana_sig_csv, "Optional CSV of f, lambda_hat, sigma_hat");

    // verify-algebra
    RingOptions alg;
    std::string alg_out = "-";
    auto* verify = app.add_subcommand("verify-algebra", "Commutators of the mapped operators as JSON");
    add_nc_options(verify, alg);
    verify->add_option("--output,-o", alg_out, "Report JSON ('-' for stdout)");

    try {
        // Config values become leading flags of the chosen subcommand, so
        // explicit flags (parsed later, TakeLast) win.
        std::vector<std::string> argv(args.begin(), args.end());
        const auto cfg = find_config_flag(args);
        const std::string cfg_path = cfg ? *cfg : config_env;
        if (!cfg_path.empty()) {
            const auto kv = read_key_values(cfg_path);
            auto sub_it = std::find_if(argv.begin() + std::min<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(argv.size())),
                                       argv.end(), [&](const std::string& a) {
                                           for (const auto* s : app.get_subcommands({}))
                                               if (s->get_name() == a)
                                                   return true;
                                           return false;
                                       });
            std::set<std::string> any_key;
            for (const auto* s : app.get_subcommands({}))
                for (const auto* o : s->get_options())
                    for (const auto& ln : o->get_lnames())
                        any_key.insert(option_key(ln));
            std::vector<std::string> injected;
            for (const auto& [key, value] : kv) {
                if (!any_key.count(key) || key == "help")
                    throw InvalidInput("config: unknown key '" + key + "'");
                if (sub_it == argv.end())
                    continue;
                const auto* sub = app.get_subcommand(*sub_it);
                bool known = false;
                for (const auto* o : sub->get_options())
                    for (const auto& ln : o->get_lnames())
                        known = known || option_key(ln) == key;
                if (known) {
                    std::string flag = "--" + key;
                    std::replace(flag.begin(), flag.end(), '_', '-');
                    injected.push_back(flag + "=" + value);
                }
            }
            if (sub_it != argv.end())
                argv.insert(sub_it + 1, injected.begin(), injected.end());
        }

        std::vector<std::string> reversed(argv.rbegin(), argv.rend());
        if (!reversed.empty())
            reversed.pop_back(); // program name
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }

    try {
        if (simulate->parsed()) {
            const auto ring = to_ring(sim_ring);
            const auto grid = make_grid(sim_grid.f_min, sim_grid.f_max, sim_grid.n_points, to_spacing(sim_grid.spacing));
            std::ostringstream os;
            write_config_comments(os, effective_config(simulate));
            os << "f,E_g_joule,J_ampere\n";
            for (double f : grid)
                os << format_double(f) << ',' << format_double(ground_energy_closed(ring, f)) << ','
                   << format_double(persistent_current(ring, f)) << '\n';
            emit(sim_out, os.str(), out);
        } else if (signatures->parsed()) {
            const auto ring = to_ring(sig_ring);
            const auto grid = make_grid(sig_grid.f_min, sig_grid.f_max, sig_grid.n_points, to_spacing(sig_grid.spacing));
            std::ostringstream os;
            write_config_comments(os, effective_config(signatures));
            os << "f,lambda,sigma,log10f,log10_abs_lambda,log10_abs_sigma\n";
            for (const auto& p : signature_sweep(ring, grid))
                os << format_double(p.f) << ',' << format_double(p.lambda) << ',' << format_double(p.sigma) << ','
                   << format_double(std::log10(p.f)) << ',' << fmt_log_abs(p.lambda) << ',' << fmt_log_abs(p.sigma)
                   << '\n';
            emit(sig_out, os.str(), out);
        } else if (figdata->parsed()) {
            const bool odd_figure = figure == 1;
            std::vector<long long> ns = fig_n;
            if (ns.empty())
                ns = odd_figure ? std::vector<long long>{10001, 50001, 100001}
                                : std::vector<long long>{10000, 50000, 100000};
            const auto grid = make_grid(fig_grid.f_min, fig_grid.f_max, fig_grid.n_points, to_spacing(fig_grid.spacing));
            std::ostringstream os;
            write_config_comments(os, effective_config(figdata));
            os << "n_electrons,f,lambda,sigma,log10f,log10_abs_lambda,log10_abs_sigma\n";
            for (long long n : ns) {
                if ((n % 2 != 0) != odd_figure)
                    throw InvalidParameter(fmt::format("figure {} needs {} electron numbers, got {}", figure,
                                                       odd_figure ? "odd" : "even", n));
                fig_ring.n_electrons = n;
                const auto ring = to_ring(fig_ring);
                for (const auto& p : signature_sweep(ring, grid))
                    os << n << ',' << format_double(p.f) << ',' << format_double(p.lambda) << ','
                       << format_double(p.sigma) << ',' << format_double(std::log10(p.f)) << ','
                       << fmt_log_abs(p.lambda) << ',' << fmt_log_abs(p.sigma) << '\n';
            }
            emit(fig_out, os.str(), out);
        } else if (generate->parsed()) {
            const auto ring = to_ring(gen_ring);
            auto series = generate_dataset(ring, gen_grid.f_min, gen_grid.f_max, gen_grid.n_points,
                                           to_spacing(gen_grid.spacing), gen_noise);
            if (gen_omit_n)
                series.meta.n_electrons.reset();
            for (const auto& [k, v] : effective_config(generate))
                series.meta.extra.emplace_back("config." + k, v);
            std::ostringstream os;
            write_csv(series, os);
            emit(gen_out, os.str(), out);
        } else if (analyze->parsed()) {
            const auto series = read_csv_file(ana_input);
            KnownParameters known;
            if (ana_n_opt->count() > 0)
                known.n_electrons = ana_n;
            if (ana_r_opt->count() > 0)
                known.radius_m = ana_radius;
            known.alpha = ana_alpha;
            DetectionThresholds thresholds = ana_thresholds.empty() ? DetectionThresholds{} : read_thresholds(ana_thresholds);
            if (ana_smoothing == "none")
                thresholds.smoothing = Smoothing::interpolate();
            else if (ana_smoothing == "gcv")
                thresholds.smoothing = Smoothing{Smoothing::Kind::spline,
                                                 ana_p_opt->count() > 0 ? std::optional<double>(ana_penalty) : std::nullopt};

            const auto report = detect(series, known, thresholds);
            const auto config = effective_config(analyze);

            json j;
            j["verdict"] = {{"nc_detected", report.verdict.nc_detected},
                            {"parity", std::string(to_string(report.verdict.parity))},
                            {"branch", std::string(to_string(report.verdict.branch))}};
            j["lambda_fit"] = fit_json(report.lambda_fit);
            j["sigma_fit"] = fit_json(report.sigma_fit);
            j["f_nc_hat"] = report.f_nc_hat;
            j["theta_tilde_hat"] = report.theta_tilde_hat ? json(*report.theta_tilde_hat) : json(nullptr);
            j["n_hat"] = report.n_hat;
            j["n_source"] = report.n_source;
            j["j0"] = report.j0;
            j["max_identity_residual"] = report.max_identity_residual;
            j["notes"] = report.notes;
            j["config"] = config_json(config);
            emit(ana_out, j.dump(2) + "\n", out);

            if (!ana_sig_csv.empty()) {
                std::ostringstream os;
                write_config_comments(os, config);
                os << "f,lambda_hat,sigma_hat\n";
                for (const auto& p : report.signatures)
                    os << format_double(p.f) << ',' << format_double(p.lambda) << ',' << format_double(p.sigma) << '\n';
                emit(ana_sig_csv, os.str(), out);
            }
        } else if (verify->parsed()) {
            const auto nc = to_nc(alg);
            const auto r = verify_algebra(nc);
            json j;
            j["comm_xy"] = r.comm_xy;
            j["comm_pxpy"] = r.comm_pxpy;
            j["comm_xpx"] = r.comm_xpx;
            j["comm_xpy"] = r.comm_xpy;
            j["heisenberg_residual"] = r.heisenberg_residual;
            j["theta"] = nc.theta;
            j["theta_tilde"] = nc.theta_tilde;
            j["alpha"] = nc.alpha;
            j["config"] = config_json(effective_config(verify));
            emit(alg_out, j.dump(2) + "\n", out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const PipelineError& e) {
        err << "error: " << e.what() << '\n';
        return exit_pipeline;
    }
    return exit_ok;
}

} // namespace ncring::cli
