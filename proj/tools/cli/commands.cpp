#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "euii/dataset.hpp"
#include "euii/dist.hpp"
#include "euii/errors.hpp"
#include "euii/evidence.hpp"
#include "euii/fixed_design.hpp"
#include "euii/format.hpp"
#include "euii/gsd.hpp"
#include "euii/parallel.hpp"
#include "euii/reanalysis.hpp"
#include "euii/simulator.hpp"

#ifndef EUII_VERSION
#define EUII_VERSION "0.0.0"
#endif

namespace euii::cli {
namespace {

using json = nlohmann::ordered_json;

std::string num(double v)
{
    return format_exact(v);
}

std::optional<double> opt_number(const json& params, const char* key)
{
    if (!params.contains(key) || params[key].is_null()) return std::nullopt;
    return params[key].get<double>();
}

Sidedness parse_sided(const std::string& s)
{
    if (s == "one") return Sidedness::one;
    if (s == "two") return Sidedness::two;
    throw DomainError("sidedness must be 'one' or 'two'");
}

Arms parse_arms(int arms)
{
    if (arms == 1) return Arms::one;
    if (arms == 2) return Arms::two;
    throw DomainError("--arms must be 1 or 2");
}

// "pocock", "pocock+pp", "n_hacking+pp0.2", "reinagel".
sim::DesignVariant parse_design(const std::string& label)
{
    sim::DesignVariant d;
    const auto plus = label.find('+');
    d.method = sim::parse_method(label.substr(0, plus));
    if (d.method == sim::Method::reinagel) {
        d.futility = sim::Futility::reinagel_fixed;
    }
    if (plus != std::string::npos) {
        const std::string rule = label.substr(plus + 1);
        if (rule.rfind("pp", 0) != 0) {
            throw DomainError("unknown futility suffix in design '" + label + "'");
        }
        d.futility = sim::Futility::predictive_power;
        if (rule.size() > 2) {
            d.pp_threshold = std::stod(rule.substr(2));
        }
    }
    d.validate();
    return d;
}

json grid_to_json(const sim::StudyGrid& g)
{
    json designs = json::array();
    for (const auto& d : g.designs) designs.push_back(d.label());
    return json{{"n_max_per_group", g.n_max_per_group},
                {"deltas", g.deltas},
                {"designs", designs},
                {"priors", g.priors},
                {"fraction_policy", g.fraction_policy == sim::FractionPolicy::sample_size ? "sample_size"
                                                                                         : "equally_spaced"}};
}

sim::StudyGrid grid_from_json(const nlohmann::json& j)
{
    sim::StudyGrid g = sim::default_grid();
    if (j.contains("n_max_per_group")) g.n_max_per_group = j["n_max_per_group"].get<std::vector<int>>();
    if (j.contains("deltas")) g.deltas = j["deltas"].get<std::vector<double>>();
    if (j.contains("priors")) g.priors = j["priors"].get<std::vector<double>>();
    if (j.contains("designs")) {
        g.designs.clear();
        for (const auto& d : j["designs"]) g.designs.push_back(parse_design(d.get<std::string>()));
    }
    if (j.contains("fraction_policy")) {
        const auto p = j["fraction_policy"].get<std::string>();
        if (p == "sample_size") {
            g.fraction_policy = sim::FractionPolicy::sample_size;
        } else if (p == "equally_spaced") {
            g.fraction_policy = sim::FractionPolicy::equally_spaced;
        } else {
            throw DomainError("unknown fraction policy: " + p);
        }
    }
    return g;
}

Table cmd_euii(const json& p)
{
    using namespace fixed_design;
    const auto power_in = opt_number(p, "power");
    const auto beta = opt_number(p, "beta");
    const auto n_in = opt_number(p, "n");
    const auto delta = opt_number(p, "delta");
    const double alpha = p.value("alpha", 0.05);
    const Arms arms = parse_arms(p.value("arms", 1));
    const Sidedness sided = parse_sided(p.value("sided", std::string("two")));
    const bool t_test = p.value("test", std::string("z")) == "t";
    if (p.value("test", std::string("z")) != "z" && !t_test) {
        throw DomainError("--test must be 'z' or 't'");
    }
    if (n_in && beta) {
        throw DomainError("--n and --beta are contradictory; give one of them");
    }
    if (power_in && beta) {
        throw DomainError("--power and --beta are contradictory; give one of them");
    }
    std::optional<double> power = power_in;
    if (beta) power = 1.0 - *beta;

    double n = 0.0;
    evidence::EvidenceSummary ev;
    double power_out = 0.0;
    if (power) {
        if (n_in) {
            n = *n_in;
        } else {
            if (!delta) throw DomainError("--delta is required to compute n");
            n = t_test ? required_n_t(*delta, alpha, 1.0 - *power, arms, sided)
                       : required_n(*delta, alpha, 1.0 - *power, arms, sided);
        }
        ev = evidence::summarize(*power, alpha, n);
        power_out = *power;
    } else {
        if (!n_in || !delta) throw DomainError("give --power (or --beta), or both --n and --delta");
        n = *n_in;
        DesignPoint point;
        point.delta = *delta;
        point.arms = arms;
        point.n_total = n;
        point.alpha = alpha;
        point.sidedness = sided;
        point.test = t_test ? TestFamily::t : TestFamily::z;
        const auto e = evaluate(point);
        power_out = e.power;
        ev.dor = e.dor;
        ev.euii = e.euii;
        ev.n_basis = n;
    }
    // Direct ratios: a computed power may round to 1 while the DOR stays finite in log space.
    const evidence::LikelihoodRatios lr{power_out / alpha, (1.0 - power_out) / (1.0 - alpha)};
    Table t;
    t.columns = {"power", "alpha", "lr_plus", "lr_minus", "dor", "n", "euii", "asymptote"};
    t.rows.push_back({num(power_out), num(alpha), num(lr.lr_plus), num(lr.lr_minus), num(ev.dor), num(n),
                      num(ev.euii), delta ? num(euii_asymptote(*delta, arms)) : std::string()});
    return t;
}

Table cmd_gsd(const json& p)
{
    const auto family = gsd::parse_family(p.at("family").get<std::string>());
    const auto k = p.at("looks").get<std::size_t>();
    const double alpha = p.value("alpha", 0.025);
    const double power = p.value("power", 0.9);
    const double delta = p.at("delta").get<double>();
    const Sidedness sided = parse_sided(p.value("sided", std::string("one")));
    const Arms arms = parse_arms(p.value("arms", 1));
    const auto priors = p.value("priors", std::vector<double>{0.5});

    const double n_max = gsd::max_sample_size(family, k, alpha, power, delta, sided, arms);
    const auto spec = gsd::make_spec(family, k, alpha, sided, n_max);
    const auto null = gsd::crossing_probabilities(spec, 0.0);
    const auto alt = gsd::crossing_probabilities(spec, gsd::drift_for(delta, n_max, arms));
    const auto cells = gsd::expected_sample_sizes(spec, 0.0, delta, arms);
    const auto bounds = spec.critical_values();

    Table t;
    t.columns = {"quantity", "index", "value"};
    auto add = [&t](const std::string& q, const std::string& idx, double v) { t.rows.push_back({q, idx, num(v)}); };
    for (std::size_t i = 0; i < k; ++i) {
        add("info_fraction", std::to_string(i + 1), spec.info_fractions[i]);
        add("nominal_level", std::to_string(i + 1), spec.nominal_levels[i]);
        add("critical_z", std::to_string(i + 1), bounds[i]);
        add("stop_prob_h0", std::to_string(i + 1), null.efficacy_stop_prob[i]);
        add("stop_prob_h1", std::to_string(i + 1), alt.efficacy_stop_prob[i]);
    }
    add("overall_t1e", "", null.overall_reject);
    add("power", "", alt.overall_reject);
    add("n_max", "", n_max);
    add("e_n_h0_sig", "", cells.h0_sig.mean_n);
    add("e_n_h0_nonsig", "", cells.h0_nonsig.mean_n);
    add("e_n_h1_sig", "", cells.h1_sig.mean_n);
    add("e_n_h1_nonsig", "", cells.h1_nonsig.mean_n);
    add("dor", "", evidence::dor(alt.overall_reject, null.overall_reject));
    for (double prior : priors) {
        const auto a = adaptive::assess(alt.overall_reject, null.overall_reject, cells, prior);
        add("e_n_plus", num(prior), a.e_n_plus);
        add("e_n_minus", num(prior), a.e_n_minus);
        add("euii_first", num(prior), a.euii_first);
        add("euii_second", num(prior), a.euii_second);
    }
    return t;
}

Table cmd_simulate(const json& p, unsigned workers)
{
    const auto grid = grid_from_json(p.at("grid"));
    sim::RunOptions opts;
    opts.nsim = p.at("reps").get<std::uint64_t>();
    opts.seed = p.at("seed").get<std::uint64_t>();
    opts.workers = workers;
    const auto result = sim::run_study(grid, opts);
    std::ostringstream csv;
    sim::write_summary_csv(csv, result);
    return Table::from_csv(csv.str());
}

Table cmd_reanalyze(const json& p, unsigned workers, std::ostream& notes)
{
    const auto data = data::read_dataset_file(p.at("data").get<std::string>());
    for (const auto& issue : data.skipped) {
        notes << "skipped line " << issue.line << ": " << issue.reason << '\n';
    }
    if (data.rows.empty()) {
        throw DataError("dataset has zero valid rows");
    }
    reanalysis::Options opts;
    opts.reps = p.at("reps").get<std::uint64_t>();
    opts.seed = p.at("seed").get<std::uint64_t>();
    opts.workers = workers;
    opts.pp_threshold = p.value("futility_pp", 0.10);
    opts.rounding = reanalysis::parse_rounding(p.value("rounding", std::string("nearest")));
    const auto critical = p.value("critical", std::string("normal"));
    if (critical != "normal" && critical != "t") throw DomainError("--critical must be 'normal' or 't'");
    opts.scale = critical == "t" ? reanalysis::CriticalScale::t : reanalysis::CriticalScale::normal;
    const auto result = reanalysis::reanalyze(data.rows, reanalysis::default_variants(opts.pp_threshold), opts);
    for (const auto& e : result.excluded) {
        notes << "excluded " << e.id << ": " << e.reason << '\n';
    }
    std::ostringstream csv;
    reanalysis::write_summary_csv(csv, result);
    return Table::from_csv(csv.str());
}

Table cmd_dist(const json& p)
{
    const auto fn = p.at("fn").get<std::string>();
    const double x = p.at("x").get<double>();
    const double df = p.value("df", 1.0);
    const double ncp = p.value("ncp", 0.0);
    double v = 0.0;
    if (fn == "pnorm") {
        v = dist::std_normal_cdf(x);
    } else if (fn == "qnorm") {
        v = dist::std_normal_quantile(x);
    } else if (fn == "pt") {
        v = dist::t_cdf(x, df);
    } else if (fn == "qt") {
        v = dist::t_quantile(x, df);
    } else if (fn == "pnct") {
        v = dist::noncentral_t_cdf(x, df, ncp);
    } else if (fn == "logpnorm") {
        v = dist::log_std_normal_cdf(x);
    } else {
        throw DomainError("unknown function: " + fn);
    }
    Table t;
    t.columns = {"fn", "x", "df", "ncp", "value"};
    t.rows.push_back({fn, num(x), num(df), num(ncp), num(v)});
    return t;
}

std::string format_name(Format f)
{
    switch (f) {
    case Format::table: return "table";
    case Format::csv: return "csv";
    case Format::json: return "json";
    }
    return "csv";
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    f << text;
}

struct Destination {
    std::string out;       // empty: standard output
    std::string manifest;  // empty: next to `out`, or standard error
};

int emit(const Invocation& inv, const Destination& dest, std::ostream& out, std::ostream& err)
{
    const auto start = std::chrono::steady_clock::now();
    const Table table = execute(inv, &err);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream rendered;
    table.render(rendered, inv.format);
    if (dest.out.empty()) {
        out << rendered.str();
    } else {
        write_file(dest.out, rendered.str());
    }
    if (is_stochastic(inv.subcommand)) {
        const std::string manifest = make_manifest(inv, seconds).dump(2) + "\n";
        if (!dest.manifest.empty()) {
            write_file(dest.manifest, manifest);
        } else if (!dest.out.empty()) {
            write_file(dest.out + ".manifest.json", manifest);
        } else {
            err << manifest;
        }
    }
    return kExitOk;
}

}  // namespace

bool is_stochastic(const std::string& subcommand)
{
    return subcommand == "simulate" || subcommand == "reanalyze";
}

Table execute(const Invocation& inv, std::ostream* notes)
{
    if (inv.subcommand == "euii") return cmd_euii(inv.params);
    if (inv.subcommand == "gsd") return cmd_gsd(inv.params);
    if (inv.subcommand == "simulate") return cmd_simulate(inv.params, inv.workers);
    if (inv.subcommand == "reanalyze") return cmd_reanalyze(inv.params, inv.workers, notes ? *notes : std::cerr);
    if (inv.subcommand == "dist") return cmd_dist(inv.params);
    throw DomainError("unknown subcommand: " + inv.subcommand);
}

nlohmann::ordered_json make_manifest(const Invocation& inv, double seconds)
{
    json m;
    m["subcommand"] = inv.subcommand;
    m["params"] = inv.params;
    m["format"] = format_name(inv.format);
    m["seed"] = inv.params.value("seed", std::uint64_t{0});
    m["reps"] = inv.params.value("reps", std::uint64_t{0});
    m["workers"] = resolve_workers(inv.workers);
    m["version"] = EUII_VERSION;
    m["duration_seconds"] = seconds;
    return m;
}

Invocation invocation_from_manifest(const nlohmann::json& manifest)
{
    Invocation inv;
    inv.subcommand = manifest.at("subcommand").get<std::string>();
    inv.params = manifest.at("params");
    inv.format = parse_format(manifest.value("format", std::string("csv")));
    return inv;
}

unsigned default_workers()
{
    if (const char* env = std::getenv("EUII_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v >= 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Evidence per experimental unit for fixed, group-sequential and adaptive designs", "euii"};
    app.require_subcommand(1);
    app.set_version_flag("--version", EUII_VERSION);

    std::string format = "table";
    unsigned workers = default_workers();
    Destination dest;
    auto common = [&](CLI::App* sub, bool stochastic) {
        sub->add_option("--format", format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
        if (stochastic) {
            sub->add_option("--workers", workers, "worker threads (0: all cores; default from EUII_WORKERS)");
            sub->add_option("--out", dest.out, "output file (default: standard output)");
            sub->add_option("--manifest", dest.manifest, "manifest file (default: <out>.manifest.json)");
        }
    };

    // euii
    std::optional<double> e_power, e_beta, e_n, e_delta;
    double e_alpha = 0.05;
    int e_arms = 1;
    std::string e_test = "z", e_sided = "two";
    auto* euii_cmd = app.add_subcommand("euii", "DOR and EUII of a fixed-sample design");
    euii_cmd->add_option("--power", e_power, "power 1 - beta");
    euii_cmd->add_option("--beta", e_beta, "Type-II error rate");
    euii_cmd->add_option("--n", e_n, "total sample size (computed when absent)");
    euii_cmd->add_option("--delta", e_delta, "standardised effect size");
    euii_cmd->add_option("--alpha", e_alpha, "significance level")->capture_default_str();
    euii_cmd->add_option("--arms", e_arms, "1 or 2")->capture_default_str();
    euii_cmd->add_option("--test", e_test, "z or t")->capture_default_str();
    euii_cmd->add_option("--sided", e_sided, "one or two")->capture_default_str();
    common(euii_cmd, false);

    // gsd
    std::string g_family;
    std::size_t g_looks = 4;
    double g_alpha = 0.025, g_power = 0.9, g_delta = 0.0;
    std::vector<double> g_priors;
    std::string g_sided = "one";
    int g_arms = 1;
    auto* gsd_cmd = app.add_subcommand("gsd", "group-sequential boundaries, n_max and adaptive EUII");
    gsd_cmd->add_option("--family", g_family, "pocock, obrien_fleming, haybittle_peto")->required();
    gsd_cmd->add_option("--looks", g_looks, "number of analyses")->capture_default_str();
    gsd_cmd->add_option("--alpha", g_alpha, "overall level")->capture_default_str();
    gsd_cmd->add_option("--power", g_power, "target power")->capture_default_str();
    gsd_cmd->add_option("--delta", g_delta, "standardised effect size")->required();
    gsd_cmd->add_option("--prior", g_priors, "Pr(H1), repeatable");
    gsd_cmd->add_option("--sided", g_sided, "one or two")->capture_default_str();
    gsd_cmd->add_option("--arms", g_arms, "1 or 2")->capture_default_str();
    common(gsd_cmd, false);

    // simulate
    std::string s_grid = "default", s_policy;
    std::uint64_t s_reps = 10000, s_seed = 1;
    std::vector<double> s_priors;
    std::vector<std::string> s_designs;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of sequential t-test designs");
    sim_cmd->add_option("--grid", s_grid, "'default' or a JSON grid file")->capture_default_str();
    sim_cmd->add_option("--reps", s_reps, "replications per condition")->capture_default_str();
    sim_cmd->add_option("--seed", s_seed, "master seed")->capture_default_str();
    sim_cmd->add_option("--priors", s_priors, "Pr(H1) values")->delimiter(',');
    sim_cmd->add_option("--designs", s_designs, "design labels, e.g. pocock+pp,fixed")->delimiter(',');
    sim_cmd->add_option("--fraction-policy", s_policy, "sample_size or equally_spaced");
    common(sim_cmd, true);

    // reanalyze
    std::string r_data, r_rounding = "nearest", r_critical = "normal";
    std::uint64_t r_reps = 10000, r_seed = 1;
    double r_pp = 0.10;
    auto* re_cmd = app.add_subcommand("reanalyze", "single-interim reanalysis of a dataset of experiments");
    re_cmd->add_option("--data", r_data, "CSV with id,n_control,n_treatment,effect")->required();
    re_cmd->add_option("--reps", r_reps, "repetitions")->capture_default_str();
    re_cmd->add_option("--seed", r_seed, "master seed")->capture_default_str();
    re_cmd->add_option("--futility-pp", r_pp, "predictive-power futility threshold")->capture_default_str();
    re_cmd->add_option("--rounding", r_rounding, "nearest, ceil or floor")->capture_default_str();
    re_cmd->add_option("--critical", r_critical, "normal or t")->capture_default_str();
    common(re_cmd, true);

    // dist (debugging aid)
    std::string d_fn;
    double d_x = 0.0, d_df = 1.0, d_ncp = 0.0;
    auto* dist_cmd = app.add_subcommand("dist", "");
    dist_cmd->group("");
    dist_cmd->add_option("fn", d_fn, "pnorm, logpnorm, qnorm, pt, qt, pnct")->required();
    dist_cmd->add_option("x", d_x)->required();
    dist_cmd->add_option("--df", d_df);
    dist_cmd->add_option("--ncp", d_ncp);
    common(dist_cmd, false);

    // replay
    std::string manifest_path;
    auto* replay_cmd = app.add_subcommand("replay", "rerun a stochastic command from its manifest");
    replay_cmd->add_option("manifest_file", manifest_path, "manifest JSON file")->required();
    replay_cmd->add_option("--workers", workers, "worker threads");
    replay_cmd->add_option("--out", dest.out, "output file (default: standard output)");
    replay_cmd->add_option("--manifest", dest.manifest, "manifest of the replay");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Invocation inv;
        inv.workers = workers;
        if (replay_cmd->parsed()) {
            std::ifstream f(manifest_path);
            if (!f) throw DataError("cannot open manifest '" + manifest_path + "'");
            nlohmann::json m;
            try {
                m = nlohmann::json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw DataError(std::string("malformed manifest: ") + e.what());
            }
            inv = invocation_from_manifest(m);
            inv.workers = workers;
            return emit(inv, dest, out, err);
        }
        inv.format = parse_format(format);
        if (euii_cmd->parsed()) {
            inv.subcommand = "euii";
            inv.params = json{{"power", e_power ? json(*e_power) : json()},
                              {"beta", e_beta ? json(*e_beta) : json()},
                              {"n", e_n ? json(*e_n) : json()},
                              {"delta", e_delta ? json(*e_delta) : json()},
                              {"alpha", e_alpha},
                              {"arms", e_arms},
                              {"test", e_test},
                              {"sided", e_sided}};
        } else if (gsd_cmd->parsed()) {
            inv.subcommand = "gsd";
            inv.params = json{{"family", g_family}, {"looks", g_looks}, {"alpha", g_alpha},
                              {"power", g_power},   {"delta", g_delta}, {"priors", g_priors.empty() ? std::vector<double>{0.5} : g_priors},
                              {"sided", g_sided},   {"arms", g_arms}};
        } else if (sim_cmd->parsed()) {
            if (format == "table" && sim_cmd->count("--format") == 0) inv.format = Format::csv;
            sim::StudyGrid grid;
            if (s_grid == "default") {
                grid = sim::default_grid();
            } else {
                std::ifstream f(s_grid);
                if (!f) throw DataError("cannot open grid '" + s_grid + "'");
                try {
                    grid = grid_from_json(nlohmann::json::parse(f));
                } catch (const nlohmann::json::exception& e) {
                    throw DataError(std::string("malformed grid: ") + e.what());
                }
            }
            if (!s_priors.empty()) grid.priors = s_priors;
            if (!s_designs.empty()) {
                grid.designs.clear();
                for (const auto& d : s_designs) grid.designs.push_back(parse_design(d));
            }
            if (!s_policy.empty()) {
                grid = grid_from_json(json{{"fraction_policy", s_policy}, {"n_max_per_group", grid.n_max_per_group},
                                           {"deltas", grid.deltas}, {"priors", grid.priors},
                                           {"designs", grid_to_json(grid)["designs"]}});
            }
            inv.subcommand = "simulate";
            inv.params = json{{"grid", grid_to_json(grid)}, {"reps", s_reps}, {"seed", s_seed}};
        } else if (re_cmd->parsed()) {
            if (format == "table" && re_cmd->count("--format") == 0) inv.format = Format::csv;
            inv.subcommand = "reanalyze";
            inv.params = json{{"data", r_data},   {"reps", r_reps},         {"seed", r_seed},
                              {"futility_pp", r_pp}, {"rounding", r_rounding}, {"critical", r_critical}};
        } else if (dist_cmd->parsed()) {
            inv.subcommand = "dist";
            inv.params = json{{"fn", d_fn}, {"x", d_x}, {"df", d_df}, {"ncp", d_ncp}};
        }
        return emit(inv, dest, out, err);
    } catch (const DegenerateEvidenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace euii::cli
