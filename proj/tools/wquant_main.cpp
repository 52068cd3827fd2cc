#include "wquant/json_io.hpp"
#include "wquant/kernels.hpp"
#include "wquant/tail.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) wquant::fail_invalid("cannot open config file '" + path + "'");
    json j;
    in >> j;
    return j;
}

void write_file(const fs::path& p, const std::string& body) {
    if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) wquant::fail_invalid("cannot write '" + p.string() + "'");
    out << body;
}

int effective_jobs(int cli_jobs, int cfg_jobs) {
    if (cli_jobs > 0) return cli_jobs;
    return cfg_jobs > 0 ? cfg_jobs : 1;
}

void write_reports(const std::string& out_dir, const std::string& csv,
                   const json& jrep, const std::string& svg) {
    write_file(fs::path(out_dir) / "report.csv", csv);
    write_file(fs::path(out_dir) / "report.json", jrep.dump(2) + "\n");
    if (!svg.empty()) write_file(fs::path(out_dir) / "plot.svg", svg);
}

int run_quantize(const std::string& config, const std::string& out_dir) {
    wquant::QuantizeJob job = wquant::quantize_job_from_json(load_json(config));
    wquant::DiscreteMeasure base =
        wquant::discretize_on_scheme(job.measure, job.scheme, job.disc);
    wquant::Approximant ap =
        wquant::quantize_discrete(base, job.scheme, job.mode);
    const double coupling = wquant::coupling_cost(base, ap, job.p);

    write_file(fs::path(out_dir) / "approximant.json",
               wquant::approximant_to_json(ap).dump(2) + "\n");
    std::printf("%s approximant: %zu cells, W_%g coupling bound %.12g\n",
                wquant::mode_name(ap.mode), ap.cells.size(), job.p, coupling);
    std::printf("wrote %s\n",
                (fs::path(out_dir) / "approximant.json").string().c_str());
    return 0;
}

int run_sweep(const std::string& config, int cli_jobs, const std::string& out_dir,
              bool budget_sweep) {
    wquant::SweepConfig cfg = wquant::sweep_config_from_json(load_json(config));
    cfg.jobs = effective_jobs(cli_jobs, cfg.jobs);
    wquant::SweepReport rep =
        budget_sweep ? wquant::run_nterm_sweep(cfg) : wquant::run_h_sweep(cfg);

    for (const wquant::SweepRow& r : rep.rows) {
        if (r.bound_only)
            std::printf("%-12s %-10.6g measured=(bound only)  coupling=%.10g  "
                        "bound=%.10g  terms=%ld\n",
                        rep.label.c_str(), r.parameter, r.coupling, r.theoretical,
                        r.terms);
        else
            std::printf("%-12s %-10.6g measured=%.10g  coupling=%.10g  "
                        "bound=%.10g  terms=%ld\n",
                        rep.label.c_str(), r.parameter, r.measured, r.coupling,
                        r.theoretical, r.terms);
    }
    if (!rep.fit.degenerate)
        std::printf("log-log slope %.4f over %d points (max residual %.3g)\n",
                    rep.fit.slope, rep.fit.used, rep.fit.max_residual);
    std::printf("bounds %s\n", rep.bounds_pass ? "hold" : "VIOLATED");

    write_reports(out_dir, wquant::sweep_csv(rep.rows),
                  wquant::report_to_json(rep), wquant::sweep_svg(rep));
    return rep.bounds_pass ? 0 : 1;
}

int run_nonuniform_cmd(const std::string& config, int cli_jobs,
                       const std::string& out_dir) {
    wquant::NonuniformConfig cfg =
        wquant::nonuniform_config_from_json(load_json(config));
    cfg.jobs = effective_jobs(cli_jobs, cfg.jobs);
    wquant::NonuniformReport rep = wquant::run_nonuniform(cfg);

    std::vector<wquant::SweepRow> rows;
    for (const wquant::NonuniformTrial& t : rep.trials) {
        std::printf("n=%-6ld seed=%-4ld mesh=[%.6g, %.6g] sep=%.6g  "
                    "measured=%.10g  bound=%.10g  %s\n",
                    t.n_sites, t.seed, t.mesh_lower, t.mesh_upper, t.separation,
                    t.measured, t.bound, t.pass ? "ok" : "VIOLATED");
        wquant::SweepRow r;
        r.parameter = (double)t.n_sites;
        r.measured = t.measured;
        r.coupling = t.coupling;
        r.theoretical = t.bound;
        r.terms = t.n_sites;
        r.seed = t.seed;
        rows.push_back(r);
    }
    std::printf("all trials %s\n", rep.all_pass ? "pass" : "FAIL");

    wquant::SweepReport plot;
    plot.label = "nonuniform";
    plot.rows = rows;
    write_reports(out_dir, wquant::sweep_csv(rows), wquant::report_to_json(rep),
                  wquant::sweep_svg(plot));
    return rep.all_pass ? 0 : 1;
}

json decay_conditions_json(const wquant::TruncationReport& rep) {
    json conds = json::array();
    for (const wquant::ConditionReport& c : rep.conditions)
        conds.push_back(json{{"pass", c.pass},
                             {"worst_margin", c.worst_margin},
                             {"offender", c.offender}});
    return json{{"conditions", conds},
                {"conditions_pass", rep.conditions_pass},
                {"bound_ac", rep.bound_ac},
                {"bound_sc", rep.bound_sc},
                {"bound_atomic", rep.bound_atomic},
                {"total_bound", rep.total_bound},
                {"sphere_constant", rep.sphere_constant},
                {"series_note", rep.series_note}};
}

int run_tail(const std::string& config, const std::string& measure_inline,
             double R, double p, double eps, double q,
             const std::vector<double>& hs, int cli_jobs,
             const std::string& out_dir) {
    json jcfg = config.empty() ? json::object() : load_json(config);
    if (!measure_inline.empty()) jcfg["measure"] = json::parse(measure_inline);
    if (!jcfg.contains("measure"))
        wquant::fail_invalid("tail needs --config or an inline --measure");
    if (!std::isnan(R)) jcfg["R"] = R;
    if (!std::isnan(p)) jcfg["p"] = p;
    if (!std::isnan(eps)) jcfg["epsilon"] = eps;
    if (!std::isnan(q)) jcfg["q"] = q;
    if (!hs.empty()) jcfg["hs"] = hs;

    wquant::TailConfig cfg = wquant::tail_config_from_json(jcfg);
    cfg.jobs = effective_jobs(cli_jobs, cfg.jobs);
    wquant::TailReport rep = wquant::run_tail_experiment(cfg);

    std::printf("truncation cost at R=%g: %.10g\n", cfg.R, rep.trunc);
    std::vector<wquant::SweepRow> rows;
    for (const wquant::TailRow& t : rep.rows) {
        std::printf("h=%-10.6g measured=%.10g  coupling=%.10g  bound=%.10g  "
                    "terms=%ld  %s\n",
                    t.h, t.measured, t.coupling, t.bound, t.terms,
                    t.pass ? "ok" : "VIOLATED");
        wquant::SweepRow r;
        r.parameter = t.h;
        r.measured = t.measured;
        r.coupling = t.coupling;
        r.theoretical = t.bound;
        r.terms = t.terms;
        r.seed = (long)cfg.seed;
        rows.push_back(r);
    }

    json jrep = wquant::report_to_json(rep);
    if (cfg.measure.is_discrete()) {
        wquant::TailDecaySpec spec;
        spec.epsilon = cfg.epsilon;
        spec.p = cfg.p;
        spec.R = cfg.R;
        spec.q = cfg.q;
        const wquant::DiscreteMeasure& atoms = cfg.measure.as_discrete();
        wquant::TruncationReport trep =
            wquant::check_decay_conditions(nullptr, nullptr, &atoms, spec);
        jrep["decay_conditions"] = decay_conditions_json(trep);
        std::printf("atom decay condition %s (certified tail bound %.10g, "
                    "epsilon %g)\n",
                    trep.conditions[2].pass ? "holds" : "FAILS", trep.total_bound,
                    cfg.epsilon);
    }

    wquant::SweepReport plot;
    plot.label = "tail";
    plot.rows = rows;
    write_reports(out_dir, wquant::sweep_csv(rows), jrep, wquant::sweep_svg(plot));
    return rep.all_pass ? 0 : 1;
}

int run_baselines_cmd(const std::string& config, int cli_jobs,
                      const std::string& out_dir) {
    wquant::BaselineConfig cfg =
        wquant::baseline_config_from_json(load_json(config));
    cfg.jobs = effective_jobs(cli_jobs, cfg.jobs);
    wquant::BaselineReport rep = wquant::run_baselines(cfg);

    for (const wquant::BaselineRow& r : rep.rows)
        std::printf("N=%-6ld h=%-10.6g lattice=%.8g (%ld terms)  lloyd=%.8g  "
                    "empirical=%.8g  |lattice-lloyd|/lloyd=%.3g\n",
                    r.budget, r.h, r.lattice_w, r.lattice_terms, r.lloyd_w,
                    r.empirical_w, r.lloyd_vs_lattice);

    write_file(fs::path(out_dir) / "report.json",
               wquant::report_to_json(rep).dump(2) + "\n");
    return 0;
}

int run_verify(int jobs, const std::string& out_dir) {
    wquant::AcceptanceResult res = wquant::run_acceptance(jobs > 0 ? jobs : 1);
    for (const wquant::CriterionResult& c : res.criteria)
        std::printf("[%s] %2d %-44s %s\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.detail.c_str());
    write_file(fs::path(out_dir) / "report.csv", res.csv);
    write_file(fs::path(out_dir) / "report.json",
               wquant::report_to_json(res).dump(2) + "\n");
    std::printf("%s\n", res.all_pass ? "acceptance: all criteria pass"
                                     : "acceptance: FAILURES present");
    return res.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wquant: Voronoi quantization of probability measures with "
                 "certified transport bounds"};
    app.require_subcommand(1);

    std::string config, out_dir = ".";
    int jobs = 0;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("-c,--config", config, "JSON config file");
        if (need_config) opt->required();
        sub->add_option("-j,--jobs", jobs, "worker threads (default: config or 1)");
        sub->add_option("-o,--out", out_dir, "output directory")
            ->capture_default_str();
    };

    auto* quantize = app.add_subcommand(
        "quantize", "build one approximant and write approximant.json");
    add_common(quantize, true);

    auto* sweep_h = app.add_subcommand(
        "sweep-h", "error vs cell scale h under a fixed lattice");
    add_common(sweep_h, true);

    auto* sweep_n = app.add_subcommand(
        "sweep-n", "error vs term budget N (h chosen per budget)");
    add_common(sweep_n, true);

    auto* nonuniform = app.add_subcommand(
        "nonuniform", "random/jittered site families vs the mesh-norm bound");
    add_common(nonuniform, true);

    auto* tail = app.add_subcommand(
        "tail", "truncate-then-quantize experiment and tail certificates");
    add_common(tail, false);
    std::string measure_inline;
    double R = std::nan(""), p = std::nan(""), eps = std::nan(""), q = std::nan("");
    std::vector<double> hs;
    tail->add_option("--measure", measure_inline, "inline JSON measure");
    tail->add_option("--R", R, "truncation radius");
    tail->add_option("--p", p, "transport order");
    tail->add_option("--epsilon", eps, "target tail error");
    tail->add_option("--q", q, "atom decay exponent");
    tail->add_option("--scale", hs, "cell scales h (repeatable)");

    auto* baselines = app.add_subcommand(
        "baselines", "compare lattice quantizers with Lloyd and sampling");
    add_common(baselines, true);

    auto* verify = app.add_subcommand(
        "verify", "run the acceptance suite and write report.csv/report.json");
    verify->add_option("-j,--jobs", jobs, "worker threads (default 1)");
    verify->add_option("-o,--out", out_dir, "output directory")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*quantize) return run_quantize(config, out_dir);
        if (*sweep_h) return run_sweep(config, jobs, out_dir, false);
        if (*sweep_n) return run_sweep(config, jobs, out_dir, true);
        if (*nonuniform) return run_nonuniform_cmd(config, jobs, out_dir);
        if (*tail) return run_tail(config, measure_inline, R, p, eps, q, hs,
                                   jobs, out_dir);
        if (*baselines) return run_baselines_cmd(config, jobs, out_dir);
        if (*verify) return run_verify(jobs, out_dir);
    } catch (const wquant::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
