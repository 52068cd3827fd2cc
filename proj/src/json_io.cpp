#include "wquant/json_io.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace wquant {

using nlohmann::json;

namespace {

json point_to_json(const double* x, int d) {
    json a = json::array();
    for (int k = 0; k < d; ++k) a.push_back(x[k]);
    return a;
}

Point point_from_json(const json& j) {
    if (!j.is_array()) fail_invalid("expected a JSON array of coordinates");
    Point p;
    for (const json& v : j) p.push_back(v.get<double>());
    return p;
}

json box_to_json(const Box& b) {
    return json{{"lo", point_to_json(b.lo.data(), (int)b.lo.size())},
                {"hi", point_to_json(b.hi.data(), (int)b.hi.size())}};
}

Box box_from_json(const json& j) {
    Box b;
    b.lo = point_from_json(j.at("lo"));
    b.hi = point_from_json(j.at("hi"));
    if (b.lo.size() != b.hi.size()) fail_invalid("box lo/hi dimension mismatch");
    return b;
}

json quad_to_json(const QuadratureSpec& q) {
    if (q.kind == QuadratureSpec::Kind::tensor_gauss)
        return json{{"method", "tensor_gauss"}, {"nodes_per_axis", q.nodes_per_axis}};
    return json{{"method", "monte_carlo"},
                {"mc_samples", q.mc_samples},
                {"seed", q.seed}};
}

QuadratureSpec quad_from_json(const json& j, int dim) {
    QuadratureSpec q = QuadratureSpec::default_for_dim(dim);
    if (j.contains("method")) {
        const std::string m = j.at("method").get<std::string>();
        if (m == "tensor_gauss")
            q.kind = QuadratureSpec::Kind::tensor_gauss;
        else if (m == "monte_carlo")
            q.kind = QuadratureSpec::Kind::monte_carlo;
        else
            fail_invalid("unknown quadrature method '" + m +
                         "' (tensor_gauss | monte_carlo)");
    }
    q.nodes_per_axis = j.value("nodes_per_axis", q.nodes_per_axis);
    q.mc_samples = j.value("mc_samples", q.mc_samples);
    q.seed = j.value("seed", q.seed);
    return q;
}

ApproximantMode mode_from_string(const std::string& s) {
    if (s == "dirac") return ApproximantMode::dirac;
    if (s == "indicator") return ApproximantMode::indicator;
    fail_invalid("unknown approximant mode '" + s + "' (dirac | indicator)");
}

DiscretizeOptions disc_from_json(const json& j) {
    DiscretizeOptions o;
    o.gl_per_piece = j.value("gl_per_piece", o.gl_per_piece);
    o.split_at_sites = j.value("split_at_sites", o.split_at_sites);
    o.grid_per_axis = j.value("grid_per_axis", o.grid_per_axis);
    o.max_atoms = j.value("max_atoms", o.max_atoms);
    return o;
}

} // namespace

Measure measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        fail_invalid("measure config needs a \"type\" field");
    const std::string type = j.at("type").get<std::string>();

    Measure mu;
    if (type == "uniform_cube") {
        const int dim = j.at("dim").get<int>();
        Point center = j.contains("center") ? point_from_json(j["center"]) : Point{};
        mu = make_uniform_cube(dim, j.value("side", 1.0), center);
    } else if (type == "gaussian") {
        const int dim = j.at("dim").get<int>();
        Point mean = j.contains("mean") ? point_from_json(j["mean"]) : Point{};
        mu = make_gaussian(dim, j.at("sigma").get<double>(), mean,
                           j.value("trunc_sigmas", 8.0));
    } else if (type == "atoms") {
        const json& pts = j.at("points");
        if (!pts.is_array() || pts.empty())
            fail_invalid("atoms measure needs a nonempty \"points\" array");
        std::vector<Atom> atoms(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            atoms[i].x = point_from_json(pts[i]);
            atoms[i].w = 1.0;
        }
        if (j.contains("weights")) {
            const json& ws = j["weights"];
            if (ws.size() != atoms.size())
                fail_invalid("atoms measure: weights and points differ in length");
            for (std::size_t i = 0; i < atoms.size(); ++i)
                atoms[i].w = ws[i].get<double>();
        }
        mu = make_atoms(atoms);
    } else if (type == "mixture") {
        std::vector<double> weights;
        std::vector<Measure> parts;
        for (const json& c : j.at("components")) {
            weights.push_back(c.at("weight").get<double>());
            parts.push_back(measure_from_json(c.at("measure")));
        }
        mu = make_mixture(weights, parts);
    } else if (type == "circle_arc") {
        Point center =
            j.contains("center") ? point_from_json(j["center"]) : Point{0.0, 0.0};
        mu = make_circle_arc(center, j.at("radius").get<double>(),
                             j.value("theta0", 0.0),
                             j.value("theta1", 2.0 * std::numbers::pi),
                             j.value("resolution", 16384));
    } else if (type == "density") {
        fail_invalid("density stubs cannot be rebuilt from JSON; use one of the "
                     "constructor types (uniform_cube, gaussian, atoms, mixture, "
                     "circle_arc)");
    } else {
        fail_invalid("unknown measure type '" + type +
                     "' (uniform_cube | gaussian | atoms | mixture | circle_arc)");
    }

    if (j.contains("quadrature")) {
        auto* f = std::get_if<DensityMeasure>(&mu.v);
        if (!f)
            fail_invalid("a \"quadrature\" override only applies to density "
                         "measures (uniform_cube, gaussian)");
        f->quad = quad_from_json(j["quadrature"], f->dim);
    }
    return mu;
}

json measure_to_json(const Measure& mu) {
    if (const auto* dm = std::get_if<DiscreteMeasure>(&mu.v)) {
        json pts = json::array(), ws = json::array();
        for (std::size_t i = 0; i < dm->size(); ++i) {
            pts.push_back(point_to_json(dm->x(i), dm->dim));
            ws.push_back(dm->ws[i]);
        }
        return json{
            {"type", "atoms"}, {"dim", dm->dim}, {"points", pts}, {"weights", ws}};
    }
    if (const auto* f = std::get_if<DensityMeasure>(&mu.v)) {
        return json{{"type", "density"},
                    {"label", f->label},
                    {"dim", f->dim},
                    {"support", box_to_json(f->support)},
                    {"pdf_sup", f->pdf_sup},
                    {"quadrature", quad_to_json(f->quad)}};
    }
    const Mixture& mix = std::get<Mixture>(mu.v);
    json comps = json::array();
    for (std::size_t i = 0; i < mix.parts.size(); ++i)
        comps.push_back(json{{"weight", mix.weights[i]},
                             {"measure", measure_to_json(*mix.parts[i])}});
    return json{{"type", "mixture"}, {"components", comps}};
}

Lattice lattice_from_json(const json& j) {
    const std::string kind_s = j.at("kind").get<std::string>();
    int dim = j.value("dim", 0);
    LatticeKind kind;
    if (kind_s == "A2") {
        kind = LatticeKind::A2;
        if (dim == 0) dim = 2;
    } else if (kind_s == "general") {
        kind = LatticeKind::general;
    } else if (!kind_s.empty() && (kind_s[0] == 'Z' || kind_s[0] == 'D')) {
        kind = kind_s[0] == 'Z' ? LatticeKind::Zd : LatticeKind::Dn;
        if (kind_s.size() > 1 && std::isdigit((unsigned char)kind_s[1]))
            dim = std::stoi(kind_s.substr(1)); // "Z3", "D4" shorthands
        else if (kind_s != "Zd" && kind_s != "Dn")
            fail_invalid("unknown lattice kind '" + kind_s + "'");
    } else {
        fail_invalid("unknown lattice kind '" + kind_s +
                     "' (Zd | Dn | A2 | general, or Z<d> / D<d>)");
    }

    std::vector<double> basis;
    if (j.contains("basis")) {
        const json& rows = j["basis"];
        if (dim == 0) dim = (int)rows.size();
        for (const json& row : rows)
            for (const json& v : row) basis.push_back(v.get<double>());
        if ((int)rows.size() != dim || basis.size() != (std::size_t)(dim * dim))
            fail_invalid("lattice basis must be a dim x dim matrix");
    }
    if (dim == 0) fail_invalid("lattice config needs a \"dim\" field");
    return make_lattice(kind, dim, basis);
}

json lattice_to_json(const Lattice& L) {
    json rows = json::array();
    for (int r = 0; r < L.dim; ++r)
        rows.push_back(point_to_json(L.basis.data() + (std::size_t)r * L.dim, L.dim));
    return json{
        {"kind", lattice_kind_name(L.kind)}, {"dim", L.dim}, {"basis", rows}};
}

json approximant_to_json(const Approximant& ap) {
    json scheme;
    if (const auto* ls = std::get_if<LatticeScheme>(&ap.scheme)) {
        scheme = json{{"type", "lattice"},
                      {"lattice", lattice_to_json(ls->lattice)},
                      {"h", ls->h}};
    } else {
        const SiteScheme& ss = std::get<SiteScheme>(ap.scheme);
        json sites = json::array();
        for (std::size_t i = 0; i < ss.size(); ++i)
            sites.push_back(point_to_json(ss.site(i), (int)ss.dim));
        scheme = json{{"type", "sites"},
                      {"dim", ss.dim},
                      {"sites", sites},
                      {"support", box_to_json(ss.support)}};
    }

    json cells = json::array();
    const bool lattice = std::holds_alternative<LatticeScheme>(ap.scheme);
    for (const ApproxCell& c : ap.cells) {
        json jc{{"site", point_to_json(c.site.data(), (int)ap.dim)},
                {"mass", c.mass}};
        if (lattice) {
            json id = json::array();
            for (int v : c.id) id.push_back(v);
            jc["id"] = id;
        } else {
            jc["site_index"] = c.site_index;
        }
        cells.push_back(std::move(jc));
    }
    return json{{"mode", mode_name(ap.mode)},
                {"dim", ap.dim},
                {"scheme", scheme},
                {"cells", cells}};
}

Approximant approximant_from_json(const json& j) {
    Approximant ap;
    ap.mode = mode_from_string(j.at("mode").get<std::string>());
    ap.dim = j.at("dim").get<std::size_t>();

    const json& sj = j.at("scheme");
    const std::string type = sj.at("type").get<std::string>();
    if (type == "lattice") {
        LatticeScheme ls;
        ls.lattice = lattice_from_json(sj.at("lattice"));
        ls.h = sj.at("h").get<double>();
        ap.scheme = std::move(ls);
    } else if (type == "sites") {
        SiteScheme ss;
        ss.dim = sj.at("dim").get<std::size_t>();
        for (const json& p : sj.at("sites"))
            for (const json& v : p) ss.sites.push_back(v.get<double>());
        ss.support = box_from_json(sj.at("support"));
        ap.scheme = std::move(ss);
    } else {
        fail_invalid("unknown scheme type '" + type + "' (lattice | sites)");
    }

    for (const json& jc : j.at("cells")) {
        ApproxCell c;
        c.site = point_from_json(jc.at("site"));
        c.mass = jc.at("mass").get<double>();
        if (jc.contains("id"))
            for (const json& v : jc["id"]) c.id.push_back(v.get<int>());
        if (jc.contains("site_index")) c.site_index = jc["site_index"].get<std::size_t>();
        ap.cells.push_back(std::move(c));
    }
    return ap;
}

QuantizeJob quantize_job_from_json(const json& j) {
    QuantizeJob job;
    job.measure = measure_from_json(j.at("measure"));
    job.mode = mode_from_string(j.value("mode", "dirac"));
    job.p = j.value("p", 2.0);
    if (j.contains("discretization")) job.disc = disc_from_json(j["discretization"]);

    if (j.contains("lattice")) {
        LatticeScheme ls;
        ls.lattice = lattice_from_json(j["lattice"]);
        ls.h = j.value("h", 1.0);
        job.scheme = std::move(ls);
    } else if (j.contains("sites")) {
        SiteScheme ss;
        const json& sites = j["sites"];
        if (!sites.is_array() || sites.empty() || !sites[0].is_array())
            fail_invalid("\"sites\" must be a nonempty array of coordinate arrays");
        ss.dim = sites[0].size();
        for (const json& p : sites)
            for (const json& v : p) ss.sites.push_back(v.get<double>());
        ss.support = j.contains("support") ? box_from_json(j["support"])
                                           : support_box(job.measure);
        job.scheme = std::move(ss);
    } else {
        fail_invalid(
            "quantize config needs either \"lattice\" (+ \"h\") or \"sites\"");
    }
    return job;
}

SweepConfig sweep_config_from_json(const json& j) {
    SweepConfig c;
    c.measure = measure_from_json(j.at("measure"));
    if (j.contains("lattice")) c.lattice = lattice_from_json(j["lattice"]);
    c.mode = mode_from_string(j.value("mode", "dirac"));
    c.p = j.value("p", 2.0);
    c.hs = j.value("hs", std::vector<double>{});
    c.budgets = j.value("budgets", std::vector<long>{});
    c.ball_radius = j.value("ball_radius", -1.0);
    c.seed = j.value("seed", (std::uint64_t)1);
    if (j.contains("discretization")) c.disc = disc_from_json(j["discretization"]);
    c.jobs = j.value("jobs", 1);
    c.lp_pair_cap = j.value("lp_pair_cap", c.lp_pair_cap);
    return c;
}

NonuniformConfig nonuniform_config_from_json(const json& j) {
    NonuniformConfig c;
    c.measure = measure_from_json(j.at("measure"));
    c.generator = j.value("generator", std::string("jittered_grid"));
    c.site_counts = j.at("site_counts").get<std::vector<long>>();
    c.trials = j.value("trials", 10);
    c.jitter = j.value("jitter", 0.25);
    c.p = j.value("p", 2.0);
    c.seed = j.value("seed", (std::uint64_t)2);
    if (j.contains("discretization")) c.disc = disc_from_json(j["discretization"]);
    c.jobs = j.value("jobs", 1);
    return c;
}

TailConfig tail_config_from_json(const json& j) {
    TailConfig c;
    c.measure = measure_from_json(j.at("measure"));
    if (j.contains("lattice")) c.lattice = lattice_from_json(j["lattice"]);
    c.hs = j.value("hs", std::vector<double>{0.5, 0.25, 0.125});
    c.R = j.value("R", 1.0);
    c.p = j.value("p", 2.0);
    c.epsilon = j.value("epsilon", 0.1);
    c.q = j.value("q", 2.0);
    c.seed = j.value("seed", (std::uint64_t)3);
    if (j.contains("discretization")) c.disc = disc_from_json(j["discretization"]);
    c.jobs = j.value("jobs", 1);
    return c;
}

BaselineConfig baseline_config_from_json(const json& j) {
    BaselineConfig c;
    c.measure = measure_from_json(j.at("measure"));
    c.budgets = j.at("budgets").get<std::vector<long>>();
    c.p = j.value("p", 2.0);
    c.lloyd_samples = j.value("lloyd_samples", c.lloyd_samples);
    c.lloyd_iters = j.value("lloyd_iters", c.lloyd_iters);
    c.empirical_seeds = j.value("empirical_seeds", c.empirical_seeds);
    c.seed = j.value("seed", (std::uint64_t)4);
    c.jobs = j.value("jobs", 1);
    return c;
}

namespace {

json sweep_row_json(const SweepRow& r) {
    json row{{"parameter", r.parameter},
             {"coupling_bound", r.coupling},
             {"theoretical_bound", r.theoretical},
             {"terms", r.terms},
             {"seed", r.seed},
             {"bound_only", r.bound_only},
             {"term_ok", r.term_ok}};
    row["measured_wp"] = std::isnan(r.measured) ? json() : json(r.measured);
    return row;
}

} // namespace

json report_to_json(const SweepReport& rep) {
    json rows = json::array();
    for (const SweepRow& r : rep.rows) rows.push_back(sweep_row_json(r));
    json fit{{"slope", rep.fit.slope},
             {"intercept", rep.fit.intercept},
             {"max_residual", rep.fit.max_residual},
             {"used", rep.fit.used},
             {"degenerate", rep.fit.degenerate}};
    return json{{"label", rep.label},
                {"rows", rows},
                {"fit", fit},
                {"bounds_pass", rep.bounds_pass}};
}

json report_to_json(const NonuniformReport& rep) {
    json trials = json::array();
    for (const NonuniformTrial& t : rep.trials) {
        json row{{"n_sites", t.n_sites},
                 {"seed", t.seed},
                 {"mesh_upper", t.mesh_upper},
                 {"mesh_lower", t.mesh_lower},
                 {"separation", t.separation},
                 {"coupling_bound", t.coupling},
                 {"bound", t.bound},
                 {"scaling_const", t.scaling_const},
                 {"pass", t.pass}};
        row["measured_wp"] = std::isnan(t.measured) ? json() : json(t.measured);
        trials.push_back(std::move(row));
    }
    return json{{"trials", trials}, {"all_pass", rep.all_pass}};
}

json report_to_json(const TailReport& rep) {
    json rows = json::array();
    for (const TailRow& r : rep.rows) {
        json row{{"h", r.h},
                 {"coupling_bound", r.coupling},
                 {"bound", r.bound},
                 {"terms", r.terms},
                 {"pass", r.pass}};
        row["measured_wp"] = std::isnan(r.measured) ? json() : json(r.measured);
        rows.push_back(std::move(row));
    }
    return json{{"truncation_error", rep.trunc},
                {"rows", rows},
                {"r_grid", rep.r_grid},
                {"trunc_scan", rep.trunc_scan},
                {"all_pass", rep.all_pass}};
}

json report_to_json(const BaselineReport& rep) {
    json rows = json::array();
    for (const BaselineRow& r : rep.rows)
        rows.push_back(json{{"budget", r.budget},
                            {"h", r.h},
                            {"lattice_w", r.lattice_w},
                            {"lloyd_w", r.lloyd_w},
                            {"empirical_w", r.empirical_w},
                            {"lattice_terms", r.lattice_terms},
                            {"lloyd_vs_lattice", r.lloyd_vs_lattice}});
    return json{{"rows", rows}};
}

json report_to_json(const AcceptanceResult& res) {
    json crits = json::array();
    for (const CriterionResult& c : res.criteria)
        crits.push_back(json{
            {"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return json{{"criteria", crits}, {"all_pass", res.all_pass}};
}

} // namespace wquant
