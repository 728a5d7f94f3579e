#include "alh/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "alh/cohomology.hpp"
#include "alh/errors.hpp"
#include "alh/forms.hpp"
#include "alh/geometry.hpp"
#include "alh/hk.hpp"
#include "alh/indicial.hpp"
#include "alh/modes.hpp"
#include "alh/operators.hpp"
#include "alh/parallel.hpp"

namespace alh {

using json = nlohmann::ordered_json;

namespace {

struct Artifact {
    json inputs = json::object();
    json results = json::object();
    std::vector<std::string> refs;
    std::vector<std::string> warnings;
    int code = kOk;
};

json num(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

json matrix(const Eigen::Matrix3d& m) {
    json a = json::array();
    for (int i = 0; i < 3; ++i) a.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return a;
}

json ratmat(const RatMat3& m) {
    json a = json::array();
    for (auto& row : m) a.push_back({row[0].str(), row[1].str(), row[2].str()});
    return a;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("not a number: '" + item + "'");
        }
    }
    return v;
}

MetricField metric_by_name(const std::string& name) {
    if (name == "gh") return metric_gh();
    if (name == "a") return metric_a();
    if (name == "model") return metric_model();
    if (name.rfind("calabi:", 0) == 0) {
        int n = 0;
        try {
            n = std::stoi(name.substr(7));
        } catch (const std::exception&) {
            throw UsageError("calabi:N needs an integer N");
        }
        return metric_calabi(n);
    }
    throw UsageError("unknown metric '" + name + "' (gh, a, model, calabi:N)");
}

// ---------------------------------------------------------------- curvature

struct CurvatureArgs {
    std::string metric = "gh";
    std::string at;
    bool exact = false;
};

Artifact cmd_curvature(const CurvatureArgs& a) {
    Artifact out;
    out.inputs = {{"metric", a.metric}, {"at", a.at}, {"exact", a.exact}};
    out.refs = {"Gibbons-Hawking model metric and its Ricci-flatness", "conformal rescalings gh, a, model",
                "Calabi ansatz family"};
    MetricField g = metric_by_name(a.metric);
    Curvature c = curvature(g);
    bool flat = is_ricci_flat(c);
    json coords = json::array();
    for (Var v : g.chart.coords) coords.push_back(std::string(var_name(v)));
    out.results["chart"] = coords;
    out.results["ricci_flat"] = flat;
    auto vd = volume_density(g);
    out.results["volume_density"] = vd.exact ? vd.exact->str() : "sqrt(" + vd.det.str() + ")";
    if (a.exact || a.at.empty()) {
        if (flat) {
            out.results["ricci"] = "0 (identically)";
        } else {
            json m = json::array();
            for (auto& row : c.ricci) {
                json r = json::array();
                for (auto& e : row) r.push_back(e.str());
                m.push_back(r);
            }
            out.results["ricci"] = m;
        }
        out.results["scalar"] = c.scalar.str();
    }
    if (!a.at.empty()) {
        auto p = parse_list(a.at);
        if (p.size() != 4) throw UsageError("--at needs four comma-separated coordinates");
        std::vector<double> by_id(registered_var_count(), 0.0);
        for (int i = 0; i < 4; ++i) by_id[g.chart.coords[i].id] = p[i];
        json m = json::array();
        for (auto& row : c.ricci) {
            json r = json::array();
            for (auto& e : row) r.push_back(num(e.eval(by_id)));
            m.push_back(r);
        }
        out.results["ricci_at"] = m;
        out.results["scalar_at"] = num(c.scalar.eval(by_id));
    }
    if (a.metric == "gh" && !flat) throw IdentityFailure("the Gibbons-Hawking model metric is not Ricci-flat");
    return out;
}

// ---------------------------------------------------------------- indicial

ModeReducedOp operator_by_name(const std::string& s) {
    if (s == "scalar") return reduced_scalar_b();
    if (s == "d00-even") return reduced_D00(Parity::even);
    if (s == "d00-odd") return reduced_D00(Parity::odd);
    throw UsageError("unknown operator '" + s + "' (scalar, d00-even, d00-odd)");
}

Artifact cmd_indicial(const std::string& op_name, bool weights) {
    Artifact out;
    out.inputs = {{"operator", op_name}, {"weights", weights}};
    out.refs = {"indicial roots of the reduced (0,0) operators", "Fredholm weight window"};
    ModeReducedOp op = operator_by_name(op_name);
    auto M = indicial_poly(op);
    auto roots = indicial_roots(M);
    out.results["components"] = op.components;
    out.results["determinant"] = M.det().str();
    json rs = json::array();
    for (auto& r : roots) {
        json j = {{"value", r.value}, {"imag", r.imag}, {"multiplicity", r.multiplicity}};
        if (r.exact) j["exact"] = r.exact->get_str();
        json nv = json::array();
        if (!r.exact_nullvectors.empty()) {
            for (auto& v : r.exact_nullvectors) {
                json e = json::object();
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (v[i] != 0) e[op.components.empty() ? std::to_string(i) : op.components[i]] = v[i].get_str();
                nv.push_back(e);
            }
        } else {
            for (auto& v : r.nullvectors) nv.push_back(v);
        }
        j["nullvectors"] = nv;
        rs.push_back(j);
    }
    out.results["roots"] = rs;
    if (weights) {
        auto w = weight_window(roots);
        out.results["weights"] = w.weights;
        out.results["l2_cutoff"] = w.cutoff;
        json iv = json::array();
        for (auto& [lo, hi] : w.intervals()) iv.push_back({num(lo), num(hi)});
        out.results["fredholm_intervals"] = iv;
    }
    return out;
}

// ---------------------------------------------------------------- modes

struct ModesArgs {
    int k = 0;
    std::string m = "0,0";
    int grid = 2000;
    bool fit = false;
    double c = std::nan("");
    double x_min = 1e-3;
    double left = 2, right = 1;
    std::string block;
};

json samples(const BVSolution& s, int count) {
    json a = json::array();
    int n = s.grid.size(), step = std::max(1, n / count);
    for (int i = 0; i < n; i += step) {
        json row = {{"x", s.grid.x[i]}};
        json u = json::array();
        for (auto& c : s.u) u.push_back(c[i]);
        row["u"] = u;
        a.push_back(row);
    }
    return a;
}

json fit_json(const ExpansionFit& f) {
    return {{"exponents", f.exponents}, {"coefficients", f.coeffs}, {"residual", f.residual},
            {"loglog_slope", f.slope},   {"slope_flag", f.slope_flag}, {"window", {f.x_lo, f.x_hi}}};
}

Artifact cmd_modes(const ModesArgs& a) {
    Artifact out;
    out.inputs = {{"k", a.k}, {"m", a.m}, {"grid", a.grid}, {"fit", a.fit}, {"x_min", a.x_min}, {"block", a.block}};
    out.refs = {"mode decomposition of the Laplacian", "decay trichotomy of the Fourier modes",
                "leading exponent of decaying harmonic 2-forms"};
    if (a.grid < 10) throw UsageError("--grid must be at least 10");
    ModesConfig cfg;
    cfg.nodes = a.grid;
    auto mv = parse_list(a.m);
    if (mv.size() != 2) throw UsageError("--m needs two comma-separated integers");
    std::array<int, 2> m = {static_cast<int>(mv[0]), static_cast<int>(mv[1])};
    if (!a.block.empty()) {
        if (a.block != "d00-even" && a.block != "d00-odd") throw UsageError("--block must be d00-even or d00-odd");
        double c = std::isnan(a.c) ? (a.block == "d00-even" ? 0.0 : -1.0) : a.c;
        auto op = sub_block(reduced_D00(a.block == "d00-even" ? Parity::even : Parity::odd), {3, 4});
        auto left = decay_conditions(op, c);
        std::vector<BoundaryCondition> right;
        for (int i = 0; right.size() + left.size() < 2; ++i) right.push_back(dirichlet(2, i, i == 0 ? a.right : 0));
        BVProblem p{op, RadialGrid::geometric(a.x_min, 1, a.grid), {}, left, right};
        auto s = solve_bvp(p, cfg);
        out.inputs["c"] = c;
        out.results["operator"] = op.str();
        out.results["components"] = op.components;
        out.results["residual"] = s.residual;
        out.results["samples"] = samples(s, 20);
        if (a.fit) {
            auto f = fit_expansion(s, indicial_roots(indicial_poly(op)), c, cfg);
            out.results["fit"] = fit_json(f);
            if (f.residual > cfg.expansion_tol) out.warnings.push_back("fit residual above tolerance");
            if (f.slope_flag) out.warnings.push_back("log-log slope matches no candidate exponent");
        }
        return out;
    }
    if (a.k == 0 && m[0] == 0 && m[1] == 0) {
        double c = std::isnan(a.c) ? -2.5 : a.c;
        auto op = reduced_scalar_b();
        BVProblem p{op, RadialGrid::geometric(a.x_min, 1, a.grid), {}, {dirichlet(1, 0, a.left)},
                    {dirichlet(1, 0, a.right)}};
        auto s = solve_bvp(p, cfg);
        out.inputs["c"] = c;
        out.results["operator"] = op.str();
        out.results["residual"] = s.residual;
        out.results["samples"] = samples(s, 20);
        if (a.fit) {
            auto f = fit_expansion(s, indicial_roots(indicial_poly(op)), c, cfg);
            out.results["fit"] = fit_json(f);
            if (f.residual > cfg.expansion_tol) out.warnings.push_back("fit residual above tolerance");
            if (f.slope_flag) out.warnings.push_back("log-log slope matches no candidate exponent");
        }
        return out;
    }
    auto op = project_modes(product_model_operator(), a.k, m, true);
    double x0 = wkb_inner_point(op, 1.0, cfg.wkb_depth);
    BVProblem p{op, RadialGrid::geometric(x0, 1, a.grid), {}, {wkb_decay_condition(op, x0)},
                {dirichlet(1, 0, a.right)}};
    auto s = solve_bvp(p, cfg);
    out.results["operator"] = op.str();
    out.results["x_min"] = x0;
    out.results["residual"] = s.residual;
    out.results["samples"] = samples(s, 20);
    if (a.fit) {
        std::function<double(double)> lead;
        double expected;
        std::string form;
        if (a.k != 0) {
            lead = [](double x) { return 1 / (x * x); };
            expected = -std::abs(a.k) / 2.0;
            form = "log u = a/x^2 + b log x + c";
        } else {
            lead = [](double x) { return 1 / x; };
            expected = -std::hypot(m[0], m[1]);
            form = "log u = a/x + b log x + c";
        }
        auto co = fit_log_profile(s, {lead, [](double x) { return std::log(x); }, [](double) { return 1.0; }},
                                  s.grid.x[std::min(cfg.boundary_nodes, s.grid.size() - 1)], 0.5);
        double rel = std::abs(co[0] / expected - 1);
        out.results["fit"] = {{"form", form}, {"a", co[0]}, {"b", co[1]}, {"c", co[2]},
                              {"expected_a", expected}, {"relative_error", rel}};
        if (rel > cfg.rate_tol) out.warnings.push_back("fitted rate outside the 5% tolerance");
    }
    return out;
}

// ---------------------------------------------------------------- deform

Artifact cmd_deform(const std::string& family, const std::string& param, bool report_mm, double t) {
    Artifact out;
    out.inputs = {{"family", family}, {"param", param}, {"t", t}, {"report_mm", report_mm}};
    out.refs = {"parameter manifold of boundary deformations", "Calabi ansatz variations",
                "semiflat variations and hyperKahler rotations"};
    auto pv = parse_list(param.empty() ? "1" : param);
    if (family == "calabi-scaling" || family == "calabi-modulus") {
        DeformationFamily f;
        if (family == "calabi-scaling") {
            if (pv.size() != 1) throw UsageError("calabi-scaling takes --param alpha");
            f = family_calabi_scaling(pv[0]);
            auto id = calabi_scaling_identities();
            out.results["exact_identities"] = {{"ok", id.ok}, {"detail", id.detail}};
            if (!id.ok) throw IdentityFailure(id.detail);
        } else {
            if (pv.size() != 2) throw UsageError("calabi-modulus takes --param alpha,beta");
            f = family_calabi_modulus(pv[0], pv[1]);
        }
        auto p = f.at(t);
        out.results["A"] = matrix(p.A);
        out.results["B"] = matrix(p.B);
        out.results["lambda"] = p.lambda;
        out.results["constraint_residual"] = constraint_F(p.A, p.B, p.lambda).cwiseAbs().maxCoeff();
        out.results["trace_A"] = p.A.trace();
        auto r = second_derivative_report(f);
        out.results["Add"] = matrix(r.Add);
        out.results["Bd"] = matrix(r.Bd);
        out.results["lambda_dd"] = r.lambda_dd;
        out.results["richardson_gap"] = r.richardson_gap;
        out.results["Add_displayed"] = matrix(f.Add_printed);
        out.results["lambda_dd_displayed"] = f.lambda_dd_printed;
        if (report_mm) {
            out.results["mm_residual_displayed"] = r.mm_residual_printed;
            out.results["mm_residual_factor2"] = r.mm_residual_factor2;
        }
        if (r.add_vs_printed > 1e-9)
            out.warnings.push_back("second derivative of A differs from the displayed matrix by " +
                                   std::to_string(r.add_vs_printed));
        if (r.bd_vs_printed > 1e-9) out.warnings.push_back("first derivative of B differs from the displayed matrix");
        if (r.lambda_vs_printed > 1e-9)
            out.warnings.push_back("lambda'' = " + std::to_string(r.lambda_dd) + " differs from the displayed " +
                                   std::to_string(f.lambda_dd_printed));
        return out;
    }
    SemiflatKind k = parse_semiflat(family);
    if (pv.size() != 1) throw UsageError(family + " takes --param c");
    double c = pv[0];
    ABPair raw;
    try {
        raw = family_semiflat(k, c);
    } catch (const StructureError& e) {
        throw IdentityFailure(e.what());
    }
    auto s = symmetrize(raw.A, raw.B);
    auto d = semiflat_printed(k, c);
    out.results["A"] = matrix(raw.A);
    out.results["B"] = matrix(raw.B);
    out.results["U"] = matrix(s.U);
    out.results["A_sym"] = matrix(s.At);
    out.results["B_sym"] = matrix(s.Bt);
    out.results["A_sym_displayed"] = matrix(d.At);
    out.results["B_sym_displayed"] = matrix(d.Bt);
    double ga = (s.At - d.At).cwiseAbs().maxCoeff(), gb = (s.Bt - d.Bt).cwiseAbs().maxCoeff();
    out.results["A_sym_gap"] = ga;
    out.results["B_sym_gap"] = gb;
    out.results["U_gap"] = (s.U - d.U).cwiseAbs().maxCoeff();
    out.results["trace_A_sym"] = s.At.trace();
    if (ga > 1e-12 || gb > 1e-12) out.warnings.push_back("polar normal form differs from the displayed matrices");
    if (k == SemiflatKind::y2_twist)
        out.warnings.push_back("y2 twist uses theta -> theta - c r y1 so that the expansion is constant");
    return out;
}

// ---------------------------------------------------------------- cohomology

Artifact cmd_cohomology(int b) {
    Artifact out;
    out.inputs = {{"b", b}};
    out.refs = {"L2 Hodge dimension 11 - b", "moduli dimension 3(10 - b)", "weighted cohomology of the end"};
    json table = json::array();
    for (auto& e : l2_hodge_table(b)) table.push_back({{"k", e.k}, {"label", e.label}, {"dim", e.dim}});
    out.results["l2_hodge"] = table;
    auto m = moduli_dim(b);
    out.results["moduli"] = {{"total", m.total}, {"anti_self_dual", m.anti_self_dual}, {"at_infinity", m.at_infinity}};
    json wh = json::array();
    for (auto [deg, g] : std::vector<std::pair<int, double>>{{0, -1}, {0, 0}, {1, 0}, {1, 1}}) {
        auto v = wh_interval(deg, g);
        wh.push_back({{"degree", deg}, {"gamma", g}, {"dim", v ? json(*v) : json("undefined")}});
    }
    out.results["interval_cohomology"] = wh;
    out.results["bracket_convention"] = "floor";
    if (m.total != 3 * (10 - b) || l2_hodge_dim(b, 2) != 11 - b)
        throw IdentityFailure("dimension bookkeeping failed");
    return out;
}

// ---------------------------------------------------------------- lift-check

Artifact cmd_lift_check() {
    Artifact out;
    out.refs = {"lifts of the structure vector fields to the blowups"};
    const Calculus stages[3] = {Calculus::b, Calculus::c, Calculus::a};
    const char* stage_names[3] = {"b", "c", "a"};
    const LiftField fields[5] = {LiftField::x3dx, LiftField::xdy1, LiftField::xdy2, LiftField::dtheta,
                                 LiftField::twisted};
    const char* field_names[5] = {"x^3 dx", "x dy1", "x dy2", "dtheta", "x (dy2 - y1 dtheta)"};
    std::vector<json> rows(15);
    std::vector<int> ok(15, 0);
    parallel_for(15, [&](int i) {
        Calculus st = stages[i / 5];
        LiftField f = fields[i % 5];
        VectorFieldExpr push = blowup_lift(a_field(f), st);
        ok[i] = push == lift_formula(f, st);
        rows[i] = {{"stage", stage_names[i / 5]},
                   {"field", field_names[i % 5]},
                   {"lift", push.str()},
                   {"ok", static_cast<bool>(ok[i])}};
    });
    json arr = json::array();
    for (auto& r : rows) arr.push_back(r);
    out.results["lifts"] = arr;
    bool printed_ok = blowup_lift(a_field(LiftField::twisted), Calculus::a) ==
                      lift_formula(LiftField::twisted, Calculus::a, true);
    out.results["twisted_prefactor_1_plus_xt_S"] = printed_ok;
    if (!printed_ok)
        out.warnings.push_back("twisted lift at the a-face carries the factor (1 + xt^2 S), not (1 + xt S)");
    for (int i = 0; i < 15; ++i)
        if (!ok[i]) throw IdentityFailure("lift formula failed for stage " + std::string(stage_names[i / 5]));
    return out;
}

// ---------------------------------------------------------------- triple-q

Artifact cmd_triple_q() {
    Artifact out;
    out.refs = {"Q map of a symplectic triple", "gauged deformation equation"};
    Triple w = standard_triple();
    FormField vol = reference_volume(w);
    auto q = q_map(w, vol);
    out.results["reference_volume"] = vol.coeff(15u).str();
    out.results["symplectic"] = is_symplectic(w);
    out.results["definite"] = is_definite(w, vol);
    out.results["Q_standard"] = ratmat(q);
    MetricField g = metric_gh_r();
    Triple asd{pm_basis().minus};
    RatFun eps(mpq_class(1, 10));
    Triple scaled{{eps * w.w[0], eps * w.w[1], eps * w.w[2]}};
    out.results["gauge_residual"] = {{"anti_self_dual", ratmat(gauge_residual(asd, w, g))},
                                     {"eps_omega_eps_1_10", ratmat(gauge_residual(scaled, w, g))}};
    for (auto& row : q)
        for (auto& e : row)
            if (!e.is_zero()) throw IdentityFailure("Q of the standard triple is not zero");
    return out;
}

// ---------------------------------------------------------------- output

void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        if (j.empty()) rows.emplace_back(path, "");
        for (auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, rows);
    } else if (j.is_array()) {
        if (j.empty()) rows.emplace_back(path, "");
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", rows);
    } else if (j.is_string()) {
        rows.emplace_back(path, j.get<std::string>());
    } else {
        rows.emplace_back(path, j.dump());
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return o + "\"";
}

} // namespace

std::string json_to_csv(const std::string& json_text) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(json::parse(json_text), "", rows);
    std::string out = "path,value\n";
    for (auto& [p, v] : rows) out += csv_field(p) + "," + csv_field(v) + "\n";
    return out;
}

void write_atomically(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    static std::mt19937_64 rng(std::random_device{}());
    static std::mutex mu;
    std::string tag;
    {
        std::lock_guard<std::mutex> lk(mu);
        tag = std::to_string(rng());
    }
    fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + tag);
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw UsageError("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw UsageError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw UsageError("cannot move output into place: " + ec.message());
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"alh-lab: model geometry, operators and deformations of ALH* ends"};
    app.require_subcommand(1);
    std::string format = "json", output;
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output,-o", output, "write the artifact here (atomically) instead of stdout");
    app.set_config("--config", "", "key=value file overriding defaults");
    unsigned seed = 1;
    app.add_option("--seed", seed, "random seed for sampled checks");

    CurvatureArgs ca;
    auto* curv = app.add_subcommand("curvature", "Ricci and scalar curvature of a model metric");
    curv->add_option("--metric", ca.metric, "gh, a, model or calabi:N");
    curv->add_option("--at", ca.at, "x,y1,y2,theta (chart coordinates)");
    curv->add_flag("--exact", ca.exact, "print exact rational functions");

    std::string op_name = "scalar";
    bool weights = false;
    auto* ind = app.add_subcommand("indicial", "indicial roots, nullvectors and weights");
    ind->add_option("--operator", op_name, "scalar, d00-even or d00-odd");
    ind->add_flag("--weights", weights, "report the Fredholm weight window");

    ModesArgs ma;
    auto* modes = app.add_subcommand("modes", "Fourier-mode boundary value problems");
    modes->require_subcommand(1);
    auto* solve = modes->add_subcommand("solve", "solve one mode and fit its expansion");
    solve->add_option("--k", ma.k, "circle frequency");
    solve->add_option("--m", ma.m, "torus frequency m1,m2");
    solve->add_option("--grid", ma.grid, "number of nodes");
    solve->add_flag("--fit", ma.fit, "fit the expansion or decay rate");
    solve->add_option("--c", ma.c, "weight cutoff for the expansion fit");
    solve->add_option("--x-min", ma.x_min, "inner end of the grid for polyhomogeneous modes");
    solve->add_option("--left", ma.left, "boundary value at the inner end (k = m = 0)");
    solve->add_option("--right", ma.right, "boundary value at x = 1");
    solve->add_option("--block", ma.block, "d00-even or d00-odd: the (f14, f23) or (f4, f123) block");

    std::string family, param;
    bool report_mm = false;
    double t = 0.1;
    auto* def = app.add_subcommand("deform", "deformation families of the hyperKahler triple");
    def->add_option("--family", family, "calabi-scaling, calabi-modulus, sf-theta, sf-y1 or sf-y2")->required();
    def->add_option("--param", param, "alpha | alpha,beta | c");
    def->add_option("--t", t, "curve parameter for the displayed matrices");
    def->add_flag("--report-mm", report_mm, "second-derivative constraint residuals");

    int b = 1;
    auto* coh = app.add_subcommand("cohomology", "L2 cohomology and moduli dimensions");
    coh->add_option("--b", b, "degree of the circle bundle, 1..9")->required();

    auto* lift = app.add_subcommand("lift-check", "verify the blowup lifts of the structure fields");
    auto* tq = app.add_subcommand("triple-q", "Q of the standard triple and gauge residuals");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    std::string command;
    Artifact art;
    try {
        if (*curv) {
            command = "curvature";
            art = cmd_curvature(ca);
        } else if (*ind) {
            command = "indicial";
            art = cmd_indicial(op_name, weights);
        } else if (*solve) {
            command = "modes solve";
            art = cmd_modes(ma);
        } else if (*def) {
            command = "deform";
            art = cmd_deform(family, param, report_mm, t);
        } else if (*coh) {
            command = "cohomology";
            art = cmd_cohomology(b);
        } else if (*lift) {
            command = "lift-check";
            art = cmd_lift_check();
        } else if (*tq) {
            command = "triple-q";
            art = cmd_triple_q();
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const StructureError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const IdentityFailure& e) {
        err << "identity failure: " << e.what() << "\n";
        return kIdentity;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }

    json doc;
    doc["command"] = command;
    json inputs = art.inputs;
    inputs["format"] = format;
    inputs["seed"] = seed;
    inputs["threads"] = thread_count();
    doc["inputs"] = inputs;
    doc["results"] = art.results;
    doc["provenance"] = {{"paper_refs", art.refs}};
    doc["warnings"] = art.warnings;
    std::string text = doc.dump(2) + "\n";
    if (format == "csv") text = json_to_csv(text);
    try {
        if (output.empty())
            out << text;
        else
            write_atomically(output, text);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    for (auto& w : art.warnings) err << "warning: " << w << "\n";
    return art.code;
}

} // namespace alh
