// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alh/cohomology.hpp"
#include "alh/forms.hpp"
#include "alh/geometry.hpp"
#include "alh/hk.hpp"
#include "alh/indicial.hpp"
#include "alh/modes.hpp"
#include "alh/operators.hpp"
#include "oracles/fd_curvature.hpp"
#include "oracles/lift_jacobian.hpp"

using namespace alh;

namespace {

struct Outcome {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

RatFun xp(int k) { return RatFun::power(var("x"), k); }

double gap(const Matrix3d& a, const Matrix3d& b) { return (a - b).cwiseAbs().maxCoeff(); }

FormField random_form(const Chart& c, int deg, std::mt19937& rng) {
    std::uniform_int_distribution<int> k(-3, 3), e(0, 2);
    FormField w(c, deg);
    for (unsigned m = 0; m < 16; ++m) {
        if (popcount4(m) != deg) continue;
        RatFun f;
        for (int t = 0; t < 2; ++t) {
            RatFun term(k(rng));
            for (int i = 0; i < 3; ++i) term *= RatFun::variable(c.coords[i]).pow(e(rng));
            f += term;
        }
        w.set(m, f / (RatFun::variable(c.coords[0]) + RatFun(1)));
    }
    return w;
}

// ---------------------------------------------------------------- 1

Outcome ricci_flat() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    Curvature c = curvature(metric_gh());
    bool zero = true;
    for (auto& row : c.ricci)
        for (auto& e : row) zero = zero && e.is_zero();
    o.require(zero && is_ricci_flat(c), "symbolic Ricci tensor is not identically zero");
    o.require(c.scalar.is_zero(), "scalar curvature is not zero");

    fdo::MetricFn gfn = [](const fdo::Vec& p) {
        fdo::Real x = p[0], y1 = p[1];
        fdo::Mat g = fdo::Mat::Zero();
        g(0, 0) = std::pow(x, (fdo::Real)-5);
        g(1, 1) = 1 / x;
        g(2, 2) = 1 / x + x * y1 * y1;
        g(3, 3) = x;
        g(2, 3) = g(3, 2) = x * y1;
        return g;
    };
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ux(0.2, 0.6), uy(-1.0, 1.0);
    double worst = 0;
    for (int n = 0; n < 10; ++n) {
        fdo::Vec p;
        p << ux(rng), uy(rng), uy(rng), 3 * uy(rng);
        worst = std::max(worst, (double)fdo::ricci(gfn, p).cwiseAbs().maxCoeff());
    }
    o.require(worst < 1e-6, "finite-difference Ricci max-norm " + fmt(worst));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 30, "runtime " + fmt(secs) + " s");
    o.note("fd oracle max " + fmt(worst));
    return o;
}

// ---------------------------------------------------------------- 2

Outcome conformal_volume() {
    Outcome o;
    MetricField gh = metric_gh(), a = metric_a();
    bool conf = true;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) conf = conf && a.g[i][j] == gh.g[i][j] * xp(-1);
    o.require(conf, "metric_a != x^-1 metric_gh");
    auto vgh = volume_density(gh), vm = volume_density(metric_model());
    o.require(vgh.exact && *vgh.exact == xp(-3), "volume density of gh is not x^-3");
    o.require(vm.exact && *vm.exact == xp(-1), "volume density of the model is not x^-1");
    return o;
}

// ---------------------------------------------------------------- 3

Outcome operator_identity() {
    Outcome o;
    IdentityReport r = a_rescale_identity();
    o.require(r.ok, "x * laplacian(gh) differs from the grouped form: " + r.detail);
    o.require(xp(1) * laplacian(metric_gh()) == grouped_model_laplacian(), "direct comparison of the grouped form");
    ModeReducedOp L00 = reduced_scalar_b();
    Var x = var("x");
    ModeReducedOp expect = scalar_op(x, {RatFun(0), RatFun(2) * xp(1), xp(2)});
    o.require(L00 == expect, "L00 is " + L00.str());
    auto m00 = project_modes(laplacian(metric_gh()), 0, {0, 0}, false);
    o.require(scaled(xp(-3), m00) == L00, "x^-3 times the (0,0) mode is not L00");
    return o;
}

// ---------------------------------------------------------------- 4

Outcome indicial_suite() {
    Outcome o;
    auto sr = indicial_roots(indicial_poly(reduced_scalar_b()));
    std::vector<mpq_class> got;
    for (auto& r : sr) got.push_back(r.exact ? *r.exact : mpq_class(999));
    o.require(got == std::vector<mpq_class>{-1, 0}, "scalar roots");
    o.require(weight_window(sr).weights == std::vector<double>{-2, -1}, "scalar weights");

    std::set<mpq_class> all;
    for (Parity p : {Parity::even, Parity::odd})
        for (auto& r : indicial_roots(indicial_poly(reduced_D00(p)))) {
            o.require(r.exact.has_value(), "D00 root not rational");
            if (r.exact) all.insert(*r.exact);
        }
    o.require(all == std::set<mpq_class>{mpq_class(-3, 2), 0, mpq_class(1, 2), 2}, "D00 root set");

    auto even = indicial_roots(indicial_poly(reduced_D00(Parity::even)));
    int rel0 = 0, rel2 = 0;
    for (auto& r : even) {
        if (!r.exact) continue;
        for (auto& v : r.exact_nullvectors) {
            if (v[3] == 0 && v[4] == 0) continue;
            if (*r.exact == 0 && v[3] == -v[4]) ++rel0;
            if (*r.exact == 2 && v[3] == v[4]) ++rel2;
            if (*r.exact == 0 && v[3] != -v[4]) o.require(false, "root 0 nullvector off f14 = -f23");
            if (*r.exact == 2 && v[3] != v[4]) o.require(false, "root 2 nullvector off f14 = f23");
        }
    }
    o.require(rel0 == 1, "root 0 nullvector with f14 = -f23");
    o.require(rel2 == 1, "root 2 nullvector with f14 = f23");
    return o;
}

// ---------------------------------------------------------------- 5

double span_error(int nodes) {
    const double x0 = 1e-3;
    BVProblem p{reduced_scalar_b(), RadialGrid::geometric(x0, 1, nodes), {}, {dirichlet(1, 0, 2)},
                {dirichlet(1, 0, 1)}};
    auto s = solve_bvp(p);
    double b = 1 / (1 / x0 - 1), a = 1 - b, err = 0;
    for (int i = 0; i < p.grid.size(); ++i) err = std::max(err, std::abs(s.u[0][i] - (a + b / p.grid.x[i])));
    return err;
}

double decay_fit(int k, std::array<int, 2> m, bool inverse_square) {
    auto op = project_modes(product_model_operator(), k, m, true);
    double x0 = wkb_inner_point(op, 1.0, 40);
    BVProblem p{op, RadialGrid::geometric(x0, 1, 2000), {}, {wkb_decay_condition(op, x0)}, {dirichlet(1, 0, 1)}};
    auto s = solve_bvp(p);
    std::function<double(double)> lead = inverse_square ? std::function<double(double)>([](double x) { return 1 / (x * x); })
                                                        : std::function<double(double)>([](double x) { return 1 / x; });
    auto c = fit_log_profile(s, {lead, [](double x) { return std::log(x); }, [](double) { return 1.0; }},
                             s.grid.x[20], 0.5);
    return c[0];
}

Outcome mode_trichotomy() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    double e1 = span_error(1000), e2 = span_error(2000);
    o.require(e2 < 1e-4, "span {1, 1/x} error " + fmt(e2));
    o.require(std::abs(e1 / e2 - 4) < 0.4, "error ratio " + fmt(e1 / e2) + " is not second order");
    double a = decay_fit(0, {1, 0}, false);
    o.require(std::abs(-a - 1) < 0.05, "(0,1) rate " + fmt(-a));
    double b = decay_fit(1, {0, 0}, true);
    o.require(std::abs(b / -0.5 - 1) < 0.05, "k=1 coefficient " + fmt(b));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 60, "runtime " + fmt(secs) + " s");
    o.note("ratio " + fmt(e1 / e2) + ", rates " + fmt(-a) + ", " + fmt(b));
    return o;
}

// ---------------------------------------------------------------- 6

Outcome leading_x2() {
    Outcome o;
    auto op = sub_block(reduced_D00(Parity::even), {3, 4});
    auto left = decay_conditions(op, 0);
    BVProblem p{op, RadialGrid::geometric(1e-3, 1, 2000), {}, left, {dirichlet(2, 0, 1)}};
    auto s = solve_bvp(p);
    auto fit = fit_expansion(s, indicial_roots(indicial_poly(op)), 0);
    o.require(fit.exponents == std::vector<double>{2}, "exponents");
    o.require(fit.residual < 1e-4, "residual " + fmt(fit.residual));
    o.require(!fit.slope_flag, "log-log slope " + fmt(fit.slope));
    o.note("residual " + fmt(fit.residual));
    return o;
}

// ---------------------------------------------------------------- 7

Outcome forms_suite() {
    Outcome o;
    std::mt19937 rng(7);
    Chart c = chart_x();
    for (int deg = 0; deg <= 2; ++deg)
        for (int n = 0; n < 4; ++n) o.require(ext_d(ext_d(random_form(c, deg, rng))).is_zero(), "d^2 = 0");
    for (auto g : {metric_gh(), metric_gh_r()})
        for (int n = 0; n < 4; ++n) {
            FormField w = random_form(g.chart, 2, rng);
            o.require(hodge_star(g, hodge_star(g, w)) == w, "** = id on 2-forms");
        }
    PMBasis p = pm_basis();
    RatFun r = RatFun::variable("r");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            o.require(wedge(p.plus[i], p.minus[j]).is_zero(), "w+ ^ w- = 0");
            if (i != j) {
                o.require(wedge(p.plus[i], p.plus[j]).is_zero(), "w+_i ^ w+_j = 0");
                o.require(wedge(p.minus[i], p.minus[j]).is_zero(), "w-_i ^ w-_j = 0");
            }
        }
    for (int i = 0; i < 3; ++i) {
        o.require(wedge(p.plus[i], p.plus[i]).coeff(15u) == RatFun(2) * r, "w+ ^ w+ = 2 vol");
        o.require(wedge(p.minus[i], p.minus[i]).coeff(15u) == RatFun(-2) * r, "w- ^ w- = -2 vol");
    }
    std::vector<int> open;
    auto six = p.all();
    for (int i = 0; i < 6; ++i)
        if (!ext_d(six[i]).is_zero()) open.push_back(i);
    o.require(open == std::vector<int>{3}, "exactly w1- is not closed");
    Triple t = standard_triple();
    auto q = q_map(t, reference_volume(t));
    bool qz = true;
    for (auto& row : q)
        for (auto& e : row) qz = qz && e.is_zero();
    o.require(qz, "Q(standard triple) = 0");
    return o;
}

// ---------------------------------------------------------------- 8

Outcome parameter_manifold() {
    Outcome o;
    auto ts = tangent_space(PPoint::make(Matrix3d::Identity(), Matrix3d::Zero(), 1), 1e-10);
    o.require(ts.rank == 7, "jacobian rank " + std::to_string(ts.rank));
    o.require(ts.dim() == 6, "tangent dimension " + std::to_string(ts.dim()));
    double worst = 0;
    for (int k = 0; k < ts.dim(); ++k) {
        Tangent t = unpack_tangent(ts.basis.col(k));
        worst = std::max({worst, t.Adot.cwiseAbs().maxCoeff(), std::abs(t.lambda_dot)});
    }
    o.require(worst < 1e-10, "Adot, lambda dot not forced to zero: " + fmt(worst));
    Eigen::MatrixXd sub = ts.basis.middleRows(6, 6);
    o.require(std::abs(std::abs(sub.determinant()) - 1) < 1e-10, "nullspace is not all of {Bdot: first row 0}");
    return o;
}

// ---------------------------------------------------------------- 9

Outcome deformation_families() {
    Outcome o;
    auto id = calabi_scaling_identities();
    o.require(id.ok, "scaling identities: " + id.detail);

    auto f1 = family_calabi_scaling(1.0);
    auto r1 = second_derivative_report(f1);
    o.require(r1.richardson_gap < 1e-9, "scaling Richardson gap " + fmt(r1.richardson_gap));
    o.require(r1.add_vs_printed < 1e-9 && r1.bd_vs_printed < 1e-9,
              "scaling Add/Bd vs displayed " + fmt(r1.add_vs_printed) + "/" + fmt(r1.bd_vs_printed));
    o.note("scaling lambda'' " + fmt(r1.lambda_dd) + " vs displayed " +
           fmt(f1.lambda_dd_printed) + ", mm residual as printed " +
           fmt(r1.mm_residual_printed) + ", with factor 2 " + fmt(r1.mm_residual_factor2));

    auto f2 = family_calabi_modulus(0.6, -0.4);
    auto r2 = second_derivative_report(f2);
    o.require(r2.richardson_gap < 1e-9, "modulus Richardson gap " + fmt(r2.richardson_gap));
    o.require(r2.add_vs_printed < 1e-9, "modulus Add vs displayed " + fmt(r2.add_vs_printed));
    o.require(r2.bd_vs_printed < 1e-9, "modulus Bd vs displayed " + fmt(r2.bd_vs_printed));

    double worst_sf1 = 0, worst_other = 0;
    for (double c : {0.1, 0.5, 1.0})
        for (auto k : {SemiflatKind::theta_twist, SemiflatKind::y1_twist, SemiflatKind::y2_twist}) {
            auto raw = family_semiflat(k, c);  // throws if the pullback cross-check fails
            auto s = symmetrize(raw.A, raw.B);
            o.require(s.At.llt().info() == Eigen::Success, "symmetrized A not positive definite");
            auto d = semiflat_printed(k, c);
            double g = std::max({gap(s.U, d.U), gap(s.At, d.At), gap(s.Bt, d.Bt)});
            (k == SemiflatKind::theta_twist ? worst_sf1 : worst_other) =
                std::max(k == SemiflatKind::theta_twist ? worst_sf1 : worst_other, g);
        }
    o.require(worst_sf1 < 1e-12, "theta-twist normal form gap " + fmt(worst_sf1));
    o.require(worst_other < 1e-12, "y-twist normal form gap " + fmt(worst_other));

    bool constant = true;
    RatFun c = RatFun::variable("c");
    for (auto k : {SemiflatKind::theta_twist, SemiflatKind::y1_twist, SemiflatKind::y2_twist}) {
        try {
            pullback_pm(semiflat_map(k, c));
        } catch (const std::exception&) {
            constant = false;
        }
    }
    o.require(constant, "pullback expansion is position dependent");
    return o;
}

// ---------------------------------------------------------------- 10

Outcome cohomology_tables() {
    Outcome o;
    for (int b = 1; b <= 9; ++b) {
        for (int k = 0; k <= 4; ++k) {
            o.require(l2_hodge_dim(b, k) == (k == 2 ? 11 - b : 0), "l2 dimension b=" + std::to_string(b));
            o.require(l2_hodge_dim(b, k) == l2_hodge_dim(b, 4 - k), "duality b=" + std::to_string(b));
        }
        auto m = moduli_dim(b);
        o.require(m.total == 3 * (10 - b), "moduli b=" + std::to_string(b));
        o.require(m.anti_self_dual == 3 * (9 - b) && m.at_infinity == 3, "split b=" + std::to_string(b));
    }
    o.require(wh_interval(0, -1) == 1, "WH0 at gamma = -1");
    o.require(wh_interval(0, 0) == 0, "WH0 at gamma = 0");
    o.require(!wh_interval(1, 0).has_value(), "WH1 at gamma = 0 undefined");
    return o;
}

// ---------------------------------------------------------------- 11

Outcome blowup_lifts() {
    Outcome o;
    unsigned seed = 101;
    int compared = 0;
    for (Calculus st : {Calculus::b, Calculus::c, Calculus::a})
        for (LiftField f : {LiftField::x3dx, LiftField::xdy1, LiftField::xdy2, LiftField::dtheta, LiftField::twisted}) {
            o.require(blowup_lift(a_field(f), st) == lift_formula(f, st), "symbolic pushforward");
            auto r = lifto::check_stage(st, f, 10, seed++);
            o.require(r.points == 10 && r.mismatches == 0, "jacobian oracle mismatches " + std::to_string(r.mismatches));
            compared += r.compared;
        }
    o.note(std::to_string(compared) + " exact components compared");
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion all[] = {
        {1, "exact Ricci-flatness of the Gibbons-Hawking model", ricci_flat},
        {2, "conformal and volume identities", conformal_volume},
        {3, "rescaled Laplacian and the (0,0) operator", operator_identity},
        {4, "indicial roots, weights and nullvectors", indicial_suite},
        {5, "mode trichotomy", mode_trichotomy},
        {6, "leading exponent x^2", leading_x2},
        {7, "forms suite", forms_suite},
        {8, "parameter manifold tangent space", parameter_manifold},
        {9, "deformation families", deformation_families},
        {10, "cohomology tables", cohomology_tables},
        {11, "blowup lifts", blowup_lifts},
    };
    int passed = 0;
    for (auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream line;
        line << (o.ok ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " (" << fmt(secs) << " s)";
        for (auto& n : o.notes) line << "; " << n;
        std::printf("%s\n", line.str().c_str());
        passed += o.ok;
    }
    std::printf("%d/%zu criteria passed\n", passed, std::size(all));
    return passed == static_cast<int>(std::size(all)) ? 0 : 1;
}
