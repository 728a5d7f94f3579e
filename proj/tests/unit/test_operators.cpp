#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "alh/errors.hpp"
#include "alh/forms.hpp"
#include "alh/operators.hpp"
#include "oracles/lift_jacobian.hpp"

using namespace alh;

namespace {

RatFun rv(const char* n) { return RatFun::variable(n); }
RatFun xp(int k) { return RatFun::power(var("x"), k); }

RatFun random_fn(std::mt19937& rng) {
    std::uniform_int_distribution<int> k(-4, 4), e(0, 2);
    const char* names[] = {"x", "y1", "y2", "theta"};
    RatFun f;
    for (int t = 0; t < 3; ++t) {
        RatFun term(k(rng));
        for (auto n : names) term *= rv(n).pow(e(rng));
        f += term;
    }
    return f / (rv("x") + RatFun(2));
}

// e-frame of the model metric pulled back through x = xi^2: integer powers only.
struct XiFrame {
    Chart chart = chart_xi();
    MetricField g;
    std::array<FormField, 4> e;
    RatFun xi = RatFun::variable(var("xi"));

    XiFrame() {
        g = pullback(metric_gh(), chart, {xi * xi, rv("y1"), rv("y2"), rv("theta")});
        e[0] = RatFun(2) * xi.pow(-4) * FormField::coord(chart, 0);
        e[1] = xi.pow(-1) * FormField::coord(chart, 1);
        e[2] = xi.pow(-1) * FormField::coord(chart, 2);
        e[3] = xi * theta_form(chart);
    }
    // mask bit i <-> e_{i+1}
    FormField basis(unsigned mask) const {
        FormField w = FormField::scalar(chart, RatFun(1));
        for (int i = 0; i < 4; ++i)
            if (mask & (1u << i)) w = wedge(w, e[i]);
        return w;
    }
    std::vector<FormField> basis_of_degree(int p) const {
        std::vector<FormField> out;
        for (unsigned k = 0; k < 16; ++k)
            if (popcount4(k) == p) out.push_back(basis(k));
        return out;
    }
};

unsigned label_mask(const std::string& s) {
    unsigned m = 0;
    for (char c : s)
        if (c >= '1' && c <= '4') m |= 1u << (c - '1');
    return s == "1" || s == "f0" ? 0u : m;
}

} // namespace

TEST_CASE("structure fields") {
    auto a = structure_fields(Calculus::a, false);
    REQUIRE(a.size() == 4);
    CHECK(a[0].c[0] == xp(3));
    CHECK(a[1].c[1] == xp(1));
    CHECK(a[3].c[3] == RatFun(1));
    auto b = structure_fields(Calculus::b, false);
    REQUIRE(b.size() == 1);
    CHECK(b[0].c[0] == xp(1));
    auto t = structure_fields(Calculus::a, true);
    CHECK(t[2].c[3] == -(rv("x") * rv("y1")));
    CHECK(t[2].c[2] == xp(1));
    CHECK_THROWS_AS(parse_calculus("q"), UsageError);
}

TEST_CASE("lie brackets") {
    auto a = structure_fields(Calculus::a, true);
    auto br = lie_bracket(a[0], a[1]);
    CHECK(br == field(chart_x(), {0, xp(3), 0, 0}));
    CHECK(lie_bracket(a[3], a[1]) == field(chart_x(), {0, 0, 0, 0}));
    CHECK(lie_bracket(a[1], a[2]) == field(chart_x(), {0, 0, 0, -xp(2)}));
    CHECK(a_fields_closed());
    CHECK(horizontal_curvature_coefficient() == -xp(1));
}

TEST_CASE("laplacian of the model metric") {
    DiffOpExpr L = laplacian(metric_gh());
    RatFun x = rv("x"), y1 = rv("y1");
    CHECK(L.apply(x) == RatFun(2) * xp(4));
    CHECK(L.apply(RatFun(1)).is_zero());
    CHECK(L.coeff({2, 0, 0, 0}) == xp(5));
    CHECK(L.coeff({1, 0, 0, 0}) == RatFun(2) * xp(4));
    CHECK(L.coeff({0, 2, 0, 0}) == x);
    CHECK(L.coeff({0, 0, 2, 0}) == x);
    CHECK(L.coeff({0, 0, 1, 1}) == RatFun(-2) * x * y1);
    CHECK(L.coeff({0, 0, 0, 2}) == xp(-1) + x * y1 * y1);
    CHECK(L.terms().size() == 6);
    CHECK(laplacian(metric_gh(), LaplaceSign::geometer) == -L);
}

TEST_CASE("theta-mode of the twisted laplacian couples y1") {
    DiffOpExpr L = laplacian(metric_gh());
    CHECK_THROWS_AS(project_modes(L, 1, {0, 0}, false), StructureError);
    CHECK_THROWS_AS(project_modes(L, 0, {1, 0}, true), StructureError);
    // symbol of d_theta^2 at k = 1: -(1/x + x y1^2)
    CHECK(-L.coeff({0, 0, 0, 2}) == -(xp(-1) + rv("x") * rv("y1").pow(2)));
}

TEST_CASE("a-rescale identity") {
    IdentityReport r = a_rescale_identity();
    CHECK_MESSAGE(r.ok, r.detail);
    DiffOpExpr lhs = rv("x") * laplacian(metric_gh());
    DiffOpExpr rhs = grouped_model_laplacian();
    std::mt19937 rng(11);
    for (int i = 0; i < 12; ++i) {
        RatFun f = random_fn(rng);
        CHECK(lhs.apply(f) == rhs.apply(f));
    }
    RatFun xy = rv("x") * rv("y1");
    CHECK(lhs.apply(xy) == rhs.apply(xy));
    // (x^3 dx)^2 - x^5 dx against x (x^5 dx^2 + 2 x^4 dx)
    DiffOpExpr d = DiffOpExpr::from_field(structure_fields(Calculus::a, false)[0]);
    DiffOpExpr grouped = compose(d, d) - DiffOpExpr::partial(chart_x(), {1, 0, 0, 0}, xp(5));
    DiffOpExpr radial(chart_x());
    radial.add({2, 0, 0, 0}, xp(6));
    radial.add({1, 0, 0, 0}, RatFun(2) * xp(5));
    CHECK(grouped == radial);
}

TEST_CASE("compose follows Leibniz") {
    Chart ch = chart_x();
    DiffOpExpr A = DiffOpExpr::partial(ch, {1, 1, 0, 0}, rv("x") * rv("y2"));
    DiffOpExpr B = DiffOpExpr::partial(ch, {1, 0, 0, 1}, rv("x") * rv("x") * rv("y1"));
    std::mt19937 rng(3);
    for (int i = 0; i < 5; ++i) {
        RatFun f = random_fn(rng);
        CHECK(compose(A, B).apply(f) == A.apply(B.apply(f)));
    }
}

TEST_CASE("mode projection") {
    Var x = var("x");
    auto m00 = project_modes(laplacian(metric_gh()), 0, {0, 0}, false);
    CHECK(m00 == scalar_op(x, {0, RatFun(2) * xp(4), xp(5)}));
    DiffOpExpr P = product_model_operator();
    for (int k = -2; k <= 2; ++k)
        for (int m1 = -1; m1 <= 2; ++m1)
            for (int m2 = -1; m2 <= 1; ++m2) {
                auto op = project_modes(P, k, {m1, m2}, true);
                RatFun zero = -RatFun(mpq_class(k * k)) - xp(2) * RatFun(mpq_class(m1 * m1 + m2 * m2));
                CHECK(op == scalar_op(x, {zero, RatFun(3) * xp(5), xp(6)}));
                CHECK(op.k == k);
            }
    // Laplace-Beltrami of the a-metric is not the sum of squares: x^6 dx^2 + x^5 dx at (0,0)
    auto la = project_modes(laplacian(metric_a()), 0, {0, 0}, false);
    CHECK(la == scalar_op(x, {0, xp(5), xp(6)}));
    // first-order theta term gives an imaginary coefficient
    DiffOpExpr odd = DiffOpExpr::partial(chart_x(), {0, 0, 0, 1}, RatFun(1));
    CHECK_THROWS_AS(project_modes(odd, 1, {0, 0}, true), StructureError);
    CHECK_NOTHROW(project_modes(odd, 0, {0, 0}, true));
}

TEST_CASE("scalar b-operator") {
    ModeReducedOp L = reduced_scalar_b();
    CHECK(L.apply_scalar(RatFun(1)).is_zero());
    CHECK(L.apply_scalar(xp(-1)).is_zero());
    CHECK(!L.apply_scalar(xp(1)).is_zero());
    auto m00 = project_modes(laplacian(metric_gh()), 0, {0, 0}, false);
    CHECK(scaled(xp(-3), m00) == L);
}

TEST_CASE("D00 rows as printed") {
    auto E = reduced_D00(Parity::even);
    REQUIRE(E.size() == 8);
    RatFun x = rv("x");
    // (f14, f23) rows
    CHECK(E.entry[3][3][1] == -x);
    CHECK(E.entry[3][3][0] == RatFun(1));
    CHECK(E.entry[3][4][0] == RatFun(1));
    CHECK(E.entry[4][3][0] == RatFun(-1));
    CHECK(E.entry[4][4][1] == x);
    CHECK(E.entry[4][4][0] == RatFun(-1));
    auto O = reduced_D00(Parity::odd);
    CHECK(O.entry[3][3][1] == x);
    CHECK(O.entry[3][3][0] == RatFun(mpq_class(1, 2)));
    CHECK(O.entry[3][4][0] == RatFun(-1));
    CHECK(O.entry[4][3][0] == RatFun(1));
    CHECK(O.entry[4][4][0] == RatFun(mpq_class(-1, 2)));
    CHECK(E.order() == 1);
}

TEST_CASE("D00 agrees with d + delta on x-only forms") {
    // x^{-3/2}(d + delta) computed from forms on the (xi, y, theta) chart with x = xi^2.
    XiFrame F;
    std::map<Var, RatFun> to_xi{{var("x"), F.xi * F.xi}};
    RatFun xi3 = F.xi.pow(-3);
    for (Parity par : {Parity::even, Parity::odd}) {
        auto op = reduced_D00(par);
        auto ins = d00_inputs(par);
        auto outs = d00_outputs(par);
        for (int j = 0; j < 8; ++j) {
            std::vector<RatFun> f(8);
            f[j] = xp(2) + RatFun(j + 1) * xp(3) - xp(-1);
            FormField w = f[j].substitute(to_xi) * F.basis(label_mask(ins[j]));
            FormField dw = ext_d(w), sw = codifferential(F.g, w);
            auto expect = op.apply(f);
            for (int r = 0; r < 8; ++r) {
                unsigned mask = label_mask(outs[r]);
                int deg = popcount4(mask);
                const FormField& part = deg == w.degree() + 1 ? dw : sw;
                REQUIRE(deg != w.degree());
                auto keys = F.basis_of_degree(deg);
                auto coeffs = expand_in(part.degree() == deg ? part : FormField(F.chart, deg), keys);
                int idx = 0;
                for (unsigned k = 0; k < mask; ++k)
                    if (popcount4(k) == deg) ++idx;
                RatFun got = xi3 * coeffs[idx];
                CHECK_MESSAGE(got == expect[r].substitute(to_xi),
                              "input " << ins[j] << " output " << outs[r] << ": forms give " << got.str()
                                       << ", D00 gives " << expect[r].substitute(to_xi).str());
            }
        }
    }
}

TEST_CASE("(d + delta)^2 on functions is the nonnegative laplacian") {
    MetricField g = metric_gh();
    DiffOpExpr L = laplacian(g);
    std::mt19937 rng(5);
    for (int i = 0; i < 4; ++i) {
        RatFun f = random_fn(rng);
        FormField df = ext_d(FormField::scalar(g.chart, f));
        FormField dd = codifferential(g, df);
        CHECK(dd.coeff(0) == -L.apply(f));
    }
}

TEST_CASE("(d + delta)^2 against a divergence-form difference oracle") {
    // smooth bump in (x, y1, y2); divergence form evaluated with nested central differences
    auto bump = [](double x, double y1, double y2) {
        double r2 = ((x - 0.3) * (x - 0.3) + (y1 - 0.5) * (y1 - 0.5) + (y2 - 0.5) * (y2 - 0.5)) / 0.04;
        return r2 < 1 ? std::exp(-1 / (1 - r2)) : 0.0;
    };
    auto ginv = [](const Eigen::Vector3d& p) {
        Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
        double x = p[0], y1 = p[1];
        g(0, 0) = std::pow(x, -5);
        g(1, 1) = 1 / x;
        g(2, 2) = 1 / x + x * y1 * y1;
        g(3, 3) = x;
        g(2, 3) = g(3, 2) = x * y1;
        return Eigen::Matrix4d(g.inverse());
    };
    const double h = 1e-4;
    // flux_i = sqrt(g) g^{ij} d_j f, theta-independent
    auto flux = [&](const Eigen::Vector3d& p, int i) {
        Eigen::Matrix4d gi = ginv(p);
        double s = 0;
        for (int j = 0; j < 3; ++j) {
            Eigen::Vector3d e = Eigen::Vector3d::Zero();
            e[j] = h;
            Eigen::Vector3d a = p + e, b = p - e;
            s += gi(i, j) * (bump(a[0], a[1], a[2]) - bump(b[0], b[1], b[2])) / (2 * h);
        }
        return std::pow(p[0], -3) * s;
    };
    DiffOpExpr L = laplacian(metric_gh());
    Chart ch = chart_x();
    const double pts[3][3] = {{0.3, 0.5, 0.5}, {0.32, 0.45, 0.52}, {0.28, 0.55, 0.47}};
    for (auto& q : pts) {
        Eigen::Vector3d p(q[0], q[1], q[2]);
        double oracle = 0;
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector3d e = Eigen::Vector3d::Zero();
            e[i] = h;
            oracle += (flux(p + e, i) - flux(p - e, i)) / (2 * h);
        }
        oracle /= std::pow(p[0], -3);
        // (d + delta)^2 f = -L f; apply L through its coefficients with difference derivatives
        std::vector<double> at(registered_var_count(), 0.0);
        at[var("x").id] = p[0], at[var("y1").id] = p[1], at[var("y2").id] = p[2];
        double Lf = 0;
        for (auto& [a, c] : L.terms()) {
            if (a[3]) continue;
            auto D = [&](auto&& self, MultiIndex m, Eigen::Vector3d z) -> double {
                for (int i = 0; i < 3; ++i)
                    if (m[i]) {
                        --m[i];
                        Eigen::Vector3d e = Eigen::Vector3d::Zero();
                        e[i] = h;
                        return (self(self, m, z + e) - self(self, m, z - e)) / (2 * h);
                    }
                return bump(z[0], z[1], z[2]);
            };
            Lf += c.eval(at) * D(D, a, p);
        }
        double dd = -Lf;
        CHECK(std::abs(dd + oracle) <= 1e-6 * std::abs(oracle));
        (void)ch;
    }
}

TEST_CASE("hodge-de rham block form") {
    auto B2 = hodge_derham_matrix(2);
    CHECK(B2.zeroth_order(0, 2).is_zero());
    CHECK(B2.dx_coeff(0, 2) == RatFun(1));
    auto B0 = hodge_derham_matrix(0);
    CHECK(B0.zeroth_order(1, 3).is_zero());
    CHECK(B0.zeroth_order(2, 0) == RatFun(-2));
    CHECK(B0.zeroth_order(3, 1) == RatFun(-1));
    CHECK(B0.zeroth_order(0, 3).is_zero());
    CHECK(B0.entry[0][3].empty());
    auto B4 = hodge_derham_matrix(4);
    CHECK(B4.zeroth_order(0, 2) == RatFun(-1));
    CHECK_THROWS_AS(hodge_derham_matrix(5), UsageError);
}

TEST_CASE("blowup lifts match the symbolic pushforward") {
    for (Calculus st : {Calculus::b, Calculus::c, Calculus::a})
        for (LiftField f : {LiftField::x3dx, LiftField::xdy1, LiftField::xdy2, LiftField::dtheta, LiftField::twisted})
            CHECK(blowup_lift(a_field(f), st) == lift_formula(f, st));
    CHECK(!(blowup_lift(a_field(LiftField::twisted), Calculus::a) == lift_formula(LiftField::twisted, Calculus::a, true)));
    auto b = lift_formula(LiftField::x3dx, Calculus::b);
    std::map<Var, mpq_class> at{{var("xt"), mpq_class(1, 2)}, {var("s"), 2}};
    CHECK(b.c[0].eval(at) == 2);
    CHECK(lift_formula(LiftField::xdy1, Calculus::b).c[1] == rv("xt") * rv("s"));
}

TEST_CASE("blowup lifts against an exact difference-quotient jacobian") {
    unsigned seed = 17;
    for (Calculus st : {Calculus::b, Calculus::c, Calculus::a})
        for (LiftField f : {LiftField::x3dx, LiftField::xdy1, LiftField::xdy2, LiftField::dtheta, LiftField::twisted}) {
            auto r = lifto::check_stage(st, f, 10, seed++);
            CHECK(r.compared == 40);
            CHECK(r.mismatches == 0);
        }
}

TEST_CASE("front-face normal operators") {
    auto na = front_face_normal_op(Calculus::a, 1);
    for (double s : {0.0, 0.3, 2.0})
        CHECK(na.symbol({s, -s, 0.5 * s}) <= -1.0);
    CHECK(na.radial.entry[0][0][0] == RatFun(-1));
    CHECK_THROWS_AS(front_face_normal_op(Calculus::a, 0), UsageError);
    auto nc = front_face_normal_op(Calculus::c, 0, {1, 0});
    // e^{-|s'|} solves u'' - u = 0 away from 0
    for (double s : {0.5, 1.0, 3.0}) {
        double u = std::exp(-s);
        double r = nc.radial.entry[0][0][2].eval(std::vector<double>(registered_var_count(), 0.0)) * u +
                   nc.radial.entry[0][0][0].constant_value().get_d() * u;
        CHECK(std::abs(r) < 1e-14);
    }
    CHECK_THROWS_AS(front_face_normal_op(Calculus::c, 0, {0, 0}), UsageError);
    auto nb = front_face_normal_op(Calculus::b);
    CHECK(nb.radial.apply_scalar(RatFun(1)).is_zero());
    CHECK(nb.radial.apply_scalar(RatFun::power(var("s"), -1)).is_zero());
}
