#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "alh/errors.hpp"
#include "alh/forms.hpp"

using namespace alh;

namespace {

RatFun rv(const char* n) { return RatFun::variable(n); }

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

// Numeric Hodge star of a 2-form at a point: (*a)_{kl} = 1/2 sqrt(g) eps_{ijkl} a^{ij}.
Eigen::Matrix4d numeric_star2(const Eigen::Matrix4d& g, const Eigen::Matrix4d& a) {
    Eigen::Matrix4d gi = g.inverse();
    Eigen::Matrix4d up = gi * a * gi.transpose();
    double sq = std::sqrt(g.determinant());
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    int perm[4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    perm[0] = i, perm[1] = j, perm[2] = k, perm[3] = l;
                    int inv = 0;
                    bool distinct = true;
                    for (int p = 0; p < 4; ++p)
                        for (int q = p + 1; q < 4; ++q) {
                            if (perm[p] == perm[q]) distinct = false;
                            if (perm[p] > perm[q]) ++inv;
                        }
                    if (!distinct) continue;
                    out(k, l) += 0.5 * sq * (inv % 2 ? -1.0 : 1.0) * up(i, j);
                }
    return out;
}

Eigen::Matrix4d to_matrix(const FormField& w, const std::map<Var, mpq_class>& at) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (auto& [k, v] : w.coeffs()) {
        int i = -1, j = -1;
        for (int b = 0; b < 4; ++b)
            if (k & (1u << b)) (i < 0 ? i : j) = b;
        double d = v.eval(at).get_d();
        m(i, j) = d;
        m(j, i) = -d;
    }
    return m;
}

} // namespace

TEST_CASE("wedge basics") {
    Chart c = chart_x();
    FormField a = wedge(FormField::coord(c, 0), FormField::coord(c, 1));
    FormField b = wedge(FormField::coord(c, 2), FormField::coord(c, 3));
    CHECK(wedge(a, b).coeff(15u) == RatFun(1));
    CHECK(wedge(b, a).coeff(15u) == RatFun(1));
    CHECK(wedge(FormField::coord(c, 1), FormField::coord(c, 0)).coeff(3u) == RatFun(-1));
    CHECK_THROWS_AS(wedge(a, wedge(b, FormField::coord(c, 0))), UsageError);
}

TEST_CASE("d squared vanishes") {
    std::mt19937 rng(1);
    Chart c = chart_x();
    for (int deg = 0; deg <= 2; ++deg)
        for (int n = 0; n < 4; ++n) CHECK(ext_d(ext_d(random_form(c, deg, rng))).is_zero());
    CHECK(ext_d(RatFun(mpq_class(3, 7)) * FormField::coord(c, 0)).is_zero());
}

TEST_CASE("star is an involution on 2-forms and anti-involution on odd forms") {
    std::mt19937 rng(2);
    for (auto g : {metric_gh(), metric_a(), metric_gh_r()}) {
        for (int n = 0; n < 3; ++n) {
            FormField w = random_form(g.chart, 2, rng);
            CHECK(hodge_star(g, hodge_star(g, w)) == w);
            FormField v = random_form(g.chart, 1, rng);
            CHECK(hodge_star(g, hodge_star(g, v)) == -v);
        }
        CHECK(hodge_star(g, FormField::scalar(g.chart, RatFun(1))).coeff(15u) == *volume_density(g).exact);
    }
}

TEST_CASE("orthonormal coframe: *(e1^e2) = e3^e4") {
    MetricField g = metric_gh();
    Chart c = g.chart;
    RatFun x = rv("x");
    FormField e12 = RatFun::power(var("x"), -3) * wedge(FormField::coord(c, 0), FormField::coord(c, 1));
    FormField e34 = wedge(FormField::coord(c, 2), theta_form(c));
    CHECK(hodge_star(g, e12) == e34);
    FormField dxdy1 = wedge(FormField::coord(c, 0), FormField::coord(c, 1));
    CHECK(hodge_star(g, hodge_star(g, dxdy1)) == dxdy1);
}

TEST_CASE("codifferential") {
    std::mt19937 rng(3);
    MetricField g = metric_gh();
    CHECK(codifferential(g, FormField::scalar(g.chart, rv("x"))).is_zero());
    for (int deg = 2; deg <= 4; ++deg) {
        FormField w = random_form(g.chart, deg, rng);
        CHECK(codifferential(g, codifferential(g, w)).is_zero());
    }
    CHECK(codifferential(g, hodge_star(g, FormField::scalar(g.chart, RatFun(1)))).is_zero());
    MetricField gr = metric_gh_r();
    for (auto& w : pm_basis().plus) CHECK(codifferential(gr, w).is_zero());
}

TEST_CASE("self-dual and anti-self-dual basis") {
    MetricField g = metric_gh_r();
    PMBasis p = pm_basis();
    for (int i = 0; i < 3; ++i) {
        CHECK(hodge_star(g, p.plus[i]) == p.plus[i]);
        CHECK(hodge_star(g, p.minus[i]) == -p.minus[i]);
        auto [sp, sm] = sd_asd_split(g, p.plus[i]);
        CHECK(sp == p.plus[i]);
        CHECK(sm.is_zero());
    }
    auto [z1, z2] = sd_asd_split(g, FormField(g.chart, 2));
    CHECK(z1.is_zero());
    CHECK(z2.is_zero());
}

TEST_CASE("wedge relations of the six basis forms") {
    PMBasis p = pm_basis();
    RatFun r = rv("r");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(wedge(p.plus[i], p.minus[j]).is_zero());
            if (i != j) {
                CHECK(wedge(p.plus[i], p.plus[j]).is_zero());
                CHECK(wedge(p.minus[i], p.minus[j]).is_zero());
            }
        }
    for (int i = 0; i < 3; ++i) {
        CHECK(wedge(p.plus[i], p.plus[i]).coeff(15u) == RatFun(2) * r);
        CHECK(wedge(p.minus[i], p.minus[i]).coeff(15u) == RatFun(-2) * r);
    }
}

TEST_CASE("closedness table: only w1- fails") {
    PMBasis p = pm_basis();
    for (int i = 0; i < 3; ++i) CHECK(ext_d(p.plus[i]).is_zero());
    CHECK(ext_d(p.minus[1]).is_zero());
    CHECK(ext_d(p.minus[2]).is_zero());
    FormField d = ext_d(p.minus[0]);
    CHECK(d.coeffs().size() == 1);
    CHECK(d.coeff(7u) == RatFun(-2));
}

TEST_CASE("split of dx^dy1 against a numeric star oracle") {
    MetricField g = metric_gh();
    FormField a = wedge(FormField::coord(g.chart, 0), FormField::coord(g.chart, 1));
    auto [plus, minus] = sd_asd_split(g, a);
    CHECK(plus + minus == a);
    CHECK(hodge_star(g, plus) == plus);
    CHECK(hodge_star(g, minus) == -minus);
    for (auto& pt : g.chart.samples(5, 3)) {
        Eigen::Matrix4d gm;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) gm(i, j) = g.g[i][j].eval(pt).get_d();
        Eigen::Matrix4d am = to_matrix(a, pt);
        Eigen::Matrix4d st = numeric_star2(gm, am);
        Eigen::Matrix4d want = 0.5 * (am + st);
        Eigen::Matrix4d got = to_matrix(plus, pt);
        CHECK((want - got).cwiseAbs().maxCoeff() <= 1e-12 * (1 + want.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("basis expansion") {
    PMBasis p = pm_basis();
    auto all = p.all();
    FormField w = RatFun(3) * all[1] - RatFun(mpq_class(1, 2)) * all[5];
    auto c = expand_in(w, all);
    CHECK(c[1] == RatFun(3));
    CHECK(c[5] == RatFun(mpq_class(-1, 2)));
    CHECK(c[0].is_zero());
}
