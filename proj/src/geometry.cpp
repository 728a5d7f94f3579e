#include "alh/geometry.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "alh/errors.hpp"

namespace alh {

int Chart::index_of(Var v) const {
    for (int i = 0; i < 4; ++i)
        if (coords[i] == v) return i;
    return -1;
}

std::vector<std::map<Var, mpq_class>> Chart::samples(int count, unsigned seed) const {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> num(1, 96);
    std::vector<std::map<Var, mpq_class>> out;
    for (int n = 0; n < count; ++n) {
        std::map<Var, mpq_class> p;
        for (int i = 0; i < 4; ++i) {
            mpq_class f(num(rng), 97);
            f.canonicalize();
            p[coords[i]] = box[i].lo + f * (box[i].hi - box[i].lo);
        }
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

Chart make_chart(std::string name, std::array<const char*, 4> names, std::array<Interval, 4> box) {
    Chart c;
    c.name = std::move(name);
    for (int i = 0; i < 4; ++i) c.coords[i] = var(names[i]);
    c.box = box;
    return c;
}

mpq_class q(long a, long b = 1) {
    mpq_class r(a, b);
    r.canonicalize();
    return r;
}

std::array<Interval, 4> std_box(Interval radial) {
    return {radial, Interval{q(0), q(1)}, Interval{q(0), q(1)}, Interval{q(0), q(6)}};
}

Mat4 zero_mat() { return Mat4{}; }

// Coefficients of dx^2, dy1^2 + dy2^2 and Theta^2 with Theta = dtheta + y1 dy2.
Mat4 twisted(const RatFun& a, const RatFun& b, const RatFun& c, Var y1) {
    Mat4 g = zero_mat();
    RatFun Y = RatFun::variable(y1);
    g[0][0] = a;
    g[1][1] = b;
    g[2][2] = b + c * Y * Y;
    g[3][3] = c;
    g[2][3] = g[3][2] = c * Y;
    return g;
}

} // namespace

Chart chart_x() { return make_chart("x", {"x", "y1", "y2", "theta"}, std_box({q(1, 100), q(1, 2)})); }
Chart chart_r() { return make_chart("r", {"r", "y1", "y2", "theta"}, std_box({q(2), q(100)})); }
Chart chart_xi() { return make_chart("xi", {"xi", "y1", "y2", "theta"}, std_box({q(1, 10), q(4, 5)})); }
Chart chart_euclid() {
    return make_chart("euclid", {"u1", "u2", "u3", "u4"},
                      {Interval{q(-2), q(2)}, Interval{q(-2), q(2)}, Interval{q(-2), q(2)}, Interval{q(-2), q(2)}});
}

MetricField make_metric(const Chart& chart, const Mat4& g) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (!(g[i][j] == g[j][i])) throw UsageError("metric is not symmetric");
    if (determinant(g).is_zero()) throw UsageError("metric is degenerate");
    for (auto& p : chart.samples(8, 11)) {
        Eigen::Matrix4d m;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m(i, j) = g[i][j].eval(p).get_d();
        Eigen::LLT<Eigen::Matrix4d> llt(m);
        if (llt.info() != Eigen::Success) throw UsageError("metric is not positive definite on the chart box");
    }
    return MetricField{chart, g};
}

MetricField metric_gh() {
    Chart c = chart_x();
    Var x = c.coords[0];
    return make_metric(c, twisted(RatFun::power(x, -5), RatFun::power(x, -1), RatFun::power(x, 1), c.coords[1]));
}

MetricField metric_gh_r() {
    Chart c = chart_r();
    Var r = c.coords[0];
    return make_metric(c, twisted(RatFun::power(r, 1), RatFun::power(r, 1), RatFun::power(r, -1), c.coords[1]));
}

MetricField metric_a() {
    Chart c = chart_x();
    Var x = c.coords[0];
    return make_metric(c, twisted(RatFun::power(x, -6), RatFun::power(x, -2), RatFun(1), c.coords[1]));
}

MetricField metric_model() {
    Chart c = chart_x();
    Var x = c.coords[0];
    return make_metric(c, twisted(RatFun::power(x, -4), RatFun(1), RatFun::power(x, 2), c.coords[1]));
}

MetricField metric_calabi(int n) {
    if (n < 2) throw UsageError("Calabi family needs n >= 2");
    if (n == 2) return metric_gh();
    Chart c = chart_xi();
    Var xi = c.coords[0];
    RatFun a = RatFun(long(n) * n) * RatFun::power(xi, -2 * n - 4);
    return make_metric(c, twisted(a, RatFun::power(xi, -2), RatFun::power(xi, 2 * n - 2), c.coords[1]));
}

MetricField metric_round_s4() {
    Chart c = chart_euclid();
    RatFun s(1);
    for (auto v : c.coords) s += RatFun::variable(v).pow(2);
    RatFun f = RatFun(4) / (s * s);
    Mat4 g = zero_mat();
    for (int i = 0; i < 4; ++i) g[i][i] = f;
    return make_metric(c, g);
}

MetricField metric_flat() {
    Mat4 g = zero_mat();
    for (int i = 0; i < 4; ++i) g[i][i] = RatFun(1);
    return make_metric(chart_euclid(), g);
}

MetricField pullback(const MetricField& g, const Chart& target, const std::array<RatFun, 4>& phi) {
    std::map<Var, RatFun> sub;
    for (int i = 0; i < 4; ++i) sub[g.chart.coords[i]] = phi[i];
    // J[a][i] = d phi^a / d target_i
    std::array<std::array<RatFun, 4>, 4> J;
    for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 4; ++i) J[a][i] = phi[a].derive(target.coords[i]);
    Mat4 gs;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) gs[a][b] = g.g[a][b].is_zero() ? RatFun() : g.g[a][b].substitute(sub);
    Mat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            RatFun s;
            for (int a = 0; a < 4; ++a) {
                if (J[a][i].is_zero()) continue;
                for (int b = 0; b < 4; ++b)
                    if (!gs[a][b].is_zero() && !J[b][j].is_zero()) s += J[a][i] * gs[a][b] * J[b][j];
            }
            out[i][j] = out[j][i] = s;
        }
    return make_metric(target, out);
}

RatFun determinant(const Mat4& m) {
    // Cofactor expansion is cheap at size 4 and avoids divisions.
    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
               m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
               m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
    };
    RatFun d;
    int cols[4] = {0, 1, 2, 3};
    for (int j = 0; j < 4; ++j) {
        if (m[0][j].is_zero()) continue;
        int c[3], n = 0;
        for (int k : cols)
            if (k != j) c[n++] = k;
        RatFun term = m[0][j] * det3(1, 2, 3, c[0], c[1], c[2]);
        d = (j % 2 == 0) ? d + term : d - term;
    }
    return d;
}

Mat4 inverse(const Mat4& m) {
    Mat4 a = m, inv;
    for (int i = 0; i < 4; ++i) inv[i][i] = RatFun(1);
    for (int col = 0; col < 4; ++col) {
        int piv = -1;
        for (int r = col; r < 4; ++r)
            if (!a[r][col].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw DivisionByZero("singular matrix");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        RatFun p = a[col][col];
        for (int k = 0; k < 4; ++k) {
            if (!a[col][k].is_zero()) a[col][k] /= p;
            if (!inv[col][k].is_zero()) inv[col][k] /= p;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            RatFun f = a[r][col];
            for (int k = 0; k < 4; ++k) {
                if (!a[col][k].is_zero()) a[r][k] -= f * a[col][k];
                if (!inv[col][k].is_zero()) inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

std::array<std::array<std::array<RatFun, 4>, 4>, 4> christoffel(const MetricField& g) {
    Mat4 gi = inverse(g.g);
    std::array<std::array<std::array<RatFun, 4>, 4>, 4> dg;  // dg[l][i][j] = d_l g_ij
    for (int l = 0; l < 4; ++l)
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) dg[l][i][j] = dg[l][j][i] = g.g[i][j].derive(g.chart.coords[l]);
    std::array<std::array<std::array<RatFun, 4>, 4>, 4> gam;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            // first kind: [ij,l] = (d_i g_lj + d_j g_li - d_l g_ij) / 2
            std::array<RatFun, 4> first;
            for (int l = 0; l < 4; ++l) first[l] = (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]) * RatFun(mpq_class(1, 2));
            for (int k = 0; k < 4; ++k) {
                RatFun s;
                for (int l = 0; l < 4; ++l)
                    if (!gi[k][l].is_zero() && !first[l].is_zero()) s += gi[k][l] * first[l];
                gam[k][i][j] = gam[k][j][i] = s;
            }
        }
    return gam;
}

Curvature curvature(const MetricField& g) {
    Curvature c;
    c.chart = g.chart;
    c.gamma = christoffel(g);
    const auto& G = c.gamma;
    for (int l = 0; l < 4; ++l)
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                    RatFun v = G[l][j][k].derive(g.chart.coords[i]) - G[l][i][k].derive(g.chart.coords[j]);
                    for (int m = 0; m < 4; ++m) {
                        if (!G[l][i][m].is_zero() && !G[m][j][k].is_zero()) v += G[l][i][m] * G[m][j][k];
                        if (!G[l][j][m].is_zero() && !G[m][i][k].is_zero()) v -= G[l][j][m] * G[m][i][k];
                    }
                    c.riemann[l][i][j][k] = v;
                    c.riemann[l][j][i][k] = -v;
                }
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            RatFun s;
            for (int i = 0; i < 4; ++i) s += c.riemann[i][i][j][k];
            c.ricci[j][k] = s;
        }
    Mat4 gi = inverse(g.g);
    RatFun s;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            if (!gi[j][k].is_zero() && !c.ricci[j][k].is_zero()) s += gi[j][k] * c.ricci[j][k];
    c.scalar = s;
    return c;
}

bool is_ricci_flat(const Curvature& c) {
    for (auto& row : c.ricci)
        for (auto& e : row)
            if (!e.is_zero()) return false;
    return true;
}

double VolumeDensity::at(std::span<const double> by_id) const {
    if (exact) return exact->eval(by_id);
    double d = det.eval(by_id);
    if (d <= 0) throw NumericalFailure("metric determinant is not positive");
    return std::sqrt(d);
}

VolumeDensity volume_density(const MetricField& g) {
    VolumeDensity v;
    v.det = determinant(g.g);
    const Poly &n = v.det.num(), &d = v.det.den();
    if (n.is_monomial() && d.is_monomial()) {
        const Term &tn = n.lead(), &td = d.lead();
        mpq_class c = tn.c / td.c;
        bool ok = c > 0;
        for (int k = 0; k < kMaxVars && ok; ++k) ok = (tn.m.e[k] % 2 == 0) && (td.m.e[k] % 2 == 0);
        mpz_class sn, sd;
        if (ok) {
            ok = mpz_perfect_square_p(c.get_num_mpz_t()) && mpz_perfect_square_p(c.get_den_mpz_t());
            mpz_sqrt(sn.get_mpz_t(), c.get_num_mpz_t());
            mpz_sqrt(sd.get_mpz_t(), c.get_den_mpz_t());
        }
        if (ok) {
            Monomial mn, md;
            for (int k = 0; k < kMaxVars; ++k) {
                mn.e[k] = tn.m.e[k] / 2;
                md.e[k] = td.m.e[k] / 2;
            }
            mpq_class root(sn, sd);
            root.canonicalize();
            v.exact = RatFun(Poly::monomial(mn, root), Poly::monomial(md, 1));
        }
    }
    return v;
}

} // namespace alh
