#include "alh/modes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "alh/errors.hpp"

namespace alh {

namespace {

struct CoeffEval {
    const ModeReducedOp& op;
    std::vector<double> at;
    explicit CoeffEval(const ModeReducedOp& o) : op(o), at(registered_var_count(), 0.0) {}
    double operator()(int r, int c, int j, double x) {
        const RatFun& f = op.entry[r][c][j];
        if (f.is_zero()) return 0;
        at[op.indep.id] = x;
        return f.eval(at);
    }
};

// Weights of u'(x_0) from u_0, u_1, u_2 (second order, nonuniform).
std::array<double, 3> left_derivative(const std::vector<double>& x) {
    double h1 = x[1] - x[0], h2 = x[2] - x[0];
    return {-(h1 + h2) / (h1 * h2), h2 / (h1 * (h2 - h1)), -h1 / (h2 * (h2 - h1))};
}

std::array<double, 3> right_derivative(const std::vector<double>& x) {
    int n = static_cast<int>(x.size()) - 1;
    double h1 = x[n] - x[n - 1], h2 = x[n] - x[n - 2];
    // weights on u_n, u_{n-1}, u_{n-2}
    return {(h1 + h2) / (h1 * h2), -h2 / (h1 * (h2 - h1)), h1 / (h2 * (h2 - h1))};
}

std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& u) {
    int n = static_cast<int>(x.size());
    std::vector<double> d(n);
    auto l = left_derivative(x);
    d[0] = l[0] * u[0] + l[1] * u[1] + l[2] * u[2];
    auto r = right_derivative(x);
    d[n - 1] = r[0] * u[n - 1] + r[1] * u[n - 2] + r[2] * u[n - 3];
    for (int i = 1; i + 1 < n; ++i) {
        double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
        d[i] = (-hp / (hm * (hm + hp))) * u[i - 1] + ((hp - hm) / (hm * hp)) * u[i] + (hm / (hp * (hm + hp))) * u[i + 1];
    }
    return d;
}

double simpson(const std::vector<double>& x, const std::vector<double>& f) {
    int n = static_cast<int>(x.size());
    double s = 0;
    int i = 0;
    for (; i + 2 < n; i += 2) {
        double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
        s += (h0 + h1) / 6 *
             ((2 - h1 / h0) * f[i] + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[i + 1] + (2 - h0 / h1) * f[i + 2]);
    }
    if (i + 1 < n) s += (x[i + 1] - x[i]) * (f[i] + f[i + 1]) / 2;
    return s;
}

std::pair<int, int> window_nodes(const RadialGrid& g, double lo, double hi) {
    int a = -1, b = -1;
    for (int i = 0; i < g.size(); ++i)
        if (g.x[i] >= lo && g.x[i] <= hi) {
            if (a < 0) a = i;
            b = i;
        }
    if (a < 0 || b - a < 3) throw NumericalFailure("fitting window holds too few nodes");
    return {a, b};
}

double node_norm(const BVSolution& u, int i) {
    double s = 0;
    for (auto& c : u.u) s += c[i] * c[i];
    return std::sqrt(s);
}

} // namespace

RadialGrid RadialGrid::geometric(double x_min, double x_max, int nodes) {
    if (!(x_min > 0) || !(x_max > x_min) || nodes < 4) throw UsageError("grid needs 0 < x_min < x_max and >= 4 nodes");
    RadialGrid g;
    int N = nodes - 1;
    g.ratio = std::pow(x_max / x_min, 1.0 / N);
    g.x.resize(nodes);
    for (int i = 0; i <= N; ++i) g.x[i] = x_max * std::pow(g.ratio, i - N);
    g.x[0] = x_min;
    g.x[N] = x_max;
    return g;
}

BoundaryCondition dirichlet(int n, int component, double value) {
    BoundaryCondition b;
    b.u.assign(n, 0);
    b.du.assign(n, 0);
    b.u[component] = 1;
    b.value = value;
    return b;
}

BoundaryCondition robin(double alpha, double beta, double value) { return BoundaryCondition{{alpha}, {beta}, value}; }

ModeReducedOp sub_block(const ModeReducedOp& op, const std::vector<int>& idx) {
    ModeReducedOp out = op;
    out.entry.assign(idx.size(), std::vector<std::array<RatFun, 3>>(idx.size()));
    out.components.clear();
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r] < 0 || idx[r] >= op.size()) throw UsageError("component index out of range");
        if (!op.components.empty()) out.components.push_back(op.components[idx[r]]);
        for (std::size_t c = 0; c < idx.size(); ++c) out.entry[r][c] = op.entry[idx[r]][idx[c]];
    }
    return out;
}

BVSolution solve_bvp(const BVProblem& p, const ModesConfig& cfg) {
    const ModeReducedOp& op = p.op;
    const int n = op.size(), M = p.grid.size();
    const int ord = op.order();
    if (ord < 1) throw UsageError("operator has no derivative terms");
    const auto& x = p.grid.x;
    if (M < 4) throw UsageError("grid too small");
    int need = ord == 2 ? 2 * n : n;
    if (static_cast<int>(p.left.size() + p.right.size()) != need)
        throw UsageError("expected " + std::to_string(need) + " boundary conditions, got " +
                         std::to_string(p.left.size() + p.right.size()));
    auto idx = [n](int i, int c) { return i * n + c; };
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> rhs;
    std::vector<std::vector<std::pair<int, double>>> rows;
    CoeffEval a(op);
    auto f = [&](double xx) { return p.rhs ? p.rhs(xx) : std::vector<double>(n, 0.0); };
    auto push = [&](std::vector<std::pair<int, double>> row, double b) {
        double scale = 0;
        for (auto& [j, v] : row) scale = std::max(scale, std::abs(v));
        if (scale == 0) throw NumericalFailure("empty row in discrete system");
        for (auto& [j, v] : row) v /= scale;
        rows.push_back(std::move(row));
        rhs.push_back(b / scale);
    };
    auto bc_row = [&](const BoundaryCondition& bc, bool left) {
        std::vector<std::pair<int, double>> row;
        if (static_cast<int>(bc.u.size()) != n) throw UsageError("boundary condition size mismatch");
        int i0 = left ? 0 : M - 1;
        std::array<double, 3> w = left ? left_derivative(x) : right_derivative(x);
        for (int c = 0; c < n; ++c) {
            if (bc.u[c] != 0) row.emplace_back(idx(i0, c), bc.u[c]);
            double d = bc.du.empty() ? 0 : bc.du[c];
            if (d != 0) {
                if (ord == 1) throw UsageError("derivative boundary data for a first-order system");
                for (int k = 0; k < 3; ++k) row.emplace_back(idx(left ? k : M - 1 - k, c), d * w[k]);
            }
        }
        push(row, bc.value);
    };
    for (auto& bc : p.left) bc_row(bc, true);
    if (ord == 2) {
        for (int i = 1; i + 1 < M; ++i) {
            double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
            std::array<double, 3> d2 = {2 / (hm * (hm + hp)), -2 / (hm * hp), 2 / (hp * (hm + hp))};
            std::array<double, 3> d1 = {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
            auto b = f(x[i]);
            for (int r = 0; r < n; ++r) {
                std::vector<std::pair<int, double>> row;
                for (int c = 0; c < n; ++c) {
                    double c2 = a(r, c, 2, x[i]), c1 = a(r, c, 1, x[i]), c0 = a(r, c, 0, x[i]);
                    for (int k = 0; k < 3; ++k) {
                        double v = c2 * d2[k] + c1 * d1[k] + (k == 1 ? c0 : 0.0);
                        if (v != 0) row.emplace_back(idx(i - 1 + k, c), v);
                    }
                }
                push(row, b[r]);
            }
        }
    } else {
        for (int i = 0; i + 1 < M; ++i) {
            double h = x[i + 1] - x[i], xm = (x[i] + x[i + 1]) / 2;
            auto b = f(xm);
            for (int r = 0; r < n; ++r) {
                std::vector<std::pair<int, double>> row;
                for (int c = 0; c < n; ++c) {
                    double c1 = a(r, c, 1, xm), c0 = a(r, c, 0, xm);
                    double lo = -c1 / h + c0 / 2, hi = c1 / h + c0 / 2;
                    if (lo != 0) row.emplace_back(idx(i, c), lo);
                    if (hi != 0) row.emplace_back(idx(i + 1, c), hi);
                }
                push(row, b[r]);
            }
        }
    }
    for (auto& bc : p.right) bc_row(bc, false);
    const int dim = n * M;
    if (static_cast<int>(rows.size()) != dim) throw NumericalFailure("discrete system is not square");
    for (int r = 0; r < dim; ++r)
        for (auto& [j, v] : rows[r]) trip.emplace_back(r, j, v);
    Eigen::SparseMatrix<double> A(dim, dim);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw NumericalFailure("singular discrete system (boundary data or weight at an indicial value?)");
    Eigen::Map<Eigen::VectorXd> bvec(rhs.data(), dim);
    Eigen::VectorXd sol = lu.solve(bvec);
    if (lu.info() != Eigen::Success || !sol.allFinite()) throw NumericalFailure("sparse solve failed");
    BVSolution out;
    out.grid = p.grid;
    out.components = op.components;
    out.u.assign(n, std::vector<double>(M));
    for (int i = 0; i < M; ++i)
        for (int c = 0; c < n; ++c) out.u[c][i] = sol[idx(i, c)];
    Eigen::VectorXd res = A * sol - bvec;
    out.residual = res.lpNorm<Eigen::Infinity>();
    if (!(out.residual <= cfg.residual_tol)) {
        std::ostringstream os;
        os << "discrete residual " << out.residual << " above tolerance " << cfg.residual_tol;
        throw NumericalFailure(os.str());
    }
    return out;
}

std::vector<BoundaryCondition> decay_conditions(const ModeReducedOp& op, double c) {
    auto roots = indicial_roots(indicial_poly(op));
    const int n = op.size();
    std::vector<Eigen::VectorXd> keep;
    for (auto& r : roots) {
        if (r.imag != 0 || r.value <= c + 1 + 1e-12) continue;
        for (auto& v : r.nullvectors) keep.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), n));
    }
    std::vector<BoundaryCondition> out;
    if (keep.empty()) {
        for (int i = 0; i < n; ++i) out.push_back(dirichlet(n, i, 0));
        return out;
    }
    Eigen::MatrixXd V(keep.size(), n);
    for (std::size_t i = 0; i < keep.size(); ++i) V.row(i) = keep[i].transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
    Eigen::MatrixXd K = lu.kernel();
    if (lu.rank() == n) return out;
    for (int j = 0; j < K.cols(); ++j) {
        BoundaryCondition b;
        b.u.assign(K.col(j).data(), K.col(j).data() + n);
        b.du.assign(n, 0);
        out.push_back(b);
    }
    return out;
}

namespace {

double riccati_root(const ModeReducedOp& op, double x) {
    CoeffEval a(op);
    double a2 = a(0, 0, 2, x), a1 = a(0, 0, 1, x), a0 = a(0, 0, 0, x);
    if (a2 == 0) throw NumericalFailure("leading coefficient vanishes");
    double disc = a1 * a1 - 4 * a2 * a0;
    if (disc < 0) throw NumericalFailure("oscillatory mode: no real decaying WKB branch");
    return (-a1 + std::copysign(std::sqrt(disc), a2)) / (2 * a2);
}

} // namespace

BoundaryCondition wkb_decay_condition(const ModeReducedOp& op, double x0) {
    if (op.size() != 1 || op.order() != 2) throw UsageError("WKB decay condition needs a scalar second-order operator");
    double lam = riccati_root(op, x0);
    return robin(-lam, 1, 0);
}

double wkb_inner_point(const ModeReducedOp& op, double x_max, double depth) {
    if (op.size() != 1 || op.order() != 2) throw UsageError("WKB inner point needs a scalar second-order operator");
    // integrate lambda dx = lambda x d(log x) downward from x_max
    double t = std::log(x_max), acc = 0, dt = 1e-3;
    double prev = riccati_root(op, x_max) * x_max;
    while (acc < depth) {
        double xn = std::exp(t - dt);
        double cur = riccati_root(op, xn) * xn;
        double step = (prev + cur) / 2 * dt;
        if (acc + step >= depth) {
            double frac = (depth - acc) / step;
            return std::exp(t - frac * dt);
        }
        acc += step;
        prev = cur;
        t -= dt;
        if (t < std::log(1e-8)) throw NumericalFailure("decaying branch too weak to reach the requested depth");
    }
    return std::exp(t);
}

std::vector<double> fit_log_profile(const BVSolution& u, const std::vector<std::function<double(double)>>& basis,
                                    double lo, double hi) {
    auto [a, b] = window_nodes(u.grid, lo, hi);
    int m = b - a + 1, k = static_cast<int>(basis.size());
    Eigen::MatrixXd A(m, k);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        double xx = u.grid.x[a + i];
        double v = node_norm(u, a + i);
        if (!(v > 0)) throw NumericalFailure("solution vanishes inside the fitting window");
        y[i] = std::log(v);
        for (int j = 0; j < k; ++j) A(i, j) = basis[j](xx);
    }
    // column scaling keeps the normal equations well conditioned
    Eigen::VectorXd s(k);
    for (int j = 0; j < k; ++j) {
        s[j] = A.col(j).norm();
        if (s[j] == 0) s[j] = 1;
        A.col(j) /= s[j];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    std::vector<double> out(k);
    for (int j = 0; j < k; ++j) out[j] = c[j] / s[j];
    return out;
}

double loglog_slope(const BVSolution& u, double lo, double hi) {
    auto c = fit_log_profile(u, {[](double) { return 1.0; }, [](double x) { return std::log(x); }}, lo, hi);
    return c[1];
}

ExpansionFit fit_powers(const BVSolution& u, const std::vector<double>& exps, const ModesConfig& cfg) {
    if (exps.empty()) throw NumericalFailure("empty candidate exponent set");
    const auto& x = u.grid.x;
    int first = std::min(cfg.boundary_nodes, u.grid.size() - 4);
    double lo = x[first], hi = std::min(10 * lo, x.back());
    auto [a, b] = window_nodes(u.grid, lo, hi);
    int m = b - a + 1, k = static_cast<int>(exps.size()), n = static_cast<int>(u.u.size());
    Eigen::MatrixXd A(m, k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = std::pow(x[a + i], exps[j]);
    Eigen::VectorXd s(k);
    for (int j = 0; j < k; ++j) {
        s[j] = A.col(j).norm();
        A.col(j) /= s[j];
    }
    auto qr = A.colPivHouseholderQr();
    ExpansionFit fit;
    fit.exponents = exps;
    fit.coeffs.assign(k, std::vector<double>(n));
    fit.x_lo = x[a];
    fit.x_hi = x[b];
    double rr = 0, uu = 0;
    for (int c = 0; c < n; ++c) {
        Eigen::VectorXd y(m);
        for (int i = 0; i < m; ++i) y[i] = u.u[c][a + i];
        Eigen::VectorXd co = qr.solve(y);
        rr += (A * co - y).squaredNorm();
        uu += y.squaredNorm();
        for (int j = 0; j < k; ++j) fit.coeffs[j][c] = co[j] / s[j];
    }
    fit.residual = uu > 0 ? std::sqrt(rr / uu) : std::sqrt(rr);
    fit.slope = loglog_slope(u, x[a], x[b]);
    double best = 1e300;
    for (double e : exps) best = std::min(best, std::abs(fit.slope - e));
    fit.slope_flag = best > cfg.slope_tol;
    return fit;
}

ExpansionFit fit_expansion(const BVSolution& u, const std::vector<IndicialRoot>& roots, double c,
                           const ModesConfig& cfg) {
    auto cand = roots_above(roots, c);
    if (cand.empty()) throw NumericalFailure("no indicial root above c + 1");
    return fit_powers(u, cand, cfg);
}

NormResult discrete_a_norm(const RadialGrid& g, const std::vector<double>& u, double mu, int s, NormDensity d, int k,
                           std::array<int, 2> m) {
    if (s < 0 || s > 2) throw UsageError("norm order must be 0, 1 or 2");
    if (static_cast<int>(u.size()) != g.size()) throw UsageError("sample count does not match the grid");
    const auto& x = g.x;
    const int n = g.size();
    // structure-field words: V0 = x^3 d/dx, V1 = x m1, V2 = x m2, V3 = k (up to unimodular factors)
    auto apply = [&](int which, const std::vector<double>& v) {
        std::vector<double> out(n);
        if (which == 0) {
            auto dv = derivative(x, v);
            for (int i = 0; i < n; ++i) out[i] = x[i] * x[i] * x[i] * dv[i];
        } else {
            for (int i = 0; i < n; ++i) out[i] = (which == 3 ? double(k) : x[i] * m[which - 1]) * v[i];
        }
        return out;
    };
    std::vector<std::vector<double>> words{u};
    std::vector<std::vector<double>> level{u};
    for (int l = 1; l <= s; ++l) {
        std::vector<std::vector<double>> next;
        for (auto& w : level)
            for (int v = 0; v < 4; ++v) next.push_back(apply(v, w));
        for (auto& w : next) words.push_back(w);
        level = std::move(next);
    }
    int p = d == NormDensity::gh ? -3 : -5;
    std::vector<double> f(n, 0.0), lg(n);
    for (int i = 0; i < n; ++i) {
        double sq = 0;
        for (auto& w : words) sq += w[i] * w[i];
        f[i] = sq * std::pow(x[i], -2 * mu + p);
        lg[i] = x[i] * f[i];
    }
    NormResult r;
    r.value = std::sqrt(simpson(x, f));
    double peak = *std::max_element(lg.begin(), lg.end());
    r.divergent = peak > 0 && lg[0] > 1e-3 * peak;
    return r;
}

double min_singular_value(const IndicialPolynomial& M, double c, double x0, int n) {
    const int N = M.size();
    double L = -std::log(x0), h = L / n, s = c + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * N, n * N);
    for (int r = 0; r < N; ++r)
        for (int col = 0; col < N; ++col) {
            auto parts = M.entries[r][col].split(M.gamma);
            double p[3] = {0, 0, 0};
            for (std::size_t j = 0; j < parts.size() && j < 3; ++j)
                if (!parts[j].is_zero()) p[j] = parts[j].lead().c.get_d();
            if (parts.size() > 3) throw UsageError("indicial entries of degree above 2");
            // p0 + p1 (D + s) + p2 (D^2 + 2 s D + s^2)
            double c0 = p[0] + p[1] * s + p[2] * s * s, c1 = p[1] + 2 * p[2] * s, c2 = p[2];
            for (int i = 0; i < n; ++i) {
                int row = i * N + r;
                A(row, i * N + col) += c0 - 2 * c2 / (h * h);
                A(row, ((i + n - 1) % n) * N + col) += c2 / (h * h) - c1 / (2 * h);
                A(row, ((i + 1) % n) * N + col) += c2 / (h * h) + c1 / (2 * h);
            }
        }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues().minCoeff();
}

} // namespace alh
