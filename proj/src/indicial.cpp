#include "alh/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "alh/errors.hpp"

namespace alh {

namespace {

Poly falling(Var g, int j) {
    Poly p(1);
    for (int i = 0; i < j; ++i) p = p * (Poly::variable(g) - Poly(i));
    return p;
}

std::vector<mpq_class> coeffs_of(const Poly& p, Var g) {
    auto parts = p.split(g);
    std::vector<mpq_class> out(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) out[i] = parts[i].is_zero() ? mpq_class(0) : parts[i].lead().c;
    return out;
}

// Continued-fraction approximation with denominator bound.
std::optional<mpq_class> rationalize(double v, long max_den) {
    if (!std::isfinite(v)) return std::nullopt;
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double x = v;
    for (int it = 0; it < 40; ++it) {
        double a = std::floor(x);
        if (std::abs(a) > 1e12) break;
        long ai = static_cast<long>(a);
        long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        if (std::abs(v - double(h1) / double(k1)) < 1e-9 * std::max(1.0, std::abs(v))) {
            mpq_class q(h1, k1);
            q.canonicalize();
            return q;
        }
        double frac = x - a;
        if (frac < 1e-15) break;
        x = 1 / frac;
    }
    return std::nullopt;
}

std::vector<std::complex<double>> numeric_roots(const Poly& p, Var g) {
    auto c = coeffs_of(p, g);
    while (!c.empty() && c.back() == 0) c.pop_back();
    int n = static_cast<int>(c.size()) - 1;
    std::vector<std::complex<double>> out;
    if (n <= 0) return out;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    double lead = c[n].get_d();
    for (int i = 0; i < n; ++i) C(0, i) = -c[n - 1 - i].get_d() / lead;
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()[i]);
    return out;
}

std::vector<std::vector<mpq_class>> exact_kernel(std::vector<std::vector<mpq_class>> m) {
    int rows = static_cast<int>(m.size()), cols = rows ? static_cast<int>(m[0].size()) : 0;
    std::vector<int> pivcol;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(m[p], m[r]);
        mpq_class inv = 1 / m[r][c];
        for (int k = c; k < cols; ++k) m[r][k] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            mpq_class f = m[i][c];
            for (int k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
        }
        pivcol.push_back(c);
        ++r;
    }
    std::vector<std::vector<mpq_class>> basis;
    for (int free = 0; free < cols; ++free) {
        if (std::find(pivcol.begin(), pivcol.end(), free) != pivcol.end()) continue;
        std::vector<mpq_class> v(cols, 0);
        v[free] = 1;
        for (std::size_t i = 0; i < pivcol.size(); ++i) v[pivcol[i]] = -m[i][free];
        basis.push_back(v);
    }
    return basis;
}

} // namespace

Poly IndicialPolynomial::det() const {
    // Bareiss fraction-free elimination
    int n = size();
    if (n == 0) return Poly(1);
    auto a = entries;
    Poly prev(1);
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[k][k].is_zero()) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (!a[i][k].is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) return Poly();
            std::swap(a[p], a[k]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Poly t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                auto q = divide_exact(t, prev);
                if (!q) throw NumericalFailure("Bareiss step did not divide exactly");
                a[i][j] = *q;
            }
        prev = a[k][k];
    }
    return sign > 0 ? a[n - 1][n - 1] : -a[n - 1][n - 1];
}

std::vector<std::vector<mpq_class>> IndicialPolynomial::at(const mpq_class& g) const {
    std::map<Var, mpq_class> p{{gamma, g}};
    std::vector<std::vector<mpq_class>> m(size(), std::vector<mpq_class>(size()));
    for (int r = 0; r < size(); ++r)
        for (int c = 0; c < size(); ++c) m[r][c] = entries[r][c].eval(p);
    return m;
}

std::string IndicialPolynomial::str() const {
    std::ostringstream os;
    for (int r = 0; r < size(); ++r) {
        os << "[";
        for (int c = 0; c < size(); ++c) os << (c ? ", " : "") << entries[r][c].str();
        os << "]";
        if (r + 1 < size()) os << "\n";
    }
    return os.str();
}

IndicialPolynomial indicial_poly(const ModeReducedOp& op) {
    IndicialPolynomial M;
    M.gamma = var("gamma");
    M.components = op.components;
    int n = op.size();
    M.entries.assign(n, std::vector<Poly>(n));
    M.row_shift.assign(n, 0);
    std::string x(var_name(op.indep));
    for (int r = 0; r < n; ++r) {
        int lo = std::numeric_limits<int>::max(), top = -1;
        for (int c = 0; c < n; ++c)
            for (int j = 0; j < 3; ++j) {
                const RatFun& f = op.entry[r][c][j];
                if (f.is_zero()) continue;
                lo = std::min(lo, f.valuation(op.indep) - j);
                top = std::max(top, j);
            }
        if (top < 0) throw StructureError("row " + std::to_string(r) + " of the operator is zero");
        bool principal = false;
        for (int c = 0; c < n; ++c) {
            const RatFun& f = op.entry[r][c][top];
            if (!f.is_zero() && f.valuation(op.indep) - top == lo) principal = true;
        }
        if (!principal) {
            for (int c = 0; c < n; ++c)
                for (int j = 0; j < top; ++j) {
                    const RatFun& f = op.entry[r][c][j];
                    if (!f.is_zero() && f.valuation(op.indep) - j == lo)
                        throw StructureError("not of b-type at " + x + " = 0: term (" + f.str() + ")*d" + x + "^" +
                                             std::to_string(j) + " in row " + std::to_string(r) +
                                             " dominates the principal part");
                }
        }
        M.row_shift[r] = lo;
        for (int c = 0; c < n; ++c)
            for (int j = 0; j < 3; ++j) {
                const RatFun& f = op.entry[r][c][j];
                if (f.is_zero() || f.valuation(op.indep) - j != lo) continue;
                RatFun lead = f.leading_at_zero(op.indep);
                if (!lead.is_constant())
                    throw StructureError("leading coefficient " + lead.str() + " depends on more than " + x);
                M.entries[r][c] = M.entries[r][c] + falling(M.gamma, j).scaled(lead.constant_value());
            }
    }
    if (M.det().is_zero()) throw StructureError("indicial determinant vanishes identically");
    return M;
}

std::vector<Poly> squarefree_factors(const Poly& p, Var v) {
    // Yun's algorithm over Q
    std::vector<Poly> out;
    if (p.is_constant()) return out;
    Poly dp = p.derive(v);
    Poly a = gcd(p, dp);
    Poly b = *divide_exact(p, a);
    Poly c = *divide_exact(dp, a);
    Poly d = c - b.derive(v);
    while (!b.is_constant()) {
        Poly aa = gcd(b, d);
        out.push_back(aa);
        b = *divide_exact(b, aa);
        c = *divide_exact(d, aa);
        d = c - b.derive(v);
    }
    while (!out.empty() && out.back().is_constant()) out.pop_back();
    return out;
}

std::vector<IndicialRoot> indicial_roots(const IndicialPolynomial& M) {
    Poly det = M.det();
    if (det.is_zero()) throw StructureError("indicial determinant vanishes identically");
    auto factors = squarefree_factors(det, M.gamma);
    std::vector<IndicialRoot> out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        Poly f = factors[i];
        if (f.is_constant()) continue;
        int mult = static_cast<int>(i) + 1;
        // peel off rational roots exactly
        bool peeled = true;
        while (peeled && !f.is_constant()) {
            peeled = false;
            for (auto z : numeric_roots(f, M.gamma)) {
                if (std::abs(z.imag()) > 1e-7) continue;
                auto q = rationalize(z.real(), 10000);
                if (!q || f.eval(std::map<Var, mpq_class>{{M.gamma, *q}}) != 0) continue;
                IndicialRoot r;
                r.exact = *q;
                r.value = q->get_d();
                r.multiplicity = mult;
                r.exact_nullvectors = exact_kernel(M.at(*q));
                for (auto& v : r.exact_nullvectors) {
                    std::vector<double> d;
                    for (auto& e : v) d.push_back(e.get_d());
                    r.nullvectors.push_back(d);
                }
                out.push_back(r);
                Poly lin = Poly::variable(M.gamma).scaled(mpq_class(q->get_den())) - Poly(mpq_class(q->get_num()));
                f = *divide_exact(f, lin);
                peeled = true;
                break;
            }
        }
        for (auto z : numeric_roots(f, M.gamma)) {
            if (z.imag() < -1e-12) continue;
            IndicialRoot r;
            r.value = z.real();
            r.imag = std::abs(z.imag()) < 1e-12 ? 0 : z.imag();
            r.multiplicity = mult;
            if (r.imag == 0) {
                int n = M.size();
                Eigen::MatrixXd A(n, n);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        auto parts = M.entries[a][b].split(M.gamma);
                        double s = 0;
                        for (int k = static_cast<int>(parts.size()) - 1; k >= 0; --k)
                            s = s * r.value + (parts[k].is_zero() ? 0.0 : parts[k].lead().c.get_d());
                        A(a, b) = s;
                    }
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
                auto sv = svd.singularValues();
                double tol = 1e-9 * std::max(1.0, sv(0));
                for (int k = 0; k < n; ++k)
                    if (sv(k) <= tol) {
                        Eigen::VectorXd v = svd.matrixV().col(k);
                        r.nullvectors.emplace_back(v.data(), v.data() + n);
                    }
            }
            out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end(), [](const IndicialRoot& a, const IndicialRoot& b) {
        return a.value != b.value ? a.value < b.value : a.imag < b.imag;
    });
    return out;
}

bool WeightWindow::contains(double c, double tol) const {
    for (double w : weights)
        if (std::abs(c - w) <= tol) return false;
    return true;
}

std::vector<std::pair<double, double>> WeightWindow::intervals() const {
    std::vector<std::pair<double, double>> out;
    double lo = -std::numeric_limits<double>::infinity();
    for (double w : weights) {
        out.emplace_back(lo, w);
        lo = w;
    }
    out.emplace_back(lo, std::numeric_limits<double>::infinity());
    return out;
}

WeightWindow weight_window(const std::vector<IndicialRoot>& roots) {
    WeightWindow w;
    for (auto& r : roots)
        if (r.imag == 0) w.weights.push_back(r.value - 1);
    std::sort(w.weights.begin(), w.weights.end());
    w.weights.erase(std::unique(w.weights.begin(), w.weights.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                    w.weights.end());
    return w;
}

bool is_fredholm_weight(const WeightWindow& w, double c) { return w.contains(c); }

std::vector<double> roots_above(const std::vector<IndicialRoot>& roots, double c) {
    std::vector<double> out;
    for (auto& r : roots)
        if (r.imag == 0 && r.value > c + 1 + 1e-12) out.push_back(r.value);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace alh
