#include "alh/forms.hpp"

#include <sstream>

#include "alh/errors.hpp"

namespace alh {

int popcount4(unsigned mask) { return __builtin_popcount(mask & 15u); }

int wedge_sign(unsigned a, unsigned b) {
    int inversions = 0;
    for (int i = 0; i < 4; ++i)
        if (a & (1u << i))
            for (int j = 0; j < i; ++j)
                if (b & (1u << j)) ++inversions;
    return inversions % 2 ? -1 : 1;
}

FormField::FormField(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0 || degree > 4) throw UsageError("form degree out of range");
}

FormField FormField::scalar(const Chart& chart, const RatFun& f) {
    FormField w(chart, 0);
    w.set(0, f);
    return w;
}

FormField FormField::coord(const Chart& chart, int i) {
    FormField w(chart, 1);
    w.set(1u << i, RatFun(1));
    return w;
}

FormField FormField::differential(const Chart& chart, const RatFun& f) {
    FormField w(chart, 1);
    for (int i = 0; i < 4; ++i) w.set(1u << i, f.derive(chart.coords[i]));
    return w;
}

FormField FormField::volume(const Chart& chart, const RatFun& f) {
    FormField w(chart, 4);
    w.set(15u, f);
    return w;
}

RatFun FormField::coeff(unsigned mask) const {
    auto it = c_.find(mask);
    return it == c_.end() ? RatFun() : it->second;
}

void FormField::set(unsigned mask, const RatFun& f) {
    if (popcount4(mask) != degree_) throw UsageError("index length does not match form degree");
    if (f.is_zero())
        c_.erase(mask);
    else
        c_[mask] = f;
}

FormField FormField::operator-() const {
    FormField w = *this;
    for (auto& [k, v] : w.c_) v = -v;
    return w;
}

FormField operator+(const FormField& a, const FormField& b) {
    if (a.degree_ != b.degree_) throw UsageError("adding forms of different degree");
    FormField w = a;
    if (w.chart_.name.empty()) w.chart_ = b.chart_;
    for (auto& [k, v] : b.c_) w.set(k, w.coeff(k) + v);
    return w;
}

FormField operator-(const FormField& a, const FormField& b) { return a + (-b); }

FormField operator*(const RatFun& f, const FormField& a) {
    FormField w(a.chart_, a.degree_);
    for (auto& [k, v] : a.c_) w.set(k, f * v);
    return w;
}

bool FormField::operator==(const FormField& o) const {
    if (degree_ != o.degree_) return false;
    return (*this - o).is_zero();
}

FormField FormField::substitute(const std::map<Var, RatFun>& s) const {
    FormField w(chart_, degree_);
    for (auto& [k, v] : c_) w.set(k, v.substitute(s));
    return w;
}

std::string FormField::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, v] : c_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << v.str() << ")";
        const char* sep = " ";
        for (int i = 0; i < 4; ++i)
            if (k & (1u << i)) {
                os << sep << "d" << var_name(chart_.coords[i]);
                sep = "^";
            }
    }
    return os.str();
}

FormField wedge(const FormField& a, const FormField& b) {
    if (a.degree() + b.degree() > 4) throw UsageError("wedge degree exceeds 4");
    FormField w(a.chart(), a.degree() + b.degree());
    for (auto& [ka, va] : a.coeffs())
        for (auto& [kb, vb] : b.coeffs()) {
            if (ka & kb) continue;
            RatFun t = va * vb;
            w.set(ka | kb, w.coeff(ka | kb) + (wedge_sign(ka, kb) > 0 ? t : -t));
        }
    return w;
}

FormField ext_d(const FormField& a) {
    if (a.degree() == 4) return FormField(a.chart(), 4);
    FormField w(a.chart(), a.degree() + 1);
    for (auto& [k, v] : a.coeffs())
        for (int i = 0; i < 4; ++i) {
            if (k & (1u << i)) continue;
            RatFun dv = v.derive(a.chart().coords[i]);
            if (dv.is_zero()) continue;
            unsigned m = k | (1u << i);
            w.set(m, w.coeff(m) + (wedge_sign(1u << i, k) > 0 ? dv : -dv));
        }
    return w;
}

namespace {

std::vector<int> indices(unsigned mask) {
    std::vector<int> out;
    for (int i = 0; i < 4; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

// det of gi restricted to rows I, cols K (same length, at most 4).
RatFun minor(const Mat4& gi, const std::vector<int>& I, const std::vector<int>& K) {
    std::size_t n = I.size();
    if (n == 0) return RatFun(1);
    if (n == 1) return gi[I[0]][K[0]];
    if (n == 2) return gi[I[0]][K[0]] * gi[I[1]][K[1]] - gi[I[0]][K[1]] * gi[I[1]][K[0]];
    RatFun d;
    for (std::size_t j = 0; j < n; ++j) {
        if (gi[I[0]][K[j]].is_zero()) continue;
        std::vector<int> I2(I.begin() + 1, I.end()), K2;
        for (std::size_t l = 0; l < n; ++l)
            if (l != j) K2.push_back(K[l]);
        RatFun t = gi[I[0]][K[j]] * minor(gi, I2, K2);
        d = j % 2 ? d - t : d + t;
    }
    return d;
}

} // namespace

FormField hodge_star(const MetricField& g, const FormField& a) {
    VolumeDensity vd = volume_density(g);
    if (!vd.exact) throw StructureError("hodge_star needs an exact volume density for this metric");
    Mat4 gi = inverse(g.g);
    int k = a.degree();
    FormField w(a.chart(), 4 - k);
    for (unsigned K = 0; K < 16; ++K) {
        if (popcount4(K) != k) continue;
        RatFun raised;
        for (auto& [I, v] : a.coeffs()) raised += v * minor(gi, indices(I), indices(K));
        if (raised.is_zero()) continue;
        unsigned Kc = 15u & ~K;
        RatFun t = *vd.exact * raised;
        w.set(Kc, w.coeff(Kc) + (wedge_sign(K, Kc) > 0 ? t : -t));
    }
    return w;
}

std::pair<FormField, FormField> sd_asd_split(const MetricField& g, const FormField& a) {
    if (a.degree() != 2) throw UsageError("self-dual split needs a 2-form");
    FormField s = hodge_star(g, a);
    RatFun half(mpq_class(1, 2));
    return {half * (a + s), half * (a - s)};
}

FormField codifferential(const MetricField& g, const FormField& a) {
    if (a.degree() == 0) return FormField(a.chart(), 0);
    return -hodge_star(g, ext_d(hodge_star(g, a)));
}

FormField theta_form(const Chart& chart) {
    FormField w(chart, 1);
    w.set(1u << 3, RatFun(1));
    w.set(1u << 2, RatFun::variable(chart.coords[1]));
    return w;
}

PMBasis pm_basis_of(const Chart& chart, const std::array<RatFun, 4>& c) {
    FormField dr = FormField::differential(chart, c[0]);
    FormField d1 = FormField::differential(chart, c[1]);
    FormField d2 = FormField::differential(chart, c[2]);
    FormField th = FormField::differential(chart, c[3]) + c[1] * d2;
    const RatFun& r = c[0];
    std::array<FormField, 3> a = {wedge(dr, th), wedge(d1, th), wedge(d2, th)};
    std::array<FormField, 3> b = {r * wedge(d1, d2), r * wedge(d2, dr), r * wedge(dr, d1)};
    PMBasis p;
    for (int i = 0; i < 3; ++i) {
        p.plus[i] = a[i] + b[i];
        p.minus[i] = a[i] - b[i];
    }
    return p;
}

PMBasis pm_basis() {
    Chart c = chart_r();
    return pm_basis_of(c, {RatFun::variable(c.coords[0]), RatFun::variable(c.coords[1]), RatFun::variable(c.coords[2]),
                           RatFun::variable(c.coords[3])});
}

std::vector<RatFun> expand_in(const FormField& w, const std::vector<FormField>& basis) {
    std::vector<unsigned> keys;
    for (unsigned k = 0; k < 16; ++k)
        if (popcount4(k) == w.degree()) keys.push_back(k);
    const int n = static_cast<int>(keys.size());
    if (static_cast<int>(basis.size()) != n) throw UsageError("basis size does not match the form degree");
    // Augmented n x (n+1) system: columns are basis coefficient vectors.
    std::vector<std::vector<RatFun>> m(n, std::vector<RatFun>(n + 1));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) m[r][c] = basis[c].coeff(keys[r]);
        m[r][n] = w.coeff(keys[r]);
    }
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!m[r][col].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw StructureError("form basis is degenerate");
        std::swap(m[piv], m[col]);
        RatFun p = m[col][col];
        for (int c = col; c <= n; ++c)
            if (!m[col][c].is_zero()) m[col][c] /= p;
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col].is_zero()) continue;
            RatFun f = m[r][col];
            for (int c = col; c <= n; ++c)
                if (!m[col][c].is_zero()) m[r][c] -= f * m[col][c];
        }
    }
    std::vector<RatFun> out(n);
    for (int r = 0; r < n; ++r) out[r] = m[r][n];
    return out;
}

std::array<RatFun, 6> expand_in(const FormField& w, const std::array<FormField, 6>& basis) {
    if (w.degree() != 2) throw UsageError("expected a 2-form");
    auto v = expand_in(w, std::vector<FormField>(basis.begin(), basis.end()));
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

} // namespace alh
