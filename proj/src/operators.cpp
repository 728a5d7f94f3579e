#include "alh/operators.hpp"

#include <cmath>
#include <sstream>

#include "alh/errors.hpp"

namespace alh {

namespace {

RatFun X(const char* n) { return RatFun::variable(n); }

Chart chart_of(const char* name, std::array<const char*, 4> names, std::array<Interval, 4> box) {
    Chart c;
    c.name = name;
    for (int i = 0; i < 4; ++i) c.coords[i] = var(names[i]);
    c.box = box;
    return c;
}

void same_chart(const Chart& a, const Chart& b) {
    if (a.coords != b.coords) throw UsageError("operands live on different charts (" + a.name + ", " + b.name + ")");
}

std::string mi_str(const Chart& ch, MultiIndex a) {
    std::string s;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < a[i]; ++j) s += "d" + std::string(var_name(ch.coords[i]));
    return s.empty() ? "1" : s;
}

long binom(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

// ---- vector fields ----

VectorFieldExpr field(const Chart& chart, std::array<RatFun, 4> c) { return VectorFieldExpr{chart, std::move(c)}; }

RatFun VectorFieldExpr::apply(const RatFun& f) const {
    RatFun out;
    for (int i = 0; i < 4; ++i)
        if (!c[i].is_zero()) out += c[i] * f.derive(chart.coords[i]);
    return out;
}

bool VectorFieldExpr::operator==(const VectorFieldExpr& o) const {
    if (chart.coords != o.chart.coords) return false;
    for (int i = 0; i < 4; ++i)
        if (!(c[i] == o.c[i])) return false;
    return true;
}

std::string VectorFieldExpr::str() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < 4; ++i) {
        if (c[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << c[i].str() << ") d/d" << var_name(chart.coords[i]);
    }
    return first ? "0" : os.str();
}

VectorFieldExpr lie_bracket(const VectorFieldExpr& v, const VectorFieldExpr& w) {
    same_chart(v.chart, w.chart);
    VectorFieldExpr out{v.chart, {}};
    for (int i = 0; i < 4; ++i) out.c[i] = v.apply(w.c[i]) - w.apply(v.c[i]);
    return out;
}

Calculus parse_calculus(const std::string& s) {
    if (s == "b") return Calculus::b;
    if (s == "c") return Calculus::c;
    if (s == "a") return Calculus::a;
    throw UsageError("unknown calculus '" + s + "' (expected b, c or a)");
}

std::vector<VectorFieldExpr> structure_fields(Calculus kind, bool twisted) {
    Chart ch = chart_x();
    RatFun x = X("x"), y1 = X("y1");
    switch (kind) {
    case Calculus::b:
        return {field(ch, {x, 0, 0, 0})};
    case Calculus::c:
        return {field(ch, {x * x, 0, 0, 0}), field(ch, {0, 1, 0, 0}), field(ch, {0, 0, 1, 0})};
    case Calculus::a:
        break;
    }
    std::vector<VectorFieldExpr> f = {field(ch, {x.pow(3), 0, 0, 0}), field(ch, {0, x, 0, 0}), field(ch, {0, 0, x, 0}),
                                      field(ch, {0, 0, 0, 1})};
    if (twisted) f[2].c[3] = -x * y1;
    return f;
}

namespace {

// Solves sum_j a_j F_j = v over RatFun for a 4-element frame.
std::array<RatFun, 4> frame_coords(const std::vector<VectorFieldExpr>& F, const VectorFieldExpr& v) {
    std::array<std::array<RatFun, 5>, 4> m;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) m[r][c] = F[c].c[r];
        m[r][4] = v.c[r];
    }
    for (int col = 0; col < 4; ++col) {
        int piv = -1;
        for (int r = col; r < 4; ++r)
            if (!m[r][col].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw StructureError("vector fields do not form a frame");
        std::swap(m[piv], m[col]);
        RatFun p = m[col][col];
        for (int c = col; c < 5; ++c) m[col][c] /= p;
        for (int r = 0; r < 4; ++r) {
            if (r == col || m[r][col].is_zero()) continue;
            RatFun f = m[r][col];
            for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return {m[0][4], m[1][4], m[2][4], m[3][4]};
}

} // namespace

bool a_fields_closed() {
    auto F = structure_fields(Calculus::a, true);
    for (std::size_t i = 0; i < F.size(); ++i)
        for (std::size_t j = i + 1; j < F.size(); ++j) {
            auto a = frame_coords(F, lie_bracket(F[i], F[j]));
            for (auto& c : a)
                if (!c.is_polynomial()) return false;
        }
    return true;
}

// ---- differential operators ----

DiffOpExpr DiffOpExpr::identity(const Chart& chart) { return partial(chart, {0, 0, 0, 0}); }

DiffOpExpr DiffOpExpr::partial(const Chart& chart, MultiIndex a, const RatFun& coeff) {
    DiffOpExpr d(chart);
    d.add(a, coeff);
    return d;
}

DiffOpExpr DiffOpExpr::from_field(const VectorFieldExpr& v) {
    DiffOpExpr d(v.chart);
    for (int i = 0; i < 4; ++i) {
        MultiIndex a{0, 0, 0, 0};
        a[i] = 1;
        d.add(a, v.c[i]);
    }
    return d;
}

RatFun DiffOpExpr::coeff(MultiIndex a) const {
    auto it = t_.find(a);
    return it == t_.end() ? RatFun() : it->second;
}

void DiffOpExpr::add(MultiIndex a, const RatFun& f) {
    RatFun s = coeff(a) + f;
    if (s.is_zero())
        t_.erase(a);
    else
        t_[a] = s;
}

RatFun DiffOpExpr::apply(const RatFun& f) const {
    RatFun out;
    for (auto& [a, c] : t_) {
        RatFun g = f;
        for (int i = 0; i < 4 && !g.is_zero(); ++i)
            for (int j = 0; j < a[i]; ++j) g = g.derive(chart_.coords[i]);
        if (!g.is_zero()) out += c * g;
    }
    return out;
}

DiffOpExpr DiffOpExpr::operator-() const {
    DiffOpExpr d = *this;
    for (auto& [a, c] : d.t_) c = -c;
    return d;
}

DiffOpExpr operator+(const DiffOpExpr& a, const DiffOpExpr& b) {
    if (a.t_.empty()) return b;
    if (!b.t_.empty()) same_chart(a.chart_, b.chart_);
    DiffOpExpr d = a;
    for (auto& [m, c] : b.t_) d.add(m, c);
    return d;
}

DiffOpExpr operator-(const DiffOpExpr& a, const DiffOpExpr& b) { return a + (-b); }

DiffOpExpr operator*(const RatFun& f, const DiffOpExpr& a) {
    DiffOpExpr d(a.chart_);
    for (auto& [m, c] : a.t_) d.add(m, f * c);
    return d;
}

bool DiffOpExpr::operator==(const DiffOpExpr& o) const { return (*this - o).t_.empty(); }

std::string DiffOpExpr::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << "(" << it->second.str() << ")*" << mi_str(chart_, it->first);
    }
    return os.str();
}

DiffOpExpr compose(const DiffOpExpr& A, const DiffOpExpr& B) {
    same_chart(A.chart(), B.chart());
    DiffOpExpr out(A.chart());
    // d^a (c d^b) = sum_{beta <= a} C(a, beta) (d^beta c) d^{a - beta + b}
    for (auto& [a, ca] : A.terms())
        for (auto& [b, cb] : B.terms())
            for (int b0 = 0; b0 <= a[0]; ++b0)
                for (int b1 = 0; b1 <= a[1]; ++b1)
                    for (int b2 = 0; b2 <= a[2]; ++b2)
                        for (int b3 = 0; b3 <= a[3]; ++b3) {
                            std::array<int, 4> beta{b0, b1, b2, b3};
                            RatFun c = cb;
                            long mult = 1;
                            MultiIndex rest;
                            for (int i = 0; i < 4; ++i) {
                                for (int j = 0; j < beta[i]; ++j) c = c.derive(A.chart().coords[i]);
                                mult *= binom(a[i], beta[i]);
                                rest[i] = static_cast<std::uint8_t>(a[i] - beta[i] + b[i]);
                            }
                            if (c.is_zero()) continue;
                            out.add(rest, RatFun(mult) * ca * c);
                        }
    return out;
}

DiffOpExpr laplacian(const MetricField& g, LaplaceSign sign) {
    Mat4 gi = inverse(g.g);
    auto G = christoffel(g);
    DiffOpExpr d(g.chart);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (gi[i][j].is_zero()) continue;
            MultiIndex a{0, 0, 0, 0};
            a[i] += 1;
            a[j] += 1;
            d.add(a, gi[i][j]);
            for (int k = 0; k < 4; ++k) {
                if (G[k][i][j].is_zero()) continue;
                MultiIndex b{0, 0, 0, 0};
                b[k] = 1;
                d.add(b, -(gi[i][j] * G[k][i][j]));
            }
        }
    return sign == LaplaceSign::analyst ? d : -d;
}

namespace {

DiffOpExpr sum_of_squares(const std::vector<VectorFieldExpr>& F) {
    DiffOpExpr out;
    for (auto& v : F) {
        DiffOpExpr d = DiffOpExpr::from_field(v);
        out = out + compose(d, d);
    }
    return out;
}

} // namespace

DiffOpExpr grouped_model_laplacian() {
    Chart ch = chart_x();
    RatFun x = X("x"), y1 = X("y1");
    DiffOpExpr lower(ch);
    lower.add({1, 0, 0, 0}, -x.pow(5));
    lower.add({0, 0, 1, 1}, RatFun(-2) * x * x * y1);
    lower.add({0, 0, 0, 2}, x * x * y1 * y1);
    return sum_of_squares(structure_fields(Calculus::a, false)) + lower;
}

DiffOpExpr product_model_operator() { return sum_of_squares(structure_fields(Calculus::a, false)); }

IdentityReport a_rescale_identity() {
    DiffOpExpr lhs = X("x") * laplacian(metric_gh());
    DiffOpExpr rhs = grouped_model_laplacian();
    DiffOpExpr diff = lhs - rhs;
    IdentityReport r;
    r.ok = diff.terms().empty();
    if (!r.ok) {
        auto& [a, c] = *diff.terms().begin();
        r.detail = "terms differ at " + mi_str(lhs.chart(), a) + ": lhs - rhs = " + c.str();
    } else {
        r.detail = "x*lap(gh) = " + lhs.str();
    }
    return r;
}

// ---- mode-reduced operators ----

int ModeReducedOp::order() const {
    int o = 0;
    for (auto& row : entry)
        for (auto& e : row)
            for (int j = 0; j < 3; ++j)
                if (!e[j].is_zero()) o = std::max(o, j);
    return o;
}

std::vector<RatFun> ModeReducedOp::apply(const std::vector<RatFun>& u) const {
    if (static_cast<int>(u.size()) != size()) throw UsageError("block size mismatch in ModeReducedOp::apply");
    std::vector<std::array<RatFun, 3>> jets(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) {
        jets[c][0] = u[c];
        jets[c][1] = u[c].derive(indep);
        jets[c][2] = jets[c][1].derive(indep);
    }
    std::vector<RatFun> out(u.size());
    for (int r = 0; r < size(); ++r)
        for (int c = 0; c < size(); ++c)
            for (int j = 0; j < 3; ++j)
                if (!entry[r][c][j].is_zero() && !jets[c][j].is_zero()) out[r] += entry[r][c][j] * jets[c][j];
    return out;
}

bool ModeReducedOp::operator==(const ModeReducedOp& o) const {
    if (indep != o.indep || size() != o.size()) return false;
    for (int r = 0; r < size(); ++r)
        for (int c = 0; c < size(); ++c)
            for (int j = 0; j < 3; ++j)
                if (!(entry[r][c][j] == o.entry[r][c][j])) return false;
    return true;
}

std::string ModeReducedOp::str() const {
    std::ostringstream os;
    std::string v(var_name(indep));
    for (int r = 0; r < size(); ++r) {
        if (size() > 1) os << "[" << r << "] ";
        bool first = true;
        for (int c = 0; c < size(); ++c)
            for (int j = 2; j >= 0; --j) {
                if (entry[r][c][j].is_zero()) continue;
                if (!first) os << " + ";
                first = false;
                os << "(" << entry[r][c][j].str() << ")";
                if (j == 2) os << "*d" << v << "^2";
                if (j == 1) os << "*d" << v;
                if (size() > 1) os << " u" << c;
            }
        if (first) os << "0";
        if (r + 1 < size()) os << "\n";
    }
    return os.str();
}

ModeReducedOp scalar_op(Var indep, std::array<RatFun, 3> c, std::string label) {
    ModeReducedOp op;
    op.indep = indep;
    op.label = std::move(label);
    op.components = {"u"};
    op.entry = {{c}};
    return op;
}

ModeReducedOp scaled(const RatFun& f, const ModeReducedOp& op) {
    ModeReducedOp out = op;
    for (auto& row : out.entry)
        for (auto& e : row)
            for (auto& c : e) c = f * c;
    return out;
}

ModeReducedOp project_modes(const DiffOpExpr& op, int k, std::array<int, 2> m, bool product_model) {
    const Chart& ch = op.chart();
    std::array<RatFun, 3> re, im;
    for (auto& [a, c] : op.terms()) {
        for (int i = 1; i < 4; ++i)
            if (product_model && c.depends_on(ch.coords[i]))
                throw StructureError("product-model reduction needs an untwisted operator; coefficient of " +
                                     mi_str(ch, a) + " depends on " + std::string(var_name(ch.coords[i])));
        if (a[0] > 2) throw StructureError("radial order above 2 in " + mi_str(ch, a));
        mpz_class mag = 1;
        std::array<int, 3> freq{m[0], m[1], k};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < a[i + 1]; ++j) mag *= freq[i];
        if (mag == 0) continue;
        int n = a[1] + a[2] + a[3];
        RatFun t = RatFun(mpq_class(mag)) * c;
        if (n % 4 >= 2) t = -t;
        (n % 2 ? im : re)[a[0]] += t;
    }
    for (int j = 0; j < 3; ++j) {
        if (!im[j].is_zero()) throw StructureError("mode substitution leaves an imaginary coefficient " + im[j].str());
        for (int i = 1; i < 4; ++i)
            if (re[j].depends_on(ch.coords[i]))
                throw StructureError("mode (k, m) couples to other modes: coefficient " + re[j].str() + " depends on " +
                                     std::string(var_name(ch.coords[i])));
    }
    ModeReducedOp out = scalar_op(ch.coords[0], re);
    out.k = k;
    out.m = m;
    return out;
}

ModeReducedOp reduced_scalar_b() {
    RatFun x = X("x");
    ModeReducedOp op = scalar_op(var("x"), {0, RatFun(2) * x, x * x}, "L00");
    return op;
}

std::vector<std::string> d00_inputs(Parity p) {
    if (p == Parity::even) return {"f0", "f12", "f13", "f14", "f23", "f24", "f34", "f1234"};
    return {"f1", "f2", "f3", "f4", "f123", "f124", "f134", "f234"};
}

std::vector<std::string> d00_outputs(Parity p) {
    if (p == Parity::even) return {"e1", "e2", "e3", "e4", "e123", "e124", "e134", "e234"};
    return {"1", "e12", "e13", "e14", "e23", "e24", "e34", "e1234"};
}

ModeReducedOp reduced_D00(Parity parity) {
    RatFun x = X("x");
    ModeReducedOp op;
    op.indep = var("x");
    op.label = parity == Parity::even ? "D00-even" : "D00-odd";
    op.components = d00_inputs(parity);
    op.entry.assign(8, std::vector<std::array<RatFun, 3>>(8));
    // row r, col c gets s*(x d/dx + shift)
    auto xdx = [&](int r, int c, int s, const RatFun& shift) {
        op.entry[r][c][1] = RatFun(s) * x;
        op.entry[r][c][0] = RatFun(s) * shift;
    };
    auto cst = [&](int r, int c, int v) { op.entry[r][c][0] = RatFun(v); };
    if (parity == Parity::even) {
        xdx(0, 0, 1, 0);
        xdx(1, 1, -1, 0);
        xdx(2, 2, -1, 0);
        xdx(3, 3, -1, -1);
        cst(3, 4, 1);
        xdx(4, 4, 1, -1);
        cst(4, 3, -1);
        xdx(5, 5, 1, 0);
        xdx(6, 6, 1, 0);
        xdx(7, 7, -1, 0);
    } else {
        RatFun h(mpq_class(1, 2));
        xdx(0, 0, -1, -h);
        xdx(1, 1, 1, -h);
        xdx(2, 2, 1, -h);
        xdx(3, 3, 1, h);
        cst(3, 4, -1);
        xdx(4, 4, -1, h);
        cst(4, 3, 1);
        xdx(5, 5, -1, -h);
        xdx(6, 6, -1, -h);
        xdx(7, 7, 1, -h);
    }
    return op;
}

// ---- Hodge-de Rham block form ----

RatFun BlockOperator::zeroth_order(int i, int j) const {
    RatFun s;
    for (auto& t : entry[i][j])
        if (t.op == BlockLabel::Id) s += t.coeff;
    return s;
}

RatFun BlockOperator::dx_coeff(int i, int j) const {
    RatFun s;
    for (auto& t : entry[i][j])
        if (t.op == BlockLabel::Dx) s += t.coeff;
    return s;
}

std::string BlockOperator::str() const {
    static const char* names[] = {"Id", "x*dx", "DB", "dF", "deltaF", "R", "R*"};
    std::ostringstream os;
    os << "x^(3/2) *\n";
    for (int i = 0; i < 4; ++i) {
        os << "[";
        for (int j = 0; j < 4; ++j) {
            if (j) os << " | ";
            if (entry[i][j].empty()) os << "0";
            for (std::size_t t = 0; t < entry[i][j].size(); ++t) {
                if (t) os << " + ";
                os << "(" << entry[i][j][t].coeff.str() << ")" << names[static_cast<int>(entry[i][j][t].op)];
            }
        }
        os << "]\n";
    }
    return os.str();
}

BlockOperator hodge_derham_matrix(int k) {
    if (k < 0 || k > 4) throw UsageError("form degree must be 0..4");
    RatFun x = X("x");
    RatFun xi1 = RatFun::power(var("x"), -1), xi2 = RatFun::power(var("x"), -2);
    BlockOperator B;
    B.k = k;
    auto diag = [&](int num) {
        // -(num)/2 + x dx
        return std::vector<BlockTerm>{{RatFun(mpq_class(-num) / 2), BlockLabel::Id}, {RatFun(1), BlockLabel::Dx}};
    };
    for (int i = 0; i < 4; ++i) B.entry[i][i] = {{xi1, BlockLabel::DB}};
    B.entry[0][1] = {{xi2, BlockLabel::dF}, {RatFun(1), BlockLabel::Rstar}};
    B.entry[2][3] = B.entry[0][1];
    B.entry[1][0] = {{xi2, BlockLabel::deltaF}, {RatFun(1), BlockLabel::R}};
    B.entry[3][2] = B.entry[1][0];
    B.entry[0][2] = diag(k - 2);
    B.entry[1][3] = diag(k);
    B.entry[2][0] = diag(4 - k);
    B.entry[3][1] = diag(2 - k);
    return B;
}

RatFun horizontal_curvature_coefficient() {
    auto F = structure_fields(Calculus::a, true);
    // X2 = x^{-1/2} F[1], X3 = x^{-1/2} F[2]; neither differentiates x, so the bracket scales by 1/x.
    VectorFieldExpr br = lie_bracket(F[1], F[2]);
    for (int i = 0; i < 3; ++i)
        if (!br.c[i].is_zero()) throw StructureError("horizontal bracket has a non-vertical component");
    return br.c[3] / X("x");
}

// ---- blowup lifts ----

Chart chart_blowup(Calculus stage) {
    mpq_class h(1, 2);
    Interval unit{-1, 1}, ybox{0, 1}, tbox{0, 6};
    switch (stage) {
    case Calculus::b:
        return chart_of("b", {"s", "y1", "y2", "theta"}, {Interval{h, 2}, ybox, ybox, tbox});
    case Calculus::c:
        return chart_of("c", {"s_prime", "y1", "y2", "theta"}, {unit, ybox, ybox, tbox});
    case Calculus::a:
        break;
    }
    return chart_of("a", {"S", "Y1", "Y2", "theta"}, {unit, unit, unit, tbox});
}

std::array<RatFun, 4> blowup_old_coords(Calculus stage) {
    RatFun xt = X("xt"), th = X("theta");
    switch (stage) {
    case Calculus::b:
        return {xt * X("s"), X("y1"), X("y2"), th};
    case Calculus::c:
        return {xt * (RatFun(1) + xt * X("s_prime")), X("y1"), X("y2"), th};
    case Calculus::a:
        break;
    }
    return {xt * (RatFun(1) + xt * xt * X("S")), X("yt1") + xt * X("Y1"), X("yt2") + xt * X("Y2"), th};
}

std::array<RatFun, 4> blowup_new_coords(Calculus stage) {
    RatFun x = X("x"), xt = X("xt"), th = X("theta");
    switch (stage) {
    case Calculus::b:
        return {x / xt, X("y1"), X("y2"), th};
    case Calculus::c:
        return {(x / xt - RatFun(1)) / xt, X("y1"), X("y2"), th};
    case Calculus::a:
        break;
    }
    return {(x - xt) / xt.pow(3), (X("y1") - X("yt1")) / xt, (X("y2") - X("yt2")) / xt, th};
}

VectorFieldExpr blowup_lift(const VectorFieldExpr& v, Calculus stage) {
    Chart old = chart_x();
    same_chart(v.chart, old);
    auto phi = blowup_old_coords(stage);
    auto u = blowup_new_coords(stage);
    std::map<Var, RatFun> sub;
    for (int i = 0; i < 4; ++i) sub[old.coords[i]] = phi[i];
    VectorFieldExpr out{chart_blowup(stage), {}};
    for (int a = 0; a < 4; ++a) out.c[a] = v.apply(u[a]).substitute(sub);
    return out;
}

VectorFieldExpr a_field(LiftField f) {
    auto F = structure_fields(Calculus::a, f == LiftField::twisted);
    switch (f) {
    case LiftField::x3dx:
        return F[0];
    case LiftField::xdy1:
        return F[1];
    case LiftField::xdy2:
    case LiftField::twisted:
        return F[2];
    case LiftField::dtheta:
        return F[3];
    }
    throw UsageError("unsupported field");
}

VectorFieldExpr lift_formula(LiftField f, Calculus stage, bool printed) {
    Chart ch = chart_blowup(stage);
    RatFun xt = X("xt");
    RatFun radial, tangential;  // coefficient of the radial and y-derivatives
    switch (stage) {
    case Calculus::b:
        radial = xt * xt * X("s").pow(3);
        tangential = xt * X("s");
        break;
    case Calculus::c: {
        RatFun p = RatFun(1) + xt * X("s_prime");
        radial = xt * p.pow(3);
        tangential = xt * p;
        break;
    }
    case Calculus::a: {
        RatFun p = RatFun(1) + xt * xt * X("S");
        radial = p.pow(3);
        tangential = p;
        break;
    }
    }
    VectorFieldExpr v{ch, {}};
    switch (f) {
    case LiftField::x3dx:
        v.c[0] = radial;
        break;
    case LiftField::xdy1:
        v.c[1] = tangential;
        break;
    case LiftField::xdy2:
        v.c[2] = tangential;
        break;
    case LiftField::dtheta:
        v.c[3] = 1;
        break;
    case LiftField::twisted: {
        RatFun y1 = stage == Calculus::a ? X("yt1") + xt * X("Y1") : X("y1");
        if (stage == Calculus::a) {
            RatFun pre = printed ? RatFun(1) + xt * X("S") : tangential;
            v.c[2] = pre;
            v.c[3] = -(pre * xt * y1);
        } else {
            v.c[2] = tangential;
            v.c[3] = -(tangential * y1);
        }
        break;
    }
    }
    return v;
}

// ---- front-face normal operators ----

NormalOp front_face_normal_op(Calculus component, int k, std::array<int, 2> m, std::array<double, 2> eta) {
    NormalOp n;
    n.component = component;
    n.k = k;
    n.m = m;
    switch (component) {
    case Calculus::a: {
        if (k == 0) throw UsageError("a-component normal operator lives on theta-modes k != 0");
        mpq_class z = -mpq_class(k) * k;
        mpq_class eq = mpq_class(eta[0]) * eta[0] + mpq_class(eta[1]) * eta[1];
        n.radial = scalar_op(var("S"), {RatFun(z - eq), 0, 1}, "N_a");
        n.symbol = [k](const std::array<double, 3>& xi) {
            return -(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) - double(k) * k;
        };
        break;
    }
    case Calculus::c: {
        if (m[0] == 0 && m[1] == 0) throw UsageError("c-component normal operator lives on y-modes m != 0");
        mpq_class mm = mpq_class(m[0]) * m[0] + mpq_class(m[1]) * m[1];
        n.radial = scalar_op(var("s_prime"), {RatFun(-mm), 0, 1}, "N_c");
        break;
    }
    case Calculus::b: {
        RatFun s = X("s");
        n.radial = scalar_op(var("s"), {0, RatFun(2) * s, s * s}, "N_b");
        break;
    }
    }
    n.radial.k = k;
    n.radial.m = m;
    return n;
}

} // namespace alh
