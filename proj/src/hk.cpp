#include "alh/hk.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "alh/errors.hpp"

namespace alh {

namespace {

RatFun top(const FormField& w) { return w.coeff(15u); }

RatMat3 wedge_matrix(const Triple& a, const Triple& b, const RatFun& vol) {
    RatMat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = top(wedge(a.w[i], b.w[j])) / vol;
    return m;
}

RatMat3 trace_free(RatMat3 m) {
    RatFun tr = (m[0][0] + m[1][1] + m[2][2]) * RatFun(mpq_class(1, 3));
    for (int i = 0; i < 3; ++i) m[i][i] -= tr;
    return m;
}

RatFun volume_coeff(const FormField& vol) {
    if (vol.degree() != 4) throw UsageError("reference volume must be a 4-form");
    RatFun v = top(vol);
    if (v.is_zero()) throw UsageError("reference volume vanishes");
    return v;
}

double check_positive(double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) throw UsageError(std::string("parameter out of range: ") + what);
    return v;
}

template <class F>
auto richardson(F f, double h, bool second) {
    auto D = [&](double s) {
        if (second) return ((f(s) - 2 * f(0.0) + f(-s)) / (s * s)).eval();
        return ((f(s) - f(-s)) / (2 * s)).eval();
    };
    auto r0 = D(h), r1 = D(h / 2), r2 = D(h / 4);
    auto a = ((4 * r1 - r0) / 3).eval(), b = ((4 * r2 - r1) / 3).eval();
    return ((16 * b - a) / 15).eval();
}

double max_abs(const Matrix3d& m) { return m.cwiseAbs().maxCoeff(); }

double second_at_zero(const RatFun& p) {
    Var t = var("t");
    return p.derive(t).derive(t).eval(std::map<Var, mpq_class>{{t, 0}}).get_d();
}

Matrix3d diag3(double a, double b, double c) { return Eigen::Vector3d(a, b, c).asDiagonal(); }

} // namespace

// ---------------------------------------------------------------- triples

Triple standard_triple() {
    auto p = pm_basis();
    return Triple{p.plus};
}

bool is_symplectic(const Triple& t) {
    for (auto& w : t.w)
        if (!ext_d(w).is_zero()) return false;
    return true;
}

FormField reference_volume(const Triple& t) {
    FormField v = wedge(t.w[0], t.w[0]) + wedge(t.w[1], t.w[1]) + wedge(t.w[2], t.w[2]);
    return RatFun(mpq_class(1, 3)) * v;
}

bool is_definite(const Triple& t, const FormField& vol, int samples) {
    RatMat3 m = wedge_matrix(t, t, volume_coeff(vol));
    for (auto& p : t.w[0].chart().samples(samples, 5)) {
        Matrix3d G;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) G(i, j) = m[i][j].eval(p).get_d();
        Eigen::SelfAdjointEigenSolver<Matrix3d> es(G);
        if (es.eigenvalues().minCoeff() <= 0) return false;
    }
    return true;
}

RatMat3 q_map(const Triple& t, const FormField& vol) { return trace_free(wedge_matrix(t, t, volume_coeff(vol))); }

RatMat3 gauge_residual(const Triple& eta, const Triple& omega, const MetricField& g) {
    RatFun vol = volume_coeff(reference_volume(omega));
    Triple plus;
    for (int i = 0; i < 3; ++i) plus.w[i] = sd_asd_split(g, eta.w[i]).first;
    RatMat3 lin = wedge_matrix(plus, omega, vol);
    RatMat3 quad = trace_free(wedge_matrix(eta, eta, vol));
    RatMat3 J;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) J[i][j] = RatFun(2) * lin[i][j] + quad[i][j];
    return J;
}

// ---------------------------------------------------------------- parameter manifold

PPoint PPoint::make(const Matrix3d& A, const Matrix3d& B, double lambda, bool on_manifold, double tol) {
    if (max_abs(A - A.transpose()) > tol) throw UsageError("A must be symmetric");
    if (B.row(0).cwiseAbs().maxCoeff() > tol) throw UsageError("B must have zero first row");
    if (!(lambda > 0)) throw UsageError("lambda must be positive");
    if (on_manifold) {
        if (max_abs(constraint_F(A, B, lambda)) > tol) throw UsageError("point violates A^2 - BB^T = lambda I");
        if (std::abs(A.trace() - 3) > tol) throw UsageError("point violates tr A = 3");
    }
    PPoint p;
    p.A = A;
    p.B = B;
    p.lambda = lambda;
    return p;
}

Matrix3d constraint_F(const Matrix3d& A, const Matrix3d& B, double lambda) {
    return A * A - B * B.transpose() - lambda * Matrix3d::Identity();
}

namespace {
constexpr int kSym[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
}

Tangent unpack_tangent(const Eigen::VectorXd& v) {
    if (v.size() != 13) throw UsageError("tangent vectors have 13 entries");
    Tangent t;
    t.Adot.setZero();
    t.Bdot.setZero();
    for (int k = 0; k < 6; ++k) t.Adot(kSym[k][0], kSym[k][1]) = t.Adot(kSym[k][1], kSym[k][0]) = v[k];
    for (int k = 0; k < 6; ++k) t.Bdot(1 + k / 3, k % 3) = v[6 + k];
    t.lambda_dot = v[12];
    return t;
}

Eigen::VectorXd pack_tangent(const Tangent& t) {
    Eigen::VectorXd v(13);
    for (int k = 0; k < 6; ++k) v[k] = t.Adot(kSym[k][0], kSym[k][1]);
    for (int k = 0; k < 6; ++k) v[6 + k] = t.Bdot(1 + k / 3, k % 3);
    v[12] = t.lambda_dot;
    return v;
}

TangentSpace tangent_space(const PPoint& p, double tol) {
    TangentSpace ts;
    ts.jacobian.resize(7, 13);
    for (int col = 0; col < 13; ++col) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(13, col);
        Tangent d = unpack_tangent(e);
        Matrix3d dF = d.Adot * p.A + p.A * d.Adot - d.Bdot * p.B.transpose() - p.B * d.Bdot.transpose() -
                      d.lambda_dot * Matrix3d::Identity();
        for (int k = 0; k < 6; ++k) ts.jacobian(k, col) = dF(kSym[k][0], kSym[k][1]);
        ts.jacobian(6, col) = d.Adot.trace();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ts.jacobian, Eigen::ComputeFullV);
    auto s = svd.singularValues();
    ts.singular_values.assign(s.data(), s.data() + s.size());
    double cut = tol * std::max(1.0, s[0]);
    ts.rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s[i] > cut) ++ts.rank;
    if (ts.rank < 7) {
        std::ostringstream os;
        os << "not a manifold point here: constraint differential has rank " << ts.rank << " < 7";
        throw StructureError(os.str());
    }
    ts.basis = svd.matrixV().rightCols(13 - ts.rank);
    return ts;
}

// ---------------------------------------------------------------- families

DeformationFamily family_calabi_scaling(double alpha) {
    DeformationFamily f;
    f.name = "calabi-scaling";
    f.params = {{"alpha", alpha}};
    f.t_max = alpha == 0 ? std::numeric_limits<double>::infinity() : 1 / std::abs(alpha);
    f.at = [alpha, tmax = f.t_max](double t) {
        if (std::abs(t) >= tmax) throw UsageError("parameter out of the radicand-positive range");
        double u = alpha * t;
        double c = std::cbrt(1 + u * u / 2 + u / 2 * std::sqrt(check_positive(12 - 3 * u * u, "12 - 3t^2")));
        double a = (1 - u * u) / (c * c);
        FamilyPoint p;
        double a22 = c * (a * a + c * c) / 2;
        p.A = diag3(a * c * c, a22, a22);
        double b22 = c * (c * c - a * a) / 2;
        p.B = diag3(0, b22, b22);
        p.lambda = (p.A * p.A.transpose() - p.B * p.B.transpose()).trace() / 3;
        return p;
    };
    // a c^2 = 1 - (alpha t)^2 and tr A = 3 make A polynomial in t
    RatFun t = RatFun::variable("t"), al{mpq_class(alpha)};
    RatFun a11 = RatFun(1) - al * al * t * t;
    RatFun a22 = (RatFun(3) - a11) * RatFun(mpq_class(1, 2));
    f.Add_exact = diag3(second_at_zero(a11), second_at_zero(a22), second_at_zero(a22));
    f.Bd_exact = diag3(0, std::sqrt(3.0) * alpha, std::sqrt(3.0) * alpha);  // c'(0) = 1/sqrt3, a' = -2c'
    f.lambda_dd_exact = second_at_zero(a11 * a11);
    f.Add_printed = diag3(-2 * alpha * alpha, alpha * alpha, alpha * alpha);
    f.Bd_printed = f.Bd_exact;
    f.lambda_dd_printed = -2 * alpha * alpha;
    return f;
}

DeformationFamily family_calabi_modulus(double alpha, double beta) {
    DeformationFamily f;
    f.name = "calabi-modulus";
    f.params = {{"alpha", alpha}, {"beta", beta}};
    const double K = (alpha * alpha + beta * beta) / 9;
    f.t_max = K == 0 ? std::numeric_limits<double>::infinity() : 1 / std::sqrt(K);
    f.at = [alpha, beta, K, tmax = f.t_max](double t) {
        if (std::abs(t) >= tmax) throw UsageError("parameter out of the radicand-positive range");
        double e = 1 - K * t * t;
        double D = e * e;
        double s = 3 / D - e;
        double c0 = beta * t;
        double rad = s * s - 4 * (D + c0 * c0);
        if (rad < -1e-14) throw UsageError("parameter out of the radicand-positive range");
        // branch analytic through t = 0: a0 - b0 ~ 2 alpha t
        double diff = std::sqrt(std::max(rad, 0.0)) * ((alpha * t < 0) ? -1 : 1);
        FamilyPoint p;
        p.A = diag3(D * e, D * s / 2, D * s / 2);
        p.B.setZero();
        p.B(1, 1) = D * diff / 2;
        p.B(2, 2) = -D * diff / 2;
        p.B(1, 2) = p.B(2, 1) = D * c0;
        p.lambda = (p.A * p.A.transpose() - p.B * p.B.transpose()).trace() / 3;
        return p;
    };
    RatFun t = RatFun::variable("t"), k{mpq_class(alpha * alpha + beta * beta) / 9};
    RatFun e = RatFun(1) - k * t * t;
    RatFun a11 = e.pow(3);
    RatFun a22 = (RatFun(3) - a11) * RatFun(mpq_class(1, 2));
    f.Add_exact = diag3(second_at_zero(a11), second_at_zero(a22), second_at_zero(a22));
    f.Bd_exact.setZero();
    f.Bd_exact(1, 1) = alpha;
    f.Bd_exact(2, 2) = -alpha;
    f.Bd_exact(1, 2) = f.Bd_exact(2, 1) = beta;
    f.lambda_dd_exact = second_at_zero(e.pow(6));
    double S = alpha * alpha + beta * beta;
    f.Add_printed = diag3(-S / 3, S / 6, S / 6);
    f.Bd_printed = f.Bd_exact;
    f.lambda_dd_printed = -2 * S / 3;
    return f;
}

IdentityReport calabi_scaling_identities() {
    Var tv = var("t"), cv = var("c"), wv = var("w");
    RatFun t = RatFun::variable(tv), c = RatFun::variable(cv), w = RatFun::variable(wv);
    RatFun a = (RatFun(1) - t * t) / (c * c);
    RatFun A11 = a * c * c, A22 = c * (a * a + c * c) * RatFun(mpq_class(1, 2));
    RatFun B22 = c * (c * c - a * a) * RatFun(mpq_class(1, 2));
    RatFun lambda = A11 * A11;
    IdentityReport rep;
    if (!(A22 * A22 - B22 * B22 - lambda).is_zero()) {
        rep.detail = "A22^2 - B22^2 != lambda";
        return rep;
    }
    // tr A - 3 = P(c^3) / c^3
    RatFun tr = A11 + RatFun(2) * A22 - RatFun(3);
    RatFun num = tr * c.pow(3);
    if (!num.is_polynomial()) {
        rep.detail = "trace defect is not P(c^3)/c^3";
        return rep;
    }
    if (!num.den().is_constant()) {
        rep.detail = "unexpected denominator";
        return rep;
    }
    Poly P = num.num().scaled(1 / num.den().lead().c);
    auto parts = P.split(cv);
    Poly T = Poly::variable(tv), W = Poly::variable(wv);
    Poly C = Poly(1) + (T * T + T * W).scaled(mpq_class(1, 2));
    Poly acc, Cp(1);
    for (std::size_t j = 0; j < parts.size(); ++j) {
        if (!parts[j].is_zero() && j % 3 != 0) {
            rep.detail = "trace defect has a power of c not divisible by 3";
            return rep;
        }
        if (j % 3 == 0) {
            acc = acc + parts[j] * Cp;
            Cp = Cp * C;
        }
    }
    // reduce modulo w^2 = 12 - 3t^2
    Poly w2 = Poly(12) - (T * T).scaled(3);
    auto wp = acc.split(wv);
    Poly red, pw(1);
    for (std::size_t j = 0; j < wp.size(); ++j) {
        if (j % 2 == 0) {
            red = red + wp[j] * pw;
        } else {
            red = red + wp[j] * pw * W;
            pw = pw * w2;
        }
    }
    if (!red.is_zero()) {
        rep.detail = "tr A != 3 after reducing w^2 = 12 - 3t^2: " + red.str();
        return rep;
    }
    rep.ok = true;
    rep.detail = "A^2 - BB^T = (a c^2)^2 I and tr A = 3 hold identically";
    return rep;
}

DerivativeReport second_derivative_report(const DeformationFamily& f, double h) {
    if (4 * h >= f.t_max) h = f.t_max / 8;
    DerivativeReport r;
    r.Add = richardson([&](double t) { return f.at(t).A; }, h, true);
    r.Bd = richardson([&](double t) { return f.at(t).B; }, h, false);
    Eigen::Matrix<double, 1, 1> l =
        richardson([&](double t) { return Eigen::Matrix<double, 1, 1>(f.at(t).lambda); }, h, true);
    r.lambda_dd = l(0, 0);
    r.richardson_gap = std::max({max_abs(r.Add - f.Add_exact), max_abs(r.Bd - f.Bd_exact),
                                 std::abs(r.lambda_dd - f.lambda_dd_exact)});
    Matrix3d I = Matrix3d::Identity();
    Matrix3d BB = r.Bd * r.Bd.transpose();
    r.mm_residual_printed = max_abs(r.Add + r.Add.transpose() - BB - r.lambda_dd * I);
    r.mm_residual_factor2 = max_abs(r.Add + r.Add.transpose() - 2 * BB - r.lambda_dd * I);
    r.add_vs_printed = max_abs(r.Add - f.Add_printed);
    r.bd_vs_printed = max_abs(r.Bd - f.Bd_printed);
    r.lambda_vs_printed = std::abs(r.lambda_dd - f.lambda_dd_printed);
    return r;
}

// ---------------------------------------------------------------- semiflat

SemiflatKind parse_semiflat(const std::string& s) {
    if (s == "theta_twist" || s == "sf-theta" || s == "theta") return SemiflatKind::theta_twist;
    if (s == "y1_twist" || s == "sf-y1" || s == "y1") return SemiflatKind::y1_twist;
    if (s == "y2_twist" || s == "sf-y2" || s == "y2") return SemiflatKind::y2_twist;
    throw UsageError("unknown semiflat family '" + s + "'");
}

std::string to_string(SemiflatKind k) {
    switch (k) {
        case SemiflatKind::theta_twist: return "theta_twist";
        case SemiflatKind::y1_twist: return "y1_twist";
        case SemiflatKind::y2_twist: return "y2_twist";
    }
    return "?";
}

std::array<RatFun, 4> semiflat_map(SemiflatKind k, const RatFun& c, bool compensated) {
    Chart ch = chart_r();
    RatFun r = RatFun::variable(ch.coords[0]), y1 = RatFun::variable(ch.coords[1]),
           y2 = RatFun::variable(ch.coords[2]), th = RatFun::variable(ch.coords[3]);
    switch (k) {
        case SemiflatKind::theta_twist: return {r, y1, y2, th + c * r * r};
        case SemiflatKind::y1_twist: return {r, y1 + c * r, y2, th};
        case SemiflatKind::y2_twist: return {r, y1, y2 + c * r, compensated ? th - c * r * y1 : th};
    }
    throw UsageError("unknown semiflat family");
}

std::array<RatFun, 4> calabi_scaling_map(const RatFun& a, const RatFun& c) {
    Chart ch = chart_r();
    return {a * RatFun::variable(ch.coords[0]), c * RatFun::variable(ch.coords[1]),
            c * RatFun::variable(ch.coords[2]), c * c * RatFun::variable(ch.coords[3])};
}

std::array<RatFun, 4> calabi_modulus_map(const RatFun& a0, const RatFun& c0, const RatFun& q) {
    Chart ch = chart_r();
    RatFun r = RatFun::variable(ch.coords[0]), y1 = RatFun::variable(ch.coords[1]),
           y2 = RatFun::variable(ch.coords[2]), th = RatFun::variable(ch.coords[3]);
    RatFun b0 = (q * q + c0 * c0) / a0;
    RatFun half(mpq_class(1, 2));
    return {q * r, a0 * y1 + c0 * y2, b0 * y2 + c0 * y1,
            q * q * th - half * a0 * c0 * y1 * y1 - half * b0 * c0 * y2 * y2 - c0 * c0 * y1 * y2};
}

PMExpansion pullback_pm(const std::array<RatFun, 4>& new_coords) {
    Chart ch = chart_r();
    PMBasis base = pm_basis();
    PMBasis moved = pm_basis_of(ch, new_coords);
    auto basis = base.all();
    PMExpansion e;
    for (int i = 0; i < 3; ++i) {
        auto co = expand_in(moved.plus[i], basis);
        for (int j = 0; j < 6; ++j) {
            for (Var v : ch.coords)
                if (co[j].depends_on(v))
                    throw StructureError("pulled-back form w" + std::to_string(i + 1) +
                                         "+ has a position-dependent coefficient: " + co[j].str());
            (j < 3 ? e.A : e.B)[i][j % 3] = co[j];
        }
    }
    return e;
}

std::pair<Matrix3d, Matrix3d> evaluate(const PMExpansion& e, const std::map<Var, mpq_class>& at) {
    Matrix3d A, B;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            A(i, j) = e.A[i][j].eval(at).get_d();
            B(i, j) = e.B[i][j].eval(at).get_d();
        }
    return {A, B};
}

ABPair family_semiflat(SemiflatKind k, double c) {
    ABPair p;
    p.A.setIdentity();
    p.B.setZero();
    switch (k) {
        case SemiflatKind::theta_twist:
            p.A(1, 2) = -c;
            p.A(2, 1) = c;
            p.B(1, 2) = c;
            p.B(2, 1) = -c;
            break;
        case SemiflatKind::y1_twist:
            p.A(0, 1) = -c;
            p.A(1, 0) = c;
            p.A(1, 1) = 1 - c * c / 2;
            p.B(0, 1) = c;
            p.B(1, 1) = c * c / 2;
            break;
        case SemiflatKind::y2_twist:
            p.A(0, 2) = -c;
            p.A(2, 0) = c;
            p.A(2, 2) = 1 - c * c / 2;
            p.B(0, 2) = c;
            p.B(2, 2) = c * c / 2;
            break;
    }
    Var cv = var("c");
    auto e = pullback_pm(semiflat_map(k, RatFun::variable(cv)));
    auto [A, B] = evaluate(e, {{cv, mpq_class(c)}});
    double gap = std::max(max_abs(A - p.A), max_abs(B - p.B));
    if (gap > 1e-12) {
        std::ostringstream os;
        os << "displayed matrices for " << to_string(k) << " differ from the pullback by " << gap;
        throw StructureError(os.str());
    }
    return p;
}

Symmetrized semiflat_printed(SemiflatKind k, double c) {
    Symmetrized s;
    s.U.setIdentity();
    s.At.setIdentity();
    s.Bt.setZero();
    if (k == SemiflatKind::theta_twist) {
        double q = std::sqrt(1 + c * c);
        s.U(1, 1) = s.U(2, 2) = 1 / q;
        s.U(1, 2) = c / q;
        s.U(2, 1) = -c / q;
        s.At(1, 1) = s.At(2, 2) = q;
        s.Bt(1, 1) = s.Bt(2, 2) = -c * c / q;
        s.Bt(1, 2) = c / q;
        s.Bt(2, 1) = -c / q;
        return s;
    }
    // the y1 and y2 twists share one pattern in the (1,2) and (1,3) planes
    int j = k == SemiflatKind::y1_twist ? 1 : 2;
    double d = 1 + c * c / 4;
    s.U(0, 0) = s.U(j, j) = (1 - c * c / 4) / d;
    s.U(0, j) = c / d;
    s.U(j, 0) = -c / d;
    s.At(0, 0) = (1 + 3 * c * c / 4) / d;
    s.At(0, j) = s.At(j, 0) = (-3 * c * c * c / 4) / d;
    s.At(j, j) = (1 + c * c / 4 + std::pow(c, 4) / 8) / d;
    s.Bt(0, j) = (c + c * c * c / 4) / d;
    s.Bt(j, j) = (-c * c / 2 - c * c * c / 8) / d;
    return s;
}

Symmetrized symmetrize(const Matrix3d& A, const Matrix3d& B) {
    if (!(A.determinant() > 0)) throw UsageError("symmetrize needs det A > 0");
    Eigen::SelfAdjointEigenSolver<Matrix3d> es(A.transpose() * A);
    Matrix3d At = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    Symmetrized s;
    s.At = (At + At.transpose()) / 2;
    s.U = s.At * A.inverse();
    s.Bt = s.U * B;
    return s;
}

} // namespace alh
