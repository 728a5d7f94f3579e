#ifndef ALH_OPERATORS_HPP
#define ALH_OPERATORS_HPP

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "alh/geometry.hpp"

namespace alh {

struct VectorFieldExpr {
    Chart chart;
    std::array<RatFun, 4> c;  // coefficients of d/d(coord i)

    RatFun apply(const RatFun& f) const;
    bool operator==(const VectorFieldExpr& o) const;
    std::string str() const;
};

VectorFieldExpr field(const Chart& chart, std::array<RatFun, 4> c);
VectorFieldExpr lie_bracket(const VectorFieldExpr& v, const VectorFieldExpr& w);

enum class Calculus { b, c, a };
Calculus parse_calculus(const std::string& s);
std::vector<VectorFieldExpr> structure_fields(Calculus kind, bool twisted);

// Exact check that every bracket of the twisted a-fields has polynomial
// coefficients in the frame (i.e. stays in the C-infinity span up to x = 0).
bool a_fields_closed();

using MultiIndex = std::array<std::uint8_t, 4>;

class DiffOpExpr {
public:
    DiffOpExpr() = default;
    explicit DiffOpExpr(Chart chart) : chart_(std::move(chart)) {}
    static DiffOpExpr identity(const Chart& chart);
    static DiffOpExpr from_field(const VectorFieldExpr& v);
    static DiffOpExpr partial(const Chart& chart, MultiIndex a, const RatFun& coeff = RatFun(1));

    const Chart& chart() const { return chart_; }
    const std::map<MultiIndex, RatFun>& terms() const { return t_; }
    RatFun coeff(MultiIndex a) const;
    void add(MultiIndex a, const RatFun& f);

    RatFun apply(const RatFun& f) const;
    DiffOpExpr operator-() const;
    friend DiffOpExpr operator+(const DiffOpExpr& a, const DiffOpExpr& b);
    friend DiffOpExpr operator-(const DiffOpExpr& a, const DiffOpExpr& b);
    friend DiffOpExpr operator*(const RatFun& f, const DiffOpExpr& a);
    bool operator==(const DiffOpExpr& o) const;
    std::string str() const;

private:
    Chart chart_;
    std::map<MultiIndex, RatFun> t_;
};

// a o b
DiffOpExpr compose(const DiffOpExpr& a, const DiffOpExpr& b);

enum class LaplaceSign { analyst, geometer };
// analyst: g^ij d_i d_j - g^ij Gamma^k_ij d_k; geometer is its negative.
DiffOpExpr laplacian(const MetricField& g, LaplaceSign sign = LaplaceSign::analyst);

// (x^3 dx)^2 + (x dy1)^2 + (x dy2)^2 + dtheta^2 + (-x^5 dx - 2 x^2 y1 dy2 dtheta + x^2 y1^2 dtheta^2)
DiffOpExpr grouped_model_laplacian();
// Sum of squares of the untwisted a-fields.
DiffOpExpr product_model_operator();

struct IdentityReport {
    bool ok = false;
    std::string detail;
};
// x * laplacian(metric_gh) against the grouped form, term by term.
IdentityReport a_rescale_identity();

// Ordinary differential operator in one variable, N x N, entries of order <= 2.
struct ModeReducedOp {
    Var indep;
    int k = 0;
    std::array<int, 2> m{0, 0};
    std::string label;
    std::vector<std::string> components;
    // entry[row][col][j] multiplies (d/d indep)^j
    std::vector<std::vector<std::array<RatFun, 3>>> entry;

    int size() const { return static_cast<int>(entry.size()); }
    int order() const;
    std::vector<RatFun> apply(const std::vector<RatFun>& u) const;
    RatFun apply_scalar(const RatFun& u) const { return apply({u})[0]; }
    bool operator==(const ModeReducedOp& o) const;
    std::string str() const;
};

ModeReducedOp scalar_op(Var indep, std::array<RatFun, 3> c, std::string label = "");
ModeReducedOp scaled(const RatFun& f, const ModeReducedOp& op);

// Substitutes exp(i(k theta + m.y)); rejects residual y/theta dependence,
// imaginary parts, and (with product_model) any twisted coefficient.
ModeReducedOp project_modes(const DiffOpExpr& op, int k, std::array<int, 2> m, bool product_model);

ModeReducedOp reduced_scalar_b();
enum class Parity { even, odd };
ModeReducedOp reduced_D00(Parity parity);
// Component labels in the order used by reduced_D00 (inputs) and its outputs.
std::vector<std::string> d00_inputs(Parity parity);
std::vector<std::string> d00_outputs(Parity parity);

// Symbolic 4x4 block form of d + delta on k-forms split as in the
// (dx-part, vertical-part) decomposition; every entry carries a global x^{3/2}.
enum class BlockLabel { Id, Dx, DB, dF, deltaF, R, Rstar };
struct BlockTerm {
    RatFun coeff;  // integer powers of x, relative to the x^{3/2} prefactor
    BlockLabel op;
};
struct BlockOperator {
    int k = 0;
    std::array<std::array<std::vector<BlockTerm>, 4>, 4> entry;
    RatFun zeroth_order(int i, int j) const;  // coefficient of Id
    RatFun dx_coeff(int i, int j) const;
    std::string str() const;
};
BlockOperator hodge_derham_matrix(int k);

// Vertical part of [X2, X3] for X2 = x^{1/2} dy1, X3 = x^{1/2}(dy2 - y1 dtheta),
// as the coefficient c in c * x^{1/2} * U with U = x^{-1/2} dtheta: c = -x.
RatFun horizontal_curvature_coefficient();

// Blowup lifts
Chart chart_blowup(Calculus stage);
// Old coordinates (x, y1, y2, theta) as functions of the stage chart (+ parameters).
std::array<RatFun, 4> blowup_old_coords(Calculus stage);
// Stage coordinates as functions of the old chart.
std::array<RatFun, 4> blowup_new_coords(Calculus stage);
VectorFieldExpr blowup_lift(const VectorFieldExpr& v, Calculus stage);
// Closed forms of the lifts of x^3 dx, x dy_j, dtheta and the twisted field.
enum class LiftField { x3dx, xdy1, xdy2, dtheta, twisted };
VectorFieldExpr lift_formula(LiftField f, Calculus stage, bool printed = false);
VectorFieldExpr a_field(LiftField f);

struct NormalOp {
    Calculus component;
    int k = 0;
    std::array<int, 2> m{0, 0};
    ModeReducedOp radial;  // in S, s_prime or s
    // a-component only: full constant-coefficient symbol at frequency xi in (S, Y1, Y2).
    std::function<double(const std::array<double, 3>&)> symbol;
};
NormalOp front_face_normal_op(Calculus component, int k = 0, std::array<int, 2> m = {0, 0},
                              std::array<double, 2> eta = {0, 0});

} // namespace alh

#endif
