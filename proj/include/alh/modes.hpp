#ifndef ALH_MODES_HPP
#define ALH_MODES_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "alh/indicial.hpp"
#include "alh/operators.hpp"

namespace alh {

struct ModesConfig {
    int nodes = 2000;
    double x_min = 1e-3;
    double x_max = 1.0;
    double residual_tol = 1e-8;
    double rate_tol = 0.05;
    double expansion_tol = 1e-4;
    double slope_tol = 0.05;
    int boundary_nodes = 20;   // excluded from fitting windows
    double wkb_depth = 40.0;   // x_min for exponential modes puts the decaying profile near e^{-depth}
};

struct RadialGrid {
    std::vector<double> x;
    double ratio = 1;  // x_{i+1} / x_i for geometric grids

    int size() const { return static_cast<int>(x.size()); }
    // x_i = x_max * ratio^{i - N}, i = 0..N, with x_0 = x_min
    static RadialGrid geometric(double x_min, double x_max, int nodes);
};

// sum_c u[c] * u_c(x_b) + du[c] * u_c'(x_b) = value
struct BoundaryCondition {
    std::vector<double> u, du;
    double value = 0;
};

BoundaryCondition dirichlet(int n, int component, double value);
BoundaryCondition robin(double alpha, double beta, double value);  // scalar alpha u + beta u'

struct BVProblem {
    ModeReducedOp op;
    RadialGrid grid;
    std::function<std::vector<double>(double)> rhs;  // empty means zero
    std::vector<BoundaryCondition> left, right;
};

struct BVSolution {
    RadialGrid grid;
    std::vector<std::vector<double>> u;  // u[component][node]
    double residual = 0;                 // max-norm of the scaled discrete residual
    std::vector<std::string> components;
};

// Three-point nonuniform differences for second-order operators, the box
// scheme for first-order systems. Throws NumericalFailure on a singular system.
BVSolution solve_bvp(const BVProblem& p, const ModesConfig& cfg = {});

// Rows of the operator restricted to the listed components.
ModeReducedOp sub_block(const ModeReducedOp& op, const std::vector<int>& idx);

// Left conditions keeping only indicial directions with root > c + 1 (b-type operators).
std::vector<BoundaryCondition> decay_conditions(const ModeReducedOp& op, double c);
// Robin condition from the frozen-coefficient Riccati root that decays toward x = 0 (scalar).
BoundaryCondition wkb_decay_condition(const ModeReducedOp& op, double x0);
// Innermost x at which the decaying WKB profile has dropped by e^{-depth} from x_max.
double wkb_inner_point(const ModeReducedOp& op, double x_max, double depth);

struct ExpansionFit {
    std::vector<double> exponents;
    std::vector<std::vector<double>> coeffs;  // coeffs[j][component]
    double residual = 0;                      // relative l2 residual on the window
    double slope = 0;                         // log-log slope of |u| on the window
    bool slope_flag = false;                  // slope not within tolerance of any candidate
    double x_lo = 0, x_hi = 0;
};

ExpansionFit fit_expansion(const BVSolution& u, const std::vector<IndicialRoot>& roots, double c,
                           const ModesConfig& cfg = {});
// Same with explicit candidate exponents.
ExpansionFit fit_powers(const BVSolution& u, const std::vector<double>& exponents, const ModesConfig& cfg = {});

// Least squares log|u_0| ~ sum_j a_j phi_j(x) over nodes with x in [lo, hi].
std::vector<double> fit_log_profile(const BVSolution& u, const std::vector<std::function<double(double)>>& basis,
                                    double lo, double hi);
// d log|u| / d log x by least squares over [lo, hi].
double loglog_slope(const BVSolution& u, double lo, double hi);

enum class NormDensity { gh, a };
struct NormResult {
    double value = 0;
    bool divergent = false;
};
// sqrt of sum over structure-field words of length <= s of |V^l u|^2 x^{-2 mu} dV,
// per unit fiber volume; the mode (k, m) supplies the y and theta derivatives.
NormResult discrete_a_norm(const RadialGrid& g, const std::vector<double>& u, double mu, int s, NormDensity d,
                           int k = 0, std::array<int, 2> m = {0, 0});

// Smallest singular value of the conjugated indicial operator M(d/dt + c + 1)
// on t in [log x0, 0], n nodes uniform in t, periodic ends. Tends to zero as
// x0 -> 0 exactly when c + 1 is the real part of an indicial root.
double min_singular_value(const IndicialPolynomial& M, double c, double x0, int n);

} // namespace alh

#endif
