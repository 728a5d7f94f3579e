#ifndef ALH_HK_HPP
#define ALH_HK_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alh/forms.hpp"
#include "alh/operators.hpp"

namespace alh {

using RatMat3 = std::array<std::array<RatFun, 3>, 3>;

struct Triple {
    std::array<FormField, 3> w;
};

// (w1+, w2+, w3+) on the r chart.
Triple standard_triple();
bool is_symplectic(const Triple& t);
// Wedge Gram matrix positive definite at the chart samples.
bool is_definite(const Triple& t, const FormField& vol, int samples = 8);
// (1/3) sum_l w_l ^ w_l
FormField reference_volume(const Triple& t);

// Q_ij = (w_i ^ w_j - (1/3) tr delta_ij) / vol
RatMat3 q_map(const Triple& t, const FormField& vol);
// J_ij = 2 eta_i^+ ^ w_j + Q(eta, eta)_ij, relative to reference_volume(omega)
RatMat3 gauge_residual(const Triple& eta, const Triple& omega, const MetricField& g);

// ---------------------------------------------------------------- parameter manifold

using Eigen::Matrix3d;

struct PPoint {
    Matrix3d A = Matrix3d::Identity();
    Matrix3d B = Matrix3d::Zero();
    double lambda = 1;

    // Enforces A symmetric, B first row zero, lambda > 0; with on_manifold also
    // |F| <= tol and tr A = 3.
    static PPoint make(const Matrix3d& A, const Matrix3d& B, double lambda, bool on_manifold = true,
                       double tol = 1e-10);
};

Matrix3d constraint_F(const Matrix3d& A, const Matrix3d& B, double lambda);

// Unknowns: 6 entries of symmetric Adot, 6 entries of Bdot below the first row, lambda dot.
struct Tangent {
    Matrix3d Adot, Bdot;
    double lambda_dot = 0;
};
Tangent unpack_tangent(const Eigen::VectorXd& v);
Eigen::VectorXd pack_tangent(const Tangent& t);

struct TangentSpace {
    Eigen::MatrixXd jacobian;  // 7 x 13: symmetric part of dF plus tr Adot
    int rank = 0;
    Eigen::MatrixXd basis;     // 13 x dim, orthonormal
    std::vector<double> singular_values;
    int dim() const { return static_cast<int>(basis.cols()); }
};
// Throws StructureError when the Jacobian drops rank.
TangentSpace tangent_space(const PPoint& p, double tol = 1e-10);

// ---------------------------------------------------------------- families

struct FamilyPoint {
    Matrix3d A, B;
    double lambda = 1;  // from the constraint, tr(AA^T - BB^T) / 3
};

struct DeformationFamily {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    double t_max = 0;  // closed forms valid for |t| < t_max
    std::function<FamilyPoint(double)> at;
    // derivatives at t = 0 of the closed forms, taken exactly
    Matrix3d Add_exact, Bd_exact;
    double lambda_dd_exact = 0;
    // values displayed alongside the family in the source
    Matrix3d Add_printed, Bd_printed;
    double lambda_dd_printed = 0;
};

DeformationFamily family_calabi_scaling(double alpha);
DeformationFamily family_calabi_modulus(double alpha, double beta);

// A^2 - BB^T = lambda I and tr A = 3 for the scaling family, as identities in t
// (the square root is carried as a variable w with w^2 = 12 - 3t^2).
IdentityReport calabi_scaling_identities();

struct DerivativeReport {
    Matrix3d Add, Bd;       // Richardson at t = 0
    double lambda_dd = 0;   // Richardson second derivative of lambda(t)
    double richardson_gap = 0;  // max deviation from the exact derivatives
    double mm_residual_printed = 0;  // |Add + Add^T - Bd Bd^T - lambda_dd I|
    double mm_residual_factor2 = 0;  // |Add + Add^T - 2 Bd Bd^T - lambda_dd I|
    double add_vs_printed = 0, bd_vs_printed = 0, lambda_vs_printed = 0;
};
// Richardson: base step h, three levels h, h/2, h/4.
DerivativeReport second_derivative_report(const DeformationFamily& f, double h = 4e-3);

// ---------------------------------------------------------------- semiflat twists

enum class SemiflatKind { theta_twist, y1_twist, y2_twist };
SemiflatKind parse_semiflat(const std::string& s);
std::string to_string(SemiflatKind k);

// New coordinates (r, y1, y2, theta) as functions on the r chart. The y2 twist
// needs theta -> theta - c r y1 for the expansion to be constant; compensated
// = false gives the bare shift.
std::array<RatFun, 4> semiflat_map(SemiflatKind k, const RatFun& c, bool compensated = true);
// r -> a r, theta -> c^2 theta, y -> c y
std::array<RatFun, 4> calabi_scaling_map(const RatFun& a, const RatFun& c);
// y1 -> a0 y1 + c0 y2, y2 -> b0 y2 + c0 y1, r -> q r, theta -> q^2 theta + exact
// correction, with q^2 = a0 b0 - c0^2 (b0 eliminated).
std::array<RatFun, 4> calabi_modulus_map(const RatFun& a0, const RatFun& c0, const RatFun& q);

struct PMExpansion {
    RatMat3 A, B;  // w~_i^+ = A_ij w_j^+ + B_ij w_j^-
};
// Pulls back the plus forms built from new_coords and expands in the undeformed
// basis; throws StructureError when a coefficient depends on position.
PMExpansion pullback_pm(const std::array<RatFun, 4>& new_coords);
// Numeric values with the parameter variables fixed.
std::pair<Matrix3d, Matrix3d> evaluate(const PMExpansion& e, const std::map<Var, mpq_class>& at);

struct ABPair {
    Matrix3d A, B;
};
// Raw matrices as displayed, checked against pullback_pm (1e-12).
ABPair family_semiflat(SemiflatKind k, double c);

struct Symmetrized {
    Matrix3d U, At, Bt;  // At = U A symmetric positive definite, Bt = U B
};
Symmetrized semiflat_printed(SemiflatKind k, double c);
// Polar decomposition; throws UsageError unless det A > 0.
Symmetrized symmetrize(const Matrix3d& A, const Matrix3d& B);

} // namespace alh

#endif
