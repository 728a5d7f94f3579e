#ifndef ALH_GEOMETRY_HPP
#define ALH_GEOMETRY_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alh/ratfun.hpp"

namespace alh {

struct Interval {
    mpq_class lo, hi;
};

// Four coordinates in orientation order plus a sampling box.
struct Chart {
    std::string name;
    std::array<Var, 4> coords;
    std::array<Interval, 4> box;

    int index_of(Var v) const;  // -1 when absent
    // Deterministic rational sample points strictly inside the box.
    std::vector<std::map<Var, mpq_class>> samples(int count, unsigned seed = 1) const;
};

Chart chart_x();   // (x, y1, y2, theta)
Chart chart_r();   // (r, y1, y2, theta), r = 1/x
Chart chart_xi();  // (xi, y1, y2, theta), x = xi^n for the Calabi family
Chart chart_euclid();  // (u1, u2, u3, u4)

using Mat4 = std::array<std::array<RatFun, 4>, 4>;

struct MetricField {
    Chart chart;
    Mat4 g;
};

// Symmetric, nondegenerate, positive on samples; throws otherwise.
MetricField make_metric(const Chart& chart, const Mat4& g);

MetricField metric_gh();       // the model metric in the x chart
MetricField metric_gh_r();     // same metric in the r chart
MetricField metric_a();        // conformal rescaling by 1/x
MetricField metric_model();    // conformal rescaling by x
MetricField metric_calabi(int n);
MetricField metric_round_s4();  // stereographic unit 4-sphere
MetricField metric_flat();

// phi[i] gives the i-th source coordinate as a function of the target coordinates.
MetricField pullback(const MetricField& g, const Chart& target, const std::array<RatFun, 4>& phi);

RatFun determinant(const Mat4& m);
Mat4 inverse(const Mat4& m);

struct Curvature {
    Chart chart;
    // gamma[k][i][j] = Gamma^k_ij
    std::array<std::array<std::array<RatFun, 4>, 4>, 4> gamma;
    // riemann[l][i][j][k] = R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + ...
    std::array<std::array<std::array<std::array<RatFun, 4>, 4>, 4>, 4> riemann;
    Mat4 ricci;  // Ric_jk = R^i_ijk
    RatFun scalar;
};

Curvature curvature(const MetricField& g);
std::array<std::array<std::array<RatFun, 4>, 4>, 4> christoffel(const MetricField& g);
bool is_ricci_flat(const Curvature& c);

struct VolumeDensity {
    RatFun det;
    std::optional<RatFun> exact;  // sqrt(det) when it is c^2 times an even monomial
    double at(std::span<const double> by_id) const;
};

VolumeDensity volume_density(const MetricField& g);

} // namespace alh

#endif
