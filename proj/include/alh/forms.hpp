#ifndef ALH_FORMS_HPP
#define ALH_FORMS_HPP

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "alh/geometry.hpp"

namespace alh {

// Coefficients keyed by bitmask over the chart coordinates; bit i <-> d(coord i).
// Keys are the increasing index tuples; the chart order is the orientation.
class FormField {
public:
    FormField() = default;
    FormField(Chart chart, int degree);

    static FormField scalar(const Chart& chart, const RatFun& f);
    static FormField coord(const Chart& chart, int i);  // d(coord i)
    static FormField differential(const Chart& chart, const RatFun& f);
    static FormField volume(const Chart& chart, const RatFun& f);

    const Chart& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<unsigned, RatFun>& coeffs() const { return c_; }
    RatFun coeff(unsigned mask) const;
    void set(unsigned mask, const RatFun& f);
    bool is_zero() const { return c_.empty(); }

    FormField operator-() const;
    friend FormField operator+(const FormField& a, const FormField& b);
    friend FormField operator-(const FormField& a, const FormField& b);
    friend FormField operator*(const RatFun& f, const FormField& a);
    bool operator==(const FormField& o) const;

    FormField substitute(const std::map<Var, RatFun>& s) const;
    std::string str() const;

private:
    Chart chart_;
    int degree_ = 0;
    std::map<unsigned, RatFun> c_;
};

int popcount4(unsigned mask);
// Sign of dx^A ^ dx^B for disjoint masks.
int wedge_sign(unsigned a, unsigned b);

FormField wedge(const FormField& a, const FormField& b);
FormField ext_d(const FormField& a);
// Needs an exact volume density; throws StructureError otherwise.
FormField hodge_star(const MetricField& g, const FormField& a);
std::pair<FormField, FormField> sd_asd_split(const MetricField& g, const FormField& a);
// delta = -*d* (dimension 4), so (d + delta)^2 on functions is the nonnegative Laplacian.
FormField codifferential(const MetricField& g, const FormField& a);

// Theta = dtheta + y1 dy2 on a chart whose coordinates 1..3 are (y1, y2, theta).
FormField theta_form(const Chart& chart);

struct PMBasis {
    std::array<FormField, 3> plus, minus;
    std::array<FormField, 6> all() const { return {plus[0], plus[1], plus[2], minus[0], minus[1], minus[2]}; }
};

// The six forms built from (r, y1, y2, theta) functions on the r chart:
// w1 = dr^Th +- r dy1^dy2, w2 = dy1^Th +- r dy2^dr, w3 = dy2^Th +- r dr^dy1.
PMBasis pm_basis();
PMBasis pm_basis_of(const Chart& chart, const std::array<RatFun, 4>& coords);

// Coefficients of a 2-form in a basis of six 2-forms (exact linear solve).
std::array<RatFun, 6> expand_in(const FormField& w, const std::array<FormField, 6>& basis);
// Same for any degree; basis lists C(4, deg) forms of that degree.
std::vector<RatFun> expand_in(const FormField& w, const std::vector<FormField>& basis);

} // namespace alh

#endif
