#ifndef ALH_INDICIAL_HPP
#define ALH_INDICIAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "alh/operators.hpp"

namespace alh {

// Decay rate separating L^2 from non-L^2 behaviour of x^gamma on the model end.
inline constexpr double kL2Cutoff = 1.0;

struct IndicialPolynomial {
    Var gamma;
    // entries[r][c] is a univariate polynomial in gamma
    std::vector<std::vector<Poly>> entries;
    // row r of the operator was multiplied by x^{-row_shift[r]} before reading off M
    std::vector<int> row_shift;
    std::vector<std::string> components;

    int size() const { return static_cast<int>(entries.size()); }
    Poly det() const;
    std::vector<std::vector<mpq_class>> at(const mpq_class& g) const;
    std::string str() const;
};

IndicialPolynomial indicial_poly(const ModeReducedOp& op);

struct IndicialRoot {
    double value = 0;
    double imag = 0;
    std::optional<mpq_class> exact;
    int multiplicity = 1;
    // basis of ker M(root); exact for rational roots
    std::vector<std::vector<double>> nullvectors;
    std::vector<std::vector<mpq_class>> exact_nullvectors;
};

// Sorted by real part; complex roots appear once per conjugate.
std::vector<IndicialRoot> indicial_roots(const IndicialPolynomial& M);

// Squarefree decomposition: factors[i] has multiplicity i + 1.
std::vector<Poly> squarefree_factors(const Poly& p, Var v);

struct WeightWindow {
    std::vector<double> weights;  // gamma_j - 1 over real roots, sorted, unique
    double cutoff = kL2Cutoff;
    bool contains(double c, double tol = 1e-12) const;  // true when c is nonindicial
    // open intervals between consecutive weights
    std::vector<std::pair<double, double>> intervals() const;
};

WeightWindow weight_window(const std::vector<IndicialRoot>& roots);
bool is_fredholm_weight(const WeightWindow& w, double c);

// Real roots strictly above c + 1 (the admissible exponents at weight c).
std::vector<double> roots_above(const std::vector<IndicialRoot>& roots, double c);

} // namespace alh

#endif
