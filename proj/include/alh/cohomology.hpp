#ifndef ALH_COHOMOLOGY_HPP
#define ALH_COHOMOLOGY_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace alh {

// b is the degree of the circle bundle, 1..9; k the form degree.
int l2_hodge_dim(int b, int k);

struct ModuliDim {
    int total = 0;
    int anti_self_dual = 0;  // 3 (9 - b)
    int at_infinity = 0;     // 3
};
ModuliDim moduli_dim(int b);

// Weighted cohomology of the half-line end (0, eps) with dx^2/x^4 at weight gamma.
// nullopt where the range of d fails to be closed.
std::optional<int> wh_interval(int degree, double gamma);

// Which cohomology the perversity index j selects (l = 2).
std::string ih_selector(int j);
// Bracketed index floor(a + 2 - k/2); the bracket is read as floor.
int weight_shift(double a, int k);
// Model-metric index floor(a + 1).
int model_weight_index(double a);

struct HodgeEntry {
    int k = 0;
    std::string label;
    int dim = 0;
};
std::vector<HodgeEntry> l2_hodge_table(int b);

} // namespace alh

#endif
