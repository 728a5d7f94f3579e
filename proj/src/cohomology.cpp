#include "alh/cohomology.hpp"

#include <cmath>

#include "alh/errors.hpp"

namespace alh {

namespace {

void check_b(int b) {
    if (b < 1 || b > 9) throw UsageError("b must lie in 1..9, got " + std::to_string(b));
}

} // namespace

int l2_hodge_dim(int b, int k) {
    check_b(b);
    if (k < 0 || k > 4) throw UsageError("form degree must lie in 0..4");
    return k == 2 ? 11 - b : 0;
}

ModuliDim moduli_dim(int b) {
    check_b(b);
    ModuliDim m;
    m.anti_self_dual = 3 * (9 - b);
    m.at_infinity = 3;
    m.total = m.anti_self_dual + m.at_infinity;
    return m;
}

std::optional<int> wh_interval(int degree, double gamma) {
    if (degree == 0) return gamma < -0.5 ? 1 : 0;
    if (degree == 1) {
        if (gamma == 0) return std::nullopt;
        return 0;
    }
    throw UsageError("interval weighted cohomology is defined in degrees 0 and 1");
}

std::string ih_selector(int j) {
    constexpr int l = 2;
    if (j <= -1) return "H*(X-B)";
    if (j <= l - 2) return "IH_p*(X)";
    return "H*(X,B)";
}

int weight_shift(double a, int k) { return static_cast<int>(std::floor(a + 2 - k / 2.0)); }

int model_weight_index(double a) { return static_cast<int>(std::floor(a + 1)); }

std::vector<HodgeEntry> l2_hodge_table(int b) {
    check_b(b);
    static const char* labels[5] = {"H^0(X,B)", "H^1(X,B)", "Im(IH^2(X,B) -> IH_0^2(X,B))", "IH_0^3(X,B)",
                                    "Im(IH_0^4(X,B) -> H^4(X-B))"};
    std::vector<HodgeEntry> t;
    for (int k = 0; k <= 4; ++k) t.push_back({k, labels[k], l2_hodge_dim(b, k)});
    return t;
}

} // namespace alh
