#include <doctest.h>

#include "alh/cohomology.hpp"
#include "alh/errors.hpp"

using namespace alh;

TEST_CASE("L2 Hodge dimensions") {
    CHECK(l2_hodge_dim(1, 2) == 10);
    CHECK(l2_hodge_dim(9, 2) == 2);
    CHECK(l2_hodge_dim(3, 1) == 0);
    for (int b = 1; b <= 9; ++b)
        for (int k = 0; k <= 4; ++k) CHECK(l2_hodge_dim(b, k) == l2_hodge_dim(b, 4 - k));
    CHECK_THROWS_AS(l2_hodge_dim(0, 2), UsageError);
    CHECK_THROWS_AS(l2_hodge_dim(10, 2), UsageError);
    CHECK_THROWS_AS(l2_hodge_dim(1, 5), UsageError);
}

TEST_CASE("moduli dimension and its split") {
    auto m1 = moduli_dim(1);
    CHECK(m1.total == 27);
    CHECK(m1.anti_self_dual == 24);
    CHECK(m1.at_infinity == 3);
    CHECK(moduli_dim(9).total == 3);
    CHECK(moduli_dim(9).anti_self_dual == 0);
    CHECK(moduli_dim(5).total == 15);
    for (int b = 1; b <= 9; ++b) {
        CHECK(moduli_dim(b).total == 3 * (10 - b));
        // anti-self-dual part: l2_hodge_dim(b, 2) = (9 - b) + 2
        CHECK(moduli_dim(b).anti_self_dual == 3 * (l2_hodge_dim(b, 2) - 2));
    }
}

TEST_CASE("interval weighted cohomology") {
    CHECK(wh_interval(0, -1) == 1);
    CHECK(wh_interval(0, 0) == 0);
    CHECK(wh_interval(0, -0.5) == 0);
    CHECK(!wh_interval(1, 0).has_value());
    CHECK(wh_interval(1, 0.3) == 0);
    int prev = 1;
    for (double g = -3; g <= 3; g += 0.125) {
        int v = *wh_interval(0, g);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK_THROWS_AS(wh_interval(2, 0), UsageError);
}

TEST_CASE("perversity selector and weight index") {
    CHECK(ih_selector(-1) == "H*(X-B)");
    CHECK(ih_selector(-7) == "H*(X-B)");
    CHECK(ih_selector(0) == "IH_p*(X)");
    CHECK(ih_selector(1) == "H*(X,B)");
    CHECK(weight_shift(0, 2) == 1);
    CHECK(weight_shift(0, 0) == 2);
    CHECK(weight_shift(0, 1) == 1);
    CHECK(weight_shift(-0.25, 0) == 1);
    CHECK(model_weight_index(-1.5) == -1);
}

TEST_CASE("identification table") {
    auto t = l2_hodge_table(4);
    REQUIRE(t.size() == 5);
    CHECK(t[3].label == "IH_0^3(X,B)");
    CHECK(t[3].dim == 0);
    CHECK(t[0].label == "H^0(X,B)");
    CHECK(t[0].dim == 0);
    CHECK(t[2].dim == 7);
}
