#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pnsmc/random.hpp"

using namespace pnsmc;

TEST_CASE("exponential inverse transform hits known quantiles") {
    // median of Exp(1) is ln 2
    CHECK(exponential_from_uniform(0.5, 1.0) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK(exponential_from_uniform(0.5, 2.0) ==
          doctest::Approx(0.5 * 0.6931471805599453).epsilon(1e-12));
    CHECK(exponential_from_uniform(0.0, 3.0) == 0.0);
    // scaling: quantile at rate r is quantile at rate 1 divided by r
    CHECK(exponential_from_uniform(0.9, 4.0) ==
          doctest::Approx(exponential_from_uniform(0.9, 1.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("exponential rejects bad rates") {
    CHECK_THROWS_AS(exponential_from_uniform(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(exponential_from_uniform(0.5, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(exponential_from_uniform(0.5, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(exponential_from_uniform(0.5, std::nan("")), std::invalid_argument);
}

TEST_CASE("discrete inversion picks by cumulative weight") {
    const std::vector<double> w{1.0, 3.0};
    CHECK(discrete_from_uniform(0.0, w) == 0);
    CHECK(discrete_from_uniform(0.1, w) == 0);     // 0.1 * 4 = 0.4 < 1
    CHECK(discrete_from_uniform(0.2499, w) == 0);  // just below the boundary
    CHECK(discrete_from_uniform(0.25, w) == 1);    // 0.25 * 4 = 1, not < 1
    CHECK(discrete_from_uniform(0.9999, w) == 1);

    const std::vector<double> zeros_around{0.0, 2.0, 0.0};
    CHECK(discrete_from_uniform(0.0, zeros_around) == 1);
    CHECK(discrete_from_uniform(0.999, zeros_around) == 1);
}

TEST_CASE("discrete inversion rejects bad weights") {
    CHECK_THROWS_AS(discrete_from_uniform(0.5, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(discrete_from_uniform(0.5, std::vector<double>{1.0, -0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(discrete_from_uniform(0.5, std::vector<double>{0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        discrete_from_uniform(0.5, std::vector<double>{1.0, std::numeric_limits<double>::infinity()}),
        std::invalid_argument);
}

TEST_CASE("uniform01 stays in range with sensible moments") {
    RandomStream s(42);
    const int n = 100000;
    double sum = 0.0;
    int quarter_counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        quarter_counts[static_cast<int>(u * 4.0)]++;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));  // 3 sigma ~ 0.0027
    for (int q = 0; q < 4; ++q) {
        CHECK(static_cast<double>(quarter_counts[q]) / n == doctest::Approx(0.25).epsilon(0.05));
    }
}

TEST_CASE("streams are reproducible from the seed") {
    RandomStream a(123), b(123), c(124);
    bool all_equal = true;
    bool any_differ = false;
    for (int i = 0; i < 100; ++i) {
        const double ua = a.uniform01();
        all_equal = all_equal && (ua == b.uniform01());
        any_differ = any_differ || (ua != c.uniform01());
    }
    CHECK(all_equal);
    CHECK(any_differ);
}

TEST_CASE("derived streams depend only on seed and index") {
    RandomStream master(9001);
    RandomStream d1 = master.derive(5);

    // consuming draws from the master must not change what derive returns
    for (int i = 0; i < 17; ++i) master.uniform01();
    RandomStream d2 = master.derive(5);
    RandomStream other = master.derive(6);

    bool same = true;
    bool differ = false;
    for (int i = 0; i < 50; ++i) {
        const double u = d1.uniform01();
        same = same && (u == d2.uniform01());
        differ = differ || (u != other.uniform01());
    }
    CHECK(same);
    CHECK(differ);

    // the free-function spelling matches the member
    RandomStream m2(9001);
    RandomStream d3 = derive_stream(m2, 5);
    RandomStream d4 = RandomStream(9001).derive(5);
    CHECK(d3.uniform01() == d4.uniform01());
}

TEST_CASE("derived streams differ from the master and between indices") {
    RandomStream master(7);
    std::vector<double> first;
    for (std::uint64_t idx = 0; idx < 8; ++idx) {
        first.push_back(master.derive(idx).uniform01());
    }
    for (std::size_t i = 0; i < first.size(); ++i) {
        for (std::size_t j = i + 1; j < first.size(); ++j) {
            CHECK(first[i] != first[j]);
        }
    }
}

TEST_CASE("exponential member draw agrees with the free function") {
    RandomStream a(31), b(31);
    const double u = b.uniform01();
    CHECK(a.exponential(2.5) == exponential_from_uniform(u, 2.5));
}
