#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "igs/numerics.hpp"

using namespace igs;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    // n = 2 handles cubics.
    const double i3 = integrate_gl([](double x) { return x * x * x; }, 0.0, 1.0, 2);
    CHECK(i3 == doctest::Approx(0.25).epsilon(1e-14));
    const double i5 = integrate_gl([](double x) { return std::pow(x, 5.0); }, -1.0, 2.0, 3);
    CHECK(i5 == doctest::Approx((64.0 - 1.0) / 6.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature converges on smooth integrands") {
    bool conv = false;
    const double v = integrate_gl_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12,
                                           16, 512, &conv);
    CHECK(conv);
    CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("Brent finds classical roots") {
    // Dottie number: unique fixed point of cos.
    const double dottie = brent([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
    CHECK(dottie == doctest::Approx(0.7390851332151607).epsilon(1e-12));
    const double cbrt2 = brent([](double x) { return x * x * x - 2.0; }, 1.0, 2.0);
    CHECK(cbrt2 == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
}

TEST_CASE("Brent rejects a bracket without a sign change") {
    CHECK_THROWS_AS(brent([](double x) { return x * x + 1.0; }, -1.0, 1.0), RegimeError);
}

TEST_CASE("bracket expansion straddles the root on either side") {
    auto f = [](double x) { return x - 5.0; };
    const auto [a, b] = expand_bracket(f, 0.0, 1.0, +1);
    CHECK(a <= 5.0);
    CHECK(b >= 5.0);
    auto g = [](double x) { return x + 3.0; };
    const auto [c, d] = expand_bracket(g, 0.0, 1.0, -1);
    CHECK(c <= -3.0);
    CHECK(d >= -3.0);
    CHECK_THROWS_AS(expand_bracket([](double) { return 1.0; }, 0.0, 1.0, +1, 20), RegimeError);
}

TEST_CASE("splitmix64 matches the reference output stream") {
    // First outputs of the published generator seeded at 0 and 1.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(1) == 0x910a2dec89025cc1ULL);
    CHECK(splitmix64(0xdeadbeefULL) == 0x4adfb90f68c9eb9bULL);
}

TEST_CASE("path seeds are deterministic and distinct across paths") {
    CHECK(path_seed(42, 7) == path_seed(42, 7));
    CHECK(path_seed(42, 7) != path_seed(42, 8));
    CHECK(path_seed(42, 7) != path_seed(43, 7));
    // No collisions over a practical batch.
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 10000; ++i) seeds.push_back(path_seed(123456789ULL, i));
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("pairwise sum agrees with exact sums and beats naive accumulation order") {
    std::vector<double> v(10001, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(1000.1).epsilon(1e-13));
    std::vector<double> small{1.0, 2.0, 3.0};
    CHECK(pairwise_sum(small) == 6.0);
}

TEST_CASE("mean and standard error match closed forms") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const MeanSE r = mean_se(v);
    CHECK(r.mean == doctest::Approx(2.5).epsilon(1e-15));
    // Sample variance 5/3, so se = sqrt(5/12).
    CHECK(r.se == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
    CHECK(r.n == 4);

    const MeanSE empty = mean_se(std::span<const double>{});
    CHECK(empty.n == 0);
    CHECK(empty.se == 0.0);
}
