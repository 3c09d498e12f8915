#include "ffp/observation.hpp"

#include <doctest.h>

#include <cmath>

using namespace ffp;

TEST_CASE("channel validation") {
    CHECK_THROWS_AS(ObservationChannel(-0.1, {2, 2}), ArgumentError);
    CHECK_THROWS_AS(ObservationChannel(1.1, {2, 2}), ArgumentError);
    CHECK_THROWS(ObservationChannel(0.1, {1, 2}));
    CHECK_NOTHROW(ObservationChannel(0.0, {1, 2}));
}

TEST_CASE("likelihood values") {
    CHECK(likelihood(0.2, 0, 0, 2) == doctest::Approx(0.8));
    CHECK(likelihood(0.2, 1, 0, 2) == doctest::Approx(0.2));
    CHECK(likelihood(0.0, 1, 1, 3) == 1.0);
    CHECK(likelihood(0.0, 0, 1, 3) == 0.0);
    CHECK(likelihood(0.3, 2, 0, 4) == doctest::Approx(0.1));
}

TEST_CASE("extreme noise levels") {
    const ObservationChannel exact(0.0, {3, 4});
    const ObservationChannel flip(1.0, {3, 4});
    SeededRng rng(7);
    for (int k = 0; k < 500; ++k) {
        const JointAction a{k % 3, k % 4};
        CHECK(perturb(exact, a, rng) == a);
        const auto o = perturb(flip, a, rng);
        CHECK(o[0] != a[0]);
        CHECK(o[1] != a[1]);
    }
}

TEST_CASE("Monte Carlo frequencies follow the likelihood") {
    for (double eps : {0.1, 0.3, 0.5}) {
        const int n = 4;
        const ObservationChannel channel(eps, {n});
        SeededRng rng(99);
        const int draws = 100000;
        std::vector<int> counts(n, 0);
        for (int k = 0; k < draws; ++k) ++counts[static_cast<std::size_t>(perturb_action(channel, 0, 1, rng))];
        for (int o = 0; o < n; ++o) {
            const double p = likelihood(eps, o, 1, n);
            const double se = std::sqrt(p * (1 - p) / draws);
            CHECK(std::abs(counts[static_cast<std::size_t>(o)] / double(draws) - p) <= 3 * se + 1e-12);
        }
    }
}

TEST_CASE("eps 0.3 over four actions") {
    const ObservationChannel channel(0.3, {4});
    SeededRng rng(3);
    std::vector<int> counts(4, 0);
    for (int k = 0; k < 100000; ++k) ++counts[static_cast<std::size_t>(perturb_action(channel, 0, 2, rng))];
    CHECK(std::abs(counts[2] / 1e5 - 0.7) <= 0.01);
    for (int o : {0, 1, 3}) CHECK(std::abs(counts[static_cast<std::size_t>(o)] / 1e5 - 0.1) <= 0.01);
}

TEST_CASE("components are perturbed independently") {
    const ObservationChannel channel(0.4, {2, 2});
    SeededRng rng(11);
    const int draws = 100000;
    double both = 0, first = 0, second = 0;
    for (int k = 0; k < draws; ++k) {
        const auto o = perturb(channel, JointAction{0, 0}, rng);
        first += o[0] != 0;
        second += o[1] != 0;
        both += o[0] != 0 && o[1] != 0;
    }
    CHECK(std::abs(both / draws - (first / draws) * (second / draws)) < 0.005);
}

TEST_CASE("seeded streams repeat and substreams differ") {
    auto a = SeededRng::substream(5, 0, Stream::observation);
    auto b = SeededRng::substream(5, 0, Stream::observation);
    auto c = SeededRng::substream(5, 1, Stream::observation);
    auto d = SeededRng::substream(5, 0, Stream::tie_break);
    bool differ_c = false, differ_d = false;
    for (int k = 0; k < 64; ++k) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differ_c |= x != c.next_u64();
        differ_d |= x != d.next_u64();
    }
    CHECK(differ_c);
    CHECK(differ_d);
    SeededRng r(1);
    for (int k = 0; k < 1000; ++k) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const int i = r.uniform_int(3);
        CHECK(i >= 0);
        CHECK(i < 3);
    }
}
