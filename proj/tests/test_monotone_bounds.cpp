#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "delaycert/certificates.hpp"
#include "delaycert/errors.hpp"
#include "delaycert/monotone_bounds.hpp"

using namespace delaycert;

namespace {

StageStructuredSpec stage(double c1 = 0.25, double c2 = 0.25) {
    StageStructuredSpec s;
    s.alpha = {2.0, 2.0};
    s.beta = {1.0, 1.0};
    s.gamma = {1.0, 1.0};
    s.c = {c1, c2};
    s.f = {DelayKernel::exponential(1.0), DelayKernel::exponential(1.0)};
    return s;
}

// exact rationals p / q with small integers, enough for the hand-worked levels
struct Q {
    long long p, q;
};
Q reduce(Q x) {
    long long a = std::llabs(x.p), b = std::llabs(x.q);
    while (b) {
        const long long t = a % b;
        a = b;
        b = t;
    }
    return {x.p / a, x.q / a};
}
Q operator-(Q a, Q b) { return reduce({a.p * b.q - b.p * a.q, a.q * b.q}); }
Q operator+(Q a, Q b) { return reduce({a.p * b.q + b.p * a.q, a.q * b.q}); }
Q operator*(Q a, Q b) { return reduce({a.p * b.p, a.q * b.q}); }
double as_double(Q a) { return static_cast<double>(a.p) / static_cast<double>(a.q); }

}  // namespace

TEST_CASE("first level") {
    const auto b = first_bounds(stage(), 0.05);
    CHECK(b.level == 1);
    CHECK(b.upper[0] == 1.0);
    CHECK(b.upper[1] == 1.0);
    CHECK(b.lower[0] == doctest::Approx(1.0 - 0.25 * 1.05).epsilon(1e-15));
    CHECK(b.lower[1] == doctest::Approx(0.7375).epsilon(1e-15));

    const auto tiny = first_bounds(stage(), 1e-9);
    CHECK(tiny.lower[0] == doctest::Approx(0.75).epsilon(1e-8));

    const auto free = first_bounds(stage(0.0, 0.0), 0.3);
    CHECK(free.lower == free.upper);
    CHECK(free.upper[0] == 1.0);
}

TEST_CASE("first level preconditions") {
    CHECK_THROWS_AS(first_bounds(stage(), 0.0), ContractError);
    CHECK_THROWS_AS(first_bounds(stage(), 3.0), ContractError);
    CHECK_THROWS_AS(first_bounds(stage(0.25, 5.0), 0.01), ContractError);
}

TEST_CASE("second level by hand") {
    const auto r = iterate_bounds(stage(), 0.05, DeltaSchedule::Fixed, 2, 0.0);
    REQUIRE(r.levels.size() == 2);
    const Q one{1, 1}, c{1, 4}, d{1, 20};
    const Q l1 = one - c * (one + d);       // 59/80
    const Q u2 = one - c * (l1 - d);        // 53/64
    const Q l2 = one - c * (u2 + d);        // 999/1280
    CHECK(as_double(u2) == 0.828125);
    CHECK(as_double(l2) == 0.78046875);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(r.levels[1].upper[i] - as_double(u2)) <= 1e-14);
        CHECK(std::abs(r.levels[1].lower[i] - as_double(l2)) <= 1e-14);
    }
}

TEST_CASE("fixed delta limit straddles the equilibrium") {
    const auto r = iterate_bounds(stage(), 0.05, DeltaSchedule::Fixed);
    CHECK(r.converged);
    const auto& last = r.levels.back();
    // u = 1 - (l - 0.05)/4 and l = 1 - (u + 0.05)/4
    CHECK(last.upper[0] == doctest::Approx(49.0 / 60.0).epsilon(1e-9));
    CHECK(last.lower[0] == doctest::Approx(47.0 / 60.0).epsilon(1e-9));
    CHECK(last.upper[0] - last.lower[0] == doctest::Approx(1.0 / 30.0).epsilon(1e-8));
    CHECK(r.monotonicity_violations.empty());
}

TEST_CASE("halving reaches the equilibrium") {
    const auto r = iterate_bounds(stage(), 0.05, DeltaSchedule::Halving);
    const double ustar = stage_certificate(stage()).stage->equilibrium[0];
    std::size_t hit = 0;
    for (const auto& b : r.levels)
        if (hit == 0 && std::abs(b.upper[0] - ustar) <= 1e-6 && std::abs(b.lower[0] - ustar) <= 1e-6 &&
            std::abs(b.upper[1] - ustar) <= 1e-6 && std::abs(b.lower[1] - ustar) <= 1e-6)
            hit = b.level;
    CHECK(hit > 0);
    CHECK(hit <= 40);
    CHECK(r.final_gap <= 1e-9);
    CHECK(r.monotonicity_violations.empty());
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
        CHECK(r.levels[k].level == k + 1);
        CHECK(r.levels[k].delta == std::ldexp(0.05, -static_cast<int>(k)));
    }
}

TEST_CASE("monotone in the level") {
    for (auto sched : {DeltaSchedule::Fixed, DeltaSchedule::Halving}) {
        const auto r = iterate_bounds(stage(0.3, 0.2), 0.02, sched);
        for (std::size_t k = 1; k < r.levels.size(); ++k)
            for (std::size_t i = 0; i < 2; ++i) {
                CHECK(r.levels[k].lower[i] >= r.levels[k - 1].lower[i]);
                CHECK(r.levels[k].upper[i] <= r.levels[k - 1].upper[i]);
            }
    }
}

TEST_CASE("no competition freezes after the first level") {
    const auto r = iterate_bounds(stage(0.0, 0.0), 0.1, DeltaSchedule::Fixed);
    for (const auto& b : r.levels) {
        CHECK(b.lower[0] == 1.0);
        CHECK(b.upper[1] == 1.0);
    }
}

TEST_CASE("collapse") {
    // the delta limit here is 0.75 / 0.25 = 3; past it the first lower box is empty
    CHECK_THROWS_AS(iterate_bounds(stage(), 3.5, DeltaSchedule::Fixed), BoundCollapseError);
    CHECK_THROWS_AS(iterate_bounds(stage(0.9, 0.1), 0.15, DeltaSchedule::Halving), BoundCollapseError);
    CHECK_NOTHROW(iterate_bounds(stage(0.9, 0.1), 0.1, DeltaSchedule::Halving));
    CHECK_THROWS_AS(iterate_bounds(stage(), -1.0, DeltaSchedule::Fixed), ContractError);
    CHECK_THROWS_AS(iterate_bounds(stage(0.25, 5.0), 0.01, DeltaSchedule::Fixed), ContractError);
}

TEST_CASE("schedule names and csv") {
    CHECK(parse_schedule("fixed") == DeltaSchedule::Fixed);
    CHECK(parse_schedule("halving") == DeltaSchedule::Halving);
    CHECK_THROWS_AS(parse_schedule("geometric"), ConfigError);
    CHECK(std::string(schedule_name(DeltaSchedule::Halving)) == "halving");

    const auto r = iterate_bounds(stage(), 0.05, DeltaSchedule::Fixed, 2, 0.0);
    std::ostringstream os;
    write_iterates_csv(os, r.levels);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "n,delta,l1,l2,u1,u2");
    for (const auto& b : r.levels) {
        REQUIRE(std::getline(is, line));
        std::istringstream row(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
        REQUIRE(v.size() == 6);
        CHECK(v[0] == static_cast<double>(b.level));
        CHECK(v[1] == b.delta);
        CHECK(v[2] == b.lower[0]);
        CHECK(v[3] == b.lower[1]);
        CHECK(v[4] == b.upper[0]);
        CHECK(v[5] == b.upper[1]);
    }
    CHECK_FALSE(std::getline(is, line));
}
