#include <doctest.h>

#include <cmath>
#include <random>

#include "delaycert/errors.hpp"
#include "delaycert/models.hpp"

using namespace delaycert;

namespace {

CooperativeLVSpec symmetric_lv(const DelayKernel& eta, const DelayKernel& nu) {
    CooperativeLVSpec s;
    s.n = 2;
    s.beta = {1.0, 1.0};
    s.mu = {2.0, 2.0};
    s.a = Matrix{{0.0, 0.5}, {0.5, 0.0}};
    s.d = Matrix{{0.0, 0.5}, {0.5, 0.0}};
    s.eta.assign(4, eta);
    s.nu.assign(4, nu);
    return s;
}

StageStructuredSpec symmetric_stage(double c2 = 0.25) {
    StageStructuredSpec s;
    s.alpha = {2.0, 2.0};
    s.beta = {1.0, 1.0};
    s.gamma = {1.0, 1.0};
    s.c = {0.25, c2};
    s.f = {DelayKernel::exponential(1.0), DelayKernel::exponential(1.0)};
    return s;
}

LogisticNetSpec scalar_logistic(double beta_k) {
    LogisticNetSpec s;
    s.n = 1;
    s.classes.push_back({{{TimeCoefficient::constant(2.0), TimeCoefficient::constant(beta_k), DelayFunction::constant(1.0)}},
                         TimeCoefficient::constant(0.5),
                         TimeCoefficient::constant(1.0)});
    s.d = {TimeCoefficient::constant(0.0)};
    s.sigma = {DelayFunction::constant(0.0)};
    return s;
}

}  // namespace

TEST_CASE("rhs at constant histories") {
    const double tol = 1e-10;
    SUBCASE("lotka-volterra equilibrium") {
        for (const auto& k : {DelayKernel::atom(1.0), DelayKernel::exponential(2.0), DelayKernel::uniform(0.0, 3.0)}) {
            ModelSpec m = symmetric_lv(k, k);
            validate_model(m);
            HistoryBuffer b(InitialFunction::constant({1.0, 1.0}));
            const Vector r = rhs(m, 0.0, b, tol);
            CHECK(std::abs(r[0]) < 1e-9);
            CHECK(std::abs(r[1]) < 1e-9);
        }
    }
    SUBCASE("stage model") {
        ModelSpec m = symmetric_stage();
        HistoryBuffer b(InitialFunction::constant({1.0, 1.0}));
        const Vector r = rhs(m, 0.0, b, tol);
        CHECK(r[0] == doctest::Approx(-0.25).epsilon(1e-9));
        CHECK(r[1] == doctest::Approx(-0.25).epsilon(1e-9));
    }
    SUBCASE("logistic") {
        ModelSpec m = scalar_logistic(1.0);
        HistoryBuffer b(InitialFunction::constant({1.0}));
        CHECK(rhs(m, 0.0, b, tol)[0] == doctest::Approx(-0.5).epsilon(1e-15));
    }
}

TEST_CASE("lotka-volterra rhs at a constant history matches the undelayed system") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int k = 0; k < 20; ++k) {
        CooperativeLVSpec s;
        s.n = 3;
        s.beta = {u(rng) - 1.0, u(rng), u(rng)};
        s.mu = {u(rng) + 1.0, u(rng) + 1.0, u(rng) + 1.0};
        s.a = Matrix(3, 3);
        s.d = Matrix(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                if (i != j) {
                    s.a(i, j) = 0.3 * u(rng);
                    s.d(i, j) = 0.3 * u(rng);
                }
        s.eta.assign(9, DelayKernel::exponential(u(rng) + 1.0));
        s.nu.assign(9, DelayKernel::uniform(0.0, u(rng)));
        const Vector v = {u(rng), u(rng), u(rng)};
        HistoryBuffer b(InitialFunction::constant(v));
        const Vector r = rhs(ModelSpec{s}, 0.0, b, 1e-12);
        for (std::size_t i = 0; i < 3; ++i) {
            double want = s.beta[i] - s.mu[i] * v[i];
            double disp = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                want += s.a(i, j) * v[j];
                disp += s.d(i, j) * v[j];
            }
            CHECK(std::abs(r[i] - (v[i] * want + disp)) < 1e-9);
        }
    }
}

TEST_CASE("lotka-volterra F is linear in the history") {
    ModelSpec m = symmetric_lv(DelayKernel::exponential(1.5), DelayKernel::uniform(0.5, 2.0));
    const auto phi = InitialFunction::sine({1.0, 0.7}, {0.3, 0.2}, 1.3);
    const auto psi = InitialFunction::sine({0.4, 1.1}, {0.1, 0.5}, 1.3);
    const auto sum = InitialFunction::sine({1.4, 1.8}, {0.4, 0.7}, 1.3);
    HistoryBuffer bp(phi), bq(psi), bs(sum);
    const auto fp = decompose(m, 0.0, phi.eval(0.0), bp, 1e-12).F;
    const auto fq = decompose(m, 0.0, psi.eval(0.0), bq, 1e-12).F;
    const auto fs = decompose(m, 0.0, sum.eval(0.0), bs, 1e-12).F;
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(fs[i] - fp[i] - fq[i]) <= 1e-10);
}

TEST_CASE("stage birth term is nonnegative on nonnegative histories") {
    ModelSpec m = symmetric_stage();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        const double a = u(rng), b = u(rng);
        const auto phi = InitialFunction::sine({a + 0.01, b + 0.01}, {a, b}, u(rng) + 0.1);
        HistoryBuffer buf(phi);
        const auto parts = decompose(m, 0.0, phi.eval(0.0), buf, 1e-10);
        CHECK(parts.F[0] >= 0.0);
        CHECK(parts.F[1] >= 0.0);
    }
}

TEST_CASE("coefficient bounds") {
    CHECK(coefficient_bounds(TimeCoefficient::constant(2.0)) == std::pair{2.0, 2.0});
    CHECK(coefficient_bounds(TimeCoefficient::sinusoid(1.0, 0.5, 1.0)) == std::pair{0.5, 1.5});
    CHECK(coefficient_bounds(TimeCoefficient::sinusoid(3.0, 0.0, 1.0)) == std::pair{3.0, 3.0});

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const double amp = std::abs(u(rng));
        const auto c = TimeCoefficient::sinusoid(amp + 1.5 * std::abs(u(rng)), amp, 3.0 * std::abs(u(rng)), u(rng));
        const auto [lo, hi] = coefficient_bounds(c);
        for (int j = 0; j < 10000; ++j) {
            const double v = c.value(0.1 * j);
            CHECK(lo <= v);
            CHECK(v <= hi);
        }
    }
}

TEST_CASE("delays") {
    CHECK(DelayFunction::constant(2.0).value(7.0) == 2.0);
    CHECK(DelayFunction::proportional(0.5).value(10.0) == 5.0);
    CHECK(DelayFunction::proportional(0.5).escaping());
    CHECK_THROWS_AS(DelayFunction::proportional(1.0).validate(), ContractError);
    CHECK_THROWS_AS(DelayFunction::sinusoid(0.5, 1.0, 1.0).validate(), ContractError);
    const auto s = DelayFunction::sinusoid(1.0, 0.5, 2.0);
    for (double t = 0.0; t < 50.0; t += 0.37) CHECK(s.value(t) >= 0.0);
}

TEST_CASE("quasimonotone probe") {
    ProbeOptions opts;
    opts.n_pairs = 500;
    opts.seed = 4;
    SUBCASE("cooperative system passes") {
        const auto r = quasimonotone_probe(symmetric_lv(DelayKernel::exponential(1.0), DelayKernel::atom(1.0)), opts);
        CHECK(r.passed);
        CHECK(r.pairs_checked == 500);
        CHECK_FALSE(r.witness.has_value());
    }
    SUBCASE("competitive stage model is caught") {
        const auto r = quasimonotone_probe(symmetric_stage(), opts);
        REQUIRE_FALSE(r.passed);
        REQUIRE(r.witness.has_value());
        const auto& w = *r.witness;
        // the witness must reproduce: same value at zero in the flagged component, f drops
        CHECK(w.lower.value(w.component, 0.0) == w.upper.value(w.component, 0.0));
        const ModelSpec m = symmetric_stage();
        const double f_lo = rhs(m, 0.0, w.lower.eval(0.0), HistoryBuffer(w.lower), 1e-12)[w.component];
        const double f_hi = rhs(m, 0.0, w.upper.eval(0.0), HistoryBuffer(w.upper), 1e-12)[w.component];
        CHECK(f_lo > f_hi + opts.tolerance);
        for (double s = 0.0; s > -20.0; s -= 0.25)
            for (std::size_t i = 0; i < 2; ++i) CHECK(w.lower.value(i, s) <= w.upper.value(i, s));
    }
    SUBCASE("identical pairs always pass") {
        opts.identical_pairs = true;
        CHECK(quasimonotone_probe(symmetric_stage(), opts).passed);
        CHECK(quasimonotone_probe(scalar_logistic(1.0), opts).passed);
    }
}

TEST_CASE("validation") {
    CHECK(is_cooperative(ModelSpec{symmetric_lv(DelayKernel::atom(0.0), DelayKernel::atom(0.0))}));
    CHECK_FALSE(is_cooperative(ModelSpec{symmetric_stage()}));
    CHECK(min_damping(ModelSpec{symmetric_stage()}) == 1.0);

    auto lv = symmetric_lv(DelayKernel::atom(1.0), DelayKernel::atom(1.0));
    lv.a(0, 1) = -0.1;
    CHECK_THROWS_AS(lv.validate(), ContractError);

    auto neg = symmetric_lv(DelayKernel::atom(1.0), DelayKernel::atom(1.0));
    neg.beta = {-1.0, -1.0};
    CHECK_NOTHROW(neg.validate());

    auto st = symmetric_stage();
    st.f[0] = DelayKernel::atom(1.0);
    CHECK_THROWS_AS(st.validate(), ContractError);

    auto lg = scalar_logistic(1.0);
    lg.d = {TimeCoefficient::constant(0.3)};
    CHECK_THROWS_AS(lg.validate(), ContractError);
}
