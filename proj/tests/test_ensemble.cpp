#include <doctest.h>

#include "delaycert/config.hpp"
#include "delaycert/ensemble.hpp"

using namespace delaycert;

namespace {

ModelSpec stage_model() {
    StageStructuredSpec s;
    s.alpha = {2.0, 2.0};
    s.beta = {1.0, 1.0};
    s.gamma = {1.0, 1.0};
    s.c = {0.25, 0.25};
    s.f = {DelayKernel::exponential(1.0), DelayKernel::exponential(1.0)};
    return s;
}

}  // namespace

TEST_CASE("parallel ensemble matches the serial reference bit for bit") {
    IntegratorConfig cfg;
    cfg.horizon = 5.0;
    auto histories = default_ensemble(2);
    histories.push_back(InitialFunction::exp_approach({0.3, 1.5}, {1.2, 0.2}, 0.5));
    const auto par = run_ensemble(stage_model(), histories, cfg);
    const auto ser = run_ensemble_serial(stage_model(), histories, cfg);
    REQUIRE(par.size() == histories.size());
    REQUIRE(ser.size() == histories.size());
    for (std::size_t k = 0; k < par.size(); ++k) {
        REQUIRE(par[k].ok());
        REQUIRE(ser[k].ok());
        CHECK(par[k].trajectory->times == ser[k].trajectory->times);
        CHECK(par[k].trajectory->states == ser[k].trajectory->states);
    }
}

TEST_CASE("a failing member does not stop the others") {
    CooperativeLVSpec s;
    s.n = 2;
    s.beta = {1.0, 1.0};
    s.mu = {0.1, 0.1};
    s.a = Matrix{{0.0, 2.0}, {2.0, 0.0}};
    s.d = Matrix(2, 2);
    s.eta.assign(4, DelayKernel::atom(0.0));
    s.nu.assign(4, DelayKernel::atom(0.0));
    IntegratorConfig cfg;
    cfg.horizon = 20.0;
    // the tiny history stays far from blow-up over this horizon
    const std::vector<InitialFunction> histories = {InitialFunction::constant({1.0, 1.0}),
                                                    InitialFunction::constant({1e-12, 1e-12})};
    const auto out = run_ensemble(s, histories, cfg);
    CHECK_FALSE(out[0].ok());
    CHECK(out[0].blow_up_time > 0.0);
    CHECK(out[1].ok());
}
