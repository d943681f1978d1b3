// Serial reference vs OpenMP ensemble on the stage-structured model.
//
//   bench_ensemble [members] [horizon]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "delaycert/ensemble.hpp"

using namespace delaycert;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t members = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 8;
    const double horizon = argc > 2 ? std::strtod(argv[2], nullptr) : 20.0;

    StageStructuredSpec s;
    s.alpha = {2.0, 2.0};
    s.beta = {1.0, 1.0};
    s.gamma = {1.0, 1.0};
    s.c = {0.25, 0.25};
    DelayKernel f = DelayKernel::exponential(1.0);
    f.normalized = true;
    s.f = {f, f};
    const ModelSpec model = s;

    std::vector<InitialFunction> hs;
    for (std::size_t k = 0; k < members; ++k) {
        const double c = 0.1 + 0.2 * static_cast<double>(k);
        hs.push_back(InitialFunction::constant({c, 2.0 - 0.1 * static_cast<double>(k % 10)}));
    }
    IntegratorConfig cfg;
    cfg.horizon = horizon;

    std::vector<EnsembleMember> serial, parallel;
    const double ts = seconds([&] { serial = run_ensemble_serial(model, hs, cfg); });
    const double tp = seconds([&] { parallel = run_ensemble(model, hs, cfg); });

    bool same = serial.size() == parallel.size();
    for (std::size_t k = 0; same && k < serial.size(); ++k)
        same = serial[k].ok() && parallel[k].ok() && serial[k].trajectory->states == parallel[k].trajectory->states;

    std::printf("members=%zu horizon=%g threads=%d\n", members, horizon, omp_get_max_threads());
    std::printf("serial   %8.3f s\n", ts);
    std::printf("openmp   %8.3f s  (speedup %.2fx)\n", tp, ts / tp);
    std::printf("results  %s\n", same ? "identical" : "DIFFER");
    return same ? 0 : 1;
}
