#include "delaycert/ensemble.hpp"

#include <omp.h>

#include <exception>

#include "delaycert/errors.hpp"

namespace delaycert {

namespace {

EnsembleMember run_member(const ModelSpec& model, const InitialFunction& phi, const IntegratorConfig& cfg) {
    EnsembleMember m;
    try {
        m.trajectory = integrate(model, phi, cfg);
    } catch (const BlowUpError& e) {
        m.error = e.what();
        m.blow_up_time = e.time();
    } catch (const std::exception& e) {
        m.error = e.what();
    }
    return m;
}

}  // namespace

std::vector<EnsembleMember> run_ensemble(const ModelSpec& model, const std::vector<InitialFunction>& histories,
                                         const IntegratorConfig& cfg) {
    std::vector<EnsembleMember> out(histories.size());
    const auto count = static_cast<long>(histories.size());
    // members are independent and each one is strictly sequential, so the
    // result does not depend on the thread count
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < count; ++k) out[k] = run_member(model, histories[k], cfg);
    return out;
}

std::vector<EnsembleMember> run_ensemble_serial(const ModelSpec& model, const std::vector<InitialFunction>& histories,
                                                const IntegratorConfig& cfg) {
    std::vector<EnsembleMember> out;
    out.reserve(histories.size());
    for (const auto& phi : histories) out.push_back(run_member(model, phi, cfg));
    return out;
}

}  // namespace delaycert
