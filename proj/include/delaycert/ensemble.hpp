#pragma once

// Ensembles of independent trajectories. The OpenMP version is the one the
// harness uses; the serial version is the reference it is tested against.

#include <optional>
#include <string>
#include <vector>

#include "delaycert/integrator.hpp"

namespace delaycert {

struct EnsembleMember {
    std::optional<Trajectory> trajectory;
    /// Set when integration failed; blow_up_time >= 0 for BlowUpError.
    std::string error;
    double blow_up_time = -1.0;

    bool ok() const noexcept { return trajectory.has_value(); }
};

std::vector<EnsembleMember> run_ensemble(const ModelSpec& model, const std::vector<InitialFunction>& histories,
                                         const IntegratorConfig& cfg);

std::vector<EnsembleMember> run_ensemble_serial(const ModelSpec& model, const std::vector<InitialFunction>& histories,
                                                const IntegratorConfig& cfg);

}  // namespace delaycert
