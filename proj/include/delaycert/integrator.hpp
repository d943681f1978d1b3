#pragma once

// Fixed-step RK4 for infinite-delay systems with cubic Hermite dense output.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "delaycert/fading_memory.hpp"
#include "delaycert/models.hpp"

namespace delaycert {

struct IntegratorConfig {
    double step = 0.01;
    double horizon = 10.0;
    double tail_tol = 1e-8;
    /// Components below -positivity_floor are counted as positivity violations.
    double positivity_floor = 1e-8;
    /// CSV row every `output_stride` steps.
    std::size_t output_stride = 10;

    void validate() const;
};

struct StepDiagnostics {
    double max_junction_residual = 0.0;
    double min_value = 0.0;
    double min_value_time = 0.0;
    std::size_t positivity_violations = 0;
    double first_violation_time = -1.0;
    double wall_seconds = 0.0;
};

struct Trajectory {
    HistoryBuffer history;
    /// Step nodes t_k = k h and the state there.
    std::vector<double> times;
    std::vector<Vector> states;
    StepDiagnostics diagnostics;

    std::size_t dim() const { return history.dim(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

/// Integrates the model from history phi over [0, cfg.horizon]. Throws
/// BlowUpError if the state turns non-finite.
Trajectory integrate(const ModelSpec& model, const InitialFunction& phi, const IntegratorConfig& cfg);

/// "t,x1,...,xn" header, one row per stride, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride);
std::string format_double(double x);

}  // namespace delaycert
