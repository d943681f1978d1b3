#pragma once

// Iterative cooperative bounding for the two-species stage-structured model:
// nested boxes [u^{n,l}, u^{n,u}] that trap the liminf/limsup of every solution.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "delaycert/models.hpp"

namespace delaycert {

struct BoundIterate {
    std::size_t level = 1;
    std::array<double, 2> lower{};
    std::array<double, 2> upper{};
    double delta = 0.0;
};

enum class DeltaSchedule { Fixed, Halving };

DeltaSchedule parse_schedule(const std::string& name);
const char* schedule_name(DeltaSchedule s);

/// Slack of both delta conditions; both must exceed the strict margin.
std::array<double, 2> delta_slack(const StageStructuredSpec& spec, double delta);

/// Level-1 box. Throws ContractError when delta violates the delta conditions
/// or the coexistence conditions fail.
BoundIterate first_bounds(const StageStructuredSpec& spec, double delta);

/// Level n+1 from level n: the upper box uses prev.lower and prev.delta, the
/// lower box uses the new upper box and next_delta.
BoundIterate next_bounds(const StageStructuredSpec& spec, const BoundIterate& prev, double next_delta);

struct IterationResult {
    std::vector<BoundIterate> levels;
    DeltaSchedule schedule = DeltaSchedule::Fixed;
    /// Successive-iterate change fell below tol before max_levels.
    bool converged = false;
    double final_step = 0.0;
    double final_gap = 0.0;  // |u^{n,u} - u^{n,l}|_inf at the last level
    std::vector<std::string> monotonicity_violations;
};

/// Iterates until the successive change is <= tol or max_levels levels exist.
/// Level k carries delta0 under Fixed and delta0 / 2^(k-1) under Halving.
/// Throws BoundCollapseError if a lower iterate is <= 0, including a delta0
/// that fails the delta conditions.
IterationResult iterate_bounds(const StageStructuredSpec& spec, double delta0, DeltaSchedule schedule,
                               std::size_t max_levels = 200, double tol = 1e-10);

/// "n,delta,l1,l2,u1,u2" with 17 significant digits.
void write_iterates_csv(std::ostream& os, const std::vector<BoundIterate>& levels);

}  // namespace delaycert
