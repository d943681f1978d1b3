#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "delaycert/linalg.hpp"

namespace delaycert {

struct LinearConstraint {
    enum class Sense { LessEq, GreaterEq };
    Vector coeffs;
    Sense sense = Sense::LessEq;
    double rhs = 0.0;
};

/// Phase-one simplex (dense tableau, Bland's rule): some x >= 0 satisfying
/// every constraint, or nothing if the system is infeasible.
std::optional<Vector> phase_one_feasible(std::size_t nvars, const std::vector<LinearConstraint>& rows,
                                         double tol = 1e-9, std::size_t max_pivots = 20000);

}  // namespace delaycert
