#include "delaycert/simplex.hpp"

#include <cmath>
#include <limits>

#include "delaycert/errors.hpp"

namespace delaycert {

std::optional<Vector> phase_one_feasible(std::size_t nvars, const std::vector<LinearConstraint>& rows, double tol,
                                         std::size_t max_pivots) {
    const std::size_t m = rows.size();
    for (const auto& r : rows)
        if (r.coeffs.size() != nvars) throw ContractError("constraint width mismatch");

    // columns: structural | slacks (one per row) | artificials | rhs
    std::vector<int> slack_sign(m);
    std::vector<bool> needs_art(m);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        int s = rows[i].sense == LinearConstraint::Sense::LessEq ? 1 : -1;
        if (rows[i].rhs < 0.0) s = -s;  // row gets negated below
        slack_sign[i] = s;
        needs_art[i] = (s < 0);
        if (needs_art[i]) ++n_art;
    }
    const std::size_t cols = nvars + m + n_art + 1;
    const std::size_t rhs_col = cols - 1;
    Matrix tab(m + 1, cols);
    std::vector<std::size_t> basis(m);

    std::size_t art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = rows[i].rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < nvars; ++j) tab(i, j) = sign * rows[i].coeffs[j];
        tab(i, nvars + i) = static_cast<double>(slack_sign[i]);
        tab(i, rhs_col) = sign * rows[i].rhs;
        if (needs_art[i]) {
            const std::size_t col = nvars + m + art++;
            tab(i, col) = 1.0;
            basis[i] = col;
        } else {
            basis[i] = nvars + i;
        }
    }
    // objective row holds reduced costs of "minimize sum of artificials"
    const std::size_t obj = m;
    for (std::size_t i = 0; i < m; ++i) {
        if (!needs_art[i]) continue;
        for (std::size_t j = 0; j < cols; ++j)
            if (j < nvars + m || j == rhs_col) tab(obj, j) -= tab(i, j);
    }

    for (std::size_t pivots = 0;; ++pivots) {
        if (pivots > max_pivots) throw ConvergenceError("simplex exceeded its pivot budget");
        std::size_t enter = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j)
            if (tab(obj, j) < -tol) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (tab(i, enter) > tol) {
                const double ratio = tab(i, rhs_col) / tab(i, enter);
                if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < m && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave == m) break;  // unbounded direction: cannot happen in phase one
        const double p = tab(leave, enter);
        for (std::size_t j = 0; j < cols; ++j) tab(leave, j) /= p;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = tab(i, enter);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) tab(i, j) -= f * tab(leave, j);
        }
        basis[leave] = enter;
    }

    if (-tab(obj, rhs_col) > tol * std::max(1.0, static_cast<double>(m))) return std::nullopt;
    Vector x(nvars, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < nvars) x[basis[i]] = std::max(0.0, tab(i, rhs_col));
    return x;
}

}  // namespace delaycert
