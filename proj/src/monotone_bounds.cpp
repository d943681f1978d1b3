#include "delaycert/monotone_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "delaycert/certificates.hpp"
#include "delaycert/errors.hpp"
#include "delaycert/integrator.hpp"

namespace delaycert {

DeltaSchedule parse_schedule(const std::string& name) {
    if (name == "fixed") return DeltaSchedule::Fixed;
    if (name == "halving") return DeltaSchedule::Halving;
    throw ConfigError("unknown delta schedule '" + name + "' (expected fixed or halving)");
}

const char* schedule_name(DeltaSchedule s) { return s == DeltaSchedule::Fixed ? "fixed" : "halving"; }

namespace {

std::array<double, 2> growth(const StageStructuredSpec& s) {
    return {s.alpha[0] * s.kappa(0), s.alpha[1] * s.kappa(1)};
}

void check_collapse(const BoundIterate& b) {
    for (std::size_t i = 0; i < 2; ++i)
        if (!(b.lower[i] > 0.0))
            throw BoundCollapseError("lower bound of component " + std::to_string(i + 1) + " collapsed at level " +
                                     std::to_string(b.level) + "; delta0 is too large");
}

}  // namespace

std::array<double, 2> delta_slack(const StageStructuredSpec& s, double delta) {
    const auto g = growth(s);
    return {s.beta[0] * g[1] - s.c[1] * (delta * s.beta[0] + g[0]),
            s.beta[1] * g[0] - s.c[0] * (delta * s.beta[1] + g[1])};
}

BoundIterate first_bounds(const StageStructuredSpec& s, double delta) {
    s.validate();
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ContractError("delta must be positive");
    const auto g = growth(s);
    if (!(s.beta[0] * g[1] - s.c[1] * g[0] > kStrictMargin) || !(s.beta[1] * g[0] - s.c[0] * g[1] > kStrictMargin))
        throw ContractError("coexistence conditions fail; no bounding boxes exist");
    const auto slack = delta_slack(s, delta);
    if (!(slack[0] > kStrictMargin) || !(slack[1] > kStrictMargin))
        throw ContractError("delta = " + format_double(delta) + " violates the delta conditions");

    BoundIterate b;
    b.level = 1;
    b.delta = delta;
    for (std::size_t i = 0; i < 2; ++i) b.upper[i] = g[i] / s.beta[i];
    for (std::size_t i = 0; i < 2; ++i) b.lower[i] = (g[i] - s.c[i] * (b.upper[1 - i] + delta)) / s.beta[i];
    check_collapse(b);
    return b;
}

BoundIterate next_bounds(const StageStructuredSpec& s, const BoundIterate& prev, double next_delta) {
    const auto g = growth(s);
    const double d = prev.delta;
    BoundIterate b;
    b.level = prev.level + 1;
    b.delta = next_delta;
    for (std::size_t i = 0; i < 2; ++i) b.upper[i] = (g[i] - s.c[i] * std::max(prev.lower[1 - i] - d, 0.0)) / s.beta[i];
    // the lower box of a level is built from the upper box of the same level
    for (std::size_t i = 0; i < 2; ++i) b.lower[i] = (g[i] - s.c[i] * (b.upper[1 - i] + next_delta)) / s.beta[i];
    check_collapse(b);
    return b;
}

IterationResult iterate_bounds(const StageStructuredSpec& s, double delta0, DeltaSchedule schedule,
                               std::size_t max_levels, double tol) {
    if (max_levels == 0) throw ContractError("max_levels must be positive");
    IterationResult r;
    r.schedule = schedule;
    // the delta conditions say exactly that the level-1 lower box is positive
    if (delta0 > 0.0 && std::isfinite(delta0) && stage_certificate(s).persistent) {
        const auto slack = delta_slack(s, delta0);
        if (!(slack[0] > kStrictMargin) || !(slack[1] > kStrictMargin))
            throw BoundCollapseError("level-1 lower bound is not positive; delta0 = " + format_double(delta0) +
                                     " is too large");
    }
    r.levels.push_back(first_bounds(s, delta0));
    while (r.levels.size() < max_levels) {
        const BoundIterate& prev = r.levels.back();
        const double nd = schedule == DeltaSchedule::Fixed ? delta0 : prev.delta * 0.5;
        BoundIterate b = next_bounds(s, prev, nd);
        double step = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            step = std::max({step, std::abs(b.lower[i] - prev.lower[i]), std::abs(b.upper[i] - prev.upper[i])});
            if (b.lower[i] < prev.lower[i])
                r.monotonicity_violations.push_back("lower " + std::to_string(i + 1) + " decreased at level " +
                                                    std::to_string(b.level));
            if (b.upper[i] > prev.upper[i])
                r.monotonicity_violations.push_back("upper " + std::to_string(i + 1) + " increased at level " +
                                                    std::to_string(b.level));
        }
        r.levels.push_back(b);
        r.final_step = step;
        if (step <= tol) {
            r.converged = true;
            break;
        }
    }
    const auto& last = r.levels.back();
    r.final_gap = std::max(last.upper[0] - last.lower[0], last.upper[1] - last.lower[1]);
    return r;
}

void write_iterates_csv(std::ostream& os, const std::vector<BoundIterate>& levels) {
    os << "n,delta,l1,l2,u1,u2\n";
    for (const auto& b : levels)
        os << b.level << ',' << format_double(b.delta) << ',' << format_double(b.lower[0]) << ','
           << format_double(b.lower[1]) << ',' << format_double(b.upper[0]) << ',' << format_double(b.upper[1])
           << '\n';
}

}  // namespace delaycert
