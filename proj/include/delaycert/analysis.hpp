#pragma once

// Finite-horizon surrogates for liminf/limsup and the verdicts that compare
// them with certified bounds.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delaycert/certificates.hpp"
#include "delaycert/integrator.hpp"
#include "delaycert/monotone_bounds.hpp"

#include <json.hpp>

namespace delaycert {

struct TailStats {
    Vector tail_min;
    Vector tail_max;
    /// max over components of the change in (min, max) between the two halves of the window
    double window_drift = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    std::size_t samples = 0;
};

/// Extrema over the step nodes in [(1 - w) T, T]. Throws ConfigError on an
/// empty window or w outside (0, 1).
TailStats tail_stats(const Trajectory& traj, double w);

enum class VerdictStatus { Pass, Fail, Inconclusive };
const char* verdict_name(VerdictStatus s);

struct Verdict {
    std::string claim;
    std::size_t trajectory = 0;
    std::optional<std::size_t> component;
    std::optional<std::size_t> level;  // bounding-scheme level, iterate claims only
    double expected = 0.0;
    double observed = 0.0;
    double margin = 0.0;
    VerdictStatus status = VerdictStatus::Fail;
};

struct VerifyOptions {
    double bound_tol = 1e-2;
    double eq_tol = 1e-2;
    double drift_tol = 1e-3;
};

/// Inputs beyond the certificate that some claims need.
struct VerifyContext {
    /// Histories the stats came from, in the same order (sandwich claims).
    std::vector<InitialFunction> histories;
    /// Bounding-scheme levels (stage model).
    std::vector<BoundIterate> iterates;
};

/// One verdict per applicable claim and trajectory. An uncertified model
/// yields no verdicts.
std::vector<Verdict> verify(const Certificate& cert, const std::vector<TailStats>& stats, const VerifyOptions& opts,
                            const VerifyContext& ctx = {});

/// max over output times and components of lower_i(t) - upper_i(t); <= 0 means ordered.
double ordering_violation(const Trajectory& lower, const Trajectory& upper);

/// Pairs phi <= psi on (-inf, 0] drawn from the three initial families.
std::vector<std::pair<InitialFunction, InitialFunction>> ordered_pairs(std::size_t n, std::size_t count,
                                                                       std::uint64_t seed);

/// Componentwise inf over (-inf, 0] of a history, in closed form.
Vector history_inf(const InitialFunction& phi);
/// Componentwise sup over (-inf, 0] of a history, in closed form.
Vector history_sup(const InitialFunction& phi);

nlohmann::ordered_json tail_stats_to_json(const TailStats& s);
nlohmann::ordered_json verdict_to_json(const Verdict& v);

}  // namespace delaycert
