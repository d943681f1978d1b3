#pragma once

// Command pipelines behind the CLI. Each writes its files into the output
// directory and returns the process exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "delaycert/analysis.hpp"
#include "delaycert/certificates.hpp"
#include "delaycert/config.hpp"
#include "delaycert/ensemble.hpp"
#include "delaycert/monotone_bounds.hpp"

#include <json.hpp>

namespace delaycert {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitConfig = 2, kExitBlowUp = 3 };

struct RunRequest {
    std::string command;  // check | simulate | bounds | iterate | verify | probe
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::optional<double> step;
    std::optional<std::string> out_dir;
    bool allow_inconclusive = false;
};

/// Loads the config and applies the command-line overrides.
ExperimentConfig resolve_config(const RunRequest& req);

struct OrderingCheck {
    std::size_t pair = 0;
    double violation = 0.0;  // max_t,i lower - upper
    bool passed = false;
};

struct VerifyRun {
    Certificate certificate;
    std::vector<EnsembleMember> members;
    std::vector<TailStats> stats;
    std::optional<IterationResult> iteration;
    std::vector<OrderingCheck> ordering;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;
    /// Set when some member blew up; the index of the first one.
    std::optional<std::size_t> blow_up;
};

/// Ordered trajectories must agree to this at every output time.
inline constexpr double kOrderTolerance = 1e-6;

/// Certificate, ensemble, tail statistics, bounding iteration and verdicts,
/// without touching the filesystem.
VerifyRun run_verify(const ExperimentConfig& cfg);

/// The stage iteration the harness runs for a certified stage model.
IterationResult run_iteration(const ExperimentConfig& cfg, const Certificate& cert);

nlohmann::ordered_json verify_report(const ExperimentConfig& cfg, const VerifyRun& run);

/// Dispatches a command; never throws.
int run(const RunRequest& req, std::ostream& out, std::ostream& err);

}  // namespace delaycert
