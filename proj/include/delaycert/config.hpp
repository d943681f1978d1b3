#pragma once

// JSON experiment configuration. Every parse or validation failure surfaces
// as ConfigError.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delaycert/integrator.hpp"
#include "delaycert/models.hpp"
#include "delaycert/monotone_bounds.hpp"

#include <json.hpp>

namespace delaycert {

struct AnalysisConfig {
    double tail_window = 0.2;
    double bound_tol = 1e-2;
    double eq_tol = 1e-2;
    /// Tail claims turn inconclusive when the half-window drift exceeds this.
    double drift_tol = 1e-3;
    std::uint64_t seed = 1;
    std::size_t probe_pairs = 500;
    /// Starting delta of the bounding iteration; the certificate's delta if absent.
    std::optional<double> delta0;
    DeltaSchedule schedule = DeltaSchedule::Halving;
    std::size_t max_levels = 200;
    double iterate_tol = 1e-10;
    double weight_rate = 0.1;
    /// Ordered initial pairs for the monotone comparison check (cooperative models).
    std::size_t ordered_pairs = 0;
};

struct ExperimentConfig {
    std::string name;
    ModelSpec model;
    std::vector<InitialFunction> initial_conditions;
    IntegratorConfig integrator;
    AnalysisConfig analysis;
    std::string output_dir = "out";
};

/// Constants {0.1, 0.5, 1, 2} and 1 + 0.5 sin(s) in every component.
std::vector<InitialFunction> default_ensemble(std::size_t n);

ExperimentConfig parse_config(const nlohmann::json& j, const std::string& name = "experiment");
ExperimentConfig load_config(const std::string& path);

TimeCoefficient parse_coefficient(const nlohmann::json& j);
DelayFunction parse_delay(const nlohmann::json& j);
DelayKernel parse_kernel(const nlohmann::json& j);
InitialFunction parse_initial(const nlohmann::json& j, std::size_t n);
ModelSpec parse_model(const nlohmann::json& j);

nlohmann::ordered_json model_to_json(const ModelSpec& m);
nlohmann::ordered_json initial_to_json(const InitialFunction& phi);

}  // namespace delaycert
