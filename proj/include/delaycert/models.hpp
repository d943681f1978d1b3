#pragma once

// Model classes written as x_i' = F_i(t, x_t) - x_i(t) G_i(t, x_t).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "delaycert/fading_memory.hpp"
#include "delaycert/linalg.hpp"

namespace delaycert {

/// Bounded coefficient c(t) on t >= 0: a constant or c0 + c1 sin(omega t + phase).
struct TimeCoefficient {
    enum class Kind { Constant, Sinusoid, PositiveSinusoid };

    Kind kind = Kind::Constant;
    double c0 = 0.0;
    double c1 = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    double floor = 0.0;  // PositiveSinusoid only: c0 - c1 >= floor > 0

    static TimeCoefficient constant(double c);
    static TimeCoefficient sinusoid(double c0, double c1, double omega, double phase = 0.0);
    static TimeCoefficient positive_sinusoid(double c0, double c1, double omega, double phase, double floor);

    double value(double t) const;
    bool is_constant() const noexcept { return kind == Kind::Constant || c1 == 0.0 || omega == 0.0; }
    void validate() const;
};

/// Closed-form inf and sup of a coefficient over t >= 0.
std::pair<double, double> coefficient_bounds(const TimeCoefficient& c);

/// Time-varying discrete delay tau(t) >= 0.
struct DelayFunction {
    enum class Kind { Constant, Sinusoid, Proportional };

    Kind kind = Kind::Constant;
    double tau0 = 0.0;   // constant delay, or the offset of the sinusoid
    double tau1 = 0.0;   // sinusoid amplitude
    double omega = 0.0;  // sinusoid frequency
    double rho = 0.0;    // proportional lag: tau(t) = rho t, rho in [0, 1)

    static DelayFunction constant(double tau);
    static DelayFunction sinusoid(double tau0, double tau1, double omega);
    static DelayFunction proportional(double rho);

    double value(double t) const;
    /// t - tau(t) -> inf. True for every shipped family.
    bool escaping() const noexcept;
    void validate() const;
};

/// Cooperative Lotka-Volterra system with patch structure and distributed delays.
struct CooperativeLVSpec {
    std::size_t n = 0;
    Vector beta;
    Vector mu;
    Matrix a;
    Matrix d;
    std::vector<DelayKernel> eta;  // n*n, row-major
    std::vector<DelayKernel> nu;   // n*n, row-major

    const DelayKernel& eta_at(std::size_t i, std::size_t j) const { return eta[i * n + j]; }
    const DelayKernel& nu_at(std::size_t i, std::size_t j) const { return nu[i * n + j]; }
    void validate() const;
};

/// The same system with bounded time-varying coefficients.
struct NonautLVSpec {
    std::size_t n = 0;
    std::vector<TimeCoefficient> beta;
    std::vector<TimeCoefficient> mu;
    std::vector<TimeCoefficient> a;  // n*n
    std::vector<TimeCoefficient> d;  // n*n
    std::vector<DelayKernel> eta;
    std::vector<DelayKernel> nu;

    static NonautLVSpec from_autonomous(const CooperativeLVSpec& s);
    void validate() const;
};

/// Network of modified delayed logistic equations with dispersal.
struct LogisticNetSpec {
    struct Term {
        TimeCoefficient alpha;
        TimeCoefficient beta;
        DelayFunction tau;
    };
    struct Class {
        std::vector<Term> terms;
        TimeCoefficient mu;
        TimeCoefficient kappa;
    };

    std::size_t n = 0;
    std::vector<Class> classes;
    std::vector<TimeCoefficient> d;   // n*n, d_ii must be zero
    std::vector<DelayFunction> sigma; // n*n

    const TimeCoefficient& d_at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
    const DelayFunction& sigma_at(std::size_t i, std::size_t j) const { return sigma[i * n + j]; }
    /// inf over t of sum_k alpha_ik(t), bracketed by summing the term infima.
    double total_birth_inf(std::size_t i) const;
    double total_birth_sup(std::size_t i) const;
    void validate() const;
};

/// Two competing stage-structured species with maturation kernels f_j(s) e^{-gamma_j s}.
struct StageStructuredSpec {
    std::array<double, 2> alpha{};
    std::array<double, 2> beta{};
    std::array<double, 2> gamma{};
    std::array<double, 2> c{};
    std::array<DelayKernel, 2> f;

    /// Integral of f_j(s) e^{-gamma_j s} ds.
    double kappa(std::size_t j) const { return kernel_weighted_mass(f[j], gamma[j]); }
    void validate() const;
};

using ModelSpec = std::variant<CooperativeLVSpec, NonautLVSpec, LogisticNetSpec, StageStructuredSpec>;

std::size_t model_dim(const ModelSpec& m);
const char* model_name(const ModelSpec& m);
void validate_model(const ModelSpec& m);
/// Smallest maturation damping, or +inf when the model has none.
double min_damping(const ModelSpec& m);
/// The model satisfies the quasimonotone condition by construction.
bool is_cooperative(const ModelSpec& m);

struct RhsParts {
    Vector F;
    Vector G;
};

/// F and G at time t, with x(t) = state and the past read from `buffer`.
RhsParts decompose(const ModelSpec& m, double t, std::span<const double> state, const HistoryBuffer& buffer,
                   double tail_tol);

/// x'(t) = F - x(t) * G componentwise.
Vector rhs(const ModelSpec& m, double t, std::span<const double> state, const HistoryBuffer& buffer, double tail_tol);
/// Convenience form with the state read from the buffer at t.
Vector rhs(const ModelSpec& m, double t, const HistoryBuffer& buffer, double tail_tol);

struct ProbeOptions {
    std::size_t n_pairs = 500;
    std::uint64_t seed = 1;
    /// Draw phi == psi only (sanity mode).
    bool identical_pairs = false;
    double tolerance = 1e-10;
    double tail_tol = 1e-12;
};

struct ProbeReport {
    bool passed = true;
    std::size_t pairs_checked = 0;
    struct Witness {
        InitialFunction lower;
        InitialFunction upper;
        std::size_t component = 0;
        double f_lower = 0.0;
        double f_upper = 0.0;
    };
    std::optional<Witness> witness;
};

/// Samples ordered pairs phi <= psi with phi_i(0) = psi_i(0) and checks
/// f_i(phi) <= f_i(psi). Evidence for the quasimonotone condition, never a proof.
ProbeReport quasimonotone_probe(const ModelSpec& m, const ProbeOptions& opts);

}  // namespace delaycert
