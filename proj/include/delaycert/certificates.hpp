#pragma once

// Algebraic persistence/permanence certificates: the coefficient matrices of
// each model class, positive witness vectors, M-matrix tests, equilibria and
// the explicit asymptotic bounds.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delaycert/linalg.hpp"
#include "delaycert/models.hpp"

#include <json.hpp>

namespace delaycert {

/// Strict inequalities are only asserted when they hold by more than this.
inline constexpr double kStrictMargin = 1e-10;

struct MatrixBundle {
    std::string family;  // cooperative_lv | nonautonomous_lv | logistic_network
    std::vector<std::pair<std::string, Matrix>> matrices;

    const Matrix& get(const std::string& name) const;
};

MatrixBundle build_lv_matrices(const CooperativeLVSpec& spec);
MatrixBundle build_nonaut_matrices(const NonautLVSpec& spec);
MatrixBundle build_H(const LogisticNetSpec& spec);

// ---------------------------------------------------------------- spectral tools

/// Largest real eigenvalue of a Metzler matrix: the Perron root of M + cI
/// minus c, taken block by block over the strongly connected components.
double spectral_bound(const Matrix& m);

/// Strongly connected components of the off-diagonal sparsity graph.
std::vector<std::vector<std::size_t>> strong_components(const Matrix& m);
bool is_irreducible(const Matrix& m);

struct PerronResult {
    double root = 0.0;  // Perron root of the nonnegative matrix
    Vector vector;      // strictly positive, max component 1
    std::size_t iterations = 0;
};
/// Power iteration on a nonnegative irreducible matrix with positive
/// diagonal. Stops when the Collatz-Wielandt bracket is narrower than tol.
PerronResult perron_iteration(const Matrix& a, double tol = 1e-12, std::size_t max_iter = 100000);

struct WitnessSearch {
    std::optional<Vector> v;  // min component 1, M v > 0
    std::optional<double> spectral_bound;
    bool irreducible = false;
    bool inconclusive = false;
    double margin = 0.0;      // min (M v)_i, or s(M) when no witness exists
    std::string method;       // perron | feasibility
    std::string diagnostic;
};

/// Positive v with M v > 0, for Metzler M.
WitnessSearch find_positive_vector(const Matrix& m);

struct MMatrixCheck {
    bool is_nonsingular_m_matrix = false;
    std::optional<Vector> q;  // min component 1, N q > 0
    double margin = 0.0;      // min (N q)_i for the returned q
};

/// Z-pattern N is a nonsingular M-matrix iff N q = 1 has a positive solution.
MMatrixCheck m_matrix_check(const Matrix& n);

// ---------------------------------------------------------------- equilibria

struct NewtonReport {
    std::optional<Vector> root;  // only strictly positive roots are returned
    Vector last_iterate;
    std::size_t iterations = 0;
    bool converged = false;
    std::string diagnostic;
};

/// Newton on x_i (beta_i - mu_i x_i + sum_j a_ij x_j) + sum_j d_ij x_j = 0.
NewtonReport lv_equilibrium(const CooperativeLVSpec& spec, const Vector& guess);
/// Residual of the zero-delay system at x.
Vector lv_residual(const CooperativeLVSpec& spec, const Vector& x);

// ---------------------------------------------------------------- certificates

enum class ConditionStatus { Holds, Fails, Inconclusive };

struct Condition {
    std::string name;
    ConditionStatus status = ConditionStatus::Fails;
    double margin = 0.0;

    bool holds() const noexcept { return status == ConditionStatus::Holds; }
};

Condition strict_positive(std::string name, double margin);

struct EquilibriumReport {
    Vector x;
    Vector mx;             // M x*
    bool mx_positive = false;
};

/// Asymptotic bounds m0 <= liminf x_i / v_i <= limsup x_i / v_i <= M0.
struct BoundsPair {
    double lower = 0.0;
    double upper = 0.0;
    Vector scaling;
    bool vacuous = false;  // lower <= 0
    /// Dense-sampling estimates of the same limsup/liminf (diagnostic only).
    std::optional<double> sampled_lower;
    std::optional<double> sampled_upper;
};

struct StagePayload {
    Vector kappa;
    Vector equilibrium;   // u*
    double delta = 0.0;
    Vector first_lower;   // level-1 equilibria of the auxiliary systems
    Vector first_upper;
};

struct Certificate {
    std::string family;
    std::vector<std::pair<std::string, Matrix>> matrices;
    std::optional<Vector> v;
    std::optional<Vector> q;
    std::optional<double> spectral_bound;
    std::vector<Condition> conditions;
    bool persistent = false;
    bool permanent = false;
    bool attractor = false;

    std::vector<EquilibriumReport> equilibria;
    std::optional<BoundsPair> bounds;
    std::optional<StagePayload> stage;
    std::vector<std::string> notes;

    /// Equilibrium used for attractivity claims, if any.
    std::optional<Vector> attractor_point() const;
};

struct LvCertificateOptions {
    /// Extra Newton start; the componentwise 0.1, 1, 10 starts are always tried.
    std::optional<Vector> guess;
};

Certificate lv_certificate(const CooperativeLVSpec& spec, const LvCertificateOptions& opts = {});
Certificate nonaut_certificate(const NonautLVSpec& spec);
Certificate logistic_certificate(const LogisticNetSpec& spec);
Certificate stage_certificate(const StageStructuredSpec& spec);
Certificate certify(const ModelSpec& model);

struct BoundsSampling {
    double horizon = 0.0;      // 0 disables the sampled estimate
    std::size_t samples = 0;
};

/// M0 and m0 for the logistic network with scaling vector v. Interval
/// arithmetic over coefficient bounds: never below the true M0, never above
/// the true m0; exact for constant coefficients.
BoundsPair logistic_bounds(const LogisticNetSpec& spec, const Vector& v, const BoundsSampling& sampling = {});

/// x_i -> x_i / v_i: beta_ik -> v_i beta_ik, d_ij -> v_j d_ij / v_i, kappa_i -> v_i kappa_i.
LogisticNetSpec scale_logistic(const LogisticNetSpec& spec, const Vector& v);

nlohmann::ordered_json certificate_to_json(const Certificate& cert);
nlohmann::ordered_json matrix_to_json(const Matrix& m);

}  // namespace delaycert
