#pragma once

// Infinite-delay histories on (-inf, t], the exponential weight g of the
// fading memory space, and delay kernels integrated against histories.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "delaycert/linalg.hpp"

namespace delaycert {

/// g(s) = exp(-rate * s) for s <= 0. g(0) = 1 and g grows into the past.
class WeightFunction {
public:
    explicit WeightFunction(double rate = 0.1);

    double rate() const noexcept { return rate_; }
    double operator()(double s) const;

private:
    double rate_;
};

/// A nonnegative measure on [0, inf): point masses plus damped densities.
struct DelayKernel {
    struct Atom {
        double weight = 0.0;
        double delay = 0.0;
    };
    /// coef * rate * exp(-rate s) * exp(-damping s) ds
    struct ExpDensity {
        double coef = 0.0;
        double rate = 1.0;
        double damping = 0.0;
    };
    /// coef / (to - from) * exp(-damping s) ds on [from, to]
    struct UniformDensity {
        double coef = 0.0;
        double from = 0.0;
        double to = 1.0;
        double damping = 0.0;
    };

    std::vector<Atom> atoms;
    std::vector<ExpDensity> exp_densities;
    std::vector<UniformDensity> uniform_densities;
    bool normalized = false;

    static DelayKernel atom(double delay, double weight = 1.0);
    static DelayKernel exponential(double rate, double damping = 0.0, double coef = 1.0);
    static DelayKernel uniform(double from, double to, double damping = 0.0, double coef = 1.0);

    /// Total mass with every damping factor dropped.
    double undamped_mass() const;
    bool empty() const noexcept {
        return atoms.empty() && exp_densities.empty() && uniform_densities.empty();
    }
    /// Throws ContractError on negative weights, bad supports, or a normalized
    /// kernel whose undamped mass differs from 1 by more than 1e-12.
    void validate() const;
};

/// Closed-form positive bounded initial histories phi(s), s <= 0.
struct InitialFunction {
    enum class Family { Constant, Sine, ExpApproach };

    Family family = Family::Constant;
    /// Constant: the value. Sine: the offset. ExpApproach: phi(0).
    Vector c0;
    /// Sine: the amplitude. Unused otherwise.
    Vector c1;
    /// ExpApproach: the value approached as s -> -inf.
    Vector c_inf;
    /// Sine: angular frequency. ExpApproach: approach rate (> 0).
    double rate = 0.0;

    static InitialFunction constant(Vector c);
    static InitialFunction sine(Vector offset, Vector amplitude, double omega);
    static InitialFunction exp_approach(Vector c_inf, Vector c0, double rate);

    std::size_t dim() const noexcept { return c0.size(); }
    double value(std::size_t i, double s) const;
    Vector eval(double s) const;
    /// Componentwise upper bound of |phi| over (-inf, 0].
    double sup_bound() const;
    /// Strictly positive on (-inf, 0] with a finite sup, i.e. a member of BC0.
    bool in_bc0() const;
    /// Nonnegative and bounded (BC+); shape checks included.
    void validate() const;

    /// Integral over s in [s0, s1] of exp(-decay s) * phi_i(u - s). Requires
    /// u - s0 <= 0. s1 may be +inf when decay > 0.
    double damped_integral(std::size_t i, double u, double decay, double s0, double s1) const;
};

/// Past of a trajectory: a closed-form initial function on (-inf, 0] followed
/// by contiguous cubic Hermite segments covering [0, t_now].
class HistoryBuffer {
public:
    explicit HistoryBuffer(InitialFunction init, double step_hint = 0.0);

    std::size_t dim() const noexcept { return n_; }
    double t_now() const noexcept { return t_now_; }
    std::size_t segment_count() const noexcept { return t_start_.size(); }
    const InitialFunction& initial() const noexcept { return init_; }
    /// Quadrature spacing for distributed terms: the step of the first
    /// segment, or the hint given at construction.
    double nominal_step() const noexcept { return step_; }
    /// Running bound on |x| over everything stored so far.
    double sup_bound() const noexcept { return sup_; }

    /// x_i(tq). Throws OutOfRangeError for tq beyond t_now, unless a
    /// provisional extension covers it.
    double value(std::size_t i, double tq) const;
    Vector eval(double tq) const;

    /// Appends the cubic with endpoint values x0, x1 and derivatives d0, d1
    /// on [t0, t1]. Requires t0 == t_now and x0 matching the current end.
    void append_segment(double t0, double t1, std::span<const double> x0, std::span<const double> d0,
                        std::span<const double> x1, std::span<const double> d1);

    /// Lets queries in (t_now, until] be answered by continuing the last
    /// segment's cubic, or by x(0) + slope * t when no segment exists yet.
    void set_provisional(double until, std::span<const double> startup_slope);
    void clear_provisional() noexcept { provisional_until_ = t_now_; }

    /// Value at the junction end of the stored part.
    Vector end_state() const;

private:
    double segment_value(std::size_t k, std::size_t i, double tq) const;
    std::size_t locate(double tq) const;

    InitialFunction init_;
    std::size_t n_;
    double step_;
    bool uniform_ = true;
    double t_now_ = 0.0;
    double sup_ = 0.0;
    std::vector<double> t_start_;
    std::vector<double> t_end_;
    std::vector<double> coeffs_;  // per segment, per component: x0, d0, x1, d1
    double provisional_until_ = 0.0;
    Vector startup_slope_;
};

/// Read access to a history while a step is in progress: queries at the
/// evaluation time itself return the stage state instead of the buffer.
struct HistoryView {
    const HistoryBuffer& buffer;
    double head_time;
    std::span<const double> head;

    double value(std::size_t i, double tq) const {
        if (!head.empty() && tq >= head_time) return head[i];
        return buffer.value(i, tq);
    }
};

/// sup over u <= t of |x(u)|_inf / g(u - t), sampled every `sample_step`.
double weighted_norm(const HistoryBuffer& buffer, double t, const WeightFunction& g, double sample_step);

/// Integral of exp(-extra_damping s) dk(s) over [0, inf), closed form.
double kernel_weighted_mass(const DelayKernel& k, double extra_damping = 0.0);

/// Integral of x_i(t - s) exp(-extra_damping s) dk(s) over [0, inf).
/// Densities use composite Simpson with spacing <= the buffer's step on the
/// computed part and closed forms over the initial function; the truncation
/// point keeps the neglected mass times sup|x| below tail_tol.
double kernel_convolve(const DelayKernel& k, const HistoryView& view, double t, std::size_t i, double tail_tol,
                       double extra_damping = 0.0);
double kernel_convolve(const DelayKernel& k, const HistoryBuffer& buffer, double t, std::size_t i, double tail_tol,
                       double extra_damping = 0.0);

}  // namespace delaycert
