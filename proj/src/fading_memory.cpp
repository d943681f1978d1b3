#include "delaycert/fading_memory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "delaycert/errors.hpp"

namespace delaycert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(pre - a*s0) * integral of exp(-a (s - s0)) over [s0, s1].
double shifted_exp_integral(double a, double s0, double s1, double pre) {
    const double lead = std::exp(pre - a * s0);
    if (std::isinf(s1)) {
        if (!(a > 0.0)) throw NumericDomainError("divergent tail integral: no damping");
        return lead / a;
    }
    const double len = s1 - s0;
    if (a == 0.0) return lead * len;
    return lead * (-std::expm1(-a * len)) / a;
}

// Panel weights for the integral over [0, 2] of exp(-theta u) p(u), p the
// quadratic through u = 0, 1, 2. theta = 0 gives the Simpson weights.
std::array<double, 3> fitted_weights(double theta) {
    double m[3];
    if (std::abs(theta) <= 1.0) {
        for (int k = 0; k < 3; ++k) {
            double term = 1.0, sum = 0.0, pow2 = std::ldexp(1.0, k + 1);
            for (int j = 0; j < 40; ++j) {
                sum += term * pow2 / (k + j + 1);
                term *= -theta / (j + 1);
                pow2 *= 2.0;
            }
            m[k] = sum;
        }
    } else {
        const double e2 = std::exp(-2.0 * theta);
        m[0] = -std::expm1(-2.0 * theta) / theta;
        m[1] = (m[0] - 2.0 * e2) / theta;
        m[2] = (2.0 * m[1] - 4.0 * e2) / theta;
    }
    return {0.5 * (m[2] - 3.0 * m[1] + 2.0 * m[0]), 2.0 * m[1] - m[2], 0.5 * (m[2] - m[1])};
}

// Simpson for the integral of exp(-decay s) f(s) with the exponential taken
// exactly on each panel, so only f is interpolated.
template <class F>
double simpson_damped(double lo, double hi, double spacing, double decay, F&& f) {
    if (!(hi > lo)) return 0.0;
    auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / spacing - 1e-9));
    intervals = std::max<std::size_t>(intervals, 2);
    if (intervals % 2) ++intervals;
    const double dx = (hi - lo) / static_cast<double>(intervals);
    const auto wt = fitted_weights(decay * dx);
    const double ratio = std::exp(-2.0 * decay * dx);
    double w = std::exp(-decay * lo);
    double sum = 0.0;
    double left = f(lo);
    for (std::size_t k = 0; k < intervals; k += 2) {
        const double x0 = lo + dx * static_cast<double>(k);
        const double right = k + 2 == intervals ? f(hi) : f(x0 + 2.0 * dx);
        sum += w * (wt[0] * left + wt[1] * f(x0 + dx) + wt[2] * right);
        left = right;
        w *= ratio;
    }
    return sum * dx;
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw NumericDomainError(std::string("non-finite value in ") + what);
}

}  // namespace

// ---------------------------------------------------------------- weight

WeightFunction::WeightFunction(double rate) : rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ContractError("weight rate must be positive");
}

double WeightFunction::operator()(double s) const {
    if (s > 0.0) throw ContractError("weight function is defined on (-inf, 0]");
    return std::exp(-rate_ * s);
}

// ---------------------------------------------------------------- kernels

DelayKernel DelayKernel::atom(double delay, double weight) {
    DelayKernel k;
    k.atoms.push_back({weight, delay});
    k.normalized = (weight == 1.0);
    return k;
}

DelayKernel DelayKernel::exponential(double rate, double damping, double coef) {
    DelayKernel k;
    k.exp_densities.push_back({coef, rate, damping});
    k.normalized = (coef == 1.0);
    return k;
}

DelayKernel DelayKernel::uniform(double from, double to, double damping, double coef) {
    DelayKernel k;
    k.uniform_densities.push_back({coef, from, to, damping});
    k.normalized = (coef == 1.0);
    return k;
}

double DelayKernel::undamped_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.weight;
    for (const auto& e : exp_densities) m += e.coef;
    for (const auto& u : uniform_densities) m += u.coef;
    return m;
}

void DelayKernel::validate() const {
    for (const auto& a : atoms)
        if (!(a.weight >= 0.0) || !(a.delay >= 0.0) || !std::isfinite(a.delay))
            throw ContractError("kernel atom needs weight >= 0 and finite delay >= 0");
    for (const auto& e : exp_densities)
        if (!(e.coef >= 0.0) || !(e.rate > 0.0) || !(e.damping >= 0.0))
            throw ContractError("exponential density needs coef >= 0, rate > 0, damping >= 0");
    for (const auto& u : uniform_densities)
        if (!(u.coef >= 0.0) || !(u.from >= 0.0) || !(u.from < u.to) || !std::isfinite(u.to) || !(u.damping >= 0.0))
            throw ContractError("uniform density needs coef >= 0 and 0 <= from < to < inf");
    if (normalized && std::abs(undamped_mass() - 1.0) > 1e-12)
        throw ContractError("normalized kernel must have total variation one");
}

double kernel_weighted_mass(const DelayKernel& k, double extra_damping) {
    if (!(extra_damping >= 0.0)) throw ContractError("extra damping must be nonnegative");
    double m = 0.0;
    for (const auto& a : k.atoms) m += a.weight * std::exp(-extra_damping * a.delay);
    for (const auto& e : k.exp_densities) m += e.coef * e.rate / (e.rate + e.damping + extra_damping);
    for (const auto& u : k.uniform_densities) {
        const double g = u.damping + extra_damping;
        const double width = u.to - u.from;
        if (g == 0.0) {
            m += u.coef;
        } else {
            m += u.coef * std::exp(-g * u.from) * (-std::expm1(-g * width)) / (g * width);
        }
    }
    return m;
}

// ---------------------------------------------------------------- initial functions

InitialFunction InitialFunction::constant(Vector c) {
    InitialFunction f;
    f.family = Family::Constant;
    f.c0 = std::move(c);
    f.validate();
    return f;
}

InitialFunction InitialFunction::sine(Vector offset, Vector amplitude, double omega) {
    InitialFunction f;
    f.family = Family::Sine;
    f.c0 = std::move(offset);
    f.c1 = std::move(amplitude);
    f.rate = omega;
    f.validate();
    return f;
}

InitialFunction InitialFunction::exp_approach(Vector c_inf, Vector c0, double rate) {
    InitialFunction f;
    f.family = Family::ExpApproach;
    f.c_inf = std::move(c_inf);
    f.c0 = std::move(c0);
    f.rate = rate;
    f.validate();
    return f;
}

void InitialFunction::validate() const {
    const std::size_t n = c0.size();
    if (n == 0) throw ContractError("initial function has dimension 0");
    switch (family) {
        case Family::Constant:
            for (double c : c0)
                if (!(c >= 0.0) || !std::isfinite(c)) throw ContractError("constant history must be finite and >= 0");
            break;
        case Family::Sine:
            if (c1.size() != n) throw ContractError("sine history: offset/amplitude size mismatch");
            if (!std::isfinite(rate)) throw ContractError("sine history: non-finite frequency");
            for (std::size_t i = 0; i < n; ++i)
                if (!(c1[i] >= 0.0) || !(c0[i] >= c1[i]) || !std::isfinite(c0[i]))
                    throw ContractError("sine history needs offset >= amplitude >= 0");
            break;
        case Family::ExpApproach:
            if (c_inf.size() != n) throw ContractError("exp-approach history: size mismatch");
            if (!(rate > 0.0) || !std::isfinite(rate)) throw ContractError("exp-approach history needs rate > 0");
            for (std::size_t i = 0; i < n; ++i)
                if (!(c0[i] >= 0.0) || !(c_inf[i] >= 0.0) || !std::isfinite(c0[i]) || !std::isfinite(c_inf[i]))
                    throw ContractError("exp-approach history needs finite nonnegative levels");
            break;
    }
}

bool InitialFunction::in_bc0() const {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i) {
        switch (family) {
            case Family::Constant:
                if (!(c0[i] > 0.0)) return false;
                break;
            case Family::Sine:
                if (!(c0[i] > c1[i])) return false;
                break;
            case Family::ExpApproach:
                // the value moves monotonically from c_inf (never attained) to c0
                if (!(c0[i] > 0.0)) return false;
                break;
        }
    }
    return std::isfinite(sup_bound());
}

double InitialFunction::value(std::size_t i, double s) const {
    switch (family) {
        case Family::Constant:
            return c0[i];
        case Family::Sine:
            return c0[i] + c1[i] * std::sin(rate * s);
        case Family::ExpApproach:
            return c_inf[i] + (c0[i] - c_inf[i]) * std::exp(rate * s);
    }
    return 0.0;
}

Vector InitialFunction::eval(double s) const {
    Vector v(dim());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(i, s);
    return v;
}

double InitialFunction::sup_bound() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        switch (family) {
            case Family::Constant:
                m = std::max(m, std::abs(c0[i]));
                break;
            case Family::Sine:
                m = std::max(m, std::abs(c0[i]) + std::abs(c1[i]));
                break;
            case Family::ExpApproach:
                m = std::max({m, std::abs(c0[i]), std::abs(c_inf[i])});
                break;
        }
    }
    return m;
}

double InitialFunction::damped_integral(std::size_t i, double u, double decay, double s0, double s1) const {
    if (!(s1 > s0)) return 0.0;
    if (u - s0 > 1e-12 * std::max(1.0, std::abs(u))) throw ContractError("damped_integral must stay in (-inf, 0]");
    switch (family) {
        case Family::Constant:
            return c0[i] * shifted_exp_integral(decay, s0, s1, 0.0);
        case Family::ExpApproach: {
            const double base = c_inf[i] * shifted_exp_integral(decay, s0, s1, 0.0);
            const double amp = c0[i] - c_inf[i];
            if (amp == 0.0) return base;
            return base + amp * shifted_exp_integral(decay + rate, s0, s1, rate * u);
        }
        case Family::Sine: {
            const double base = c0[i] * shifted_exp_integral(decay, s0, s1, 0.0);
            if (c1[i] == 0.0 || rate == 0.0) return base;
            const std::complex<double> z(decay, rate);
            const std::complex<double> phase = std::polar(1.0, rate * u);
            std::complex<double> diff = std::exp(-z * s0);
            if (!std::isinf(s1)) {
                diff -= std::exp(-z * s1);
            } else if (!(decay > 0.0)) {
                throw NumericDomainError("divergent oscillatory tail: no damping");
            }
            return base + c1[i] * (phase * diff / z).imag();
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------- history buffer

HistoryBuffer::HistoryBuffer(InitialFunction init, double step_hint)
    : init_(std::move(init)), n_(init_.dim()), step_(step_hint) {
    init_.validate();
    sup_ = init_.sup_bound();
}

std::size_t HistoryBuffer::locate(double tq) const {
    const std::size_t count = t_start_.size();
    if (uniform_ && step_ > 0.0) {
        auto k = static_cast<std::size_t>(std::max(0.0, std::floor(tq / step_)));
        k = std::min(k, count - 1);
        while (k > 0 && t_start_[k] > tq) --k;
        while (k + 1 < count && t_end_[k] < tq) ++k;
        return k;
    }
    auto it = std::upper_bound(t_start_.begin(), t_start_.end(), tq);
    return it == t_start_.begin() ? 0 : static_cast<std::size_t>(it - t_start_.begin()) - 1;
}

double HistoryBuffer::segment_value(std::size_t k, std::size_t i, double tq) const {
    const double t0 = t_start_[k];
    const double hs = t_end_[k] - t0;
    const double th = (tq - t0) / hs;
    const double* c = &coeffs_[(k * n_ + i) * 4];
    const double th2 = th * th;
    const double th3 = th2 * th;
    const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
    const double h10 = th3 - 2.0 * th2 + th;
    const double h01 = -2.0 * th3 + 3.0 * th2;
    const double h11 = th3 - th2;
    return h00 * c[0] + hs * h10 * c[1] + h01 * c[2] + hs * h11 * c[3];
}

double HistoryBuffer::value(std::size_t i, double tq) const {
    if (tq <= 0.0) return init_.value(i, tq);
    if (tq <= t_now_) return segment_value(locate(tq), i, tq);
    if (tq <= provisional_until_) {
        if (t_start_.empty()) return init_.value(i, 0.0) + startup_slope_[i] * tq;
        return segment_value(t_start_.size() - 1, i, tq);
    }
    throw OutOfRangeError("history queried at t=" + std::to_string(tq) + " beyond frontier " +
                          std::to_string(t_now_));
}

Vector HistoryBuffer::eval(double tq) const {
    Vector v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = value(i, tq);
    return v;
}

Vector HistoryBuffer::end_state() const {
    if (t_start_.empty()) return init_.eval(0.0);
    Vector v(n_);
    const std::size_t k = t_start_.size() - 1;
    for (std::size_t i = 0; i < n_; ++i) v[i] = coeffs_[(k * n_ + i) * 4 + 2];
    return v;
}

void HistoryBuffer::append_segment(double t0, double t1, std::span<const double> x0, std::span<const double> d0,
                                   std::span<const double> x1, std::span<const double> d1) {
    if (x0.size() != n_ || d0.size() != n_ || x1.size() != n_ || d1.size() != n_)
        throw ContractError("segment dimension mismatch");
    if (!(t1 > t0)) throw ContractError("segment must have positive length");
    if (std::abs(t0 - t_now_) > 1e-12 * std::max(1.0, std::abs(t_now_)))
        throw ContractError("segments must be contiguous");
    const Vector end = end_state();
    for (std::size_t i = 0; i < n_; ++i) {
        if (std::abs(x0[i] - end[i]) > 1e-12 * std::max(1.0, std::abs(end[i])))
            throw ContractError("segment is discontinuous at its junction");
        for (double v : {x0[i], d0[i], x1[i], d1[i]}) require_finite(v, "history segment");
    }
    const double len = t1 - t0;
    if (t_start_.empty()) {
        if (!(step_ > 0.0)) step_ = len;
        uniform_ = (std::abs(len - step_) <= 1e-12 * step_) && std::abs(t0) <= 1e-15;
    } else if (uniform_) {
        uniform_ = std::abs(len - step_) <= 1e-9 * step_;
    }
    t_start_.push_back(t_now_);
    t_end_.push_back(t1);
    for (std::size_t i = 0; i < n_; ++i) {
        coeffs_.push_back(x0[i]);
        coeffs_.push_back(d0[i]);
        coeffs_.push_back(x1[i]);
        coeffs_.push_back(d1[i]);
        sup_ = std::max(sup_, std::abs(x1[i]));
    }
    t_now_ = t1;
    provisional_until_ = t_now_;
}

void HistoryBuffer::set_provisional(double until, std::span<const double> startup_slope) {
    if (until < t_now_) throw ContractError("provisional horizon behind frontier");
    if (t_start_.empty()) {
        if (startup_slope.size() != n_) throw ContractError("startup slope dimension mismatch");
        startup_slope_.assign(startup_slope.begin(), startup_slope.end());
    }
    provisional_until_ = until;
}

// ---------------------------------------------------------------- operations

double weighted_norm(const HistoryBuffer& buffer, double t, const WeightFunction& g, double sample_step) {
    if (!(sample_step > 0.0)) throw ContractError("sample_step must be positive");
    const double bound = buffer.sup_bound();
    require_finite(bound, "weighted_norm bound");
    double best = 0.0;
    const std::size_t n = buffer.dim();
    constexpr std::size_t kMaxSamples = 50'000'000;
    for (std::size_t k = 0; k < kMaxSamples; ++k) {
        const double s = -sample_step * static_cast<double>(k);
        const double decay = 1.0 / g(s);
        // beyond this point |x|/g <= bound/g(s) cannot beat the current maximum
        if (k > 0 && bound * decay <= best) break;
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = buffer.value(i, t + s);
            require_finite(v, "weighted_norm");
            mag = std::max(mag, std::abs(v));
        }
        best = std::max(best, mag * decay);
        if (bound == 0.0) break;
    }
    return best;
}

double kernel_convolve(const DelayKernel& k, const HistoryView& view, double t, std::size_t i, double tail_tol,
                       double extra_damping) {
    if (!(tail_tol > 0.0)) throw ContractError("tail_tol must be positive");
    const HistoryBuffer& buf = view.buffer;
    const double bound = buf.sup_bound();
    if (!std::isfinite(bound)) throw NumericDomainError("unresolvable kernel tail: history bound is not finite");

    const double spacing = buf.nominal_step() > 0.0 ? buf.nominal_step() : 0.01;
    const std::size_t pieces = std::max<std::size_t>(1, k.exp_densities.size());
    const double tol_each = tail_tol / static_cast<double>(pieces);
    const InitialFunction& init = buf.initial();
    const double computed = std::max(t, 0.0);  // s in [0, computed] hits the solution part

    double total = 0.0;
    for (const auto& a : k.atoms) {
        if (a.weight == 0.0) continue;
        total += a.weight * std::exp(-extra_damping * a.delay) * view.value(i, t - a.delay);
    }

    for (const auto& e : k.exp_densities) {
        if (e.coef == 0.0) continue;
        const double decay = e.rate + e.damping + extra_damping;
        const double scale = e.coef * e.rate;
        double cutoff = 0.0;
        const double neglect_at_zero = scale * bound / decay;
        if (neglect_at_zero > tol_each) cutoff = std::log(neglect_at_zero / tol_each) / decay;

        const auto past = [&](double s) { return view.value(i, t - s); };
        if (computed <= cutoff) {
            total += scale * simpson_damped(0.0, computed, spacing, decay, past);
            total += scale * init.damped_integral(i, t, decay, computed, kInf);
        } else {
            total += scale * simpson_damped(0.0, cutoff, spacing, decay, past);
        }
    }

    for (const auto& u : k.uniform_densities) {
        if (u.coef == 0.0) continue;
        const double decay = u.damping + extra_damping;
        const double dens = u.coef / (u.to - u.from);
        const auto past = [&](double s) { return view.value(i, t - s); };
        const double hi = std::min(u.to, computed);
        if (hi > u.from) total += dens * simpson_damped(u.from, hi, spacing, decay, past);
        const double lo = std::max(u.from, computed);
        if (u.to > lo) total += dens * init.damped_integral(i, t, decay, lo, u.to);
    }
    require_finite(total, "kernel_convolve");
    return total;
}

double kernel_convolve(const DelayKernel& k, const HistoryBuffer& buffer, double t, std::size_t i, double tail_tol,
                       double extra_damping) {
    if (t > buffer.t_now() + 1e-12 * std::max(1.0, std::abs(t)))
        throw OutOfRangeError("kernel_convolve beyond history frontier");
    return kernel_convolve(k, HistoryView{buffer, t, {}}, t, i, tail_tol, extra_damping);
}

}  // namespace delaycert
