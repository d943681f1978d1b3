#include "delaycert/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "delaycert/errors.hpp"

namespace delaycert {

void IntegratorConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ContractError("integrator step must be positive");
    if (!(horizon >= step)) throw ContractError("integrator horizon must be at least one step");
    if (!(tail_tol > 0.0)) throw ContractError("tail_tol must be positive");
    if (!(positivity_floor >= 0.0)) throw ContractError("positivity_floor must be nonnegative");
    if (output_stride == 0) throw ContractError("output_stride must be positive");
}

namespace {

void axpy(Vector& out, std::span<const double> x, double a, std::span<const double> k) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + a * k[i];
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Trajectory integrate(const ModelSpec& model, const InitialFunction& phi, const IntegratorConfig& cfg) {
    cfg.validate();
    const std::size_t n = model_dim(model);
    if (phi.dim() != n) throw ContractError("initial function dimension does not match the model");
    if (!phi.in_bc0()) throw ContractError("initial function must be strictly positive and bounded");

    const auto wall0 = std::chrono::steady_clock::now();
    const double h = cfg.step;
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.horizon / h - 1e-9));

    Trajectory tr{HistoryBuffer(phi, h), {}, {}, {}};
    HistoryBuffer& buf = tr.history;
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);

    Vector x = phi.eval(0.0);
    Vector f = rhs(model, 0.0, x, buf, cfg.tail_tol);
    tr.times.push_back(0.0);
    tr.states.push_back(x);
    auto& diag = tr.diagnostics;
    diag.min_value = min_entry(x);

    Vector k2, k3, k4, stage(n), xn(n);
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = h * static_cast<double>(s);
        const double t1 = h * static_cast<double>(s + 1);
        // delayed arguments inside the current step continue the previous cubic
        buf.set_provisional(t1, f);

        Vector fn;
        try {
            axpy(stage, x, 0.5 * h, f);
            k2 = rhs(model, t + 0.5 * h, stage, buf, cfg.tail_tol);
            axpy(stage, x, 0.5 * h, k2);
            k3 = rhs(model, t + 0.5 * h, stage, buf, cfg.tail_tol);
            axpy(stage, x, h, k3);
            k4 = rhs(model, t1, stage, buf, cfg.tail_tol);
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + h / 6.0 * (f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!all_finite(xn)) throw BlowUpError(t1, "state became non-finite at t=" + std::to_string(t1));
            fn = rhs(model, t1, xn, buf, cfg.tail_tol);
        } catch (const NumericDomainError& e) {
            // a non-finite delayed value means the solution has already escaped
            throw BlowUpError(t1, std::string(e.what()) + " at t=" + std::to_string(t1));
        }
        if (!all_finite(fn)) throw BlowUpError(t1, "derivative became non-finite at t=" + std::to_string(t1));

        const Vector end = buf.end_state();
        for (std::size_t i = 0; i < n; ++i)
            diag.max_junction_residual = std::max(diag.max_junction_residual, std::abs(end[i] - x[i]));
        buf.append_segment(t, t1, x, f, xn, fn);

        const double lo = min_entry(xn);
        if (lo < diag.min_value) {
            diag.min_value = lo;
            diag.min_value_time = t1;
        }
        if (lo < -cfg.positivity_floor) {
            if (diag.positivity_violations == 0) diag.first_violation_time = t1;
            ++diag.positivity_violations;
        }
        x.swap(xn);
        f.swap(fn);
        tr.times.push_back(t1);
        tr.states.push_back(x);
    }
    diag.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return tr;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride) {
    if (stride == 0) throw ContractError("stride must be positive");
    os << 't';
    for (std::size_t i = 0; i < traj.dim(); ++i) os << ",x" << (i + 1);
    os << '\n';
    const std::size_t count = traj.times.size();
    for (std::size_t k = 0; k < count; ++k) {
        if (k % stride != 0 && k + 1 != count) continue;
        os << format_double(traj.times[k]);
        for (double v : traj.states[k]) os << ',' << format_double(v);
        os << '\n';
    }
}

}  // namespace delaycert
