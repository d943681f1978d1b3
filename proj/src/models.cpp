#include "delaycert/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "delaycert/errors.hpp"

namespace delaycert {

// ---------------------------------------------------------------- coefficients

TimeCoefficient TimeCoefficient::constant(double c) {
    TimeCoefficient k;
    k.c0 = c;
    return k;
}

TimeCoefficient TimeCoefficient::sinusoid(double c0, double c1, double omega, double phase) {
    TimeCoefficient k;
    k.kind = Kind::Sinusoid;
    k.c0 = c0;
    k.c1 = c1;
    k.omega = omega;
    k.phase = phase;
    k.validate();
    return k;
}

TimeCoefficient TimeCoefficient::positive_sinusoid(double c0, double c1, double omega, double phase, double floor) {
    TimeCoefficient k = sinusoid(c0, c1, omega, phase);
    k.kind = Kind::PositiveSinusoid;
    k.floor = floor;
    k.validate();
    return k;
}

double TimeCoefficient::value(double t) const {
    if (kind == Kind::Constant) return c0;
    return c0 + c1 * std::sin(omega * t + phase);
}

void TimeCoefficient::validate() const {
    if (!std::isfinite(c0) || !std::isfinite(c1) || !std::isfinite(omega) || !std::isfinite(phase))
        throw ContractError("time coefficient has non-finite parameters");
    if (kind == Kind::Constant) return;
    if (!(c1 >= 0.0) || !(c0 >= c1)) throw ContractError("sinusoid coefficient needs c0 >= c1 >= 0");
    if (kind == Kind::PositiveSinusoid && (!(floor > 0.0) || c0 - c1 < floor))
        throw ContractError("positive sinusoid needs c0 - c1 >= floor > 0");
}

std::pair<double, double> coefficient_bounds(const TimeCoefficient& c) {
    if (c.kind == TimeCoefficient::Kind::Constant) return {c.c0, c.c0};
    if (c.omega == 0.0) {
        const double v = c.c0 + c.c1 * std::sin(c.phase);
        return {v, v};
    }
    return {c.c0 - std::abs(c.c1), c.c0 + std::abs(c.c1)};
}

// ---------------------------------------------------------------- delays

DelayFunction DelayFunction::constant(double tau) {
    DelayFunction d;
    d.tau0 = tau;
    d.validate();
    return d;
}

DelayFunction DelayFunction::sinusoid(double tau0, double tau1, double omega) {
    DelayFunction d;
    d.kind = Kind::Sinusoid;
    d.tau0 = tau0;
    d.tau1 = tau1;
    d.omega = omega;
    d.validate();
    return d;
}

DelayFunction DelayFunction::proportional(double rho) {
    DelayFunction d;
    d.kind = Kind::Proportional;
    d.rho = rho;
    d.validate();
    return d;
}

double DelayFunction::value(double t) const {
    switch (kind) {
        case Kind::Constant:
            return tau0;
        case Kind::Sinusoid:
            return tau0 + tau1 * std::sin(omega * t);
        case Kind::Proportional:
            return rho * t;
    }
    return 0.0;
}

bool DelayFunction::escaping() const noexcept {
    switch (kind) {
        case Kind::Constant:
        case Kind::Sinusoid:
            return true;  // bounded delays
        case Kind::Proportional:
            return rho < 1.0;
    }
    return false;
}

void DelayFunction::validate() const {
    switch (kind) {
        case Kind::Constant:
            if (!(tau0 >= 0.0) || !std::isfinite(tau0)) throw ContractError("delay must be finite and >= 0");
            break;
        case Kind::Sinusoid:
            if (!(tau1 >= 0.0) || !(tau0 >= tau1) || !std::isfinite(tau0) || !std::isfinite(omega))
                throw ContractError("sinusoidal delay needs tau0 >= tau1 >= 0");
            break;
        case Kind::Proportional:
            if (!(rho >= 0.0) || !(rho < 1.0)) throw ContractError("proportional delay needs rho in [0, 1)");
            break;
    }
}

// ---------------------------------------------------------------- specs

namespace {

void check_square(const Matrix& m, std::size_t n, const char* name) {
    if (m.rows() != n || m.cols() != n) throw ContractError(std::string(name) + " must be n x n");
}

void check_kernels(const std::vector<DelayKernel>& ks, std::size_t n, const char* name) {
    if (ks.size() != n * n) throw ContractError(std::string(name) + " must hold n*n kernels");
    for (const auto& k : ks) {
        k.validate();
        if (!k.normalized) throw ContractError(std::string(name) + " kernels must be normalized");
    }
}

}  // namespace

void CooperativeLVSpec::validate() const {
    if (n == 0) throw ContractError("LV spec has dimension 0");
    if (beta.size() != n || mu.size() != n) throw ContractError("beta/mu must have n entries");
    check_square(a, n, "a");
    check_square(d, n, "d");
    for (double x : a.data())
        if (!(x >= 0.0)) throw ContractError("cooperative LV needs a_ij >= 0");
    for (double x : d.data())
        if (!(x >= 0.0)) throw ContractError("cooperative LV needs d_ij >= 0");
    check_kernels(eta, n, "eta");
    check_kernels(nu, n, "nu");
}

NonautLVSpec NonautLVSpec::from_autonomous(const CooperativeLVSpec& s) {
    NonautLVSpec r;
    r.n = s.n;
    for (double b : s.beta) r.beta.push_back(TimeCoefficient::constant(b));
    for (double m : s.mu) r.mu.push_back(TimeCoefficient::constant(m));
    for (double x : s.a.data()) r.a.push_back(TimeCoefficient::constant(x));
    for (double x : s.d.data()) r.d.push_back(TimeCoefficient::constant(x));
    r.eta = s.eta;
    r.nu = s.nu;
    return r;
}

void NonautLVSpec::validate() const {
    if (n == 0) throw ContractError("LV spec has dimension 0");
    if (beta.size() != n || mu.size() != n) throw ContractError("beta/mu must have n entries");
    if (a.size() != n * n || d.size() != n * n) throw ContractError("a/d must have n*n entries");
    for (const auto& c : beta) c.validate();
    for (const auto& c : mu) c.validate();
    for (const auto* group : {&a, &d})
        for (const auto& c : *group) {
            c.validate();
            if (coefficient_bounds(c).first < 0.0) throw ContractError("a_ij(t), d_ij(t) must stay nonnegative");
        }
    check_kernels(eta, n, "eta");
    check_kernels(nu, n, "nu");
}

double LogisticNetSpec::total_birth_inf(std::size_t i) const {
    double s = 0.0;
    for (const auto& term : classes[i].terms) s += coefficient_bounds(term.alpha).first;
    return s;
}

double LogisticNetSpec::total_birth_sup(std::size_t i) const {
    double s = 0.0;
    for (const auto& term : classes[i].terms) s += coefficient_bounds(term.alpha).second;
    return s;
}

void LogisticNetSpec::validate() const {
    if (n == 0 || classes.size() != n) throw ContractError("logistic network needs n classes");
    if (d.size() != n * n || sigma.size() != n * n) throw ContractError("d/sigma must have n*n entries");
    const auto nonneg = [](const TimeCoefficient& c, const char* what) {
        c.validate();
        if (coefficient_bounds(c).first < 0.0) throw ContractError(std::string(what) + " must stay nonnegative");
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cl = classes[i];
        if (cl.terms.empty()) throw ContractError("each class needs at least one birth term");
        for (const auto& term : cl.terms) {
            nonneg(term.alpha, "alpha");
            nonneg(term.beta, "beta");
            term.tau.validate();
        }
        nonneg(cl.mu, "mu");
        nonneg(cl.kappa, "kappa");
        if (!(coefficient_bounds(cl.kappa).first > 0.0)) throw ContractError("kappa must be bounded below by a positive constant");
        if (!(total_birth_inf(i) > 0.0)) throw ContractError("total birth rate must be bounded below by a positive constant");
        for (std::size_t j = 0; j < n; ++j) {
            nonneg(d_at(i, j), "d");
            sigma_at(i, j).validate();
        }
        const auto [dlo, dhi] = coefficient_bounds(d_at(i, i));
        if (dlo != 0.0 || dhi != 0.0) throw ContractError("self-dispersal d_ii must be zero");
    }
}

void StageStructuredSpec::validate() const {
    for (std::size_t j = 0; j < 2; ++j) {
        if (!(alpha[j] > 0.0) || !(beta[j] > 0.0) || !(gamma[j] > 0.0) || !(c[j] >= 0.0))
            throw ContractError("stage model needs alpha, beta, gamma > 0 and c >= 0");
        f[j].validate();
        if (!f[j].normalized) throw ContractError("maturation kernels must be normalized");
        if (!f[j].atoms.empty()) throw ContractError("maturation kernels must be densities");
    }
}

std::size_t model_dim(const ModelSpec& m) {
    return std::visit(
        [](const auto& s) -> std::size_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, StageStructuredSpec>) {
                return 2;
            } else {
                return s.n;
            }
        },
        m);
}

const char* model_name(const ModelSpec& m) {
    switch (m.index()) {
        case 0: return "cooperative_lv";
        case 1: return "nonautonomous_lv";
        case 2: return "logistic_network";
        case 3: return "stage_structured";
    }
    return "unknown";
}

void validate_model(const ModelSpec& m) {
    std::visit([](const auto& s) { s.validate(); }, m);
}

double min_damping(const ModelSpec& m) {
    if (const auto* s = std::get_if<StageStructuredSpec>(&m)) return std::min(s->gamma[0], s->gamma[1]);
    return std::numeric_limits<double>::infinity();
}

bool is_cooperative(const ModelSpec& m) {
    if (const auto* s = std::get_if<StageStructuredSpec>(&m)) return s->c[0] == 0.0 && s->c[1] == 0.0;
    return true;
}

// ---------------------------------------------------------------- right-hand sides

namespace {

RhsParts lv_parts(std::size_t n, double t, std::span<const double> x, const HistoryView& view, double tol,
                  const std::vector<DelayKernel>& eta, const std::vector<DelayKernel>& nu, auto&& beta, auto&& mu,
                  auto&& a, auto&& d) {
    RhsParts p{Vector(n, 0.0), Vector(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        double f = beta(i) * x[i];
        double g = mu(i) * x[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double dij = d(i, j);
            if (dij != 0.0) f += dij * kernel_convolve(nu[i * n + j], view, t, j, tol);
            const double aij = a(i, j);
            if (aij != 0.0) g -= aij * kernel_convolve(eta[i * n + j], view, t, j, tol);
        }
        p.F[i] = f;
        p.G[i] = g;
    }
    return p;
}

}  // namespace

RhsParts decompose(const ModelSpec& m, double t, std::span<const double> x, const HistoryBuffer& buffer,
                   double tail_tol) {
    const std::size_t n = model_dim(m);
    if (x.size() != n || buffer.dim() != n) throw ContractError("model and history dimensions differ");
    const HistoryView view{buffer, t, x};

    if (const auto* s = std::get_if<CooperativeLVSpec>(&m)) {
        return lv_parts(
            n, t, x, view, tail_tol, s->eta, s->nu, [&](std::size_t i) { return s->beta[i]; },
            [&](std::size_t i) { return s->mu[i]; }, [&](std::size_t i, std::size_t j) { return s->a(i, j); },
            [&](std::size_t i, std::size_t j) { return s->d(i, j); });
    }
    if (const auto* s = std::get_if<NonautLVSpec>(&m)) {
        return lv_parts(
            n, t, x, view, tail_tol, s->eta, s->nu, [&](std::size_t i) { return s->beta[i].value(t); },
            [&](std::size_t i) { return s->mu[i].value(t); },
            [&](std::size_t i, std::size_t j) { return s->a[i * n + j].value(t); },
            [&](std::size_t i, std::size_t j) { return s->d[i * n + j].value(t); });
    }
    if (const auto* s = std::get_if<LogisticNetSpec>(&m)) {
        RhsParts p{Vector(n, 0.0), Vector(n, 0.0)};
        for (std::size_t i = 0; i < n; ++i) {
            const auto& cl = s->classes[i];
            double f = 0.0;
            for (const auto& term : cl.terms) {
                const double xd = view.value(i, t - term.tau.value(t));
                f += term.alpha.value(t) * xd / (1.0 + term.beta.value(t) * xd);
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double dij = s->d_at(i, j).value(t);
                if (dij != 0.0) f += dij * view.value(j, t - s->sigma_at(i, j).value(t));
            }
            p.F[i] = f;
            p.G[i] = cl.mu.value(t) + cl.kappa.value(t) * x[i];
        }
        return p;
    }
    const auto& s = std::get<StageStructuredSpec>(m);
    RhsParts p{Vector(2, 0.0), Vector(2, 0.0)};
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t other = 1 - i;
        p.F[i] = s.alpha[i] * kernel_convolve(s.f[i], view, t, i, tail_tol, s.gamma[i]);
        p.G[i] = s.beta[i] * x[i] + s.c[i] * x[other];
    }
    return p;
}

Vector rhs(const ModelSpec& m, double t, std::span<const double> x, const HistoryBuffer& buffer, double tail_tol) {
    RhsParts p = decompose(m, t, x, buffer, tail_tol);
    for (std::size_t i = 0; i < p.F.size(); ++i) p.F[i] -= x[i] * p.G[i];
    return std::move(p.F);
}

Vector rhs(const ModelSpec& m, double t, const HistoryBuffer& buffer, double tail_tol) {
    const Vector x = buffer.eval(t);
    return rhs(m, t, x, buffer, tail_tol);
}

// ---------------------------------------------------------------- quasimonotone probe

namespace {

InitialFunction random_history(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> level(0.2, 2.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> family(0, 2);
    Vector c0(n), c1(n), cinf(n);
    switch (family(rng)) {
        case 0:
            for (auto& v : c0) v = level(rng);
            return InitialFunction::constant(c0);
        case 1:
            for (std::size_t i = 0; i < n; ++i) {
                c0[i] = level(rng);
                c1[i] = 0.9 * c0[i] * unit(rng);
            }
            return InitialFunction::sine(c0, c1, 0.2 + 2.8 * unit(rng));
        default:
            for (std::size_t i = 0; i < n; ++i) {
                c0[i] = level(rng);
                cinf[i] = level(rng);
            }
            return InitialFunction::exp_approach(cinf, c0, 0.1 + 1.9 * unit(rng));
    }
}

// psi >= phi with psi_i(0) = phi_i(0).
InitialFunction raise_except(const InitialFunction& phi, std::size_t fixed, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> bump(0.0, 1.0);
    InitialFunction psi = phi;
    for (std::size_t j = 0; j < phi.dim(); ++j) {
        const double b = bump(rng) < 0.2 ? 0.0 : bump(rng);
        if (j == fixed) {
            // c_inf + (c0 - c_inf) e^{rho s} rises by b (1 - e^{rho s}) >= 0, unchanged at s = 0
            if (phi.family == InitialFunction::Family::ExpApproach) psi.c_inf[j] += b;
            continue;
        }
        psi.c0[j] += b;
        if (phi.family == InitialFunction::Family::ExpApproach) psi.c_inf[j] += b;
    }
    return psi;
}

double component_rhs(const ModelSpec& m, const InitialFunction& phi, std::size_t i, double tail_tol) {
    const HistoryBuffer buf(phi);
    const Vector x0 = phi.eval(0.0);
    return rhs(m, 0.0, x0, buf, tail_tol)[i];
}

}  // namespace

ProbeReport quasimonotone_probe(const ModelSpec& m, const ProbeOptions& opts) {
    if (opts.n_pairs < 1) throw ContractError("probe needs at least one pair");
    const std::size_t n = model_dim(m);
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    ProbeReport report;
    for (std::size_t k = 0; k < opts.n_pairs; ++k) {
        const InitialFunction phi = random_history(n, rng);
        const std::size_t i = pick(rng);
        const InitialFunction psi = opts.identical_pairs ? phi : raise_except(phi, i, rng);
        const double f_lo = component_rhs(m, phi, i, opts.tail_tol);
        const double f_hi = component_rhs(m, psi, i, opts.tail_tol);
        ++report.pairs_checked;
        if (f_lo > f_hi + opts.tolerance) {
            report.passed = false;
            report.witness = ProbeReport::Witness{phi, psi, i, f_lo, f_hi};
            break;
        }
    }
    return report;
}

}  // namespace delaycert
