#include "delaycert/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "delaycert/errors.hpp"

namespace delaycert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TailStats tail_stats(const Trajectory& traj, double w) {
    if (!(w > 0.0 && w < 1.0)) throw ConfigError("tail window fraction must lie in (0, 1)");
    const double t_end = traj.horizon();
    if (!(t_end > 0.0)) throw ConfigError("trajectory has no positive horizon");
    const double t0 = (1.0 - w) * t_end;
    const double mid = t0 + 0.5 * (t_end - t0);
    const std::size_t n = traj.dim();

    TailStats s;
    s.window_start = t0;
    s.window_end = t_end;
    s.tail_min.assign(n, kInf);
    s.tail_max.assign(n, -kInf);
    Vector lo1(n, kInf), hi1(n, -kInf), lo2(n, kInf), hi2(n, -kInf);
    std::size_t first = 0, second = 0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        if (t < t0 - 1e-12) continue;
        const Vector& x = traj.states[k];
        const bool early = t < mid;
        (early ? first : second) += 1;
        for (std::size_t i = 0; i < n; ++i) {
            s.tail_min[i] = std::min(s.tail_min[i], x[i]);
            s.tail_max[i] = std::max(s.tail_max[i], x[i]);
            auto& lo = early ? lo1 : lo2;
            auto& hi = early ? hi1 : hi2;
            lo[i] = std::min(lo[i], x[i]);
            hi[i] = std::max(hi[i], x[i]);
        }
        ++s.samples;
    }
    if (first == 0 || second == 0) throw ConfigError("tail window contains too few samples");
    for (std::size_t i = 0; i < n; ++i)
        s.window_drift = std::max({s.window_drift, std::abs(lo2[i] - lo1[i]), std::abs(hi2[i] - hi1[i])});
    return s;
}

const char* verdict_name(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Pass: return "pass";
        case VerdictStatus::Fail: return "fail";
        case VerdictStatus::Inconclusive: return "inconclusive";
    }
    return "fail";
}

namespace {

struct Emitter {
    const TailStats& stats;
    std::size_t trajectory;
    const VerifyOptions& opts;
    std::vector<Verdict>& out;

    void emit(Verdict v, bool pass) {
        v.trajectory = trajectory;
        if (stats.window_drift > opts.drift_tol)
            v.status = VerdictStatus::Inconclusive;
        else
            v.status = pass ? VerdictStatus::Pass : VerdictStatus::Fail;
        out.push_back(std::move(v));
    }
};

bool finite_all(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<Verdict> verify(const Certificate& cert, const std::vector<TailStats>& stats, const VerifyOptions& opts,
                            const VerifyContext& ctx) {
    std::vector<Verdict> out;
    if (!cert.persistent) return out;
    const auto point = cert.attractor_point();

    for (std::size_t k = 0; k < stats.size(); ++k) {
        const TailStats& st = stats[k];
        const std::size_t n = st.tail_min.size();
        if (st.tail_max.size() != n) throw ConfigError("tail statistics are inconsistent");
        if (cert.v && cert.v->size() != n) throw ConfigError("certificate and trajectory dimensions differ");
        if (point && point->size() != n) throw ConfigError("certificate and trajectory dimensions differ");
        Emitter e{st, k, opts, out};

        for (std::size_t i = 0; i < n; ++i) {
            Verdict v{"persistence", k, i, std::nullopt, 0.0, st.tail_min[i], st.tail_min[i]};
            e.emit(v, st.tail_min[i] > 0.0 && std::isfinite(st.tail_min[i]));
        }

        if (cert.permanent) {
            if (cert.bounds) {
                const BoundsPair& b = *cert.bounds;
                for (std::size_t i = 0; i < n; ++i) {
                    const double lo = st.tail_min[i] / b.scaling[i];
                    const double hi = st.tail_max[i] / b.scaling[i];
                    e.emit({"permanence_lower", k, i, std::nullopt, b.lower, lo, lo - b.lower},
                           lo - b.lower >= -opts.bound_tol);
                    e.emit({"permanence_upper", k, i, std::nullopt, b.upper, hi, b.upper - hi},
                           b.upper - hi >= -opts.bound_tol);
                }
            } else {
                const bool bounded = finite_all(st.tail_max);
                for (std::size_t i = 0; i < n; ++i)
                    e.emit({"permanence", k, i, std::nullopt, 0.0, st.tail_min[i], st.tail_min[i]},
                           bounded && st.tail_min[i] > 0.0);
            }
        }

        if (point) {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = (*point)[i];
                const double dlo = std::abs(st.tail_min[i] - x);
                const double dhi = std::abs(st.tail_max[i] - x);
                const double observed = dlo > dhi ? st.tail_min[i] : st.tail_max[i];
                const double margin = opts.eq_tol - std::max(dlo, dhi);
                e.emit({"attractivity", k, i, std::nullopt, x, observed, margin}, margin >= 0.0);
            }
        }

        if (!ctx.iterates.empty() && n == 2) {
            Verdict worst{"iterate_bounds", k, std::nullopt, std::nullopt, 0.0, 0.0, kInf};
            for (const auto& b : ctx.iterates)
                for (std::size_t i = 0; i < 2; ++i) {
                    const double ml = st.tail_min[i] - b.lower[i];
                    const double mu = b.upper[i] - st.tail_max[i];
                    if (ml < worst.margin) worst = {"iterate_bounds", k, i, b.level, b.lower[i], st.tail_min[i], ml};
                    if (mu < worst.margin) worst = {"iterate_bounds", k, i, b.level, b.upper[i], st.tail_max[i], mu};
                }
            e.emit(worst, worst.margin >= -opts.bound_tol);
        }

        if (cert.equilibria.size() >= 2 && k < ctx.histories.size()) {
            Vector lo(n, kInf), hi(n, -kInf);
            for (const auto& eq : cert.equilibria)
                for (std::size_t i = 0; i < n; ++i) {
                    lo[i] = std::min(lo[i], eq.x[i]);
                    hi[i] = std::max(hi[i], eq.x[i]);
                }
            const Vector hinf = history_inf(ctx.histories[k]);
            const Vector hsup = history_sup(ctx.histories[k]);
            bool between = true;
            for (std::size_t i = 0; i < n; ++i) between = between && hinf[i] >= lo[i] && hsup[i] <= hi[i];
            if (between)
                for (std::size_t i = 0; i < n; ++i) {
                    e.emit({"sandwich_lower", k, i, std::nullopt, lo[i], st.tail_min[i], st.tail_min[i] - lo[i]},
                           st.tail_min[i] - lo[i] >= -opts.bound_tol);
                    e.emit({"sandwich_upper", k, i, std::nullopt, hi[i], st.tail_max[i], hi[i] - st.tail_max[i]},
                           hi[i] - st.tail_max[i] >= -opts.bound_tol);
                }
        }
    }
    return out;
}

double ordering_violation(const Trajectory& lower, const Trajectory& upper) {
    if (lower.times.size() != upper.times.size() || lower.dim() != upper.dim())
        throw ContractError("ordering check needs trajectories on the same grid");
    double worst = -kInf;
    for (std::size_t k = 0; k < lower.times.size(); ++k)
        for (std::size_t i = 0; i < lower.dim(); ++i)
            worst = std::max(worst, lower.states[k][i] - upper.states[k][i]);
    return worst;
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

}  // namespace

std::vector<std::pair<InitialFunction, InitialFunction>> ordered_pairs(std::size_t n, std::size_t count,
                                                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<InitialFunction, InitialFunction>> out;
    for (std::size_t k = 0; k < count; ++k) {
        Vector bump(n);
        for (auto& b : bump) b = uniform01(rng) < 0.3 ? 0.0 : uniform(rng, 0.05, 1.0);
        InitialFunction phi, psi;
        switch (k % 3) {
            case 0: {
                Vector c(n);
                for (auto& x : c) x = uniform(rng, 0.2, 2.0);
                phi = InitialFunction::constant(c);
                for (std::size_t i = 0; i < n; ++i) c[i] += bump[i];
                psi = InitialFunction::constant(c);
                break;
            }
            case 1: {
                Vector c0(n), c1(n);
                for (std::size_t i = 0; i < n; ++i) {
                    c0[i] = uniform(rng, 0.5, 2.0);
                    c1[i] = uniform(rng, 0.0, 0.9) * c0[i];
                }
                const double omega = uniform(rng, 0.5, 3.0);
                phi = InitialFunction::sine(c0, c1, omega);
                for (std::size_t i = 0; i < n; ++i) c0[i] += bump[i];
                psi = InitialFunction::sine(c0, c1, omega);
                break;
            }
            default: {
                Vector cinf(n), c0(n);
                for (std::size_t i = 0; i < n; ++i) {
                    cinf[i] = uniform(rng, 0.2, 2.0);
                    c0[i] = uniform(rng, 0.2, 2.0);
                }
                const double rate = uniform(rng, 0.2, 2.0);
                phi = InitialFunction::exp_approach(cinf, c0, rate);
                for (std::size_t i = 0; i < n; ++i) {
                    cinf[i] += bump[i];
                    c0[i] += bump[i];
                }
                psi = InitialFunction::exp_approach(cinf, c0, rate);
                break;
            }
        }
        out.emplace_back(std::move(phi), std::move(psi));
    }
    return out;
}

Vector history_inf(const InitialFunction& phi) {
    Vector v(phi.dim());
    for (std::size_t i = 0; i < v.size(); ++i) {
        switch (phi.family) {
            case InitialFunction::Family::Constant: v[i] = phi.c0[i]; break;
            case InitialFunction::Family::Sine: v[i] = phi.rate == 0.0 ? phi.c0[i] : phi.c0[i] - phi.c1[i]; break;
            case InitialFunction::Family::ExpApproach: v[i] = std::min(phi.c0[i], phi.c_inf[i]); break;
        }
    }
    return v;
}

Vector history_sup(const InitialFunction& phi) {
    Vector v(phi.dim());
    for (std::size_t i = 0; i < v.size(); ++i) {
        switch (phi.family) {
            case InitialFunction::Family::Constant: v[i] = phi.c0[i]; break;
            case InitialFunction::Family::Sine: v[i] = phi.rate == 0.0 ? phi.c0[i] : phi.c0[i] + phi.c1[i]; break;
            case InitialFunction::Family::ExpApproach: v[i] = std::max(phi.c0[i], phi.c_inf[i]); break;
        }
    }
    return v;
}

namespace {

nlohmann::ordered_json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

}  // namespace

nlohmann::ordered_json tail_stats_to_json(const TailStats& s) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json lo = nlohmann::ordered_json::array(), hi = nlohmann::ordered_json::array();
    for (double x : s.tail_min) lo.push_back(num(x));
    for (double x : s.tail_max) hi.push_back(num(x));
    j["window"] = {s.window_start, s.window_end};
    j["samples"] = s.samples;
    j["tail_min"] = std::move(lo);
    j["tail_max"] = std::move(hi);
    j["window_drift"] = num(s.window_drift);
    return j;
}

nlohmann::ordered_json verdict_to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["claim"] = v.claim;
    j["trajectory"] = v.trajectory + 1;
    j["component"] = v.component ? nlohmann::ordered_json(*v.component + 1) : nlohmann::ordered_json(nullptr);
    if (v.level) j["level"] = *v.level;
    j["expected"] = num(v.expected);
    j["observed"] = num(v.observed);
    j["margin"] = num(v.margin);
    j["status"] = verdict_name(v.status);
    return j;
}

}  // namespace delaycert
