#include "delaycert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delaycert/errors.hpp"
#include "delaycert/simplex.hpp"

namespace delaycert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWitnessCap = 1e6;

Vector normalize_min_one(Vector v) {
    const double lo = min_entry(v);
    for (double& x : v) x /= lo;
    return v;
}

double lower(const TimeCoefficient& c) { return coefficient_bounds(c).first; }
double upper(const TimeCoefficient& c) { return coefficient_bounds(c).second; }

}  // namespace

const Matrix& MatrixBundle::get(const std::string& name) const {
    for (const auto& [key, m] : matrices)
        if (key == name) return m;
    throw ContractError("matrix bundle has no matrix named " + name);
}

MatrixBundle build_lv_matrices(const CooperativeLVSpec& spec) {
    Matrix m = Matrix::diagonal(spec.beta) + spec.d;
    Matrix q = Matrix::diagonal(spec.mu) - spec.a;
    return {"cooperative_lv", {{"M", std::move(m)}, {"N", std::move(q)}}};
}

MatrixBundle build_nonaut_matrices(const NonautLVSpec& spec) {
    const std::size_t n = spec.n;
    Matrix ml(n, n), mu(n, n), nl(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& d = spec.d[i * n + j];
            const auto& a = spec.a[i * n + j];
            ml(i, j) = lower(d);
            mu(i, j) = upper(d);
            nl(i, j) = -upper(a);
            if (i == j) {
                ml(i, i) += lower(spec.beta[i]);
                mu(i, i) += upper(spec.beta[i]);
                nl(i, i) += lower(spec.mu[i]);
            }
        }
    return {"nonautonomous_lv", {{"M_lower", std::move(ml)}, {"M_upper", std::move(mu)}, {"N_lower", std::move(nl)}}};
}

MatrixBundle build_H(const LogisticNetSpec& spec) {
    const std::size_t n = spec.n;
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            h(i, j) = (i == j) ? spec.total_birth_inf(i) - upper(spec.classes[i].mu) : lower(spec.d_at(i, j));
    return {"logistic_network", {{"H", std::move(h)}}};
}

// ---------------------------------------------------------------- witnesses

namespace {

std::optional<Vector> feasibility_witness(const Matrix& m) {
    const std::size_t n = m.rows();
    // v = w + 1 with w >= 0: M w >= 1 - M 1, w <= cap - 1
    const Vector ones(n, 1.0);
    const Vector m1 = m * ones;
    std::vector<LinearConstraint> rows;
    for (std::size_t i = 0; i < n; ++i) {
        LinearConstraint r;
        r.coeffs.assign(m.data().begin() + static_cast<std::ptrdiff_t>(i * n),
                        m.data().begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
        r.sense = LinearConstraint::Sense::GreaterEq;
        r.rhs = 1.0 - m1[i];
        rows.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < n; ++i) {
        LinearConstraint r;
        r.coeffs.assign(n, 0.0);
        r.coeffs[i] = 1.0;
        r.rhs = kWitnessCap - 1.0;
        rows.push_back(std::move(r));
    }
    auto w = phase_one_feasible(n, rows);
    if (!w) return std::nullopt;
    for (double& x : *w) x += 1.0;
    return w;
}

}  // namespace

WitnessSearch find_positive_vector(const Matrix& m) {
    if (!m.square() || m.rows() == 0) throw ContractError("witness search needs a nonempty square matrix");
    if (!is_metzler(m)) throw ContractError("witness search needs a Metzler matrix");
    WitnessSearch out;
    out.irreducible = is_irreducible(m);

    std::optional<Vector> perron;
    try {
        if (out.irreducible) {
            const std::size_t n = m.rows();
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i) c = std::max(c, std::abs(m(i, i)));
            c += 1.0;
            Matrix shifted = m;
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) += c;
            PerronResult pr = perron_iteration(shifted);
            out.spectral_bound = pr.root - c;
            perron = std::move(pr.vector);
        } else {
            out.spectral_bound = spectral_bound(m);
        }
    } catch (const ConvergenceError& e) {
        out.diagnostic = e.what();
    }

    if (out.spectral_bound && std::abs(*out.spectral_bound) <= kStrictMargin) {
        out.inconclusive = true;
        out.margin = *out.spectral_bound;
        out.method = out.irreducible ? "perron" : "feasibility";
        return out;
    }

    std::optional<Vector> v;
    if (perron && *out.spectral_bound > kStrictMargin) {
        v = normalize_min_one(*perron);
        out.method = "perron";
    } else if (!perron) {
        out.method = "feasibility";
        v = feasibility_witness(m);
        if (v) v = normalize_min_one(*v);
    } else {
        out.method = "perron";
    }

    if (v) {
        const double margin = min_entry(m * *v);
        if (margin > kStrictMargin) {
            out.v = std::move(v);
            out.margin = margin;
            return out;
        }
        out.diagnostic = "candidate witness failed re-verification";
    }
    out.margin = out.spectral_bound.value_or(-kInf);
    if (out.spectral_bound && *out.spectral_bound > kStrictMargin && out.diagnostic.empty())
        out.diagnostic = "s(M) > 0 but no witness within the box [1, 1e6]";
    return out;
}

MMatrixCheck m_matrix_check(const Matrix& n) {
    if (!n.square() || n.rows() == 0) throw ContractError("M-matrix check needs a nonempty square matrix");
    if (!is_z_matrix(n)) throw ContractError("M-matrix check needs nonpositive off-diagonal entries");
    MMatrixCheck out;
    auto q = solve_linear(n, Vector(n.rows(), 1.0));
    if (!q) return out;
    const double lo = min_entry(*q);
    if (!(lo > 0.0) || !std::isfinite(max_entry(*q))) {
        out.margin = lo;
        return out;
    }
    Vector scaled = normalize_min_one(std::move(*q));
    out.margin = min_entry(n * scaled);
    out.is_nonsingular_m_matrix = out.margin > 0.0;
    if (out.is_nonsingular_m_matrix) out.q = std::move(scaled);
    return out;
}

// ---------------------------------------------------------------- equilibria

Vector lv_residual(const CooperativeLVSpec& s, const Vector& x) {
    const std::size_t n = s.n;
    Vector r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double growth = s.beta[i] - s.mu[i] * x[i];
        double disp = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            growth += s.a(i, j) * x[j];
            disp += s.d(i, j) * x[j];
        }
        r[i] = x[i] * growth + disp;
    }
    return r;
}

namespace {

// r_i(x) / x_i: same positive roots as the residual, but no spurious root at 0
// and a Jacobian that stays regular on the symmetric diagonal.
Vector scaled_residual(const CooperativeLVSpec& s, const Vector& x) {
    Vector r = lv_residual(s, x);
    for (std::size_t i = 0; i < s.n; ++i) r[i] /= x[i];
    return r;
}

bool residual_small(const CooperativeLVSpec& s, const Vector& x) {
    return norm_inf(lv_residual(s, x)) <= 1e-12 * std::max(1.0, norm_inf(x) * norm_inf(x));
}

}  // namespace

NewtonReport lv_equilibrium(const CooperativeLVSpec& s, const Vector& guess) {
    const std::size_t n = s.n;
    if (guess.size() != n) throw ContractError("Newton guess has the wrong dimension");
    if (!(min_entry(guess) > 0.0)) throw ContractError("Newton guess must be strictly positive");
    NewtonReport rep;
    Vector x = guess;
    Vector r = scaled_residual(s, x);
    double rn = norm_inf(r);

    for (std::size_t it = 0; it < 100; ++it) {
        if (residual_small(s, x)) {
            rep.converged = true;
            break;
        }
        // d/dx_k of growth_i + disp_i / x_i
        Matrix jac(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            double disp = 0.0;
            for (std::size_t j = 0; j < n; ++j) disp += s.d(i, j) * x[j];
            for (std::size_t k = 0; k < n; ++k) jac(i, k) = s.a(i, k) + s.d(i, k) / x[i];
            jac(i, i) += -s.mu[i] - disp / (x[i] * x[i]);
        }
        Vector neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -r[i];
        auto step = solve_linear(jac, neg);
        if (!step) {
            rep.diagnostic = "singular Jacobian";
            break;
        }
        // backtrack until the iterate stays positive and the residual decreases
        double lambda = 1.0;
        Vector trial(n);
        Vector rt;
        double rtn = kInf;
        for (int k = 0; k < 40; ++k, lambda *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + lambda * (*step)[i];
            if (!(min_entry(trial) > 0.0)) continue;
            rt = scaled_residual(s, trial);
            rtn = norm_inf(rt);
            if (std::isfinite(rtn) && rtn < rn) break;
        }
        if (!(rtn < rn)) {
            rep.diagnostic = "line search stalled";
            rep.iterations = it + 1;
            break;
        }
        x = trial;
        r = std::move(rt);
        rn = rtn;
        rep.iterations = it + 1;
    }
    if (!rep.converged && rep.diagnostic.empty()) {
        if (residual_small(s, x))
            rep.converged = true;
        else
            rep.diagnostic = "no convergence within 100 iterations";
    }
    rep.last_iterate = x;
    if (rep.converged) {
        if (min_entry(x) > kStrictMargin)
            rep.root = x;
        else
            rep.diagnostic = "converged to a root that is not strictly positive";
    }
    return rep;
}

// ---------------------------------------------------------------- certificates

Condition strict_positive(std::string name, double margin) {
    Condition c{std::move(name), ConditionStatus::Fails, margin};
    if (margin > kStrictMargin)
        c.status = ConditionStatus::Holds;
    else if (margin >= -kStrictMargin)
        c.status = ConditionStatus::Inconclusive;
    return c;
}

std::optional<Vector> Certificate::attractor_point() const {
    if (!attractor) return std::nullopt;
    if (stage) return stage->equilibrium;
    if (equilibria.size() == 1) return equilibria.front().x;
    return std::nullopt;
}

namespace {

Condition witness_condition(const std::string& name, const WitnessSearch& w) {
    if (w.v) return {name, ConditionStatus::Holds, w.margin};
    if (w.inconclusive) return {name, ConditionStatus::Inconclusive, w.margin};
    return {name, ConditionStatus::Fails, w.margin};
}

Condition m_matrix_condition(const std::string& name, const MMatrixCheck& c) {
    if (c.is_nonsingular_m_matrix) return strict_positive(name, c.margin);
    return {name, ConditionStatus::Fails, c.margin};
}

bool same_root(const Vector& a, const Vector& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-8 * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

}  // namespace

Certificate lv_certificate(const CooperativeLVSpec& spec, const LvCertificateOptions& opts) {
    spec.validate();
    const std::size_t n = spec.n;
    MatrixBundle b = build_lv_matrices(spec);
    const Matrix& m = b.get("M");
    const Matrix& q = b.get("N");

    Certificate c;
    c.family = b.family;
    const WitnessSearch w = find_positive_vector(m);
    const MMatrixCheck mm = m_matrix_check(q);
    c.v = w.v;
    c.q = mm.q;
    c.spectral_bound = w.spectral_bound;
    if (!w.diagnostic.empty()) c.notes.push_back(w.diagnostic);
    c.conditions.push_back(witness_condition("M v > 0", w));
    c.conditions.push_back(m_matrix_condition("N q > 0", mm));
    c.persistent = c.conditions[0].holds();
    c.permanent = c.persistent && c.conditions[1].holds();

    std::vector<Vector> starts;
    if (opts.guess) starts.push_back(*opts.guess);
    for (double s : {0.1, 1.0, 10.0}) starts.emplace_back(n, s);
    std::vector<Vector> roots;
    for (const auto& s : starts) {
        NewtonReport r = lv_equilibrium(spec, s);
        if (!r.root) continue;
        if (std::none_of(roots.begin(), roots.end(), [&](const Vector& x) { return same_root(x, *r.root); }))
            roots.push_back(*r.root);
    }
    std::sort(roots.begin(), roots.end());
    for (auto& x : roots) {
        EquilibriumReport e;
        e.mx = m * x;
        e.mx_positive = min_entry(e.mx) > kStrictMargin;
        e.x = std::move(x);
        c.equilibria.push_back(std::move(e));
    }

    if (c.equilibria.empty()) {
        c.conditions.push_back({"M x* > 0", ConditionStatus::Fails, -kInf});
        c.notes.push_back("no positive equilibrium found from the Newton starts");
    } else {
        double best = -kInf;
        for (const auto& e : c.equilibria) best = std::max(best, min_entry(e.mx));
        c.conditions.push_back(strict_positive("M x* > 0", best));
    }
    if (c.equilibria.size() > 1) c.notes.push_back("multiple positive equilibria found; attractor flag withheld");
    c.attractor = c.permanent && c.equilibria.size() == 1 && c.conditions[2].holds();

    c.matrices = std::move(b.matrices);
    return c;
}

Certificate nonaut_certificate(const NonautLVSpec& spec) {
    spec.validate();
    MatrixBundle b = build_nonaut_matrices(spec);
    Certificate c;
    c.family = b.family;
    const WitnessSearch wl = find_positive_vector(b.get("M_lower"));
    const WitnessSearch wu = find_positive_vector(b.get("M_upper"));
    const MMatrixCheck mm = m_matrix_check(b.get("N_lower"));
    c.v = wl.v;
    c.q = mm.q;
    c.spectral_bound = wl.spectral_bound;
    c.conditions.push_back(witness_condition("M_lower v > 0", wl));
    c.conditions.push_back(witness_condition("M_upper v > 0", wu));
    c.conditions.push_back(m_matrix_condition("N_lower q > 0", mm));
    c.persistent = c.conditions[0].holds();
    c.permanent = c.persistent && c.conditions[1].holds() && c.conditions[2].holds();
    for (const auto* w : {&wl, &wu})
        if (!w->diagnostic.empty()) c.notes.push_back(w->diagnostic);
    c.matrices = std::move(b.matrices);
    return c;
}

Certificate logistic_certificate(const LogisticNetSpec& spec) {
    spec.validate();
    MatrixBundle b = build_H(spec);
    Certificate c;
    c.family = b.family;
    const WitnessSearch w = find_positive_vector(b.get("H"));
    c.v = w.v;
    c.spectral_bound = w.spectral_bound;
    if (!w.diagnostic.empty()) c.notes.push_back(w.diagnostic);
    c.conditions.push_back(witness_condition("H v > 0", w));
    c.persistent = c.conditions[0].holds();

    bool escaping = true;
    for (const auto& cl : spec.classes)
        for (const auto& term : cl.terms) escaping = escaping && term.tau.escaping();
    for (const auto& s : spec.sigma) escaping = escaping && s.escaping();

    if (c.persistent) {
        if (!escaping) {
            c.notes.push_back("some delay does not escape; explicit bounds withheld");
        } else {
            BoundsPair bp = logistic_bounds(spec, *c.v, BoundsSampling{200.0, 20001});
            c.conditions.push_back(strict_positive("m0 > 0", bp.lower));
            if (bp.vacuous) c.notes.push_back("lower bound m0 <= 0: permanence bound is vacuous");
            c.permanent = c.conditions.back().holds();
            c.bounds = std::move(bp);
        }
    }
    c.matrices = std::move(b.matrices);
    return c;
}

Certificate stage_certificate(const StageStructuredSpec& s) {
    s.validate();
    Certificate c;
    c.family = "stage_structured";
    const double k1 = s.kappa(0);
    const double k2 = s.kappa(1);
    const double a1 = s.alpha[0] * k1;  // alpha_1 kappa_1
    const double a2 = s.alpha[1] * k2;
    const double b1 = s.beta[0], b2 = s.beta[1];
    const double c1 = s.c[0], c2 = s.c[1];

    const double slack1 = b1 * a2 - c2 * a1;
    const double slack2 = b2 * a1 - c1 * a2;
    c.conditions.push_back(strict_positive("coexistence_1", slack1));
    c.conditions.push_back(strict_positive("coexistence_2", slack2));
    if (!c.conditions[0].holds() || !c.conditions[1].holds()) {
        c.notes.push_back("coexistence conditions fail: not certified");
        return c;
    }
    const double det = b1 * b2 - c1 * c2;
    if (std::abs(det) <= kStrictMargin) throw NumericDomainError("degenerate denominator beta1 beta2 - c1 c2");

    StagePayload p;
    p.kappa = {k1, k2};
    p.equilibrium = {(b2 * a1 - c1 * a2) / det, (b1 * a2 - c2 * a1) / det};
    // delta < slack1 / (c2 beta1) and delta < slack2 / (c1 beta2)
    double limit = kInf;
    if (c2 > 0.0) limit = std::min(limit, slack1 / (c2 * b1));
    if (c1 > 0.0) limit = std::min(limit, slack2 / (c1 * b2));
    p.delta = std::isfinite(limit) ? 0.5 * limit : 1.0;

    const double m1 = b1 * a2 - c2 * (p.delta * b1 + a1);
    const double m2 = b2 * a1 - c1 * (p.delta * b2 + a2);
    c.conditions.push_back(strict_positive("delta_condition_1", m1));
    c.conditions.push_back(strict_positive("delta_condition_2", m2));
    if (!c.conditions[2].holds() || !c.conditions[3].holds())
        throw NumericDomainError("chosen delta fails re-verification");

    p.first_upper = {a1 / b1, a2 / b2};
    p.first_lower = {(a1 - c1 * (p.first_upper[1] + p.delta)) / b1, (a2 - c2 * (p.first_upper[0] + p.delta)) / b2};
    c.persistent = c.permanent = c.attractor = true;
    c.stage = std::move(p);
    return c;
}

Certificate certify(const ModelSpec& model) {
    if (const auto* s = std::get_if<CooperativeLVSpec>(&model)) return lv_certificate(*s);
    if (const auto* s = std::get_if<NonautLVSpec>(&model)) return nonaut_certificate(*s);
    if (const auto* s = std::get_if<LogisticNetSpec>(&model)) return logistic_certificate(*s);
    return stage_certificate(std::get<StageStructuredSpec>(model));
}

// ---------------------------------------------------------------- logistic bounds

namespace {

double upper_ratio_at(const LogisticNetSpec& s, const Vector& v, std::size_t i, double t) {
    const auto& cl = s.classes[i];
    double a = 0.0;
    for (const auto& term : cl.terms) a += term.alpha.value(t);
    double num = v[i] * (a - cl.mu.value(t));
    for (std::size_t j = 0; j < s.n; ++j)
        if (j != i) num += s.d_at(i, j).value(t) * v[j];
    return num / (v[i] * v[i] * cl.kappa.value(t));
}

double lower_ratio_at(const LogisticNetSpec& s, const Vector& v, std::size_t i, double t, double m0_upper) {
    const auto& cl = s.classes[i];
    double a = 0.0;
    for (const auto& term : cl.terms) a += term.alpha.value(t) / (1.0 + term.beta.value(t) * v[i] * m0_upper);
    double num = v[i] * (a - cl.mu.value(t));
    for (std::size_t j = 0; j < s.n; ++j)
        if (j != i) num += s.d_at(i, j).value(t) * v[j];
    return num / (v[i] * v[i] * cl.kappa.value(t));
}

}  // namespace

BoundsPair logistic_bounds(const LogisticNetSpec& s, const Vector& v, const BoundsSampling& sampling) {
    s.validate();
    const std::size_t n = s.n;
    if (v.size() != n) throw ContractError("scaling vector has the wrong dimension");
    if (!(min_entry(v) > 0.0)) throw ContractError("scaling vector must be positive");

    BoundsPair bp;
    bp.scaling = v;
    double big = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cl = s.classes[i];
        double num = v[i] * (s.total_birth_sup(i) - lower(cl.mu));
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) num += upper(s.d_at(i, j)) * v[j];
        const auto [klo, khi] = coefficient_bounds(cl.kappa);
        big = std::max(big, num / (v[i] * v[i] * (num >= 0.0 ? klo : khi)));
    }
    bp.upper = big;

    double small = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cl = s.classes[i];
        double a = 0.0;
        for (const auto& term : cl.terms) a += lower(term.alpha) / (1.0 + upper(term.beta) * v[i] * big);
        double num = v[i] * (a - upper(cl.mu));
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) num += lower(s.d_at(i, j)) * v[j];
        const auto [klo, khi] = coefficient_bounds(cl.kappa);
        small = std::min(small, num / (v[i] * v[i] * (num >= 0.0 ? khi : klo)));
    }
    bp.lower = small;
    bp.vacuous = !(small > 0.0);

    if (sampling.horizon > 0.0 && sampling.samples > 1) {
        double hi = -kInf;
        for (std::size_t k = 0; k < sampling.samples; ++k) {
            const double t = sampling.horizon * static_cast<double>(k) / static_cast<double>(sampling.samples - 1);
            for (std::size_t i = 0; i < n; ++i) hi = std::max(hi, upper_ratio_at(s, v, i, t));
        }
        double lo = kInf;
        for (std::size_t k = 0; k < sampling.samples; ++k) {
            const double t = sampling.horizon * static_cast<double>(k) / static_cast<double>(sampling.samples - 1);
            for (std::size_t i = 0; i < n; ++i) lo = std::min(lo, lower_ratio_at(s, v, i, t, hi));
        }
        bp.sampled_upper = hi;
        bp.sampled_lower = lo;
    }
    return bp;
}

namespace {

TimeCoefficient scaled(TimeCoefficient c, double f) {
    c.c0 *= f;
    c.c1 *= f;
    c.floor *= f;
    return c;
}

}  // namespace

LogisticNetSpec scale_logistic(const LogisticNetSpec& spec, const Vector& v) {
    if (v.size() != spec.n || !(min_entry(v) > 0.0)) throw ContractError("scaling vector must be positive, length n");
    LogisticNetSpec out = spec;
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (auto& term : out.classes[i].terms) term.beta = scaled(term.beta, v[i]);
        out.classes[i].kappa = scaled(out.classes[i].kappa, v[i]);
        for (std::size_t j = 0; j < spec.n; ++j)
            out.d[i * spec.n + j] = scaled(spec.d_at(i, j), v[j] / v[i]);
    }
    return out;
}

// ---------------------------------------------------------------- JSON

namespace {

using json = nlohmann::ordered_json;

json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

json vec(const Vector& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

const char* status_name(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::Holds: return "holds";
        case ConditionStatus::Fails: return "fails";
        case ConditionStatus::Inconclusive: return "inconclusive";
    }
    return "fails";
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(number(m(i, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

json certificate_to_json(const Certificate& c) {
    json j;
    j["theorem"] = c.family;
    json mats = json::object();
    for (const auto& [name, m] : c.matrices) mats[name] = matrix_to_json(m);
    j["matrices"] = std::move(mats);
    json wit = json::object();
    wit["v"] = c.v ? vec(*c.v) : json(nullptr);
    wit["q"] = c.q ? vec(*c.q) : json(nullptr);
    j["witnesses"] = std::move(wit);
    j["spectral_bound"] = c.spectral_bound ? number(*c.spectral_bound) : json(nullptr);
    json conds = json::array();
    for (const auto& k : c.conditions)
        conds.push_back({{"name", k.name},
                         {"holds", k.holds()},
                         {"status", status_name(k.status)},
                         {"margin", number(k.margin)}});
    j["conditions"] = std::move(conds);
    j["persistent"] = c.persistent;
    j["permanent"] = c.permanent;
    j["attractor"] = c.attractor;

    json bounds = json::object();
    if (c.bounds) {
        bounds["m0"] = number(c.bounds->lower);
        bounds["M0"] = number(c.bounds->upper);
        bounds["scaling"] = vec(c.bounds->scaling);
        bounds["vacuous"] = c.bounds->vacuous;
        bounds["sampled_m0"] = c.bounds->sampled_lower ? number(*c.bounds->sampled_lower) : json(nullptr);
        bounds["sampled_M0"] = c.bounds->sampled_upper ? number(*c.bounds->sampled_upper) : json(nullptr);
    }
    if (!c.equilibria.empty()) {
        json eqs = json::array();
        for (const auto& e : c.equilibria)
            eqs.push_back({{"x", vec(e.x)}, {"Mx", vec(e.mx)}, {"Mx_positive", e.mx_positive}});
        bounds["equilibria"] = std::move(eqs);
    }
    if (auto x = c.attractor_point()) bounds["equilibrium"] = vec(*x);
    if (c.stage) {
        bounds["kappa"] = vec(c.stage->kappa);
        bounds["equilibrium"] = vec(c.stage->equilibrium);
        bounds["delta"] = number(c.stage->delta);
        bounds["first_lower"] = vec(c.stage->first_lower);
        bounds["first_upper"] = vec(c.stage->first_upper);
    }
    j["bounds"] = std::move(bounds);
    j["notes"] = c.notes;
    return j;
}

}  // namespace delaycert
