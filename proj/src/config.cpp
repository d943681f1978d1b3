#include "delaycert/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "delaycert/errors.hpp"

namespace delaycert {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return j.at(key);
}

double num(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + ": expected a finite number");
    return x;
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? num(j.at(key), where + "." + key) : fallback;
}

std::size_t count_or(const json& j, const char* key, std::size_t fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(where + "." + key + ": expected a nonnegative integer");
    return v.get<std::size_t>();
}

std::string type_of(const json& j, const std::string& where) {
    const json& t = need(j, "type", where);
    if (!t.is_string()) throw ConfigError(where + ".type: expected a string");
    return t.get<std::string>();
}

Vector vec(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    Vector v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(num(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

/// A number broadcast to n entries, or an array of exactly n numbers.
Vector vec_n(const json& j, std::size_t n, const std::string& where) {
    if (j.is_number()) return Vector(n, num(j, where));
    Vector v = vec(j, where);
    if (v.size() != n) throw ConfigError(where + ": expected " + std::to_string(n) + " entries");
    return v;
}

Matrix mat(const json& j, std::size_t n, const std::string& where) {
    if (!j.is_array() || j.size() != n) throw ConfigError(where + ": expected " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vector row = vec(j[i], where + "[" + std::to_string(i) + "]");
        if (row.size() != n) throw ConfigError(where + ": rows must have " + std::to_string(n) + " entries");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = row[k];
    }
    return m;
}

/// One entry broadcast to all n*n positions, or an n x n array of entries.
template <class T, class F>
std::vector<T> grid(const json& j, std::size_t n, const std::string& where, F&& parse) {
    if (!j.is_array()) return std::vector<T>(n * n, parse(j, where));
    if (j.size() != n) throw ConfigError(where + ": expected " + std::to_string(n) + " rows");
    std::vector<T> out;
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        if (!row.is_array() || row.size() != n)
            throw ConfigError(where + ": rows must have " + std::to_string(n) + " entries");
        for (std::size_t k = 0; k < n; ++k)
            out.push_back(parse(row[k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
    }
    return out;
}

TimeCoefficient coefficient_at(const json& j, const std::string& where) {
    if (j.is_number()) return TimeCoefficient::constant(num(j, where));
    const std::string t = type_of(j, where);
    if (t == "constant") {
        allow_keys(j, {"type", "value"}, where);
        return TimeCoefficient::constant(num(need(j, "value", where), where + ".value"));
    }
    if (t == "sinusoid") {
        allow_keys(j, {"type", "c0", "c1", "omega", "phase"}, where);
        return TimeCoefficient::sinusoid(num(need(j, "c0", where), where), num(need(j, "c1", where), where),
                                         num(need(j, "omega", where), where), num_or(j, "phase", 0.0, where));
    }
    if (t == "positive_sinusoid") {
        allow_keys(j, {"type", "c0", "c1", "omega", "phase", "floor"}, where);
        return TimeCoefficient::positive_sinusoid(num(need(j, "c0", where), where), num(need(j, "c1", where), where),
                                                  num(need(j, "omega", where), where),
                                                  num_or(j, "phase", 0.0, where),
                                                  num(need(j, "floor", where), where));
    }
    throw ConfigError(where + ": unknown coefficient type '" + t + "'");
}

DelayFunction delay_at(const json& j, const std::string& where) {
    if (j.is_number()) return DelayFunction::constant(num(j, where));
    const std::string t = type_of(j, where);
    if (t == "constant") {
        allow_keys(j, {"type", "tau"}, where);
        return DelayFunction::constant(num(need(j, "tau", where), where + ".tau"));
    }
    if (t == "sinusoid") {
        allow_keys(j, {"type", "tau0", "tau1", "omega"}, where);
        return DelayFunction::sinusoid(num(need(j, "tau0", where), where), num(need(j, "tau1", where), where),
                                       num(need(j, "omega", where), where));
    }
    if (t == "proportional") {
        allow_keys(j, {"type", "rho"}, where);
        return DelayFunction::proportional(num(need(j, "rho", where), where + ".rho"));
    }
    throw ConfigError(where + ": unknown delay type '" + t + "'");
}

DelayKernel kernel_at(const json& j, const std::string& where) {
    allow_keys(j, {"atoms", "exp", "uniform", "normalized"}, where);
    DelayKernel k;
    k.normalized = j.value("normalized", true);
    if (j.contains("atoms"))
        for (const auto& a : j.at("atoms")) {
            allow_keys(a, {"weight", "delay"}, where + ".atoms");
            k.atoms.push_back({num_or(a, "weight", 1.0, where), num(need(a, "delay", where), where + ".delay")});
        }
    if (j.contains("exp"))
        for (const auto& e : j.at("exp")) {
            allow_keys(e, {"coef", "rate", "damping"}, where + ".exp");
            k.exp_densities.push_back({num_or(e, "coef", 1.0, where), num(need(e, "rate", where), where + ".rate"),
                                       num_or(e, "damping", 0.0, where)});
        }
    if (j.contains("uniform"))
        for (const auto& u : j.at("uniform")) {
            allow_keys(u, {"coef", "from", "to", "damping"}, where + ".uniform");
            k.uniform_densities.push_back({num_or(u, "coef", 1.0, where), num(need(u, "from", where), where),
                                           num(need(u, "to", where), where), num_or(u, "damping", 0.0, where)});
        }
    if (k.empty()) throw ConfigError(where + ": kernel has no atoms or densities");
    return k;
}

InitialFunction initial_at(const json& j, std::size_t n, const std::string& where) {
    const std::string t = type_of(j, where);
    if (t == "constant") {
        allow_keys(j, {"type", "value"}, where);
        return InitialFunction::constant(vec_n(need(j, "value", where), n, where + ".value"));
    }
    if (t == "sine") {
        allow_keys(j, {"type", "c0", "c1", "omega"}, where);
        return InitialFunction::sine(vec_n(need(j, "c0", where), n, where + ".c0"),
                                     vec_n(need(j, "c1", where), n, where + ".c1"),
                                     num(need(j, "omega", where), where + ".omega"));
    }
    if (t == "exp_approach") {
        allow_keys(j, {"type", "c_inf", "c0", "rate"}, where);
        return InitialFunction::exp_approach(vec_n(need(j, "c_inf", where), n, where + ".c_inf"),
                                             vec_n(need(j, "c0", where), n, where + ".c0"),
                                             num(need(j, "rate", where), where + ".rate"));
    }
    throw ConfigError(where + ": unknown initial function type '" + t + "'");
}

std::size_t dim_from(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + ": expected a nonempty array");
    return v.size();
}

ModelSpec model_at(const json& j, const std::string& where) {
    const std::string t = type_of(j, where);
    if (t == "cooperative_lv") {
        allow_keys(j, {"type", "beta", "mu", "a", "d", "eta", "nu"}, where);
        CooperativeLVSpec s;
        s.n = dim_from(j, "beta", where);
        s.beta = vec_n(j.at("beta"), s.n, where + ".beta");
        s.mu = vec_n(need(j, "mu", where), s.n, where + ".mu");
        s.a = mat(need(j, "a", where), s.n, where + ".a");
        s.d = mat(need(j, "d", where), s.n, where + ".d");
        s.eta = grid<DelayKernel>(need(j, "eta", where), s.n, where + ".eta", kernel_at);
        s.nu = grid<DelayKernel>(need(j, "nu", where), s.n, where + ".nu", kernel_at);
        return s;
    }
    if (t == "nonautonomous_lv") {
        allow_keys(j, {"type", "beta", "mu", "a", "d", "eta", "nu"}, where);
        NonautLVSpec s;
        s.n = dim_from(j, "beta", where);
        for (std::size_t i = 0; i < s.n; ++i) {
            s.beta.push_back(coefficient_at(j.at("beta")[i], where + ".beta"));
        }
        const json& mu = need(j, "mu", where);
        if (!mu.is_array() || mu.size() != s.n) throw ConfigError(where + ".mu: expected n entries");
        for (std::size_t i = 0; i < s.n; ++i) s.mu.push_back(coefficient_at(mu[i], where + ".mu"));
        s.a = grid<TimeCoefficient>(need(j, "a", where), s.n, where + ".a", coefficient_at);
        s.d = grid<TimeCoefficient>(need(j, "d", where), s.n, where + ".d", coefficient_at);
        s.eta = grid<DelayKernel>(need(j, "eta", where), s.n, where + ".eta", kernel_at);
        s.nu = grid<DelayKernel>(need(j, "nu", where), s.n, where + ".nu", kernel_at);
        return s;
    }
    if (t == "logistic_network") {
        allow_keys(j, {"type", "classes", "d", "sigma"}, where);
        LogisticNetSpec s;
        s.n = dim_from(j, "classes", where);
        for (std::size_t i = 0; i < s.n; ++i) {
            const json& cj = j.at("classes")[i];
            const std::string cw = where + ".classes[" + std::to_string(i) + "]";
            allow_keys(cj, {"terms", "mu", "kappa"}, cw);
            LogisticNetSpec::Class cl;
            const json& terms = need(cj, "terms", cw);
            if (!terms.is_array()) throw ConfigError(cw + ".terms: expected an array");
            for (const auto& tj : terms) {
                allow_keys(tj, {"alpha", "beta", "tau"}, cw + ".terms");
                cl.terms.push_back({coefficient_at(need(tj, "alpha", cw), cw + ".alpha"),
                                    tj.contains("beta") ? coefficient_at(tj.at("beta"), cw + ".beta")
                                                        : TimeCoefficient::constant(0.0),
                                    tj.contains("tau") ? delay_at(tj.at("tau"), cw + ".tau")
                                                       : DelayFunction::constant(0.0)});
            }
            cl.mu = coefficient_at(need(cj, "mu", cw), cw + ".mu");
            cl.kappa = coefficient_at(need(cj, "kappa", cw), cw + ".kappa");
            s.classes.push_back(std::move(cl));
        }
        s.d = j.contains("d") ? grid<TimeCoefficient>(j.at("d"), s.n, where + ".d", coefficient_at)
                              : std::vector<TimeCoefficient>(s.n * s.n, TimeCoefficient::constant(0.0));
        s.sigma = j.contains("sigma") ? grid<DelayFunction>(j.at("sigma"), s.n, where + ".sigma", delay_at)
                                      : std::vector<DelayFunction>(s.n * s.n, DelayFunction::constant(0.0));
        return s;
    }
    if (t == "stage_structured") {
        allow_keys(j, {"type", "alpha", "beta", "gamma", "c", "f"}, where);
        StageStructuredSpec s;
        const auto pair = [&](const char* key) {
            const Vector v = vec_n(need(j, key, where), 2, where + "." + key);
            return std::array<double, 2>{v[0], v[1]};
        };
        s.alpha = pair("alpha");
        s.beta = pair("beta");
        s.gamma = pair("gamma");
        s.c = pair("c");
        const json& f = need(j, "f", where);
        if (f.is_array()) {
            if (f.size() != 2) throw ConfigError(where + ".f: expected two kernels");
            s.f = {kernel_at(f[0], where + ".f[0]"), kernel_at(f[1], where + ".f[1]")};
        } else {
            s.f = {kernel_at(f, where + ".f"), kernel_at(f, where + ".f")};
        }
        return s;
    }
    throw ConfigError(where + ": unknown model type '" + t + "'");
}

template <class F>
auto contract_as_config(F&& f) {
    try {
        return f();
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

TimeCoefficient parse_coefficient(const json& j) {
    return contract_as_config([&] { return coefficient_at(j, "coefficient"); });
}
DelayFunction parse_delay(const json& j) {
    return contract_as_config([&] { return delay_at(j, "delay"); });
}
DelayKernel parse_kernel(const json& j) {
    return contract_as_config([&] {
        DelayKernel k = kernel_at(j, "kernel");
        k.validate();
        return k;
    });
}
InitialFunction parse_initial(const json& j, std::size_t n) {
    return contract_as_config([&] {
        InitialFunction phi = initial_at(j, n, "initial");
        phi.validate();
        return phi;
    });
}
ModelSpec parse_model(const json& j) {
    return contract_as_config([&] {
        ModelSpec m = model_at(j, "model");
        validate_model(m);
        return m;
    });
}

std::vector<InitialFunction> default_ensemble(std::size_t n) {
    std::vector<InitialFunction> out;
    for (double c : {0.1, 0.5, 1.0, 2.0}) out.push_back(InitialFunction::constant(Vector(n, c)));
    out.push_back(InitialFunction::sine(Vector(n, 1.0), Vector(n, 0.5), 1.0));
    return out;
}

ExperimentConfig parse_config(const json& j, const std::string& name) {
    return contract_as_config([&] {
        allow_keys(j, {"name", "description", "model", "initial_conditions", "integrator", "analysis", "output"},
                   "config");
        ExperimentConfig cfg;
        cfg.name = j.contains("name") ? j.at("name").get<std::string>() : name;
        cfg.model = model_at(need(j, "model", "config"), "model");
        validate_model(cfg.model);
        const std::size_t n = model_dim(cfg.model);

        if (j.contains("initial_conditions")) {
            const json& ic = j.at("initial_conditions");
            if (!ic.is_array() || ic.empty()) throw ConfigError("initial_conditions: expected a nonempty array");
            for (std::size_t k = 0; k < ic.size(); ++k) {
                InitialFunction phi = initial_at(ic[k], n, "initial_conditions[" + std::to_string(k) + "]");
                phi.validate();
                if (!phi.in_bc0())
                    throw ConfigError("initial_conditions[" + std::to_string(k) + "] is not strictly positive");
                cfg.initial_conditions.push_back(std::move(phi));
            }
        } else {
            cfg.initial_conditions = default_ensemble(n);
        }

        if (j.contains("integrator")) {
            const json& ij = j.at("integrator");
            allow_keys(ij, {"step", "horizon", "tail_tol", "positivity_floor", "output_stride"}, "integrator");
            auto& ic = cfg.integrator;
            ic.step = num_or(ij, "step", ic.step, "integrator");
            ic.horizon = num_or(ij, "horizon", ic.horizon, "integrator");
            ic.tail_tol = num_or(ij, "tail_tol", ic.tail_tol, "integrator");
            ic.positivity_floor = num_or(ij, "positivity_floor", ic.positivity_floor, "integrator");
            ic.output_stride = count_or(ij, "output_stride", ic.output_stride, "integrator");
        }
        cfg.integrator.validate();

        if (j.contains("analysis")) {
            const json& aj = j.at("analysis");
            allow_keys(aj,
                       {"tail_window", "bound_tol", "eq_tol", "drift_tol", "seed", "probe_pairs", "delta0",
                        "schedule", "max_levels", "iterate_tol", "weight_rate", "ordered_pairs"},
                       "analysis");
            auto& a = cfg.analysis;
            a.tail_window = num_or(aj, "tail_window", a.tail_window, "analysis");
            a.bound_tol = num_or(aj, "bound_tol", a.bound_tol, "analysis");
            a.eq_tol = num_or(aj, "eq_tol", a.eq_tol, "analysis");
            a.drift_tol = num_or(aj, "drift_tol", a.drift_tol, "analysis");
            a.seed = count_or(aj, "seed", a.seed, "analysis");
            a.probe_pairs = count_or(aj, "probe_pairs", a.probe_pairs, "analysis");
            if (aj.contains("delta0")) a.delta0 = num(aj.at("delta0"), "analysis.delta0");
            if (aj.contains("schedule")) a.schedule = parse_schedule(aj.at("schedule").get<std::string>());
            a.max_levels = count_or(aj, "max_levels", a.max_levels, "analysis");
            a.iterate_tol = num_or(aj, "iterate_tol", a.iterate_tol, "analysis");
            a.weight_rate = num_or(aj, "weight_rate", a.weight_rate, "analysis");
            a.ordered_pairs = count_or(aj, "ordered_pairs", a.ordered_pairs, "analysis");
        }
        const auto& a = cfg.analysis;
        if (!(a.tail_window > 0.0 && a.tail_window < 1.0)) throw ConfigError("analysis.tail_window must be in (0, 1)");
        if (!(a.bound_tol >= 0.0) || !(a.eq_tol >= 0.0) || !(a.drift_tol >= 0.0))
            throw ConfigError("analysis tolerances must be nonnegative");
        if (a.probe_pairs == 0) throw ConfigError("analysis.probe_pairs must be at least 1");
        if (a.max_levels == 0) throw ConfigError("analysis.max_levels must be at least 1");
        if (a.delta0 && !(*a.delta0 > 0.0)) throw ConfigError("analysis.delta0 must be positive");
        if (!(a.weight_rate > 0.0)) throw ConfigError("analysis.weight_rate must be positive");
        if (!(a.weight_rate < min_damping(cfg.model)))
            throw ConfigError("analysis.weight_rate must lie below the smallest maturation damping");

        if (j.contains("output")) {
            allow_keys(j.at("output"), {"dir"}, "output");
            cfg.output_dir = j.at("output").value("dir", cfg.output_dir);
        }
        return cfg;
    });
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).stem().string());
}

// ---------------------------------------------------------------- echo

namespace {

ojson coefficient_json(const TimeCoefficient& c) {
    if (c.kind == TimeCoefficient::Kind::Constant) return c.c0;
    ojson j;
    j["type"] = c.kind == TimeCoefficient::Kind::Sinusoid ? "sinusoid" : "positive_sinusoid";
    j["c0"] = c.c0;
    j["c1"] = c.c1;
    j["omega"] = c.omega;
    j["phase"] = c.phase;
    if (c.kind == TimeCoefficient::Kind::PositiveSinusoid) j["floor"] = c.floor;
    return j;
}

ojson delay_json(const DelayFunction& d) {
    switch (d.kind) {
        case DelayFunction::Kind::Constant: return d.tau0;
        case DelayFunction::Kind::Sinusoid:
            return {{"type", "sinusoid"}, {"tau0", d.tau0}, {"tau1", d.tau1}, {"omega", d.omega}};
        case DelayFunction::Kind::Proportional: return {{"type", "proportional"}, {"rho", d.rho}};
    }
    return nullptr;
}

ojson kernel_json(const DelayKernel& k) {
    ojson j = ojson::object();
    if (!k.atoms.empty()) {
        ojson a = ojson::array();
        for (const auto& x : k.atoms) a.push_back({{"weight", x.weight}, {"delay", x.delay}});
        j["atoms"] = std::move(a);
    }
    if (!k.exp_densities.empty()) {
        ojson a = ojson::array();
        for (const auto& x : k.exp_densities)
            a.push_back({{"coef", x.coef}, {"rate", x.rate}, {"damping", x.damping}});
        j["exp"] = std::move(a);
    }
    if (!k.uniform_densities.empty()) {
        ojson a = ojson::array();
        for (const auto& x : k.uniform_densities)
            a.push_back({{"coef", x.coef}, {"from", x.from}, {"to", x.to}, {"damping", x.damping}});
        j["uniform"] = std::move(a);
    }
    j["normalized"] = k.normalized;
    return j;
}

template <class T, class F>
ojson grid_json(const std::vector<T>& xs, std::size_t n, F&& f) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < n; ++i) {
        ojson r = ojson::array();
        for (std::size_t k = 0; k < n; ++k) r.push_back(f(xs[i * n + k]));
        rows.push_back(std::move(r));
    }
    return rows;
}

ojson matrix_json(const Matrix& m) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ojson r = ojson::array();
        for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

ojson model_to_json(const ModelSpec& m) {
    ojson j;
    j["type"] = model_name(m);
    if (const auto* s = std::get_if<CooperativeLVSpec>(&m)) {
        j["beta"] = s->beta;
        j["mu"] = s->mu;
        j["a"] = matrix_json(s->a);
        j["d"] = matrix_json(s->d);
        j["eta"] = grid_json(s->eta, s->n, kernel_json);
        j["nu"] = grid_json(s->nu, s->n, kernel_json);
    } else if (const auto* s = std::get_if<NonautLVSpec>(&m)) {
        ojson beta = ojson::array(), mu = ojson::array();
        for (const auto& c : s->beta) beta.push_back(coefficient_json(c));
        for (const auto& c : s->mu) mu.push_back(coefficient_json(c));
        j["beta"] = std::move(beta);
        j["mu"] = std::move(mu);
        j["a"] = grid_json(s->a, s->n, coefficient_json);
        j["d"] = grid_json(s->d, s->n, coefficient_json);
        j["eta"] = grid_json(s->eta, s->n, kernel_json);
        j["nu"] = grid_json(s->nu, s->n, kernel_json);
    } else if (const auto* s = std::get_if<LogisticNetSpec>(&m)) {
        ojson classes = ojson::array();
        for (const auto& cl : s->classes) {
            ojson terms = ojson::array();
            for (const auto& t : cl.terms)
                terms.push_back(
                    {{"alpha", coefficient_json(t.alpha)}, {"beta", coefficient_json(t.beta)}, {"tau", delay_json(t.tau)}});
            classes.push_back({{"terms", std::move(terms)},
                               {"mu", coefficient_json(cl.mu)},
                               {"kappa", coefficient_json(cl.kappa)}});
        }
        j["classes"] = std::move(classes);
        j["d"] = grid_json(s->d, s->n, coefficient_json);
        j["sigma"] = grid_json(s->sigma, s->n, delay_json);
    } else {
        const auto& st = std::get<StageStructuredSpec>(m);
        j["alpha"] = st.alpha;
        j["beta"] = st.beta;
        j["gamma"] = st.gamma;
        j["c"] = st.c;
        j["f"] = ojson::array({kernel_json(st.f[0]), kernel_json(st.f[1])});
    }
    return j;
}

ojson initial_to_json(const InitialFunction& phi) {
    switch (phi.family) {
        case InitialFunction::Family::Constant: return {{"type", "constant"}, {"value", phi.c0}};
        case InitialFunction::Family::Sine:
            return {{"type", "sine"}, {"c0", phi.c0}, {"c1", phi.c1}, {"omega", phi.rate}};
        case InitialFunction::Family::ExpApproach:
            return {{"type", "exp_approach"}, {"c_inf", phi.c_inf}, {"c0", phi.c0}, {"rate", phi.rate}};
    }
    return nullptr;
}

}  // namespace delaycert
