#include "delaycert/runner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "delaycert/errors.hpp"

namespace delaycert {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

ExperimentConfig resolve_config(const RunRequest& req) {
    ExperimentConfig cfg = load_config(req.config_path);
    if (req.seed) cfg.analysis.seed = *req.seed;
    if (req.horizon) cfg.integrator.horizon = *req.horizon;
    if (req.step) cfg.integrator.step = *req.step;
    if (req.out_dir) cfg.output_dir = *req.out_dir;
    try {
        cfg.integrator.validate();
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

IterationResult run_iteration(const ExperimentConfig& cfg, const Certificate& cert) {
    const auto* spec = std::get_if<StageStructuredSpec>(&cfg.model);
    if (!spec) throw ConfigError("the bounding iteration needs a stage_structured model");
    if (!cert.stage) throw ContractError("the stage model is not certified");
    const double delta0 = cfg.analysis.delta0.value_or(cert.stage->delta);
    try {
        return iterate_bounds(*spec, delta0, cfg.analysis.schedule, cfg.analysis.max_levels, cfg.analysis.iterate_tol);
    } catch (const ContractError& e) {
        throw ConfigError(std::string("analysis.delta0: ") + e.what());
    } catch (const BoundCollapseError& e) {
        throw ConfigError(std::string("analysis.delta0: ") + e.what());
    }
}

VerifyRun run_verify(const ExperimentConfig& cfg) {
    VerifyRun r;
    r.certificate = certify(cfg.model);
    r.members = run_ensemble(cfg.model, cfg.initial_conditions, cfg.integrator);
    for (std::size_t k = 0; k < r.members.size(); ++k) {
        const auto& m = r.members[k];
        if (m.ok()) continue;
        if (m.blow_up_time >= 0.0) {
            if (!r.blow_up) r.blow_up = k;
        } else {
            throw ConfigError("trajectory " + std::to_string(k) + ": " + m.error);
        }
    }
    if (r.blow_up) return r;

    for (const auto& m : r.members) r.stats.push_back(tail_stats(*m.trajectory, cfg.analysis.tail_window));

    VerifyContext ctx;
    ctx.histories = cfg.initial_conditions;
    if (r.certificate.stage) {
        r.iteration = run_iteration(cfg, r.certificate);
        ctx.iterates = r.iteration->levels;
        if (!r.iteration->monotonicity_violations.empty())
            r.notes.push_back("bounding iteration lost monotonicity");
    }
    const VerifyOptions vo{cfg.analysis.bound_tol, cfg.analysis.eq_tol, cfg.analysis.drift_tol};
    r.verdicts = verify(r.certificate, r.stats, vo, ctx);
    if (!r.certificate.persistent) r.notes.push_back("not certified: no verdicts to check");

    if (is_cooperative(cfg.model) && cfg.analysis.ordered_pairs > 0) {
        const auto pairs = ordered_pairs(model_dim(cfg.model), cfg.analysis.ordered_pairs, cfg.analysis.seed);
        std::vector<InitialFunction> flat;
        for (const auto& [lo, hi] : pairs) {
            flat.push_back(lo);
            flat.push_back(hi);
        }
        const auto runs = run_ensemble(cfg.model, flat, cfg.integrator);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto& lo = runs[2 * p];
            const auto& hi = runs[2 * p + 1];
            if (!lo.ok() || !hi.ok()) {
                r.notes.push_back("ordered pair " + std::to_string(p) + " failed to integrate");
                r.ordering.push_back({p, std::numeric_limits<double>::infinity(), false});
                continue;
            }
            const double v = ordering_violation(*lo.trajectory, *hi.trajectory);
            r.ordering.push_back({p, v, v <= kOrderTolerance});
        }
        for (const auto& o : r.ordering)
            r.verdicts.push_back({"monotone_order", o.pair, std::nullopt, std::nullopt, 0.0, o.violation,
                                  kOrderTolerance - o.violation,
                                  o.passed ? VerdictStatus::Pass : VerdictStatus::Fail});
    }
    return r;
}

namespace {

ojson integrator_json(const IntegratorConfig& c) {
    return {{"method", "rk4"},
            {"step", c.step},
            {"horizon", c.horizon},
            {"tail_tol", c.tail_tol},
            {"positivity_floor", c.positivity_floor},
            {"output_stride", c.output_stride}};
}

ojson header_json(const ExperimentConfig& cfg, const std::string& command) {
    ojson j;
    j["config"] = cfg.name;
    j["command"] = command;
    j["model"] = model_to_json(cfg.model);
    j["weight"] = {{"family", "exponential"}, {"rate", cfg.analysis.weight_rate}};
    j["seed"] = cfg.analysis.seed;
    return j;
}

ojson finite_or_null(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson trajectory_json(std::size_t k, const EnsembleMember& m, const std::string& file) {
    ojson j;
    j["index"] = k + 1;
    j["file"] = file;
    if (!m.ok()) {
        j["error"] = m.error;
        j["blow_up_time"] = m.blow_up_time >= 0.0 ? ojson(m.blow_up_time) : ojson(nullptr);
        return j;
    }
    const auto& d = m.trajectory->diagnostics;
    j["final_state"] = m.trajectory->states.back();
    j["min_value"] = d.min_value;
    j["min_value_time"] = d.min_value_time;
    j["positivity_violations"] = d.positivity_violations;
    j["max_junction_residual"] = d.max_junction_residual;
    return j;
}

ojson iteration_json(const IterationResult& it) {
    ojson j;
    j["schedule"] = schedule_name(it.schedule);
    j["levels"] = it.levels.size();
    j["converged"] = it.converged;
    j["final_step"] = it.final_step;
    j["final_gap"] = it.final_gap;
    const auto& first = it.levels.front();
    const auto& last = it.levels.back();
    j["first"] = {{"delta", first.delta}, {"lower", first.lower}, {"upper", first.upper}};
    j["last"] = {{"level", last.level}, {"delta", last.delta}, {"lower", last.lower}, {"upper", last.upper}};
    j["monotonicity_violations"] = it.monotonicity_violations;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const fs::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

fs::path prepare_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::string trajectory_file(std::size_t k) { return "trajectory_" + std::to_string(k + 1) + ".csv"; }

void write_trajectories(const fs::path& dir, const ExperimentConfig& cfg, const std::vector<EnsembleMember>& ms) {
    for (std::size_t k = 0; k < ms.size(); ++k) {
        if (!ms[k].ok()) continue;
        std::ostringstream os;
        write_trajectory_csv(os, *ms[k].trajectory, cfg.integrator.output_stride);
        write_text(dir / trajectory_file(k), os.str());
    }
}

struct Tally {
    std::size_t pass = 0, fail = 0, inconclusive = 0;
};

Tally tally(const std::vector<Verdict>& vs) {
    Tally t;
    for (const auto& v : vs) {
        if (v.status == VerdictStatus::Pass) ++t.pass;
        if (v.status == VerdictStatus::Fail) ++t.fail;
        if (v.status == VerdictStatus::Inconclusive) ++t.inconclusive;
    }
    return t;
}

int cmd_check(const ExperimentConfig& cfg, std::ostream& out) {
    const Certificate cert = certify(cfg.model);
    const fs::path dir = prepare_dir(cfg);
    ojson j = header_json(cfg, "check");
    j["certificate"] = certificate_to_json(cert);
    write_json(dir / "certificate.json", j);
    out << cfg.name << ": " << cert.family << " persistent=" << cert.persistent << " permanent=" << cert.permanent
        << " attractor=" << cert.attractor << '\n';
    for (const auto& c : cert.conditions)
        out << "  " << c.name << ": " << (c.holds() ? "holds" : c.status == ConditionStatus::Inconclusive ? "inconclusive" : "fails")
            << " (margin " << format_double(c.margin) << ")\n";
    for (const auto& n : cert.notes) out << "  note: " << n << '\n';
    return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto members = run_ensemble(cfg.model, cfg.initial_conditions, cfg.integrator);
    const fs::path dir = prepare_dir(cfg);
    write_trajectories(dir, cfg, members);
    ojson j = header_json(cfg, "simulate");
    j["integrator"] = integrator_json(cfg.integrator);
    ojson trajs = ojson::array();
    int code = kExitOk;
    ojson blow_up = nullptr;
    for (std::size_t k = 0; k < members.size(); ++k) {
        trajs.push_back(trajectory_json(k, members[k], trajectory_file(k)));
        if (!members[k].ok()) {
            err << "trajectory " << k + 1 << ": " << members[k].error << '\n';
            if (members[k].blow_up_time >= 0.0) {
                if (blow_up.is_null()) blow_up = {{"trajectory", k + 1}, {"time", members[k].blow_up_time}};
                code = kExitBlowUp;
            } else if (code == kExitOk) {
                code = kExitConfig;
            }
        }
    }
    j["trajectories"] = std::move(trajs);
    j["blow_up"] = std::move(blow_up);
    write_json(dir / "simulate.json", j);
    out << cfg.name << ": " << members.size() << " trajectories written to " << dir.string() << '\n';
    return code;
}

int cmd_bounds(const ExperimentConfig& cfg, std::ostream& out) {
    const Certificate cert = certify(cfg.model);
    const fs::path dir = prepare_dir(cfg);
    ojson j = header_json(cfg, "bounds");
    j["theorem"] = cert.family;
    j["certified"] = cert.persistent;
    j["bounds"] = certificate_to_json(cert)["bounds"];
    out << cfg.name << ": ";
    if (cert.bounds) out << "m0=" << format_double(cert.bounds->lower) << " M0=" << format_double(cert.bounds->upper);
    if (cert.stage) {
        const auto it = run_iteration(cfg, cert);
        j["iteration"] = iteration_json(it);
        out << "u*=(" << format_double(cert.stage->equilibrium[0]) << ", " << format_double(cert.stage->equilibrium[1])
            << ") delta=" << format_double(cert.stage->delta);
    }
    if (auto x = cert.attractor_point(); x && !cert.stage) {
        out << "x*=(";
        for (std::size_t i = 0; i < x->size(); ++i) out << (i ? ", " : "") << format_double((*x)[i]);
        out << ")";
    }
    if (!cert.persistent) out << "not certified";
    out << '\n';
    write_json(dir / "bounds.json", j);
    return kExitOk;
}

int cmd_iterate(const ExperimentConfig& cfg, std::ostream& out) {
    if (!std::holds_alternative<StageStructuredSpec>(cfg.model))
        throw ConfigError("iterate needs a stage_structured model");
    const Certificate cert = certify(cfg.model);
    const fs::path dir = prepare_dir(cfg);
    ojson j = header_json(cfg, "iterate");
    if (!cert.stage) {
        j["certified"] = false;
        write_json(dir / "iterates.json", j);
        out << cfg.name << ": not certified, nothing to iterate\n";
        return kExitOk;
    }
    const IterationResult it = run_iteration(cfg, cert);
    std::ostringstream csv;
    write_iterates_csv(csv, it.levels);
    write_text(dir / "iterates.csv", csv.str());
    j["certified"] = true;
    j["equilibrium"] = cert.stage->equilibrium;
    j["iteration"] = iteration_json(it);
    write_json(dir / "iterates.json", j);
    const auto& last = it.levels.back();
    out << cfg.name << ": " << it.levels.size() << " levels (" << schedule_name(it.schedule) << "), last box ["
        << format_double(last.lower[0]) << ", " << format_double(last.upper[0]) << "] x ["
        << format_double(last.lower[1]) << ", " << format_double(last.upper[1]) << "]\n";
    return kExitOk;
}

int cmd_probe(const ExperimentConfig& cfg, std::ostream& out) {
    ProbeOptions po;
    po.n_pairs = cfg.analysis.probe_pairs;
    po.seed = cfg.analysis.seed;
    const ProbeReport rep = quasimonotone_probe(cfg.model, po);
    const fs::path dir = prepare_dir(cfg);
    ojson j = header_json(cfg, "probe");
    j["passed"] = rep.passed;
    j["pairs_checked"] = rep.pairs_checked;
    if (rep.witness) {
        const auto& w = *rep.witness;
        j["witness"] = {{"component", w.component + 1},
                        {"lower", initial_to_json(w.lower)},
                        {"upper", initial_to_json(w.upper)},
                        {"f_lower", w.f_lower},
                        {"f_upper", w.f_upper}};
    } else {
        j["witness"] = nullptr;
    }
    write_json(dir / "probe.json", j);
    out << cfg.name << ": quasimonotone probe " << (rep.passed ? "found no violation" : "found a violation") << " in "
        << rep.pairs_checked << " pairs\n";
    return kExitOk;
}

}  // namespace

ojson verify_report(const ExperimentConfig& cfg, const VerifyRun& r) {
    ojson j = header_json(cfg, "verify");
    j["integrator"] = integrator_json(cfg.integrator);
    j["analysis"] = {{"tail_window", cfg.analysis.tail_window},
                     {"bound_tol", cfg.analysis.bound_tol},
                     {"eq_tol", cfg.analysis.eq_tol},
                     {"drift_tol", cfg.analysis.drift_tol},
                     {"ordered_pairs", cfg.analysis.ordered_pairs}};
    j["certificate"] = certificate_to_json(r.certificate);
    ojson hist = ojson::array();
    for (const auto& phi : cfg.initial_conditions) hist.push_back(initial_to_json(phi));
    j["histories"] = std::move(hist);
    ojson trajs = ojson::array();
    for (std::size_t k = 0; k < r.members.size(); ++k) {
        ojson t = trajectory_json(k, r.members[k], trajectory_file(k));
        if (k < r.stats.size()) t["tail"] = tail_stats_to_json(r.stats[k]);
        trajs.push_back(std::move(t));
    }
    j["trajectories"] = std::move(trajs);
    if (r.iteration) j["iteration"] = iteration_json(*r.iteration);
    ojson order = ojson::array();
    for (const auto& o : r.ordering)
        order.push_back({{"pair", o.pair + 1}, {"violation", finite_or_null(o.violation)}, {"passed", o.passed}});
    j["ordering"] = std::move(order);
    ojson vs = ojson::array();
    for (const auto& v : r.verdicts) vs.push_back(verdict_to_json(v));
    j["verdicts"] = std::move(vs);
    const Tally t = tally(r.verdicts);
    j["summary"] = {{"pass", t.pass},
                    {"fail", t.fail},
                    {"inconclusive", t.inconclusive},
                    {"blow_up", r.blow_up ? ojson(*r.blow_up + 1) : ojson(nullptr)}};
    j["notes"] = r.notes;
    return j;
}

namespace {

int cmd_verify(const ExperimentConfig& cfg, bool allow_inconclusive, std::ostream& out, std::ostream& err) {
    const VerifyRun r = run_verify(cfg);
    const fs::path dir = prepare_dir(cfg);
    write_trajectories(dir, cfg, r.members);
    ojson cj = header_json(cfg, "check");
    cj["certificate"] = certificate_to_json(r.certificate);
    write_json(dir / "certificate.json", cj);
    if (r.iteration) {
        std::ostringstream csv;
        write_iterates_csv(csv, r.iteration->levels);
        write_text(dir / "iterates.csv", csv.str());
    }
    write_json(dir / "report.json", verify_report(cfg, r));

    if (r.blow_up) {
        const auto& m = r.members[*r.blow_up];
        err << cfg.name << ": trajectory " << *r.blow_up + 1 << " blew up at t=" << format_double(m.blow_up_time)
            << ": " << m.error << '\n';
        return kExitBlowUp;
    }
    const Tally t = tally(r.verdicts);
    out << cfg.name << ": " << t.pass << " pass, " << t.fail << " fail, " << t.inconclusive << " inconclusive\n";
    for (const auto& n : r.notes) out << "  note: " << n << '\n';
    for (const auto& v : r.verdicts)
        if (v.status != VerdictStatus::Pass)
            out << "  " << verdict_name(v.status) << ": " << v.claim << " trajectory " << v.trajectory + 1
                << (v.component ? " component " + std::to_string(*v.component + 1) : std::string())
                << " margin " << format_double(v.margin) << '\n';
    if (t.fail > 0) return kExitFailed;
    if (t.inconclusive > 0 && !allow_inconclusive) return kExitFailed;
    return kExitOk;
}

}  // namespace

int run(const RunRequest& req, std::ostream& out, std::ostream& err) {
    try {
        const ExperimentConfig cfg = resolve_config(req);
        if (req.command == "check") return cmd_check(cfg, out);
        if (req.command == "simulate") return cmd_simulate(cfg, out, err);
        if (req.command == "bounds") return cmd_bounds(cfg, out);
        if (req.command == "iterate") return cmd_iterate(cfg, out);
        if (req.command == "verify") return cmd_verify(cfg, req.allow_inconclusive, out, err);
        if (req.command == "probe") return cmd_probe(cfg, out);
        err << "unknown command '" << req.command << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ContractError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BlowUpError& e) {
        err << "blow-up at t=" << format_double(e.time()) << ": " << e.what() << '\n';
        return kExitBlowUp;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailed;
    }
}

}  // namespace delaycert
