#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "delaycert/analysis.hpp"
#include "delaycert/errors.hpp"
#include "delaycert/runner.hpp"

using namespace delaycert;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = DELAYCERT_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("delaycert_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run_cmd(const std::string& command, const fs::path& config, const fs::path& out_dir,
            std::optional<double> horizon = std::nullopt, bool allow_inconclusive = false) {
    RunRequest req;
    req.command = command;
    req.config_path = config.string();
    req.out_dir = out_dir.string();
    req.horizon = horizon;
    req.allow_inconclusive = allow_inconclusive;
    std::ostringstream out, err;
    return run(req, out, err);
}

Trajectory constant_trajectory(Vector x, double T, double h) {
    Trajectory t{HistoryBuffer(InitialFunction::constant(x)), {}, {}, {}};
    for (std::size_t k = 0; k * h <= T + 1e-12; ++k) {
        t.times.push_back(k * h);
        t.states.push_back(x);
    }
    return t;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("tail statistics") {
    SUBCASE("constant") {
        const auto s = tail_stats(constant_trajectory({0.8, 0.8}, 10.0, 0.1), 0.2);
        CHECK(s.tail_min == Vector{0.8, 0.8});
        CHECK(s.tail_max == Vector{0.8, 0.8});
        CHECK(s.window_drift == 0.0);
        CHECK(s.window_start == doctest::Approx(8.0));
    }
    SUBCASE("logistic approach") {
        auto cfg = load_config((kConfigs / "logistic_scalar.json").string());
        auto& lg = std::get<LogisticNetSpec>(cfg.model);
        lg.classes[0].terms[0].beta = TimeCoefficient::constant(0.0);
        lg.classes[0].terms[0].tau = DelayFunction::constant(0.0);
        lg.classes[0].mu = TimeCoefficient::constant(1.0);
        cfg.integrator.horizon = 10.0;
        const auto traj = integrate(cfg.model, InitialFunction::constant({0.5}), cfg.integrator);
        const auto s = tail_stats(traj, 0.2);
        // x' = x - x^2 from 1/2 is 1 / (1 + e^-t), increasing, so the half-window extremes sit at the ends
        const auto exact = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
        double last_early = 0.0, first_late = 10.0;
        for (double t : traj.times) {
            if (t >= 8.0 - 1e-12 && t < 9.0) last_early = std::max(last_early, t);
            if (t >= 9.0) first_late = std::min(first_late, t);
        }
        CHECK(s.tail_min[0] == doctest::Approx(exact(8.0)).epsilon(1e-6));
        CHECK(s.tail_max[0] == doctest::Approx(exact(10.0)).epsilon(1e-6));
        const double drift = std::max(exact(first_late) - exact(8.0), exact(10.0) - exact(last_early));
        CHECK(s.window_drift == doctest::Approx(drift).epsilon(1e-4));
    }
    SUBCASE("forced oscillation, checked against a doubled horizon") {
        auto cfg = load_config((kConfigs / "nonaut_lv.json").string());
        const auto phi = InitialFunction::constant({1.0, 1.0});
        const auto a = tail_stats(integrate(cfg.model, phi, cfg.integrator), 0.2);
        cfg.integrator.horizon *= 2.0;
        const auto b = tail_stats(integrate(cfg.model, phi, cfg.integrator), 0.2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(a.tail_min[i] < a.tail_max[i] - 0.01);
            CHECK(std::abs(a.tail_min[i] - b.tail_min[i]) < 1e-3);
            CHECK(std::abs(a.tail_max[i] - b.tail_max[i]) < 1e-3);
        }
        CHECK(a.window_drift < 1e-3);
    }
    SUBCASE("bad windows") {
        const auto t = constant_trajectory({1.0}, 1.0, 0.1);
        CHECK_THROWS_AS(tail_stats(t, 0.0), ConfigError);
        CHECK_THROWS_AS(tail_stats(t, 1.0), ConfigError);
        CHECK_THROWS_AS(tail_stats(constant_trajectory({1.0}, 1.0, 1.0), 0.2), ConfigError);
    }
}

TEST_CASE("verdicts") {
    SUBCASE("logistic bounds hold on a simulated tail") {
        const auto cfg = load_config((kConfigs / "logistic_scalar.json").string());
        const auto cert = certify(cfg.model);
        const auto traj = integrate(cfg.model, InitialFunction::constant({1.0}), cfg.integrator);
        const auto v = verify(cert, {tail_stats(traj, 0.2)}, {});
        REQUIRE_FALSE(v.empty());
        for (const auto& x : v) CHECK(x.status == VerdictStatus::Pass);
        CHECK(traj.states.back()[0] >= 0.3 - 1e-2);
        CHECK(traj.states.back()[0] <= 1.5 + 1e-2);
    }
    SUBCASE("uncertified model yields nothing") {
        const auto cfg = load_config((kConfigs / "stage_c2_large.json").string());
        const auto cert = certify(cfg.model);
        CHECK_FALSE(cert.persistent);
        CHECK(verify(cert, {tail_stats(constant_trajectory({1.0, 0.0}, 10.0, 0.1), 0.2)}, {}).empty());
    }
    SUBCASE("drifting tails are inconclusive, displaced tails fail") {
        const auto cfg = load_config((kConfigs / "lv_symmetric.json").string());
        const auto cert = certify(cfg.model);
        TailStats drifting = tail_stats(constant_trajectory({1.0, 1.0}, 10.0, 0.1), 0.2);
        drifting.window_drift = 0.5;
        for (const auto& x : verify(cert, {drifting}, {})) CHECK(x.status == VerdictStatus::Inconclusive);
        const auto off = tail_stats(constant_trajectory({1.2, 1.0}, 10.0, 0.1), 0.2);
        bool failed = false;
        for (const auto& x : verify(cert, {off}, {}))
            if (x.claim == "attractivity" && x.component == 0u) failed = x.status == VerdictStatus::Fail;
        CHECK(failed);
    }
    SUBCASE("dimension mismatch") {
        const auto cfg = load_config((kConfigs / "lv_symmetric.json").string());
        CHECK_THROWS_AS(verify(certify(cfg.model), {tail_stats(constant_trajectory({1.0}, 10.0, 0.1), 0.2)}, {}),
                        ConfigError);
    }
}

TEST_CASE("ordered pairs") {
    const auto pairs = ordered_pairs(2, 30, 7);
    REQUIRE(pairs.size() == 30);
    for (const auto& [lo, hi] : pairs) {
        CHECK(lo.in_bc0());
        CHECK(hi.in_bc0());
        for (double s = 0.0; s > -40.0; s -= 0.31)
            for (std::size_t i = 0; i < 2; ++i) CHECK(lo.value(i, s) <= hi.value(i, s));
    }
    const auto again = ordered_pairs(2, 30, 7);
    CHECK(initial_to_json(again[5].second) == initial_to_json(pairs[5].second));
}

TEST_CASE("closed-form history extrema") {
    const auto s = InitialFunction::sine({1.0, 2.0}, {0.5, 0.25}, 3.0);
    CHECK(history_inf(s) == Vector{0.5, 1.75});
    CHECK(history_sup(s) == Vector{1.5, 2.25});
    const auto e = InitialFunction::exp_approach({2.0}, {0.5}, 1.0);
    CHECK(history_inf(e) == Vector{0.5});
    CHECK(history_sup(e) == Vector{2.0});
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    SUBCASE("uncertified model exits cleanly with a note") {
        CHECK(run_cmd("verify", kConfigs / "stage_c2_large.json", dir / "c2") == kExitOk);
        const auto report = nlohmann::json::parse(slurp(dir / "c2" / "report.json"));
        CHECK(report["verdicts"].empty());
        bool noted = false;
        for (const auto& n : report["notes"]) noted |= n.get<std::string>().find("not certified") != std::string::npos;
        CHECK(noted);
    }
    SUBCASE("malformed json") {
        CHECK(run_cmd("verify", write_config(dir, "bad.json", "{\"model\": [1, 2"), dir / "bad") == kExitConfig);
    }
    SUBCASE("missing file") {
        CHECK(run_cmd("check", dir / "nope.json", dir / "nope") == kExitConfig);
    }
    SUBCASE("unknown key") {
        std::string text = slurp(kConfigs / "lv_symmetric.json");
        text.insert(text.find('{') + 1, "\"colour\": 1,");
        CHECK(run_cmd("check", write_config(dir, "extra.json", text), dir / "extra") == kExitConfig);
    }
    SUBCASE("weight rate above the damping") {
        std::string text = slurp(kConfigs / "stage_c2_large.json");
        text.replace(text.find("\"analysis\": {"), 13, "\"analysis\": {\"weight_rate\": 2.0, ");
        CHECK(run_cmd("check", write_config(dir, "rate.json", text), dir / "rate") == kExitConfig);
    }
    SUBCASE("unknown command") {
        CHECK(run_cmd("frobnicate", kConfigs / "lv_symmetric.json", dir / "x") == kExitConfig);
    }
    SUBCASE("blow-up names the trajectory") {
        const auto p = write_config(dir, "boom.json", R"({
          "model": {"type": "cooperative_lv", "beta": [1, 1], "mu": [0.1, 0.1],
                    "a": [[0, 2], [2, 0]], "d": [[0, 0], [0, 0]],
                    "eta": {"atoms": [{"weight": 1, "delay": 0}]}, "nu": {"atoms": [{"weight": 1, "delay": 0}]}},
          "initial_conditions": [{"type": "constant", "value": 1e-12}, {"type": "constant", "value": 1.0}],
          "integrator": {"step": 0.01, "horizon": 20}
        })");
        CHECK(run_cmd("simulate", p, dir / "boom") == kExitBlowUp);
        const auto j = nlohmann::json::parse(slurp(dir / "boom" / "simulate.json"));
        CHECK(j["blow_up"]["trajectory"] == 2);
    }
    SUBCASE("short horizon is inconclusive") {
        CHECK(run_cmd("verify", kConfigs / "logistic_scalar.json", dir / "short", 5.0) == kExitFailed);
        CHECK(run_cmd("verify", kConfigs / "logistic_scalar.json", dir / "short2", 5.0, true) == kExitOk);
        const auto j = nlohmann::json::parse(slurp(dir / "short" / "report.json"));
        CHECK(j["summary"]["inconclusive"].get<int>() > 0);
        CHECK(j["summary"]["fail"] == 0);
    }
    SUBCASE("probe always succeeds") {
        CHECK(run_cmd("probe", kConfigs / "stage_c2_large.json", dir / "probe") == kExitOk);
        const auto j = nlohmann::json::parse(slurp(dir / "probe" / "probe.json"));
        CHECK(j["passed"] == false);
    }
}

TEST_CASE("command outputs") {
    const auto dir = scratch("outputs");
    CHECK(run_cmd("check", kConfigs / "logistic_network.json", dir) == kExitOk);
    const auto cert = nlohmann::json::parse(slurp(dir / "certificate.json"));
    CHECK(cert["certificate"]["bounds"]["M0"] == 1.75);
    CHECK(cert["weight"]["family"] == "exponential");

    CHECK(run_cmd("bounds", kConfigs / "stage_c2_large.json", dir) == kExitOk);
    CHECK(fs::exists(dir / "bounds.json"));

    CHECK(run_cmd("iterate", kConfigs / "stage_symmetric.json", dir) == kExitOk);
    const auto its = nlohmann::json::parse(slurp(dir / "iterates.json"));
    CHECK(slurp(dir / "iterates.csv").rfind("n,delta,l1,l2,u1,u2\n", 0) == 0);
    CHECK(its.contains("iteration"));

    CHECK(run_cmd("iterate", kConfigs / "lv_symmetric.json", dir) == kExitConfig);
}

TEST_CASE("identical runs are byte-identical") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run_cmd("verify", kConfigs / "logistic_network.json", a) == kExitOk);
    REQUIRE(run_cmd("verify", kConfigs / "logistic_network.json", b) == kExitOk);
    for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        REQUIRE(fs::exists(b / name));
        CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name.string());
    }
}

TEST_CASE("doubling the horizon keeps passes") {
    const auto a = scratch("double_a"), b = scratch("double_b");
    const auto cfg = kConfigs / "lv_negative_beta.json";
    REQUIRE(run_cmd("verify", cfg, a) == kExitOk);
    const double T = load_config(cfg.string()).integrator.horizon;
    CHECK(run_cmd("verify", cfg, b, 2.0 * T) == kExitOk);
    const auto ja = nlohmann::json::parse(slurp(a / "report.json"));
    const auto jb = nlohmann::json::parse(slurp(b / "report.json"));
    REQUIRE(ja["verdicts"].size() == jb["verdicts"].size());
    for (std::size_t k = 0; k < ja["verdicts"].size(); ++k)
        if (ja["verdicts"][k]["status"] == "pass") CHECK(jb["verdicts"][k]["status"] == "pass");
}

TEST_CASE("command-line front end") {
    const auto dir = scratch("cli");
    const std::string cli = DELAYCERT_CLI;
    const auto bad = write_config(dir, "bad.json", "not json");
    auto status = [](int raw) { return WEXITSTATUS(raw); };
    CHECK(status(std::system((cli + " check " + bad.string() + " --out-dir " + dir.string() + " > /dev/null 2>&1").c_str())) == 2);
    CHECK(status(std::system((cli + " check --bogus > /dev/null 2>&1").c_str())) == 2);
    CHECK(status(std::system((cli + " check " + (kConfigs / "lv_symmetric.json").string() + " --out-dir " +
                              (dir / "ok").string() + " > /dev/null 2>&1")
                                 .c_str())) == 0);
}
