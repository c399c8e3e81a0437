// eulerlab: pseudospectral 2D Euler laboratory command-line driver.
//
// Subcommands: evolve, stability, theorem1, flowcheck, boxcheck, norms.
// Exit codes: 0 success, 1 failed check, 2 invalid config or input,
// 3 numerical abort.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <eulerlab/eulerlab.hpp>

namespace fs = std::filesystem;
using namespace eulerlab;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

struct RunContext {
    std::string command;
    std::string config_path;
    std::string config_text;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string started;
    std::vector<std::string> outputs;

    void note(const std::string& name) { outputs.push_back(name); }

    void write_manifest() const {
        json m;
        m["command"] = command;
        m["config_path"] = config_path;
        m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(config_text));
        m["seed"] = seed;
        m["tool_version"] = version_string;
        m["started"] = started;
        m["finished"] = utc_now();
        m["outputs"] = outputs;
        write_json_file(m, out_dir + "/manifest.json");
    }
};

RunContext make_context(const std::string& command, const std::string& config_path,
                        const std::string& config_text, const std::string& out_dir,
                        std::uint64_t seed) {
    fs::create_directories(out_dir);
    RunContext ctx;
    ctx.command = command;
    ctx.config_path = config_path;
    ctx.config_text = config_text;
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.started = utc_now();
    // byte-exact copy; the manifest hash refers to this file
    std::ofstream copy(out_dir + "/config.cfg", std::ios::binary);
    copy << config_text;
    ctx.note("config.cfg");
    return ctx;
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// sidecar next to a vorticity checkpoint
void write_checkpoint(const RealField& f, double t, const std::string& config_text,
                      const std::string& stem) {
    write_field_binary(f, stem + ".elf2");
    json side;
    side["t"] = t;
    side["L"] = f.grid().box_length;
    side["n"] = f.n();
    side["config"] = config_text;
    write_json_file(side, stem + ".json");
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;
    bool freeze = false;
};

ExperimentConfig load_experiment(const CommonArgs& args, std::string& config_text) {
    const ConfigFile file = ConfigFile::parse_file(args.config_path);
    config_text = file.raw_text();
    ExperimentConfig cfg = ExperimentConfig::from(file);
    if (args.seed) cfg.data.seed = *args.seed;
    if (args.freeze) cfg.solver.freeze = true;
    return cfg;
}

std::size_t worker_count(const CommonArgs& args) {
    if (args.workers > 0) return args.workers;
    if (const char* env = std::getenv("EULERLAB_WORKERS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

int cmd_evolve(const CommonArgs& args) {
    std::string config_text;
    const ExperimentConfig cfg = load_experiment(args, config_text);
    RunContext ctx =
        make_context("evolve", args.config_path, config_text, args.out_dir, cfg.data.seed);

    const RealField omega0 = cfg.make_initial_field();

    json frame_index;
    frame_index["n"] = cfg.grid.n;
    frame_index["box_length"] = cfg.grid.box_length;
    frame_index["frames"] = json::array();
    const std::string frame_dir = ctx.out_dir + "/frames";
    std::size_t frame_id = 0;
    FrameSink sink;
    if (cfg.history_every > 0) {
        fs::create_directories(frame_dir);
        sink.every = cfg.history_every;
        sink.fn = [&](const SolverState& s) {
            char name[64];
            std::snprintf(name, sizeof name, "ux_%06zu.elf2", frame_id);
            const std::string ux = name;
            std::snprintf(name, sizeof name, "uy_%06zu.elf2", frame_id);
            const std::string uy = name;
            std::snprintf(name, sizeof name, "omega_%06zu.elf2", frame_id);
            const std::string om = name;
            write_field_binary(s.u.x_component, frame_dir + "/" + ux);
            write_field_binary(s.u.y_component, frame_dir + "/" + uy);
            write_field_binary(s.omega, frame_dir + "/" + om);
            frame_index["frames"].push_back(
                {{"t", s.t}, {"ux", ux}, {"uy", uy}, {"omega", om}});
            ++frame_id;
        };
    }

    const auto [end_state, ledger] = evolve(omega0, cfg.solver, sink);

    // checkpoints hold the datum the solver actually advanced (band-limited)
    write_checkpoint(detail::initial_state(omega0, cfg.solver).omega, 0.0, config_text,
                     ctx.out_dir + "/omega_initial");
    ctx.note("omega_initial.elf2");
    write_checkpoint(end_state.omega, end_state.t, config_text, ctx.out_dir + "/omega_final");
    ctx.note("omega_final.elf2");
    write_ledger_csv(ledger, ctx.out_dir + "/ledger.csv");
    ctx.note("ledger.csv");
    if (cfg.history_every > 0) {
        write_json_file(frame_index, frame_dir + "/index.json");
        ctx.note("frames/index.json");
    }
    ctx.write_manifest();
    std::printf("evolve: t_end=%s samples=%zu l2=%s\n", fmt17(end_state.t).c_str(),
                ledger.rows.size(), fmt17(ledger.rows.back().l2).c_str());
    return 0;
}

int cmd_stability(const CommonArgs& args) {
    std::string config_text;
    const ExperimentConfig cfg = load_experiment(args, config_text);
    RunContext ctx =
        make_context("stability", args.config_path, config_text, args.out_dir, cfg.data.seed);

    const std::vector<double>& deltas = cfg.deltas;
    std::vector<StabilityReport> reports(deltas.size());
    const StabilityOptions opts{cfg.samples_per_unit_time};

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= deltas.size() || failed.load()) return;
            try {
                reports[k] = run_pair(cfg.data, {cfg.perturbation.mode, deltas[k]},
                                      SobolevOrder(cfg.beta), cfg.grid, cfg.solver, opts);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                failure = e.what();
            }
        }
    };
    const std::size_t pool =
        std::min(worker_count(args), std::max<std::size_t>(deltas.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < pool; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (failed.load()) throw std::runtime_error(failure);

    json summary;
    summary["alpha"] = cfg.data.alpha;
    summary["beta"] = cfg.beta;
    summary["gamma_theory"] = cfg.beta / (1.0 + cfg.beta);
    summary["deltas"] = deltas;
    summary["runs"] = json::array();
    bool all_ok = true;
    std::vector<double> fit_deltas, fit_errors;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "stability_%03zu.csv", k);
        write_stability_csv(reports[k], ctx.out_dir + "/" + name);
        ctx.note(name);
        summary["runs"].push_back(stability_summary_json(reports[k]));
        all_ok = all_ok && reports[k].all_checks_ok();
        const double err = reports[k].rows.empty() ? 0.0 : reports[k].rows.back().dl2;
        if (deltas[k] > 0.0 && err > 0.0) {
            fit_deltas.push_back(deltas[k]);
            fit_errors.push_back(err);
        }
    }
    summary["all_checks_ok"] = all_ok;
    if (fit_deltas.size() >= 3) {
        const RateFit fit = fit_rate(fit_deltas, fit_errors);
        summary["fit"] = {{"gamma_fit", fit.gamma}, {"C_fit", fit.C}, {"r2", fit.r2}};
    } else {
        summary["fit"] = nullptr;
        std::fprintf(stderr,
                     "warning: %zu usable ladder points; the rate fit needs at least 3\n",
                     fit_deltas.size());
    }
    write_json_file(summary, ctx.out_dir + "/summary.json");
    ctx.note("summary.json");
    ctx.write_manifest();
    std::printf("stability: runs=%zu all_checks_ok=%s\n", deltas.size(),
                all_ok ? "true" : "false");
    return 0;
}

int cmd_theorem1(const CommonArgs& args) {
    std::string config_text;
    const ExperimentConfig cfg = load_experiment(args, config_text);
    RunContext ctx =
        make_context("theorem1", args.config_path, config_text, args.out_dir, cfg.data.seed);
    if (cfg.approx_parameters.empty())
        throw ConfigError("theorem1 requires analysis.approximation_parameters");

    const RefinementReport report =
        theorem1_experiment(cfg.data, cfg.approx_kind, cfg.approx_parameters, cfg.grid,
                            cfg.solver, {cfg.samples_per_unit_time});
    write_refinement_csv(report, ctx.out_dir + "/refinement.csv");
    ctx.note("refinement.csv");

    json summary;
    summary["kind"] =
        cfg.approx_kind == ApproximationKind::mollification ? "mollification" : "truncation";
    summary["rows"] = json::array();
    for (const RefinementRow& r : report.rows)
        summary["rows"].push_back({{"parameter", r.parameter},
                                   {"initial_error", r.initial_error},
                                   {"sup_error", r.sup_error}});
    write_json_file(summary, ctx.out_dir + "/theorem1.json");
    ctx.note("theorem1.json");
    ctx.write_manifest();
    std::printf("theorem1: members=%zu first_sup=%s last_sup=%s\n", report.rows.size(),
                fmt17(report.rows.front().sup_error).c_str(),
                fmt17(report.rows.back().sup_error).c_str());
    return 0;
}

int cmd_flowcheck(const std::string& run_dir, double t, std::optional<double> bound_flag,
                  const std::string& sample_csv) {
    const std::string frame_dir = run_dir + "/frames";
    std::ifstream index_in(frame_dir + "/index.json");
    if (!index_in) throw std::runtime_error("flowcheck: missing " + frame_dir + "/index.json");
    json index;
    index_in >> index;
    const auto& frames = index.at("frames");
    if (frames.size() < 2)
        throw std::runtime_error("flowcheck: need at least 2 recorded frames");

    // nearest recorded frame to the requested time
    std::size_t pick = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const double dt = std::fabs(frames[k].at("t").get<double>() - t);
        if (dt < best) {
            best = dt;
            pick = k;
        }
    }
    const double t_used = frames[pick].at("t").get<double>();
    if (!frames[pick].contains("omega"))
        throw std::runtime_error("flowcheck: run was recorded without vorticity checkpoints");

    const RealField omega_bar =
        read_field_binary(frame_dir + "/" + frames[0].at("omega").get<std::string>());
    const RealField omega_t =
        read_field_binary(frame_dir + "/" + frames[pick].at("omega").get<std::string>());
    const VelocityHistory history = read_history(frame_dir);

    double bound = 1e-4;
    if (bound_flag) {
        bound = *bound_flag;
    } else {
        std::ifstream cfg_in(run_dir + "/config.cfg");
        if (cfg_in) {
            std::ostringstream buf;
            buf << cfg_in.rdbuf();
            bound = ConfigFile::parse_string(buf.str())
                        .get_double("analysis", "flow_error_bound", 1e-4);
        }
    }

    const double err = check_lagrangian_representation(omega_bar, history, omega_t, t_used);
    const double scale = lp_norm(omega_bar, Lp::L2);
    const double rel = scale > 0.0 ? err / scale : 0.0;
    const bool pass = rel <= bound;

    if (!sample_csv.empty()) {
        const Grid2D& g = history.grid();
        std::vector<Vec2> points;
        points.reserve(g.size());
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j) points.push_back({g.coord(i), g.coord(j)});
        write_flow_sample_csv(backward_flow(history, t_used, points), sample_csv);
    }

    json result;
    result["t"] = t_used;
    result["error"] = err;
    result["relative_error"] = rel;
    result["bound"] = bound;
    result["pass"] = pass;
    write_json_file(result, run_dir + "/flowcheck.json");
    std::printf("flowcheck: t=%s relative_error=%s bound=%s %s\n", fmt17(t_used).c_str(),
                fmt17(rel).c_str(), fmt17(bound).c_str(), pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int cmd_boxcheck(const CommonArgs& args) {
    std::string config_text;
    const ExperimentConfig cfg = load_experiment(args, config_text);
    RunContext ctx =
        make_context("boxcheck", args.config_path, config_text, args.out_dir, cfg.data.seed);
    if (cfg.field_kind != FieldKind::blobs)
        throw ConfigError("boxcheck requires blob initial data");

    const double discrepancy = box_doubling_check(cfg.data, cfg.grid, cfg.solver);
    const double scale = lp_norm(generate_initial_data(cfg.data, cfg.grid), Lp::L2);
    const double rel = scale > 0.0 ? discrepancy / scale : 0.0;
    const bool pass = rel <= cfg.box_error_fraction;

    json result;
    result["discrepancy"] = discrepancy;
    result["relative_discrepancy"] = rel;
    result["bound"] = cfg.box_error_fraction;
    result["pass"] = pass;
    write_json_file(result, ctx.out_dir + "/boxcheck.json");
    ctx.note("boxcheck.json");
    ctx.write_manifest();
    std::printf("boxcheck: relative_discrepancy=%s bound=%s %s\n", fmt17(rel).c_str(),
                fmt17(cfg.box_error_fraction).c_str(), pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int cmd_norms(const std::string& field_path, double box_length, double beta,
              std::optional<double> alpha, const std::string& out_path) {
    const bool is_csv =
        field_path.size() > 4 && field_path.substr(field_path.size() - 4) == ".csv";
    const RealField f =
        is_csv ? read_field_csv(field_path, box_length) : read_field_binary(field_path);
    NormReport report;
    report.l1 = lp_norm(f, Lp::L1);
    report.l2 = lp_norm(f, Lp::L2);
    report.linf = lp_norm(f, Lp::Linf);
    const SpectralField F = forward_transform(f);
    const bool zero_mean = std::abs(F(0, 0)) <= 1e-10 * std::sqrt(spectral_energy(F));
    if (zero_mean) report.hs_values.emplace_back(-1.0, hs_norm(F, SobolevOrder(-1.0)));
    report.hs_values.emplace_back(beta, hs_norm(F, SobolevOrder(beta)));
    if (alpha) report.holder_seminorm = holder_seminorm(f, HolderExponent(*alpha));

    const json j = norm_report_json(report);
    std::printf("%s\n", j.dump(2).c_str());
    if (!out_path.empty()) write_json_file(j, out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral 2D incompressible Euler laboratory"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string run_dir;
    double flow_t = 1.0;
    std::optional<double> flow_bound;
    std::string flow_sample_csv;
    std::string field_path;
    double field_box_length = two_pi;
    double norms_beta = 0.25;
    std::optional<double> norms_alpha;
    std::string norms_out;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config_path, "experiment config file")->required();
        cmd->add_option("--out", common.out_dir, "output directory")->required();
        cmd->add_option("--seed", common.seed, "override [data] seed");
        cmd->add_option("--workers", common.workers,
                        "worker threads (default: EULERLAB_WORKERS or hardware)");
        cmd->add_flag("--freeze", common.freeze, "replace the solver by the identity");
    };

    CLI::App* evolve_cmd = app.add_subcommand("evolve", "advance one vorticity field");
    add_common(evolve_cmd);
    CLI::App* stability_cmd =
        app.add_subcommand("stability", "paired runs over the delta ladder with chain checks");
    add_common(stability_cmd);
    CLI::App* theorem1_cmd =
        app.add_subcommand("theorem1", "data-refinement convergence experiment");
    add_common(theorem1_cmd);
    CLI::App* boxcheck_cmd =
        app.add_subcommand("boxcheck", "periodization control via box doubling");
    add_common(boxcheck_cmd);

    CLI::App* flowcheck_cmd =
        app.add_subcommand("flowcheck", "Lagrangian representation error of a recorded run");
    flowcheck_cmd->add_option("--run", run_dir, "output directory of an evolve run")
        ->required();
    flowcheck_cmd->add_option("--t", flow_t, "query time (nearest recorded frame)");
    flowcheck_cmd->add_option("--bound", flow_bound, "relative error bound");
    flowcheck_cmd->add_option("--sample-csv", flow_sample_csv,
                              "also write the grid flow sample as x,y,X0x,X0y");

    CLI::App* norms_cmd = app.add_subcommand("norms", "norm table for a stored field");
    norms_cmd->add_option("--field", field_path, "field file (.elf2 or .csv)")->required();
    norms_cmd->add_option("--box-length", field_box_length, "box length for .csv input");
    norms_cmd->add_option("--beta", norms_beta, "fractional order for the H^beta column");
    norms_cmd->add_option("--alpha", norms_alpha, "exponent for the Holder column");
    norms_cmd->add_option("--out", norms_out, "also write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto report_error = [&](const std::string& what, int code) {
        json err;
        err["error"] = what;
        err["exit_code"] = code;
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        if (!common.out_dir.empty()) {
            std::error_code ignore;
            fs::create_directories(common.out_dir, ignore);
            std::ofstream out(common.out_dir + "/error.json");
            if (out) out << err.dump(2) << "\n";
        }
        return code;
    };

    try {
        if (evolve_cmd->parsed()) return cmd_evolve(common);
        if (stability_cmd->parsed()) return cmd_stability(common);
        if (theorem1_cmd->parsed()) return cmd_theorem1(common);
        if (boxcheck_cmd->parsed()) return cmd_boxcheck(common);
        if (flowcheck_cmd->parsed())
            return cmd_flowcheck(run_dir, flow_t, flow_bound, flow_sample_csv);
        if (norms_cmd->parsed())
            return cmd_norms(field_path, field_box_length, norms_beta, norms_alpha, norms_out);
    } catch (const NumericalError& e) {
        return report_error(e.what(), 3);
    } catch (const std::exception& e) {
        return report_error(e.what(), 2);
    }
    return 2;
}
