#include "lindblad_modes/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lindblad_modes/eigenbasis.hpp"
#include "lindblad_modes/errors.hpp"
#include "lindblad_modes/io.hpp"
#include "lindblad_modes/kernels.hpp"
#include "lindblad_modes/parallel.hpp"
#include "lindblad_modes/superalgebra.hpp"

namespace lindblad {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ModelSpec working_model(const RunConfig& cfg) {
    ModelSpec m = cfg.model;
    if (!is_two_level(m.tag)) m.dim += cfg.pad;
    return m;
}

FockOperator initial_state(const RunConfig& cfg, const ModelSpec& work, std::vector<std::string>& warnings) {
    TruncationOptions trunc;
    trunc.strict = cfg.strict;
    StateMetadata meta;
    FockOperator rho;
    if (cfg.initial.kind == StateSpec::Kind::Explicit) {
        rho = pad_to(read_explicit_matrix(cfg.initial.path), model_dims(work));
    } else {
        rho = build_state(cfg.initial, model_dims(work), trunc, &meta);
    }
    warnings.insert(warnings.end(), meta.warnings.begin(), meta.warnings.end());
    require(rho.dims() == model_dims(work), ErrorCode::DimensionMismatch, "initial state dims do not match the model");
    return rho;
}

EvolutionResult run_method(Method m, const RunConfig& cfg, const ModelSpec& work, const FockOperator& rho0) {
    const Dims dims = model_dims(cfg.model);
    switch (m) {
    case Method::Eigenmode: {
        EigenmodeOptions o;
        o.max_index = cfg.max_index;
        o.leakage.strict = cfg.strict;
        return crop_result(evolve_eigenmode(work, rho0, cfg.grid, o), dims);
    }
    case Method::Oracle: {
        OracleOptions o;
        o.kind = cfg.oracle_kind;
        o.step = cfg.oracle_step;
        o.leakage.strict = cfg.strict;
        return crop_result(evolve_oracle(work, rho0, cfg.grid, o), dims);
    }
    case Method::ClosedForm: {
        TruncationOptions t;
        t.strict = cfg.strict;
        return evolve_closed_form(cfg.model, cfg.initial, cfg.grid, t);
    }
    case Method::All: break;
    }
    fail(ErrorCode::InvalidArgument, "run_method: 'all' is not a single method");
}

std::string dump_base(const RunConfig& cfg) {
    if (!cfg.dump_path.empty()) return cfg.dump_path;
    if (!cfg.output_path.empty() && cfg.output_path != "-") return cfg.output_path + ".states";
    return "states.txt";
}

} // namespace

EvolveOutput run_evolve(const RunConfig& cfg) {
    validate(cfg);
    EvolveOutput out;
    const ModelSpec work = working_model(cfg);
    const FockOperator rho0 = initial_state(cfg, work, out.warnings);
    const std::vector<std::string> names = cfg.observables.empty() ? default_observables(cfg.model) : cfg.observables;
    const bool needs_reference = std::find(names.begin(), names.end(), "fidelity") != names.end();
    const bool closed = closed_form_supported(cfg.model, cfg.initial);

    std::vector<Method> methods;
    if (cfg.method == Method::All) {
        methods = {Method::Eigenmode, Method::Oracle};
        if (closed) methods.push_back(Method::ClosedForm);
    } else {
        methods = {cfg.method};
    }
    std::vector<EvolutionResult> results;
    for (Method m : methods) {
        results.push_back(run_method(m, cfg, work, rho0));
        for (const auto& w : results.back().warnings) out.warnings.push_back(to_string(m) + ": " + w);
    }
    std::optional<EvolutionResult> reference;
    if (needs_reference) {
        const auto it = std::find(methods.begin(), methods.end(), Method::ClosedForm);
        reference = it != methods.end() ? results[static_cast<std::size_t>(it - methods.begin())]
                                        : run_method(Method::ClosedForm, cfg, work, rho0);
    }

    ObservableTable merged;
    merged.times = results.front().times;
    merged.rows.assign(merged.times.size(), {});
    for (std::size_t k = 0; k < methods.size(); ++k) {
        const ObservableTable t =
            observables(results[k], cfg.model, names, reference ? &reference->states : nullptr);
        for (std::size_t c = 0; c < t.names.size(); ++c) {
            merged.names.push_back(methods.size() > 1 ? to_string(methods[k]) + "." + t.names[c] : t.names[c]);
            merged.is_complex.push_back(t.is_complex[c]);
            for (std::size_t r = 0; r < t.rows.size(); ++r) merged.rows[r].push_back(t.rows[r][c]);
        }
    }
    if (methods.size() > 1) {
        for (std::size_t a = 0; a < methods.size(); ++a)
            for (std::size_t b = a + 1; b < methods.size(); ++b) {
                merged.names.push_back("td." + to_string(methods[a]) + "-" + to_string(methods[b]));
                merged.is_complex.push_back(false);
                for (std::size_t r = 0; r < merged.times.size(); ++r)
                    merged.rows[r].push_back(trace_distance(results[a].states[r], results[b].states[r]));
            }
    }
    std::ostringstream csv;
    write_csv(csv, merged);
    out.csv = csv.str();

    if (cfg.dump_states) {
        const std::string base = dump_base(cfg);
        for (std::size_t k = 0; k < methods.size(); ++k) {
            std::ostringstream os;
            write_state_dump(os, results[k]);
            out.dumps.emplace_back(methods.size() > 1 ? base + "." + to_string(methods[k]) : base, os.str());
        }
    }
    return out;
}

std::string run_coeffs(const RunConfig& cfg) {
    validate(cfg);
    std::vector<std::string> warnings;
    const FockOperator rho0 = initial_state(cfg, cfg.model, warnings);
    const int m = cfg.max_index < 0 ? default_max_index(cfg.model) : cfg.max_index;
    CoefficientOptions opts;
    opts.storage = EigenstateStorage::None;
    EigenTable table = expansion_coefficients(cfg.model, rho0, m, opts);
    const ConvergenceReport report = convergence_diagnostic(table);
    double peak = 0.0;
    for (const EigenEntry& e : table.entries) peak = std::max(peak, std::abs(e.coefficient));
    const std::size_t total = table.entries.size();
    std::erase_if(table.entries, [&](const EigenEntry& e) { return std::abs(e.coefficient) <= 1e-14 * peak; });
    std::ostringstream os;
    os << "# model " << to_string(cfg.model.tag) << " dim " << cfg.model.dim << " max_index " << m << '\n';
    for (const auto& w : warnings) os << "# warning: " << w << '\n';
    for (const auto& w : table.warnings) os << "# warning: " << w << '\n';
    write_table(os, table);
    os << "# omitted " << (total - table.entries.size()) << " negligible entries\n";
    os << "# convergence: " << report.summary() << '\n';
    return os.str();
}

std::string run_bench(const RunConfig& cfg) {
    validate(cfg);
    std::vector<std::string> warnings;
    const ModelSpec work = working_model(cfg);
    const FockOperator rho0 = initial_state(cfg, work, warnings);
    const std::vector<double> times = cfg.grid.times();
    std::vector<double> taus;
    for (double t : times) taus.push_back(t - cfg.grid.t0);
    const std::size_t n = taus.size();

    // eigenmode: setup then synthesis over every point
    auto t0 = Clock::now();
    const int m = cfg.max_index < 0 ? default_max_index(work) : cfg.max_index;
    const EigenTable table = expansion_coefficients(work, rho0, m);
    const ConvergenceReport report = convergence_diagnostic(table);
    if (report.status != ConvergenceStatus::Converged)
        fail(ErrorCode::Divergence, "eigenmode expansion does not converge: " + report.summary());
    const ModeSum sum = mode_sum(table);
    const double eigen_setup = seconds_since(t0);
    t0 = Clock::now();
    const std::vector<Matrix> serial = synthesize_serial(sum, taus);
    const double eigen_serial = seconds_since(t0);
    t0 = Clock::now();
    const std::vector<Matrix> parallel = synthesize_parallel(sum, taus);
    const double eigen_parallel = seconds_since(t0);
    double serial_parallel_diff = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        serial_parallel_diff = std::max(serial_parallel_diff, (serial[i] - parallel[i]).cwiseAbs().maxCoeff());

    // oracle
    const int d = total_dim(model_dims(work));
    const long side = static_cast<long>(d) * d;
    OracleOptions oo;
    oo.kind = cfg.oracle_kind;
    oo.step = cfg.oracle_step;
    OracleKind kind = oo.kind == OracleKind::Auto ? (side <= oo.exp_max_vec_side ? OracleKind::Exp : OracleKind::Stepper)
                                                  : oo.kind;
    if (d > oo.dim_cap)
        fail(ErrorCode::DimensionCap, "bench: total dimension " + std::to_string(d) + " exceeds the oracle cap");
    std::vector<std::size_t> sample;
    std::vector<Matrix> oracle_states;
    double oracle_setup = 0.0, oracle_time = 0.0, oracle_per_point = 0.0;
    if (kind == OracleKind::Exp) {
        if (side > oo.exp_hard_limit)
            fail(ErrorCode::DimensionCap, "bench: dense exponential needs dim^2 <= " + std::to_string(oo.exp_hard_limit));
        // one exponential per point; timed on an evenly spaced subset of at most 20 points
        const std::size_t stride = std::max<std::size_t>(1, (n + 19) / 20);
        std::vector<double> sub;
        for (std::size_t i = 0; i < n; i += stride) {
            sample.push_back(i);
            sub.push_back(taus[i]);
        }
        t0 = Clock::now();
        const Matrix g = to_matrix(liouvillian(work));
        oracle_setup = seconds_since(t0);
        t0 = Clock::now();
        oracle_states = expm_series_serial(g, rho0.matrix(), sub);
        oracle_time = seconds_since(t0);
        oracle_per_point = oracle_time / static_cast<double>(sub.size());
    } else {
        oo.kind = OracleKind::Stepper;
        t0 = Clock::now();
        const EvolutionResult r = evolve_oracle(work, rho0, cfg.grid, oo);
        oracle_time = seconds_since(t0);
        oracle_per_point = oracle_time / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            sample.push_back(i);
            oracle_states.push_back(r.states[i].matrix());
        }
    }
    double max_td = 0.0;
    const Dims wd = model_dims(work);
    for (std::size_t k = 0; k < sample.size(); ++k)
        max_td = std::max(max_td, trace_distance(FockOperator(wd, parallel[sample[k]]), FockOperator(wd, oracle_states[k])));

    const double eigen_per_point = eigen_parallel / static_cast<double>(n);
    nlohmann::json j;
    j["model"] = to_string(cfg.model.tag);
    j["dim"] = work.dim;
    j["points"] = n;
    j["max_index"] = m;
    j["threads"] = thread_cap();
    j["eigenmode"] = {{"setup_s", eigen_setup},
                      {"per_point_s", eigen_per_point},
                      {"per_point_serial_s", eigen_serial / static_cast<double>(n)},
                      {"total_s", eigen_setup + eigen_parallel},
                      {"serial_parallel_max_diff", serial_parallel_diff},
                      {"convergence", report.summary()}};
    j["oracle"] = {{"method", kind == OracleKind::Exp ? "oracle-exp" : "oracle-rk4"},
                   {"setup_s", oracle_setup},
                   {"per_point_s", oracle_per_point},
                   {"timed_points", sample.size()},
                   {"total_s", oracle_setup + oracle_per_point * static_cast<double>(n)},
                   {"total_is_extrapolated", kind == OracleKind::Exp && sample.size() < n}};
    j["per_point_speedup"] = eigen_per_point > 0.0 ? oracle_per_point / eigen_per_point : 0.0;
    j["max_trace_distance"] = max_td;
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

std::string error_line(const std::string& kind, int code, const std::string& message) {
    nlohmann::json j{{"error", kind}, {"exit_code", code}, {"message", message}};
    return j.dump() + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Eigenmode solver for Lindblad master equations of damped bosonic modes and two-level systems"};
    app.require_subcommand(1);
    std::string config_path, out_path, suite = "all";
    std::int64_t seed = -1;
    bool strict = false;
    app.add_option("--config", config_path, "Run configuration file");
    app.add_option("--out", out_path, "Output path (default: output.path or stdout)");
    app.add_option("--seed", seed, "Seed for randomized suites (default: config seed or 42)");
    app.add_option("--suite", suite, "Verify suite: algebra, eigen, closed-form, oracle, all");
    app.add_flag("--strict", strict, "Fail on truncation leakage instead of warning");
    CLI::App* evolve = app.add_subcommand("evolve", "Evolve the initial state over the time grid, write observables");
    CLI::App* coeffs = app.add_subcommand("coeffs", "Write the expansion-coefficient table");
    CLI::App* verify = app.add_subcommand("verify", "Run invariant suites, write a JSON report");
    CLI::App* bench = app.add_subcommand("bench", "Time eigenmode synthesis against the oracle");
    for (CLI::App* sub : {evolve, coeffs, verify, bench}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_line("parse", exit_code(ErrorCode::Parse), e.what());
        return exit_code(ErrorCode::Parse);
    }

    try {
        const auto load = [&]() {
            RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
            if (strict) cfg.strict = true;
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (!out_path.empty()) cfg.output_path = out_path;
            return cfg;
        };
        if (*verify) {
            std::uint64_t s = 42;
            if (!config_path.empty()) s = load().seed;
            if (seed >= 0) s = static_cast<std::uint64_t>(seed);
            const VerifyReport report = run_verify_suite(suite, s);
            write_text(out_path, report.to_json());
            return report.all_pass() ? 0 : 1;
        }
        if (config_path.empty()) fail(ErrorCode::Parse, "--config is required for this subcommand");
        const RunConfig cfg = load();
        if (*evolve) {
            const EvolveOutput o = run_evolve(cfg);
            for (const auto& w : o.warnings) err << "warning: " << w << '\n';
            write_text(cfg.output_path, o.csv);
            for (const auto& [path, text] : o.dumps) write_text(path, text);
        } else if (*coeffs) {
            write_text(cfg.output_path, run_coeffs(cfg));
        } else if (*bench) {
            write_text(cfg.output_path, run_bench(cfg));
        }
        return 0;
    } catch (const Error& e) {
        const int code = exit_code(e.code());
        err << error_line(std::string(to_string(e.code())), code, e.what());
        return code;
    } catch (const std::exception& e) {
        err << error_line("internal", 7, e.what());
        return 7;
    }
}

} // namespace lindblad
