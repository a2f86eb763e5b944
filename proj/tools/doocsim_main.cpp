// doocsim: scenario-driven simulator for distributed optimal output
// consensus over directed networks. Subcommands: run, validate, oracle,
// reproduce-paper, sweep. Exit codes: 0 success, 2 validation failure,
// 3 runtime divergence, 4 acceptance failure.

#include "dooc/config.hpp"
#include "dooc/csv.hpp"
#include "dooc/errors.hpp"
#include "dooc/verification.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitAcceptance = 4;

struct CommonOptions {
    std::string scenario_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
};

nlohmann::json load_document(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw dooc::ValidationError("cannot open scenario file: " + path);
    try {
        return nlohmann::json::parse(file);
    } catch (const nlohmann::json::parse_error& err) {
        throw dooc::ValidationError("scenario JSON parse error: " + std::string(err.what()));
    }
}

nlohmann::json resolve_document(const CommonOptions& opts) {
    nlohmann::json doc = load_document(opts.scenario_path);
    for (const auto& assignment : opts.overrides) dooc::apply_set_override(doc, assignment);
    if (opts.seed) doc["seed"] = *opts.seed;
    return doc;
}

void write_run_artifacts(const std::filesystem::path& dir, const dooc::Scenario& scn,
                         const dooc::Trajectory& traj, const dooc::MetricsReport& report) {
    std::filesystem::create_directories(dir);
    dooc::write_text_file((dir / "trajectory.csv").string(), dooc::trajectory_to_csv(traj));
    nlohmann::json meta;
    meta["version"] = dooc::kVersion;
    meta["seed"] = scn.seed;
    meta["scenario"] = dooc::scenario_to_json(scn);
    meta["metrics"] = dooc::metrics_to_json(report);
    dooc::write_text_file((dir / "metrics.json").string(), meta.dump(2) + "\n");
}

int cmd_run(const CommonOptions& opts) {
    const nlohmann::json doc = resolve_document(opts);
    if (opts.dry_run) {
        const dooc::Scenario scn = dooc::load_scenario(doc);
        std::cout << dooc::scenario_to_json(scn).dump(2) << "\n";
        return kExitOk;
    }
    const dooc::Scenario scn = dooc::load_scenario(doc);
    const auto issues = dooc::validate_scenario(scn);
    if (!issues.empty()) {
        std::cerr << "validation failed:\n";
        for (const auto& issue : issues) std::cerr << "  - " << issue << "\n";
        return kExitValidation;
    }
    const dooc::Trajectory traj = dooc::run(scn);
    const double s_star = dooc::global_minimizer(scn.costs);
    const dooc::MetricsReport report = dooc::metrics(traj, scn, s_star);
    write_run_artifacts(opts.out_dir, scn, traj, report);
    std::cout << "run complete: " << scn.name << "\n"
              << "  s* = " << dooc::format_double(s_star)
              << ", max final error = " << dooc::format_double(report.final_error_max) << "\n"
              << "  artifacts in " << opts.out_dir << "\n";
    return kExitOk;
}

int cmd_validate(const CommonOptions& opts) {
    const nlohmann::json doc = resolve_document(opts);
    const dooc::Scenario scn = dooc::load_scenario(doc);
    const auto issues = dooc::validate_scenario(scn);
    if (issues.empty()) {
        std::cout << "scenario ok: " << scn.name << "\n";
        return kExitOk;
    }
    std::cerr << "validation failed:\n";
    for (const auto& issue : issues) std::cerr << "  - " << issue << "\n";
    return kExitValidation;
}

int cmd_oracle(const CommonOptions& opts) {
    const nlohmann::json doc = resolve_document(opts);
    const dooc::Scenario scn = dooc::load_scenario(doc);

    const double s_star = dooc::global_minimizer(scn.costs);
    std::cout << "s* (bisection on aggregate gradient) = " << dooc::format_double(s_star) << "\n";

    const Eigen::VectorXd r = dooc::left_eigenvector(dooc::laplacian(scn.graph));
    std::cout << "left eigenvector r =";
    for (Eigen::Index i = 0; i < r.size(); ++i) std::cout << " " << dooc::format_double(r(i));
    std::cout << "\n";

    if (scn.has_plants()) {
        const double theta = scn.exosystem.theta();
        for (std::size_t i = 0; i < scn.plants.size(); ++i) {
            const auto& reg_override = scn.regulators[i];
            const dooc::RegulatorSpec reg =
                reg_override.present
                    ? dooc::build_regulator(scn.plants[i], theta, &reg_override.M, &reg_override.N)
                    : dooc::build_regulator(scn.plants[i], theta);
            Eigen::EigenSolver<Eigen::MatrixXd> phi_eig(reg.Phi, false);
            std::cout << "agent " << i + 1 << ": internal-model order " << reg.order
                      << ", Sylvester residual " << dooc::format_double(reg.sylvester_residual)
                      << ", cond(T) " << dooc::format_double(reg.t_condition) << ", Phi spectrum";
            for (Eigen::Index k = 0; k < reg.order; ++k) {
                const auto lambda = phi_eig.eigenvalues()(k);
                std::cout << " (" << dooc::format_double(lambda.real()) << ", "
                          << dooc::format_double(lambda.imag()) << "i)";
            }
            std::cout << "\n";
        }
    }
    return kExitOk;
}

int cmd_reproduce(const CommonOptions& opts) {
    nlohmann::json coord_doc = dooc::default_coordinator_json();
    nlohmann::json closed_doc = dooc::default_closed_loop_json();
    for (const auto& assignment : opts.overrides) {
        // Each override must land in at least one of the two documents.
        bool applied = false;
        for (nlohmann::json* doc : {&coord_doc, &closed_doc}) {
            try {
                dooc::apply_set_override(*doc, assignment);
                applied = true;
            } catch (const dooc::ValidationError&) {
            }
        }
        if (!applied)
            throw dooc::ValidationError("override matches neither scenario: " + assignment);
    }
    if (opts.seed) {
        coord_doc["seed"] = *opts.seed;
        closed_doc["seed"] = *opts.seed;
    }

    if (opts.dry_run) {
        std::cout << coord_doc.dump(2) << "\n" << closed_doc.dump(2) << "\n";
        return kExitOk;
    }

    const dooc::AcceptanceOutcome outcome = dooc::run_acceptance_suite(coord_doc, closed_doc);
    std::cout << dooc::format_criteria_table(outcome.criteria);

    std::filesystem::create_directories(opts.out_dir);
    const std::filesystem::path dir(opts.out_dir);
    dooc::write_text_file((dir / "coordinator_trajectory.csv").string(),
                          dooc::trajectory_to_csv(outcome.coordinator_run));
    dooc::write_text_file((dir / "closed_loop_trajectory.csv").string(),
                          dooc::trajectory_to_csv(outcome.closed_loop_run));
    nlohmann::json table = nlohmann::json::array();
    for (const auto& c : outcome.criteria)
        table.push_back(
            {{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    dooc::write_text_file((dir / "criteria.json").string(), table.dump(2) + "\n");
    std::cout << "plot-ready CSVs in " << opts.out_dir << "\n";

    return outcome.all_passed() ? kExitOk : kExitAcceptance;
}

int cmd_sweep(const CommonOptions& opts, const std::vector<std::string>& params) {
    const nlohmann::json base = resolve_document(opts);

    // Cartesian product over `key=v1,v2,...` parameter lists.
    struct Axis {
        std::string key;
        std::vector<std::string> values;
    };
    std::vector<Axis> axes;
    for (const auto& param : params) {
        const auto eq = param.find('=');
        if (eq == std::string::npos)
            throw dooc::ValidationError("sweep parameter must look like key=v1,v2: " + param);
        Axis axis;
        axis.key = param.substr(0, eq);
        std::string rest = param.substr(eq + 1);
        std::size_t begin = 0;
        while (begin <= rest.size()) {
            const auto comma = rest.find(',', begin);
            axis.values.push_back(
                rest.substr(begin, comma == std::string::npos ? comma : comma - begin));
            if (comma == std::string::npos) break;
            begin = comma + 1;
        }
        if (axis.values.empty())
            throw dooc::ValidationError("sweep parameter has no values: " + param);
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) throw dooc::ValidationError("sweep needs at least one --param");

    struct Combo {
        nlohmann::json doc;
        std::string label;
    };
    std::vector<Combo> combos{{base, ""}};
    for (const auto& axis : axes) {
        std::vector<Combo> next;
        for (const auto& combo : combos) {
            for (const auto& value : axis.values) {
                Combo expanded = combo;
                dooc::apply_set_override(expanded.doc, axis.key + "=" + value);
                std::string tag = axis.key + "_" + value;
                for (auto& ch : tag)
                    if (ch == '.' || ch == '/' || ch == ',') ch = '_';
                expanded.label += (expanded.label.empty() ? "" : "__") + tag;
                next.push_back(std::move(expanded));
            }
        }
        combos = std::move(next);
    }

    // Trajectories share nothing; fan the combos out across a bounded pool.
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<int> results(combos.size(), kExitOk);
    std::size_t cursor = 0;
    while (cursor < combos.size()) {
        std::vector<std::future<void>> batch;
        for (unsigned lane = 0; lane < workers && cursor < combos.size(); ++lane, ++cursor) {
            const std::size_t index = cursor;
            batch.push_back(std::async(std::launch::async, [&, index]() {
                const Combo& combo = combos[index];
                const auto dir = std::filesystem::path(opts.out_dir) / combo.label;
                try {
                    const dooc::Scenario scn = dooc::load_scenario(combo.doc);
                    const auto issues = dooc::validate_scenario(scn);
                    if (!issues.empty()) {
                        results[index] = kExitValidation;
                        return;
                    }
                    const dooc::Trajectory traj = dooc::run(scn);
                    const double s_star = dooc::global_minimizer(scn.costs);
                    write_run_artifacts(dir, scn, traj, dooc::metrics(traj, scn, s_star));
                } catch (const dooc::DivergenceError&) {
                    results[index] = kExitDivergence;
                } catch (const std::exception&) {
                    results[index] = kExitValidation;
                }
            }));
        }
        for (auto& f : batch) f.get();
    }

    int exit_code = kExitOk;
    for (std::size_t index = 0; index < combos.size(); ++index) {
        std::cout << (results[index] == kExitOk ? "ok    " : "failed") << " " << combos[index].label
                  << "\n";
        if (results[index] == kExitDivergence) exit_code = kExitDivergence;
        if (results[index] == kExitValidation && exit_code == kExitOk)
            exit_code = kExitValidation;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-agent optimal-consensus simulator"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::vector<std::string> sweep_params;

    const auto add_common = [&opts](CLI::App* cmd, bool needs_scenario) {
        if (needs_scenario)
            cmd->add_option("--scenario", opts.scenario_path, "scenario JSON path")->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--set", opts.overrides, "override path.to.key=value (repeatable)");
        cmd->add_option("--seed", opts.seed, "override the top-level seed");
        cmd->add_flag("--dry-run", opts.dry_run, "print resolved scenarios, run nothing");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "integrate a scenario and write artifacts");
    add_common(run_cmd, true);
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "check a scenario without integrating");
    add_common(validate_cmd, true);
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "print simulation-independent reference quantities");
    add_common(oracle_cmd, true);
    CLI::App* repro_cmd =
        app.add_subcommand("reproduce-paper", "run the benchmark pair and check all criteria");
    add_common(repro_cmd, false);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "fan out a scenario over parameter lists");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--param", sweep_params, "key=v1,v2,... (repeatable, cartesian)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(opts);
        if (validate_cmd->parsed()) return cmd_validate(opts);
        if (oracle_cmd->parsed()) return cmd_oracle(opts);
        if (repro_cmd->parsed()) return cmd_reproduce(opts);
        if (sweep_cmd->parsed()) return cmd_sweep(opts, sweep_params);
    } catch (const dooc::DivergenceError& err) {
        std::cerr << "divergence: " << err.what() << "\n";
        return kExitDivergence;
    } catch (const dooc::ValidationError& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return kExitOk;
}
