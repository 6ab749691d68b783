// ksf: command-line front end for the finite-precision Kochen-Specker toolkit.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ksf/ksf.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kOk = 0, kInputError = 2, kInternalError = 3 };

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

unsigned threads_from_env() {
    const char* env = std::getenv("KSF_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    try {
        const long v = std::stol(env);
        if (v < 1) throw ksf::InvalidConfig("KSF_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    } catch (const std::logic_error&) {
        throw ksf::InvalidConfig("KSF_THREADS must be a positive integer");
    }
}

void emit(const ksf::io::Json& doc, const std::string& out_path) {
    const std::string text = ksf::io::canonical_dump(doc) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ksf::InvalidConfig("cannot write '" + out_path + "'");
    out << text;
}

struct Manifest {
    std::string subcommand;
    ksf::io::Json inputs = ksf::io::Json::array();
    ksf::io::Json config = nullptr;
    std::string started = utc_timestamp();

    [[nodiscard]] ksf::io::Json finish() const {
        return {{"subcommand", subcommand}, {"inputs", inputs},        {"config", config},
                {"tool_version", kToolVersion}, {"started_at", started}, {"finished_at", utc_timestamp()}};
    }
};

ksf::KSSet load_set(const std::string& path, bool complete) {
    ksf::KSSet set = path == "peres"             ? ksf::peres_set()
                     : path == "peres-completed" ? ksf::peres_completed_set()
                                                 : ksf::io::parse_ks_file(path);
    return complete ? ksf::triad_complete(set) : set;
}

ksf::io::Json assignment_json(const ksf::Assignment& a) {
    ksf::io::Json j = ksf::io::Json::array();
    for (auto v : a.values) j.push_back(static_cast<int>(v));
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-precision Kochen-Specker toolkit: uncolorability, simulation and exclusion verdicts"};
    app.require_subcommand(1);

    std::string set_path, config_path, counts_path, out_path, mode;
    std::optional<std::uint64_t> seed, trials;
    std::optional<double> alpha;
    bool complete = false;
    double visibility = 1.0;

    auto* generate = app.add_subcommand("generate", "emit the built-in Peres set as KS-set JSON");
    generate->add_flag("--complete", complete, "apply triad completion");
    generate->add_option("--out", out_path, "output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "decide colorability and report the 1/N threshold");
    verify->add_option("--set", set_path, "KS-set JSON file, or 'peres' / 'peres-completed'")->required();
    verify->add_flag("--complete", complete, "apply triad completion before solving");
    verify->add_option("--out", out_path, "output file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment from a config JSON");
    simulate->add_option("--config", config_path, "experiment config JSON")->required();
    simulate->add_option("--set", set_path, "override the config's set");
    simulate->add_option("--seed", seed, "override the config seed");
    simulate->add_option("--trials", trials, "override trials per triad");
    simulate->add_option("--alpha", alpha, "override the family-wise confidence level");
    simulate->add_option("--mode", mode, "quantum measurement model")->check(CLI::IsMember({"sequential", "joint"}));
    simulate->add_flag("--complete", complete, "apply triad completion to the set");
    simulate->add_option("--out", out_path, "output file (default stdout)");

    auto* analyze = app.add_subcommand("analyze", "compute the exclusion report for recorded trials");
    analyze->add_option("--set", set_path, "KS-set JSON file")->required();
    analyze->add_option("--counts", counts_path, "trial CSV (trial,triad,r1,r2,r3)")->required();
    analyze->add_option("--alpha", alpha, "family-wise confidence level (default 0.01)");
    analyze->add_flag("--complete", complete, "apply triad completion to the set");
    analyze->add_option("--out", out_path, "output file (default stdout)");

    auto* ghz = app.add_subcommand("ghz", "GHZ local-hidden-variable analog");
    ghz->add_option("--trials", trials, "trials per context (default 10000)");
    ghz->add_option("--seed", seed, "seed (default 0)");
    ghz->add_option("--alpha", alpha, "family-wise confidence level (default 0.01)");
    ghz->add_option("--visibility", visibility, "GHZ visibility against white noise")->check(CLI::Range(0.0, 1.0));
    ghz->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        Manifest manifest;
        if (generate->parsed()) {
            ksf::KSSet set = complete ? ksf::peres_completed_set() : ksf::peres_set();
            emit(ksf::io::to_json(set), out_path);
            return kOk;
        }

        if (verify->parsed()) {
            manifest.subcommand = "verify";
            manifest.inputs.push_back(set_path);
            const ksf::KSSet set = load_set(set_path, complete);
            const auto report = ksf::is_colorable(set);
            ksf::ClauseColorability clauses(set);
            const auto clause_model = clauses.solve();
            if (clause_model && ksf::count_violations(set, *clause_model) != 0) {
                throw ksf::NumericalError("clause encoding returned an invalid model");
            }
            if (clause_model.has_value() != report.colorable()) {
                throw ksf::NumericalError("search and clause encoding disagree on colorability");
            }
            const auto minimum = ksf::min_violation_witness(set);
            ksf::io::Json doc{{"mode", "verify"},
                              {"set", set.name()},
                              {"N", set.size()},
                              {"directions", set.directions().size()},
                              {"shared_direction", set.has_shared_direction()},
                              {"status", report.colorable() ? "Colorable" : "Uncolorable"},
                              {"nodes_explored", report.nodes_explored},
                              {"elapsed_seconds", report.elapsed_seconds},
                              {"min_violated_triads", minimum.count},
                              {"cross_check",
                               {{"encoding", "cnf"},
                                {"clauses", clauses.clause_count()},
                                {"status", clause_model ? "Colorable" : "Uncolorable"},
                                {"agrees", true}}}};
            doc["witness"] = report.witness ? assignment_json(*report.witness) : ksf::io::Json(nullptr);
            doc["threshold"] =
                report.colorable() || set.size() == 0 ? ksf::io::Json(nullptr) : ksf::io::Json(1.0 / set.size());
            doc["manifest"] = manifest.finish();
            emit(doc, out_path);
            return kOk;
        }

        if (simulate->parsed()) {
            manifest.subcommand = "simulate";
            manifest.inputs.push_back(config_path);
            const std::filesystem::path cfg_path(config_path);
            ksf::io::Json raw = ksf::io::parse_json(ksf::io::read_text_file(cfg_path), config_path);
            if (!set_path.empty()) {
                manifest.inputs.push_back(set_path);
                raw["set"] = ksf::io::to_json(load_set(set_path, false));
            }
            if (seed) raw["seed"] = *seed;
            if (trials) raw["trials_per_triad"] = *trials;
            if (alpha) raw["alpha"] = *alpha;
            if (!mode.empty()) raw["source"] = {{"kind", "quantum"}, {"model", mode}};
            ksf::ExperimentConfig config = ksf::io::config_from_json(raw, cfg_path.parent_path());
            if (complete) {
                config.set = ksf::triad_complete(config.set);
                config.validate();
            }
            manifest.config = ksf::io::to_json(config);
            const auto report = ksf::run_experiment(config, {.threads = threads_from_env()});
            ksf::io::Json doc = ksf::io::to_json(report);
            doc["manifest"] = manifest.finish();
            emit(doc, out_path);
            return kOk;
        }

        if (analyze->parsed()) {
            manifest.subcommand = "analyze";
            manifest.inputs = {set_path, counts_path};
            const ksf::KSSet set = load_set(set_path, complete);
            const auto rows = ksf::io::read_trial_csv(counts_path);
            const double a = alpha.value_or(0.01);
            manifest.config = {{"alpha", a}, {"no_click_policy", "count_as_failure"}};
            const auto report = ksf::analyze_counts(rows, set, a);
            ksf::io::Json doc = ksf::io::to_json(report);
            doc["manifest"] = manifest.finish();
            emit(doc, out_path);
            return kOk;
        }

        if (ghz->parsed()) {
            manifest.subcommand = "ghz";
            ksf::ghz::GhzRunConfig config;
            config.trials_per_context = trials.value_or(config.trials_per_context);
            config.seed = seed.value_or(config.seed);
            config.alpha = alpha.value_or(config.alpha);
            config.visibility = visibility;
            manifest.config = {{"trials_per_context", config.trials_per_context},
                               {"seed", config.seed},
                               {"alpha", config.alpha},
                               {"visibility", config.visibility}};
            ksf::io::Json doc = ksf::ghz::to_json(ksf::ghz::run_ghz(config));
            doc["manifest"] = manifest.finish();
            emit(doc, out_path);
            return kOk;
        }
    } catch (const ksf::InputError& e) {
        std::cerr << "ksf: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "ksf: internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kInputError;
}
