// Command-line front end: acquire | estimate | solve | hadamard | zne | sweep.
// Exit codes: 0 ok, 2 config, 3 data, 4 numerical degeneracy.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "noqe/errors.h"
#include "noqe/pipeline.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kNumerical = 4 };

struct Options {
    std::string config;
    std::optional<uint64_t> seed;
    std::string out = ".";
    std::optional<int> estimator_m;
    bool distill = false;
    bool exact_mode = false;
};

void write_atomic(const fs::path &path, const std::string &text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw noqe::ParseError("cannot write " + tmp.string());
        }
        f << text;
        if (!f) {
            throw noqe::ParseError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

noqe::ExperimentConfig effective_config(const Options &o) {
    auto c = noqe::load_config(o.config);
    if (o.seed) {
        c.seed = *o.seed;
        c.raw["seed"] = *o.seed;
    }
    if (o.estimator_m) {
        c.estimator_m = *o.estimator_m;
        c.raw["estimator_m"] = *o.estimator_m;
    }
    if (o.distill) {
        c.distill = true;
        c.raw["distill"] = true;
    }
    return c;
}

fs::path output_dir(const Options &o) {
    fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw noqe::ParseError("cannot create output directory " + o.out + ": " + ec.message());
    }
    return dir;
}

void emit_report(nlohmann::json report, const std::string &command, const fs::path &path) {
    report["command"] = command;
    report["artifacts"].push_back(path.string());
    write_atomic(path, report.dump(2) + "\n");
    std::cout << path.string() << "\n";
}

int cmd_acquire(const Options &o) {
    auto c = effective_config(o);
    auto problem = noqe::load_problem(c);
    auto dir = output_dir(o);
    auto data = noqe::acquire_shadow_data(problem, c.budget, c.noise, c.seed, c.threads);
    for (const auto &sets : data.per_ref) {
        for (const auto &ds : sets) {
            auto path = dir / (ds.label + ".jsonl");
            noqe::save_dataset(ds, path.string());
            std::cout << path.string() << "\n";
        }
    }
    return kOk;
}

int cmd_pipeline(const Options &o, const std::string &command, std::optional<noqe::Method> force) {
    auto c = effective_config(o);
    if (force) {
        c.method = *force;
        c.raw["method"] = noqe::method_name(*force);
    }
    auto problem = noqe::load_problem(c);
    auto res = noqe::noqe_energy(c, problem, o.exact_mode);
    emit_report(res.report, command, output_dir(o) / (command + ".json"));
    std::cout << "E0 = " << res.gevp.energies[0] << " " << problem.hamiltonian.unit_label()
              << " (exact NOQE " << res.exact_energy << ")\n";
    return kOk;
}

int cmd_zne(const Options &o) {
    auto c = effective_config(o);
    auto problem = noqe::load_problem(c);
    auto res = noqe::zne_hadamard_energy(c, problem);
    emit_report(res.report, "zne", output_dir(o) / "zne.json");
    std::cout << "E0 (ZNE) = " << res.gevp.energies[0] << " (exact NOQE " << res.exact_energy << ")\n";
    return kOk;
}

int cmd_sweep(const Options &o) {
    auto c = effective_config(o);
    auto problem = noqe::load_problem(c);
    auto rows = noqe::run_sweep(c, problem);
    auto dir = output_dir(o);
    auto csv = dir / "sweep.csv";
    write_atomic(csv, noqe::sweep_to_csv(rows));
    std::cout << csv.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Shadow-tomography NOQE simulator"};
    app.require_subcommand(1);
    Options o;
    const char *names[] = {"acquire", "estimate", "solve", "hadamard", "zne", "sweep"};
    const char *help[] = {
        "acquire shadow datasets for every reference and auxiliary state",
        "estimate overlap and Hamiltonian matrix elements",
        "estimate matrix elements and solve the generalized eigenproblem",
        "run the Hadamard-test baseline",
        "run the Hadamard baseline with zero-noise extrapolation",
        "sweep the noise scale and write a CSV table",
    };
    for (size_t k = 0; k < std::size(names); k++) {
        auto *sub = app.add_subcommand(names[k], help[k]);
        sub->add_option("--config", o.config, "experiment config JSON")->required();
        sub->add_option("--seed", o.seed, "master seed (overrides the config)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--estimator-m", o.estimator_m, "U-statistic order")->check(CLI::Range(1, 3));
        sub->add_flag("--distill", o.distill, "normalize estimates (shadow distillation)");
        sub->add_flag("--exact-mode", o.exact_mode, "bypass sampling and use exact expectations");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "acquire") {
            return cmd_acquire(o);
        }
        if (command == "estimate") {
            return cmd_pipeline(o, "estimate", std::nullopt);
        }
        if (command == "solve") {
            return cmd_pipeline(o, "solve", std::nullopt);
        }
        if (command == "hadamard") {
            return cmd_pipeline(o, "hadamard", noqe::Method::Hadamard);
        }
        if (command == "zne") {
            return cmd_zne(o);
        }
        return cmd_sweep(o);
    } catch (const noqe::FormatError &e) {
        std::cerr << "noqe: data error: " << e.what() << "\n";
        return kData;
    } catch (const noqe::DegenerateError &e) {
        std::cerr << "noqe: numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const noqe::ParseError &e) {
        std::cerr << "noqe: config error: " << e.what() << "\n";
        return kConfig;
    } catch (const noqe::ContractError &e) {
        std::cerr << "noqe: config error: " << e.what() << "\n";
        return kConfig;
    } catch (const noqe::ResourceError &e) {
        std::cerr << "noqe: config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception &e) {
        std::cerr << "noqe: internal error: " << e.what() << "\n";
        return kInternal;
    }
}
