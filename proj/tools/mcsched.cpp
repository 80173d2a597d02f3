// Command-line front end: run, sweep, validate, gen.

#include <mcsched/cipher_assignment.hpp>
#include <mcsched/error.hpp>
#include <mcsched/experiment.hpp>
#include <mcsched/generators.hpp>
#include <mcsched/schedule.hpp>
#include <mcsched/schedulers.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mcsched;

namespace {

enum Exit { ok = 0, usage = 1, infeasible = 2, io = 3, audit_failed = 4 };

struct Inputs {
    std::string workflow;
    std::string format = "auto";
    std::string cloud;
    bool allow_external_inputs = false;
    double reference_mips = 1.0;

    void add_to(CLI::App & app) {
        app.add_option("--workflow,-w", workflow,
                       "Workflow file (DAX or native JSON) or gen:<family>:<n>[:<seed>]")
            ->required();
        app.add_option("--format", format, "auto, dax or json")
            ->check(CLI::IsMember({"auto", "dax", "json"}));
        app.add_option("--cloud", cloud, "Cloud config JSON (default: built-in six providers)");
        app.add_flag("--allow-external-inputs", allow_external_inputs,
                     "Accept DAX inputs that no job produces and no <file> declares");
        app.add_option("--reference-mips", reference_mips, "MI per second of DAX runtime")
            ->check(CLI::PositiveNumber);
    }

    Workflow load_workflow() const {
        if (auto generated = generate_from_spec(workflow)) {
            return *generated;
        }
        WorkflowFormat fmt = format_from_path(workflow);
        if (format != "auto") {
            fmt = *parse_format(format);
        }
        return parse_workflow(workflow, fmt, DaxOptions{reference_mips, allow_external_inputs});
    }

    CloudSystem load_cloud() const {
        return cloud.empty() ? default_cloud_system() : load_cloud_config(cloud);
    }

    CipherTable load_ciphers() const {
        if (cloud.empty()) {
            return CipherTable::rc6();
        }
        std::ifstream in(cloud, std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        return parse_cipher_table(text.str());
    }

    std::string name() const {
        return generate_from_spec(workflow) ? workflow : fs::path(workflow).stem().string();
    }
};

struct Tuning {
    int num_iter = 10;
    bool frozen = false;
    std::string crypto = "normalized";

    void add_to(CLI::App & app) {
        app.add_option("--num-iter", num_iter, "Local search iteration cap")
            ->check(CLI::PositiveNumber);
        app.add_flag("--frozen-ciphers", frozen, "Keep ciphers fixed during local search");
        app.add_option("--crypto-capacity", crypto, "normalized or per-vm")
            ->check(CLI::IsMember({"normalized", "per-vm"}));
    }

    SchedulerConfig config() const {
        SchedulerConfig c;
        c.num_iter = num_iter;
        c.frozen_ciphers = frozen;
        return c;
    }

    CryptoCapacity mode() const { return *parse_crypto_capacity(crypto); }
};

void write_file(fs::path const & path, std::string const & text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw IngestionError("cannot write " + path.string());
    }
}

std::string read_file(fs::path const & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

Algorithm parse_algo(std::string const & name) {
    auto a = Algorithm::parse(name);
    if (!a) {
        throw DomainError("unknown algorithm " + name);
    }
    return *a;
}

int cmd_run(Inputs const & in, Tuning const & tune, std::string const & algo_name, double eta,
            std::uint64_t seed, std::size_t rep, std::string const & out) {
    Algorithm const algo = parse_algo(algo_name);
    CipherTable const table = in.load_ciphers();
    RunParams const p = sample_run_params(in.load_workflow(), in.load_cloud(), table, eta, seed,
                                          rep, {}, 1, tune.mode());
    SchedulerConfig config = tune.config();
    config.seed = p.run_seed;
    PipelineResult res = run_pipeline(p.workflow, p.cloud, table, p.constraints, config, algo);
    Schedule const & s = res.schedule;
    double const vsys =
        system_vulnerability(p.workflow, table, s.ciphers, cross_instance_flags(p.workflow, s.mapping));

    std::printf("workflow     %s\n", in.name().c_str());
    std::printf("algorithm    %s\n", algo.name().c_str());
    std::printf("makespan_s   %s\n", format_double(s.makespan).c_str());
    std::printf("cost_usd     %s\n", format_double(s.cost).c_str());
    std::printf("reliability  %s\n", format_double(s.reliability).c_str());
    std::printf("leases       %zu\n", s.leases.size());
    std::printf("v_system     %s / %s\n", format_double(vsys).c_str(),
                format_double(p.constraints.system_cap).c_str());
    if (algo.local_search) {
        std::printf("ls_passes    %d\n", res.trace.iterations);
    }
    if (!out.empty()) {
        ScheduleRecord const record{p.workflow, p.cloud, res.pool, table, p.constraints, s};
        write_file(out, to_schedule_json(record));
        std::printf("schedule     %s\n", out.c_str());
    }
    return ok;
}

int cmd_sweep(Inputs const & in, Tuning const & tune, std::vector<std::string> const & algos,
              std::vector<double> const & etas, int reps, std::uint64_t seed,
              std::string const & out, bool json, bool quiet) {
    ExperimentConfig cfg;
    cfg.workflow_name = in.name();
    cfg.workflow = in.load_workflow();
    cfg.cloud = in.load_cloud();
    cfg.ciphers = in.load_ciphers();
    cfg.algorithms.clear();
    for (std::string const & a : algos) {
        cfg.algorithms.push_back(parse_algo(a));
    }
    if (!etas.empty()) {
        cfg.etas = etas;
    }
    cfg.reps = reps;
    cfg.seed = seed;
    cfg.scheduler = tune.config();
    cfg.crypto_capacity = tune.mode();

    std::vector<ResultRow> const rows = run_sweep(cfg, [&](ResultRow const & r) {
        if (!quiet) {
            std::fprintf(stderr, "%s eta=%s rep=%zu %s\n", r.algorithm.c_str(),
                         format_double(r.eta).c_str(), r.rep,
                         r.feasible ? "ok" : r.error.c_str());
        }
    });
    fs::path const dir(out);
    write_file(dir / "raw.csv", raw_csv(rows));
    write_file(dir / "aggregate.csv", aggregate_csv(rows));
    write_file(dir / "timings.csv", timings_csv(rows));
    if (json) {
        write_file(dir / "results.json", rows_json(rows));
    }
    std::size_t bad = 0;
    for (ResultRow const & r : rows) {
        bad += r.feasible ? 0 : 1;
    }
    std::printf("%zu runs, %zu infeasible, results in %s\n", rows.size(), bad, out.c_str());
    return bad == 0 ? ok : infeasible;
}

int cmd_validate(std::string const & path) {
    ScheduleRecord const record = parse_schedule_json(read_file(path));
    AuditReport const report = validate_schedule(record);
    for (AuditCheck const & c : report.checks) {
        std::printf("%-22s %s", c.name.c_str(), c.passed ? "pass" : "FAIL");
        if (!c.passed) {
            std::printf("  residual=%s  %s", format_double(c.residual).c_str(), c.detail.c_str());
        }
        std::printf("\n");
    }
    return report.ok() ? ok : audit_failed;
}

int cmd_gen(std::string const & family, std::size_t n, std::uint64_t seed, std::string const & out) {
    auto const fam = parse_workflow_family(family);
    if (!fam) {
        throw DomainError("unknown workflow family " + family);
    }
    std::string const text = to_native_json(generate_workflow(*fam, n, seed));
    if (out.empty() || out == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        write_file(out, text);
    }
    return ok;
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Multi-cloud workflow scheduling simulator"};
    app.require_subcommand(1);

    Inputs run_in;
    Tuning run_tune;
    std::string run_algo = "lbs+ls";
    double run_eta = 0.5;
    std::uint64_t run_seed_value = 1;
    std::size_t run_rep = 0;
    std::string run_out;
    CLI::App * run = app.add_subcommand("run", "Schedule one workflow and print its objectives");
    run_in.add_to(*run);
    run_tune.add_to(*run);
    run->add_option("--algo", run_algo, "lbs, lbs+ls, random, random+ls, greedy, greedy+ls");
    run->add_option("--eta", run_eta, "Security budget as a fraction of the maximum")
        ->check(CLI::Range(0.0, 1.0));
    run->add_option("--seed", run_seed_value, "Base seed");
    run->add_option("--rep", run_rep, "Repetition index used to derive the run seed");
    run->add_option("--out,-o", run_out, "Write the schedule as JSON");

    Inputs sweep_in;
    Tuning sweep_tune;
    std::vector<std::string> sweep_algos{"lbs", "lbs+ls"};
    std::vector<double> sweep_etas;
    int sweep_reps = 15;
    std::uint64_t sweep_seed = 1;
    std::string sweep_out = "results";
    bool sweep_json = false;
    bool sweep_quiet = false;
    CLI::App * sweep = app.add_subcommand("sweep", "Run algorithms over an eta grid and repetitions");
    sweep_in.add_to(*sweep);
    sweep_tune.add_to(*sweep);
    sweep->add_option("--algo", sweep_algos, "Algorithms to compare")->delimiter(',');
    sweep->add_option("--eta", sweep_etas, "Eta values (default 0.1 to 0.7 step 0.1)")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    sweep->add_option("--reps", sweep_reps, "Repetitions per cell")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sweep_seed, "Base seed");
    sweep->add_option("--out,-o", sweep_out, "Output directory");
    sweep->add_flag("--json", sweep_json, "Also write results.json");
    sweep->add_flag("--quiet,-q", sweep_quiet, "No per-run progress on stderr");

    std::string validate_path;
    CLI::App * validate = app.add_subcommand("validate", "Audit an exported schedule");
    validate->add_option("schedule", validate_path, "Schedule JSON written by run --out")
        ->required();

    std::string gen_family = "epigenomics";
    std::size_t gen_n = 24;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    CLI::App * gen = app.add_subcommand("gen", "Write a synthetic workflow as native JSON");
    gen->add_option("--family", gen_family, "epigenomics or cybershake")
        ->check(CLI::IsMember({"epigenomics", "cybershake"}));
    gen->add_option("--n", gen_n, "Number of tasks")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Seed for work and size jitter");
    gen->add_option("--out,-o", gen_out, "Output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return cmd_run(run_in, run_tune, run_algo, run_eta, run_seed_value, run_rep, run_out);
        }
        if (*sweep) {
            return cmd_sweep(sweep_in, sweep_tune, sweep_algos, sweep_etas, sweep_reps, sweep_seed,
                             sweep_out, sweep_json, sweep_quiet);
        }
        if (*validate) {
            return cmd_validate(validate_path);
        }
        return cmd_gen(gen_family, gen_n, gen_seed, gen_out);
    } catch (InfeasibleError const & e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return infeasible;
    } catch (IngestionError const & e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return io;
    } catch (StructuralError const & e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return io;
    } catch (fs::filesystem_error const & e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return io;
    } catch (Error const & e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return usage;
    }
}
