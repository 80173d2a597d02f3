// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include "oracle.hpp"
#include "support.hpp"

#include <mcsched/cipher_assignment.hpp>
#include <mcsched/error.hpp>
#include <mcsched/experiment.hpp>
#include <mcsched/generators.hpp>
#include <mcsched/schedule.hpp>
#include <mcsched/schedulers.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace mcsched;
using testing::rel_close;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Bundled {
    std::string name;
    Workflow workflow;
};

std::vector<Bundled> bundled_workflows() {
    std::vector<Bundled> out;
    for (WorkflowFamily f : {WorkflowFamily::epigenomics, WorkflowFamily::cybershake}) {
        for (std::size_t n : {24u, 30u, 100u}) {
            out.push_back({std::string(to_string(f)) + "-" + std::to_string(n), generate_workflow(f, n, 0)});
        }
    }
    return out;
}

std::string fmt(char const * f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

// 1. DP objective equals the exhaustive optimum on small random instances.
Outcome dp_vs_bruteforce() {
    CipherTable const t = CipherTable::rc6();
    Rng rng(1001);
    auto const t0 = Clock::now();
    int done = 0, feasible = 0, mismatches = 0, bad_assignments = 0;
    double worst = 0.0;
    while (done < 200) {
        CloudSystem const sys = default_cloud_system();
        Workflow const raw = testing::random_dag(rng, 2 + rng.below(6), rng.uniform(0.2, 0.7));
        std::vector<double> weights;
        std::vector<std::optional<double>> caps;
        for (std::size_t h = 0; h < raw.edges().size(); ++h) {
            weights.push_back(std::round(rng.uniform(0.1, 1.0) * 10) / 10);
            caps.push_back(rng.below(4) == 0 ? std::nullopt
                                             : std::optional<double>(t[rng.below(t.size())].vulnerability));
        }
        Workflow const w = augment(raw.with_security(weights, caps));
        ResourcePool const pool = build_resource_pool(sys, w);
        Mapping m(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!w.task(i).is_virtual) {
                m[i] = rng.below(pool.size());
            }
        }
        std::vector<bool> const cross = cross_instance_flags(w, m);
        std::size_t const k = static_cast<std::size_t>(std::count(cross.begin(), cross.end(), true));
        if (k == 0 || k > 8) {
            continue;
        }
        ++done;
        SecurityConstraints const cons{rng.uniform(0, 1) * max_vulnerability(w, t), 1,
                                       rng.below(2) ? CryptoCapacity::normalized : CryptoCapacity::per_vm};
        std::optional<CipherAssignment> dp, bf;
        try {
            dp = assign_ciphers_dp(w, sys, pool, m, t, cons);
        } catch (InfeasibleError const &) {
        }
        try {
            bf = assign_ciphers_bruteforce(w, sys, pool, m, t, cons);
        } catch (InfeasibleError const &) {
        }
        if (dp.has_value() != bf.has_value()) {
            ++mismatches;
            continue;
        }
        if (!dp) {
            continue;
        }
        ++feasible;
        double const diff = std::abs(dp->total_time - bf->total_time) /
                            std::max(1e-300, std::abs(bf->total_time));
        worst = std::max(worst, bf->total_time == 0 ? std::abs(dp->total_time) : diff);
        if (!(diff < 1e-9) && !(dp->total_time == bf->total_time)) {
            ++mismatches;
        }
        // Unscaled post-hoc check of both constraint families.
        double v = 0.0;
        for (std::size_t h = 0; h < w.edges().size(); ++h) {
            if (cross[h] != dp->choice[h].has_value()) {
                ++bad_assignments;
                break;
            }
            if (!cross[h]) {
                continue;
            }
            double const cv = t[*dp->choice[h]].vulnerability;
            if (w.edge(h).vuln_cap && cv > *w.edge(h).vuln_cap) {
                ++bad_assignments;
            }
            v += w.edge(h).sec_weight * cv;
        }
        if (v > cons.system_cap + 1e-9) {
            ++bad_assignments;
        }
    }
    double const secs = seconds_since(t0);
    bool const pass = mismatches == 0 && bad_assignments == 0 && secs < 5.0 && feasible > 0;
    return {pass, fmt("200 instances (%.0f feasible), max rel diff %.2g, %.0f violations, %.2f s", feasible,
                      worst, mismatches + bad_assignments, secs)};
}

// 2. Pipeline outputs always pass the constraint audit.
Outcome constraint_audit() {
    CipherTable const t = CipherTable::rc6();
    std::vector<Algorithm> const algos{{Allocator::lbs, false}, {Allocator::lbs, true},
                                       {Allocator::random, false}, {Allocator::greedy, false}};
    std::vector<Workflow> workflows;
    for (WorkflowFamily f : {WorkflowFamily::epigenomics, WorkflowFamily::cybershake}) {
        for (std::size_t n : {24u, 30u}) {
            workflows.push_back(generate_workflow(f, n, 0));
        }
    }
    int runs = 0, violations = 0, errors = 0;
    std::string first;
    for (std::uint64_t seed = 1; runs < 1000; ++seed) {
        for (std::size_t wi = 0; wi < workflows.size() && runs < 1000; ++wi) {
            for (int e = 1; e <= 7 && runs < 1000; ++e) {
                double const eta = e / 10.0;
                Algorithm const algo = algos[static_cast<std::size_t>(runs) % algos.size()];
                ++runs;
                RunParams const p = sample_run_params(workflows[wi], default_cloud_system(), t, eta, seed, 0);
                SchedulerConfig cfg;
                cfg.seed = p.run_seed;
                try {
                    PipelineResult r = run_pipeline(p.workflow, p.cloud, t, p.constraints, cfg, algo);
                    ScheduleRecord const rec{p.workflow, p.cloud, r.pool, t, p.constraints, r.schedule};
                    AuditReport const audit = validate_schedule(rec);
                    if (!audit.ok()) {
                        ++violations;
                        for (AuditCheck const & c : audit.checks) {
                            if (!c.passed && first.empty()) {
                                first = c.name + ": " + c.detail;
                            }
                        }
                    }
                } catch (Error const & ex) {
                    ++errors;
                    if (first.empty()) {
                        first = ex.what();
                    }
                }
            }
        }
    }
    std::string detail = fmt("%.0f runs, %.0f audit failures, %.0f errors", runs, violations, errors);
    if (!first.empty()) {
        detail += " (" + first + ")";
    }
    return {violations == 0 && errors == 0, detail};
}

// 3. Billing steps at the period boundaries with the published prices.
Outcome pricing_steps() {
    CloudSystem const sys = default_cloud_system();
    int wrong = 0, checked = 0;
    auto expect = [&](std::size_t type, double duration, double want) {
        ++checked;
        if (lease_cost(sys, type, duration) != want) {
            ++wrong;
        }
    };
    for (std::size_t i = 0; i < sys.vm_types().size(); ++i) {
        VmType const & vt = sys.vm_type(i);
        switch (sys.provider(vt.provider).scheme) {
        case BillingScheme::per_minute:
            expect(i, 59, vt.price);
            expect(i, 60, vt.price);
            expect(i, 61, 2 * vt.price);
            break;
        case BillingScheme::per_hour:
            expect(i, 3600, vt.price);
            expect(i, 3601, 2 * vt.price);
            break;
        case BillingScheme::hybrid:
            expect(i, 600, *vt.hybrid_base_price);
            expect(i, 720, *vt.hybrid_base_price + 2 * vt.price);
            break;
        }
    }
    // The published first-row prices themselves.
    double const b2ms = 0.0015, small = 0.06, base = 0.014, per_min = 0.0012;
    bool const table = lease_cost(BillingScheme::per_minute, b2ms, {}, 61) == 2 * b2ms &&
                       lease_cost(BillingScheme::per_hour, small, {}, 3601) == 2 * small &&
                       lease_cost(BillingScheme::hybrid, per_min, base, 720) == base + 2 * per_min &&
                       lease_cost(BillingScheme::hybrid, per_min, base, 600) == base;
    return {wrong == 0 && table, fmt("%.0f boundary cases, %.0f wrong", checked, wrong)};
}

// 4. The one-task hand trace.
Outcome golden_trace() {
    CloudSystem const sys = testing::single_provider({{1, 0.0015}});
    Workflow const w = augment(Workflow::build({{"t", 100, false}}, std::vector<EdgeSpec>{}));
    ResourcePool const pool = build_resource_pool(sys, w);
    Mapping m(w.size());
    m[w.index_of("t")] = 0;
    CipherTable const t = CipherTable::rc6();
    Schedule const s = evaluate(w, sys, pool, t, assign_ciphers_dp(w, sys, pool, m, t, {}), m);
    return {s.makespan == 197.0 && s.cost == 0.006,
            fmt("makespan %.17g s, cost %.17g USD", s.makespan, s.cost)};
}

// 5. Structural invariants and independent recomputation on random mappings.
Outcome random_mappings() {
    CipherTable const t = CipherTable::rc6();
    Rng rng(5005);
    int broken = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        CloudSystem const sys = testing::random_rates(rng, default_cloud_system());
        Workflow const w = augment(testing::random_dag(rng, 1 + rng.below(20), rng.uniform(0.05, 0.5)));
        ResourcePool const pool = build_resource_pool(sys, w);
        std::size_t const span = 1 + rng.below(std::min<std::size_t>(pool.size(), 8));
        std::size_t const offset = rng.below(pool.size() - span + 1);
        Mapping m(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!w.task(i).is_virtual) {
                m[i] = offset + rng.below(span);
            }
        }
        std::vector<bool> const cross = cross_instance_flags(w, m);
        CipherAssignment c;
        for (std::size_t h = 0; h < w.edges().size(); ++h) {
            c.choice.push_back(cross[h] ? std::optional<std::size_t>(rng.below(t.size())) : std::nullopt);
        }
        Schedule const s = evaluate(w, sys, pool, t, c, m);

        bool ok = true;
        for (DataEdge const & e : w.edges()) {
            ok = ok && s.timings[e.dst].start >= s.timings[e.src].finish;
        }
        std::map<std::size_t, std::vector<std::size_t>> on;
        double latest = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            latest = std::max(latest, s.timings[i].finish);
            if (!w.task(i).is_virtual) {
                on[m[i]].push_back(i);
            }
        }
        for (auto const & [inst, tasks] : on) {
            for (std::size_t a : tasks) {
                for (std::size_t b : tasks) {
                    if (a != b) {
                        auto const & x = s.timings[a];
                        auto const & y = s.timings[b];
                        ok = ok && (x.finish <= y.start || y.finish <= x.start);
                    }
                }
            }
        }
        ok = ok && s.makespan == s.timings[w.exit()].finish && s.makespan == latest;
        ok = ok && s.reliability > 0.0 && s.reliability <= 1.0;

        testing::Expected const x = testing::simulate(w, sys, pool, t, c, m);
        for (double const * p : {&s.cost, &s.reliability, &s.makespan}) {
            double const want = p == &s.cost ? x.cost : p == &s.reliability ? x.reliability : x.makespan;
            double const rel = std::abs(*p - want) / std::max(std::abs(want), 1e-300);
            worst = std::max(worst, want == 0.0 ? std::abs(*p) : rel);
            ok = ok && rel_close(*p, want, 1e-12);
        }
        broken += ok ? 0 : 1;
    }
    return {broken == 0, fmt("500 mappings, %.0f broken, max rel residual %.2g", broken, worst)};
}

// 6. LBS never puts two tasks of one level on the same instance.
Outcome level_distinctness() {
    std::vector<Workflow> ws;
    for (Bundled const & b : bundled_workflows()) {
        ws.push_back(b.workflow);
    }
    Rng rng(6006);
    for (int i = 0; i < 100; ++i) {
        ws.push_back(testing::random_dag(rng, 1 + rng.below(40), rng.uniform(0.02, 0.4)));
    }
    int clashes = 0;
    for (Workflow const & raw : ws) {
        Workflow const w = augment(raw);
        CloudSystem const sys = testing::random_rates(rng, default_cloud_system());
        ResourcePool const pool = build_resource_pool(sys, w);
        Mapping const m = lbs_allocate(w, sys, pool);
        std::vector<int> const lv = top_level(w);
        std::set<std::pair<int, std::size_t>> used;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!w.task(i).is_virtual && !used.insert({lv[i], m[i]}).second) {
                ++clashes;
            }
        }
    }
    return {clashes == 0, fmt("%.0f workflows, %.0f clashes", static_cast<double>(ws.size()), clashes)};
}

struct Means {
    double makespan = 0, cost = 0, reliability = 0;
};

Means mean_over_seeds(Workflow const & raw, Algorithm algo, double eta, int seeds) {
    CipherTable const t = CipherTable::rc6();
    Means m;
    for (int s = 0; s < seeds; ++s) {
        RunParams const p = sample_run_params(raw, default_cloud_system(), t, eta, 1, static_cast<std::size_t>(s));
        SchedulerConfig cfg;
        cfg.seed = p.run_seed;
        Schedule const sc = run_pipeline(p.workflow, p.cloud, t, p.constraints, cfg, algo).schedule;
        m.makespan += sc.makespan / seeds;
        m.cost += sc.cost / seeds;
        m.reliability += sc.reliability / seeds;
    }
    return m;
}

// 7. Looser budgets do not make the averaged schedule worse, for both
// pipelines of the default sweep.
Outcome eta_trend() {
    Workflow const w = generate_epigenomics(24, 0);
    bool pass = true;
    std::string detail;
    for (Algorithm const algo : {Algorithm{Allocator::lbs, false}, Algorithm{Allocator::lbs, true}}) {
        Means const lo = mean_over_seeds(w, algo, 0.1, 15);
        Means const hi = mean_over_seeds(w, algo, 0.7, 15);
        bool const ok = hi.makespan <= lo.makespan && hi.cost <= lo.cost && hi.reliability >= lo.reliability;
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + algo.name() + (ok ? " ok" : " reversed") +
                  fmt(" (eta 0.1 -> 0.7: makespan %.4g -> %.4g s, cost %.4g -> %.4g USD", lo.makespan,
                      hi.makespan, lo.cost, hi.cost) +
                  fmt(", reliability %.9f -> %.9f)", lo.reliability, hi.reliability);
    }
    return {pass, detail};
}

// 8. LBS is cheaper than the random baseline in most seeded comparisons.
Outcome baseline_dominance() {
    CipherTable const t = CipherTable::rc6();
    std::vector<double> const etas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    bool pass = true;
    std::string detail;
    for (Bundled const & b : bundled_workflows()) {
        int wins = 0;
        for (std::size_t seed = 0; seed < 15; ++seed) {
            double lbs = 0, rnd = 0;
            for (double eta : etas) {
                RunParams const p = sample_run_params(b.workflow, default_cloud_system(), t, eta, 1, seed);
                SchedulerConfig cfg;
                cfg.seed = p.run_seed;
                lbs += run_pipeline(p.workflow, p.cloud, t, p.constraints, cfg, {Allocator::lbs, false}).schedule.cost;
                rnd += run_pipeline(p.workflow, p.cloud, t, p.constraints, cfg, {Allocator::random, false}).schedule.cost;
            }
            wins += lbs < rnd ? 1 : 0;
        }
        pass = pass && wins * 10 >= 15 * 7;
        detail += (detail.empty() ? "" : ", ") + b.name + " " + std::to_string(wins) + "/15";
    }
    return {pass, detail};
}

// 9. Run time at n = 100.
Outcome performance() {
    CipherTable const t = CipherTable::rc6();
    bool pass = true;
    std::string detail;
    for (WorkflowFamily f : {WorkflowFamily::epigenomics, WorkflowFamily::cybershake}) {
        RunParams const p = sample_run_params(generate_workflow(f, 100, 0), default_cloud_system(), t, 0.5, 1, 0);
        SchedulerConfig cfg;
        cfg.seed = p.run_seed;
        auto t0 = Clock::now();
        run_pipeline(p.workflow, p.cloud, t, p.constraints, cfg, {Allocator::lbs, false});
        double const lbs = seconds_since(t0);
        t0 = Clock::now();
        PipelineResult const r = run_pipeline(p.workflow, p.cloud, t, p.constraints, cfg, {Allocator::lbs, true});
        double const full = seconds_since(t0);
        pass = pass && lbs < 2.0 && full < 60.0;
        detail += (detail.empty() ? "" : "; ") + std::string(to_string(f)) +
                  fmt("-100: lbs %.3f s, lbs+ls %.2f s (%.0f passes)", lbs, full, r.trace.iterations);
    }
    return {pass, detail};
}

// 10. Identical sweeps give identical raw CSV bytes.
Outcome determinism() {
    ExperimentConfig cfg;
    cfg.workflow_name = "epigenomics-24";
    cfg.workflow = generate_epigenomics(24, 0);
    std::string const a = raw_csv(run_sweep(cfg));
    std::string const b = raw_csv(run_sweep(cfg));
    return {a == b && !a.empty(), fmt("%.0f bytes per run, ", static_cast<double>(a.size())) +
                                      (a == b ? "identical" : "different")};
}

} // namespace

int main() {
    struct Criterion {
        char const * name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> const criteria{
        {"dp matches exhaustive search", dp_vs_bruteforce},
        {"pipeline constraint audit", constraint_audit},
        {"billing step functions", pricing_steps},
        {"single task golden trace", golden_trace},
        {"random mapping invariants", random_mappings},
        {"lbs level distinctness", level_distinctness},
        {"eta trend", eta_trend},
        {"lbs cheaper than random", baseline_dominance},
        {"n = 100 run time", performance},
        {"sweep determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (std::exception const & e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%-4s %2zu. %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
