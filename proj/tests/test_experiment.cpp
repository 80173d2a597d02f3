#include "support.hpp"

#include <mcsched/error.hpp>
#include <mcsched/experiment.hpp>
#include <mcsched/generators.hpp>

#include <doctest.h>

#include <set>
#include <sstream>

using namespace mcsched;

namespace {

std::size_t lines(std::string const & s) {
    std::size_t n = 0;
    for (char c : s) {
        n += c == '\n' ? 1 : 0;
    }
    return n;
}

std::size_t real_count(Workflow const & w) {
    std::size_t n = 0;
    for (Task const & t : w.tasks()) {
        n += t.is_virtual ? 0 : 1;
    }
    return n;
}

} // namespace

TEST_CASE("sampling is deterministic and independent of eta") {
    CipherTable const t = CipherTable::rc6();
    Workflow const w = generate_cybershake(24, 3);
    CloudSystem const sys = default_cloud_system();
    RunParams const a = sample_run_params(w, sys, t, 0.4, 7, 2);
    RunParams const b = sample_run_params(w, sys, t, 0.4, 7, 2);
    RunParams const c = sample_run_params(w, sys, t, 0.1, 7, 2);
    RunParams const d = sample_run_params(w, sys, t, 0.4, 7, 3);
    CHECK(a.workflow == b.workflow);
    CHECK(to_cloud_config(a.cloud) == to_cloud_config(b.cloud));
    CHECK(a.constraints.system_cap == b.constraints.system_cap);
    CHECK(a.workflow == c.workflow);
    CHECK(to_cloud_config(a.cloud) == to_cloud_config(c.cloud));
    CHECK_FALSE(a.workflow == d.workflow);
    CHECK(a.run_seed == run_seed(7, 2));

    for (std::size_t h = 0; h < a.workflow.edges().size(); ++h) {
        DataEdge const & e = a.workflow.edge(h);
        if (a.workflow.touches_virtual(h)) {
            continue;
        }
        CHECK(e.sec_weight >= 0.1);
        CHECK(e.sec_weight <= 1.0);
        CHECK(std::abs(e.sec_weight * 10 - std::round(e.sec_weight * 10)) < 1e-9);
        REQUIRE(e.vuln_cap);
        bool listed = false;
        for (Cipher const & cph : t.ciphers()) {
            listed = listed || cph.vulnerability == *e.vuln_cap;
        }
        CHECK(listed);
    }
    for (VmType const & vt : a.cloud.vm_types()) {
        CHECK(vt.fail_rate >= 1e-8);
        CHECK(vt.fail_rate <= 1e-7);
    }
    CHECK(a.constraints.system_cap == doctest::Approx(0.4 * max_vulnerability(a.workflow, t)));
}

TEST_CASE("budget follows eta") {
    CipherTable const t = CipherTable::rc6();
    Workflow const one = testing::chain({1, 1}, {5});
    SecuritySampling fixed;
    fixed.weight_lo = fixed.weight_hi = 1.0;
    RunParams const p = sample_run_params(one, default_cloud_system(), t, 0.3, 1, 0, fixed);
    CHECK(p.constraints.system_cap == doctest::Approx(29.4).epsilon(1e-12));
    CHECK(sample_run_params(one, default_cloud_system(), t, 0.0, 1, 0, fixed).constraints.system_cap == 0.0);
}

TEST_CASE("sweep shape and determinism") {
    ExperimentConfig cfg;
    cfg.workflow_name = "epi-10";
    cfg.workflow = generate_epigenomics(10, 0);
    cfg.reps = 15;
    std::vector<ResultRow> const rows = run_sweep(cfg);
    CHECK(rows.size() == 210);
    for (ResultRow const & r : rows) {
        CHECK(r.feasible);
        CHECK(r.n == 10);
        CHECK(r.reliability > 0.0);
        CHECK(r.reliability <= 1.0);
    }
    CHECK(rows.front().algorithm == "lbs");
    CHECK(rows.back().algorithm == "lbs+ls");
    CHECK(rows[15].eta == 0.2);
    std::string const agg = aggregate_csv(rows);
    CHECK(lines(agg) == 15);
    std::string const raw = raw_csv(rows);
    CHECK(lines(raw) == 211);
    CHECK(raw.find("wall") == std::string::npos);
    CHECK(raw_csv(run_sweep(cfg)) == raw);
    CHECK(lines(timings_csv(rows)) == 211);
    CHECK(rows_json(rows).find("wall") == std::string::npos);
}

TEST_CASE("sweep validation and infeasible rows") {
    ExperimentConfig cfg;
    cfg.workflow = generate_cybershake(8, 0);
    cfg.etas = {1.5};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.etas = {0.5};
    cfg.reps = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);

    // A cipher table whose strongest cipher still exceeds every cap.
    cfg.reps = 2;
    cfg.ciphers = CipherTable({{1, 4, 0, 50, 1.0}, {2, 8, 0, 40, 2.0}});
    cfg.sampling.edge_caps = false;
    cfg.etas = {0.0};
    std::vector<ResultRow> const rows = run_sweep(cfg);
    REQUIRE(rows.size() == 4);
    bool any_bad = false;
    for (ResultRow const & r : rows) {
        if (!r.feasible) {
            any_bad = true;
            CHECK_FALSE(r.error.empty());
        }
    }
    CHECK(any_bad);
    std::string const raw = raw_csv(rows);
    CHECK(raw.find(",,,0,") != std::string::npos);
}

TEST_CASE("format double") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(197) == "197");
    CHECK(format_double(0.006) == "0.006");
    double const x = 1.0 / 3.0;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("audit catches corrupted schedules") {
    CipherTable const t = CipherTable::rc6();
    RunParams const p = sample_run_params(generate_epigenomics(12, 0), default_cloud_system(), t, 0.1, 4, 0);
    PipelineResult r = run_pipeline(p.workflow, p.cloud, t, p.constraints, SchedulerConfig{},
                                    Algorithm{Allocator::lbs, false});
    ScheduleRecord rec{p.workflow, p.cloud, r.pool, t, p.constraints, r.schedule};
    AuditReport const ok = validate_schedule(rec);
    REQUIRE(ok.ok());
    CHECK(ok.checks.size() == 12);

    ScheduleRecord weak = rec;
    bool swapped = false;
    for (auto & c : weak.schedule.ciphers.choice) {
        if (c) {
            c = 0;
            swapped = true;
        }
    }
    REQUIRE(swapped);
    AuditReport const bad = validate_schedule(weak);
    CHECK_FALSE(bad.ok());
    CHECK_FALSE(bad.find("system_vulnerability")->passed);
    CHECK(bad.find("system_vulnerability")->residual > 0.0);

    ScheduleRecord late = rec;
    late.schedule.makespan += 1.0;
    AuditReport const bad_span = validate_schedule(late);
    CHECK_FALSE(bad_span.find("makespan")->passed);
    CHECK(bad_span.find("cost")->passed);

    ScheduleRecord pricey = rec;
    pricey.schedule.cost *= 1.01;
    CHECK_FALSE(validate_schedule(pricey).find("cost")->passed);

    ScheduleRecord reordered = rec;
    std::size_t const exit = reordered.workflow.exit();
    std::size_t const last = reordered.workflow.predecessors(exit).front();
    reordered.schedule.timings[last].start -= 50;
    AuditReport const bad_order = validate_schedule(reordered);
    CHECK_FALSE(bad_order.ok());
}

TEST_CASE("generated shapes") {
    for (std::size_t n : {8u, 9u, 10u, 11u, 24u, 30u, 100u}) {
        Workflow const e = generate_epigenomics(n, 1);
        CHECK(real_count(e) == n);
        Workflow const a = augment(e);
        CHECK(a.successors(a.entry()).size() == 1);
        CHECK(a.predecessors(a.exit()).size() == 1);
        CHECK(max_parallel_set(a).size() == (n - 4) / 4);
    }
    for (std::size_t n : {6u, 7u, 24u, 30u, 100u}) {
        Workflow const c = generate_cybershake(n, 1);
        CHECK(real_count(c) == n);
        Workflow const a = augment(c);
        CHECK(a.successors(a.entry()).size() == 2);
        CHECK(a.predecessors(a.exit()).size() == 2);
    }
    CHECK_THROWS_AS(generate_epigenomics(7), DomainError);
    CHECK_THROWS_AS(generate_cybershake(5), DomainError);
    CHECK(generate_epigenomics(24, 5) == generate_epigenomics(24, 5));
    CHECK_FALSE(generate_epigenomics(24, 5) == generate_epigenomics(24, 6));

    CHECK(*generate_from_spec("gen:cybershake:30:2") == generate_cybershake(30, 2));
    CHECK(*generate_from_spec("gen:epigenomics:24") == generate_epigenomics(24, 0));
    CHECK_FALSE(generate_from_spec("data/x.json"));
    CHECK_THROWS_AS(generate_from_spec("gen:montage:24"), DomainError);
    CHECK_THROWS_AS(generate_from_spec("gen:cybershake:x"), DomainError);
    CHECK_THROWS_AS(generate_from_spec("gen:cybershake"), DomainError);
}
