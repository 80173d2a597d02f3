#pragma once

#include <mcsched/cloud.hpp>
#include <mcsched/schedule.hpp>
#include <mcsched/schedulers.hpp>
#include <mcsched/security.hpp>
#include <mcsched/workflow.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mcsched {

/// Ranges for the per-run random draws.
struct SecuritySampling {
    double weight_lo = 0.1;
    double weight_hi = 1.0;
    double rate_lo = 1e-8; ///< failures per second
    double rate_hi = 1e-7;
    bool edge_caps = true; ///< cap each edge at the vulnerability of a random cipher
};

/// One run's inputs: the workflow with sampled weights and caps, the cloud
/// with sampled failure rates, and the constraints for the chosen eta.
struct RunParams {
    Workflow workflow; ///< augmented
    CloudSystem cloud;
    SecurityConstraints constraints;
    std::uint64_t run_seed = 0;
};

/// Draws depend on (seed, rep) only, so every eta of a repetition sees the
/// same weights, caps and rates. The budget is eta times the largest
/// possible system vulnerability.
RunParams sample_run_params(Workflow const & workflow, CloudSystem const & cloud,
                            CipherTable const & table, double eta, std::uint64_t seed,
                            std::size_t rep, SecuritySampling const & sampling = {},
                            int scale_digits = 1,
                            CryptoCapacity mode = CryptoCapacity::normalized);

/// Seed of repetition `rep` in a sweep with base seed `seed`.
std::uint64_t run_seed(std::uint64_t seed, std::size_t rep);

struct ExperimentConfig {
    std::string workflow_name;
    Workflow workflow; ///< raw or augmented
    CloudSystem cloud = default_cloud_system();
    CipherTable ciphers = CipherTable::rc6();
    std::vector<Algorithm> algorithms{{Allocator::lbs, false}, {Allocator::lbs, true}};
    std::vector<double> etas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    int reps = 15;
    std::uint64_t seed = 1;
    SchedulerConfig scheduler;
    SecuritySampling sampling;
    int scale_digits = 1;
    CryptoCapacity crypto_capacity = CryptoCapacity::normalized;

    /// Throws DomainError for eta outside [0, 1], reps < 1 or no algorithms.
    void validate() const;
};

struct ResultRow {
    std::string workflow;
    std::size_t n = 0; ///< real tasks
    std::string algorithm;
    double eta = 0.0;
    std::size_t rep = 0;
    std::uint64_t seed = 0; ///< run seed of the repetition
    double makespan = 0.0;
    double cost = 0.0;
    double reliability = 0.0;
    double wall_ms = 0.0;
    bool feasible = false;
    std::string error; ///< why the row is infeasible
};

using SweepProgress = std::function<void(ResultRow const &)>;

/// Every algorithm x eta x repetition, in that nesting order. A run that
/// throws or fails the audit is kept as an infeasible row.
std::vector<ResultRow> run_sweep(ExperimentConfig const & cfg, SweepProgress const & progress = {});

/// Raw rows without wall-clock times; identical inputs give identical bytes.
std::string raw_csv(std::vector<ResultRow> const & rows);
/// Wall-clock time per row, keyed like the raw rows.
std::string timings_csv(std::vector<ResultRow> const & rows);
/// Mean and sample standard deviation per (workflow, algorithm, eta) over
/// feasible rows, in first-appearance order.
std::string aggregate_csv(std::vector<ResultRow> const & rows);
std::string rows_json(std::vector<ResultRow> const & rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

// Audit ---------------------------------------------------------------------

struct AuditCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0; ///< worst violation, 0 when passed
    std::string detail;
};

struct AuditReport {
    std::vector<AuditCheck> checks;

    bool ok() const;
    AuditCheck const * find(std::string_view name) const;
};

/// Recomputes the security constraints, timing identities, makespan, cost and
/// reliability of a schedule from the record's inputs.
AuditReport validate_schedule(ScheduleRecord const & record, double rel_tol = 1e-9);

} // namespace mcsched
