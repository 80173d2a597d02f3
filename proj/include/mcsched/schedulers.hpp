#pragma once

#include <mcsched/cloud.hpp>
#include <mcsched/mapping.hpp>
#include <mcsched/schedule.hpp>
#include <mcsched/security.hpp>
#include <mcsched/workflow.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcsched {

/// Weights of cost, time and unreliability in a placement score.
struct MetricWeights {
    double alpha = 0.0; ///< cost
    double beta = 0.0;  ///< processing time or makespan
    double gamma = 0.0; ///< reliability

    /// Throws DomainError unless all are >= 0 with a positive sum.
    void validate() const;
};

struct SchedulerConfig {
    MetricWeights lbs_weights{0.7, 0.2, 0.1};
    MetricWeights ls_weights{0.6, 0.2, 0.2};
    int num_iter = 10;
    std::uint64_t seed = 0;
    /// Keep the incumbent ciphers during local search instead of re-running
    /// the assignment for each tentative move.
    bool frozen_ciphers = false;

    void validate() const;
};

/// Min-max normalized weighted score per candidate; lower is better.
/// A criterion whose values are all equal contributes 0.
std::vector<double> weighted_metric(MetricWeights const & weights, std::span<double const> cost,
                                    std::span<double const> time,
                                    std::span<double const> reliability);

/// What placing one task on one instance costs, ignoring crypto.
struct PlacementScore {
    double cost = 0.0;        ///< lease over PT plus outgoing transfer cost
    double time = 0.0;        ///< PT: execution plus outgoing transfer time
    double reliability = 1.0; ///< outgoing links times the instance over PT
};

/// Every successor of `task` must already be placed.
PlacementScore placement_score(Workflow const & w, CloudSystem const & sys,
                               ResourcePool const & pool, Mapping const & mapping,
                               std::size_t task, std::size_t instance);

/// Real tasks by decreasing level, then decreasing rank, then index.
std::vector<std::size_t> lbs_order(Workflow const & w, WorkflowAnalysis const & analysis);

/// List scheduling from the exit upwards. Tasks on one level get distinct
/// instances; throws CapacityError if a level outgrows the pool.
Mapping lbs_allocate(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                     MetricWeights const & weights = {0.7, 0.2, 0.1});

struct LsMove {
    int iteration = 0;
    std::size_t task = 0;
    std::size_t from = 0;
    std::size_t to = 0;
    double metric_from = 0.0; ///< score of staying, at decision time
    double metric_to = 0.0;   ///< score of the chosen instance
};

struct LsTrace {
    int iterations = 0;
    std::size_t evaluations = 0;
    std::vector<LsMove> moves; ///< one entry per task decision
};

/// Iterated per-task reassignment scored on whole-schedule makespan, cost
/// and reliability. Stops after `num_iter` passes or a pass without change.
Mapping local_search(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                     CipherTable const & table, SecurityConstraints const & cons,
                     Mapping const & start, SchedulerConfig const & config,
                     LsTrace * trace = nullptr);

/// Independent uniform instance per real task.
Mapping baseline_random(Workflow const & w, ResourcePool const & pool, std::uint64_t seed);

/// LBS order, cheapest instance per task, no level distinctness.
Mapping baseline_greedy_cost(Workflow const & w, CloudSystem const & sys,
                             ResourcePool const & pool);

enum class Allocator { lbs, random, greedy };

struct Algorithm {
    Allocator base = Allocator::lbs;
    bool local_search = false;

    /// "lbs", "lbs+ls", "random", "random+ls", "greedy", "greedy+ls".
    std::string name() const;
    static std::optional<Algorithm> parse(std::string_view name);
    friend bool operator==(Algorithm const &, Algorithm const &) = default;
};

struct PipelineResult {
    ResourcePool pool;
    Mapping allocation; ///< before local search
    Schedule schedule;
    LsTrace trace;
};

/// Pool sizing, allocation, optional local search, cipher assignment and
/// evaluation. `w` must be augmented. Propagates InfeasibleError.
PipelineResult run_pipeline(Workflow const & w, CloudSystem const & sys, CipherTable const & table,
                            SecurityConstraints const & cons, SchedulerConfig const & config,
                            Algorithm algo);

} // namespace mcsched
