#pragma once

#include <mcsched/cloud.hpp>
#include <mcsched/mapping.hpp>
#include <mcsched/security.hpp>
#include <mcsched/workflow.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace mcsched {

/// Structural quantities derived once per workflow and cloud.
struct WorkflowAnalysis {
    std::vector<int> levels;
    std::vector<double> ranks;
    /// Evaluation order: level ascending, rank descending, index ascending.
    std::vector<std::size_t> eval_order;
};

WorkflowAnalysis analyze(Workflow const & w, CloudSystem const & sys);

struct TaskTiming {
    std::size_t instance = Mapping::npos; ///< npos for virtual tasks
    double start = 0.0;
    double finish = 0.0;
    double dec = 0.0;
    double exec = 0.0;
    double enc = 0.0;
    double transfer = 0.0;

    double processing() const { return dec + exec + enc + transfer; }
};

/// One leased instance, in the order instances were first used.
struct Lease {
    std::size_t instance = 0;
    std::size_t vm_type = 0;
    double start = 0.0;
    double finish = 0.0;

    double duration() const { return finish - start; }
};

struct Schedule {
    Mapping mapping;
    std::vector<Lease> leases;
    std::vector<TaskTiming> timings; ///< indexed by task
    CipherAssignment ciphers;
    double makespan = 0.0;
    double cost = 0.0;
    double reliability = 1.0;
    double lease_cost = 0.0;    ///< part of `cost` paid for leases
    double transfer_cost = 0.0; ///< part of `cost` paid for data transfers
};

/// Per-task overheads of one placement.
struct TaskOverheads {
    double dec_time = 0.0;
    double transfer_time = 0.0;
    double transfer_cost = 0.0;
    double enc_time = 0.0;
    double rel = 1.0;

    friend bool operator==(TaskOverheads const &, TaskOverheads const &) = default;
};

/// Decryption of incoming data, and encryption, transfer time, transfer
/// cost and link reliability of outgoing data, for cross-instance edges.
/// Throws DomainError when such an edge has no cipher.
TaskOverheads process_task(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                           CipherTable const & table, CipherAssignment const & ciphers,
                           Mapping const & mapping, std::size_t task,
                           CryptoCapacity mode = CryptoCapacity::normalized);

/// Outgoing transfer time, transfer cost and link reliability of `task`
/// placed on `instance`, with every successor already placed. Crypto is
/// not included.
TaskOverheads outgoing_overheads(Workflow const & w, CloudSystem const & sys,
                                 ResourcePool const & pool, Mapping const & mapping,
                                 std::size_t task, std::size_t instance);

/// Times, costs and rates a mapping and cipher assignment into a schedule.
/// Throws DomainError for an unmapped real task or an index outside the pool.
Schedule evaluate(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                  CipherTable const & table, CipherAssignment const & ciphers,
                  Mapping const & mapping, CryptoCapacity mode = CryptoCapacity::normalized);

Schedule evaluate(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                  CipherTable const & table, CipherAssignment const & ciphers,
                  Mapping const & mapping, WorkflowAnalysis const & analysis,
                  CryptoCapacity mode = CryptoCapacity::normalized);

/// Everything needed to re-check a schedule without the run that made it.
struct ScheduleRecord {
    Workflow workflow; ///< augmented, with the run's security attributes
    CloudSystem cloud; ///< with the run's failure rates
    ResourcePool pool; ///< as built by build_resource_pool
    CipherTable ciphers;
    SecurityConstraints constraints;
    Schedule schedule;
};

/// Structured export with a stable field order.
std::string to_schedule_json(ScheduleRecord const & record);
ScheduleRecord parse_schedule_json(std::string_view text);

} // namespace mcsched
