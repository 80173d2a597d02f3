#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mcsched {

// Canonical units used throughout the library:
//   work MI, capacity MIPS, data megabits, bandwidth Mbps, time s, money USD.

struct Task {
    std::string id;
    double work = 0.0; // MI
    bool is_virtual = false;
};

struct DataEdge {
    std::size_t src = 0; // task index
    std::size_t dst = 0;
    double size = 0.0;       // megabits
    double sec_weight = 1.0; // weight in the system vulnerability sum
    /// Per-edge vulnerability bound; empty means bounded only by the cipher table.
    std::optional<double> vuln_cap;
};

/// Edge description by task id, used while building a workflow.
struct EdgeSpec {
    std::string src;
    std::string dst;
    double size = 0.0;
    double sec_weight = 1.0;
    std::optional<double> vuln_cap;
};

/// Immutable DAG of tasks and data-transfer edges.
///
/// Edges are kept in lexicographic (src index, dst index) order; that order
/// is the edge numbering used by the cipher assignment. An augmented
/// workflow has a virtual entry at index 0 and a virtual exit at the last
/// index.
class Workflow {
public:
    Workflow() = default;

    /// Validates ids, edge endpoints and acyclicity.
    /// Throws StructuralError on any violation.
    static Workflow build(std::vector<Task> tasks, std::vector<EdgeSpec> const & edges);
    static Workflow build(std::vector<Task> tasks, std::vector<DataEdge> edges);

    std::size_t size() const { return tasks_.size(); }
    bool empty() const { return tasks_.empty(); }

    std::vector<Task> const & tasks() const { return tasks_; }
    std::vector<DataEdge> const & edges() const { return edges_; }
    Task const & task(std::size_t i) const { return tasks_.at(i); }
    DataEdge const & edge(std::size_t h) const { return edges_.at(h); }

    /// Edge indices entering / leaving task i.
    std::span<std::size_t const> in_edges(std::size_t i) const { return in_.at(i); }
    std::span<std::size_t const> out_edges(std::size_t i) const { return out_.at(i); }

    std::vector<std::size_t> predecessors(std::size_t i) const;
    std::vector<std::size_t> successors(std::size_t i) const;

    std::optional<std::size_t> find(std::string_view id) const;
    std::size_t index_of(std::string_view id) const;

    /// Edge index of (src, dst), if present.
    std::optional<std::size_t> find_edge(std::size_t src, std::size_t dst) const;

    bool is_augmented() const { return augmented_; }
    std::size_t entry() const;
    std::size_t exit() const;

    /// True when either endpoint of edge h is a virtual task.
    bool touches_virtual(std::size_t h) const;

    /// A task order in which every edge points forward.
    std::vector<std::size_t> const & topological_order() const { return topo_; }

    /// Copy with the security attributes of every edge replaced.
    Workflow with_security(std::span<double const> weights,
                           std::span<std::optional<double> const> caps) const;

    /// Workflow without its virtual tasks and their edges.
    Workflow strip_virtual() const;

private:
    std::vector<Task> tasks_;
    std::vector<DataEdge> edges_;
    std::vector<std::vector<std::size_t>> in_;
    std::vector<std::vector<std::size_t>> out_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> topo_;
    bool augmented_ = false;
};

bool operator==(Task const & a, Task const & b);
bool operator==(DataEdge const & a, DataEdge const & b);
bool operator==(Workflow const & a, Workflow const & b);

inline constexpr std::string_view kEntryId = "__entry__";
inline constexpr std::string_view kExitId = "__exit__";

/// Adds the virtual entry and exit tasks with zero-size edges.
/// Returns the input unchanged when it is already augmented.
Workflow augment(Workflow const & raw);

/// Longest-path depth from the entry; entry is level 0.
std::vector<int> top_level(Workflow const & w);

/// Upward rank: worst-case processing time from a task to the exit,
/// using per-task mean execution times and the mean bandwidth.
std::vector<double> rank(Workflow const & w, std::span<double const> avg_exec, double avg_bw);

/// Real tasks of the most populous topological level (lowest level on ties).
std::vector<std::size_t> max_parallel_set(Workflow const & w);

enum class WorkflowFormat { dax_xml, native_json };

struct DaxOptions {
    /// MI per second of DAX runtime.
    double reference_mips = 1.0;
    /// Accept input files that no job produces and that are not declared
    /// with a top-level <file> element.
    bool allow_external_inputs = false;
};

std::optional<WorkflowFormat> parse_format(std::string_view name);
/// Guess from the extension: .xml/.dax -> DAX, anything else -> JSON.
WorkflowFormat format_from_path(std::filesystem::path const & path);

/// Reads a workflow file; the result is not augmented.
/// Throws IngestionError with the offending location.
Workflow parse_workflow(std::filesystem::path const & path, WorkflowFormat format,
                        DaxOptions const & dax = {});

Workflow parse_native_json(std::string_view text);
Workflow parse_dax(std::string_view text, DaxOptions const & dax = {});

/// Native JSON text of the real tasks and edges.
std::string to_native_json(Workflow const & w);

} // namespace mcsched
