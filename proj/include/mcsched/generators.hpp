#pragma once

#include <mcsched/workflow.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mcsched {

enum class WorkflowFamily { epigenomics, cybershake };

std::string_view to_string(WorkflowFamily f);
std::optional<WorkflowFamily> parse_workflow_family(std::string_view s);

/// Pipelined fan-out/fan-in shape: a split task feeds parallel chains of
/// four stages that merge into an index and a pileup task.
/// n = 4k + 4 for k chains; a remainder lengthens the first chains.
/// Requires n >= 8.
Workflow generate_epigenomics(std::size_t n, std::uint64_t seed = 0);

/// Wide fan-out shape: two extraction tasks feed k synthesis tasks, each
/// followed by a peak calculation; two zip tasks gather the results.
/// n = 2k + 4; an odd remainder adds one synthesis task without a peak.
/// Requires n >= 6.
Workflow generate_cybershake(std::size_t n, std::uint64_t seed = 0);

Workflow generate_workflow(WorkflowFamily family, std::size_t n, std::uint64_t seed = 0);

/// Parses "gen:<family>:<n>" or "gen:<family>:<n>:<seed>".
/// Returns nothing if `spec` does not start with "gen:"; throws DomainError
/// if it does but is malformed.
std::optional<Workflow> generate_from_spec(std::string_view spec);

} // namespace mcsched
