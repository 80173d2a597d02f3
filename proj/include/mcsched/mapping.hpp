#pragma once

#include <mcsched/workflow.hpp>

#include <cstddef>
#include <limits>
#include <vector>

namespace mcsched {

/// Task to resource-pool index. Virtual tasks stay unmapped.
struct Mapping {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> instance;

    Mapping() = default;
    explicit Mapping(std::size_t tasks) : instance(tasks, npos) {}

    bool mapped(std::size_t task) const { return instance.at(task) != npos; }
    std::size_t operator[](std::size_t task) const { return instance.at(task); }
    std::size_t & operator[](std::size_t task) { return instance.at(task); }

    friend bool operator==(Mapping const &, Mapping const &) = default;
};

/// Per edge: both endpoints are real tasks placed on different instances.
inline std::vector<bool> cross_instance_flags(Workflow const & w, Mapping const & m) {
    std::vector<bool> out(w.edges().size(), false);
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        DataEdge const & e = w.edge(h);
        if (w.task(e.src).is_virtual || w.task(e.dst).is_virtual) {
            continue;
        }
        out[h] = m[e.src] != m[e.dst];
    }
    return out;
}

} // namespace mcsched
