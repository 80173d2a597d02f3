#include <mcsched/workflow.hpp>

#include <mcsched/error.hpp>

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

namespace mcsched {

namespace {

// Walks predecessors inside the unsorted remainder until a task repeats;
// that task lies on a cycle.
std::size_t find_cycle_member(std::vector<DataEdge> const & edges,
                              std::vector<std::vector<std::size_t>> const & in,
                              std::vector<int> const & indegree) {
    std::size_t v = 0;
    while (indegree[v] == 0) {
        ++v;
    }
    std::vector<bool> seen(indegree.size(), false);
    while (!seen[v]) {
        seen[v] = true;
        for (std::size_t h : in[v]) {
            if (indegree[edges[h].src] > 0) {
                v = edges[h].src;
                break;
            }
        }
    }
    return v;
}

} // namespace

Workflow Workflow::build(std::vector<Task> tasks, std::vector<EdgeSpec> const & specs) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        index.emplace(tasks[i].id, i);
    }
    std::vector<DataEdge> edges;
    edges.reserve(specs.size());
    for (EdgeSpec const & s : specs) {
        auto src = index.find(s.src);
        auto dst = index.find(s.dst);
        if (src == index.end() || dst == index.end()) {
            throw StructuralError("edge " + s.src + " -> " + s.dst + " references an unknown task");
        }
        edges.push_back(DataEdge{src->second, dst->second, s.size, s.sec_weight, s.vuln_cap});
    }
    return build(std::move(tasks), std::move(edges));
}

Workflow Workflow::build(std::vector<Task> tasks, std::vector<DataEdge> edges) {
    Workflow w;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        Task const & t = tasks[i];
        if (!(t.work >= 0.0)) {
            throw StructuralError("task " + t.id + " has negative work");
        }
        if (t.is_virtual && t.work != 0.0) {
            throw StructuralError("virtual task " + t.id + " has nonzero work");
        }
        if (!w.index_.emplace(t.id, i).second) {
            throw StructuralError("duplicate task id " + t.id);
        }
    }

    std::sort(edges.begin(), edges.end(), [](DataEdge const & a, DataEdge const & b) {
        return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
    });

    std::size_t const n = tasks.size();
    w.in_.assign(n, {});
    w.out_.assign(n, {});
    for (std::size_t h = 0; h < edges.size(); ++h) {
        DataEdge const & e = edges[h];
        if (e.src >= n || e.dst >= n) {
            throw StructuralError("edge endpoint out of range");
        }
        std::string const label = tasks[e.src].id + " -> " + tasks[e.dst].id;
        if (e.src == e.dst) {
            throw StructuralError("self-loop on task " + tasks[e.src].id);
        }
        if (h > 0 && edges[h - 1].src == e.src && edges[h - 1].dst == e.dst) {
            throw StructuralError("duplicate edge " + label);
        }
        if (!(e.size >= 0.0) || !(e.sec_weight >= 0.0) || (e.vuln_cap && !(*e.vuln_cap >= 0.0))) {
            throw StructuralError("edge " + label + " has a negative attribute");
        }
        if ((tasks[e.src].is_virtual || tasks[e.dst].is_virtual) && e.size != 0.0) {
            throw StructuralError("edge " + label + " touches a virtual task but carries data");
        }
        w.out_[e.src].push_back(h);
        w.in_[e.dst].push_back(h);
    }

    // Kahn's algorithm; a leftover means a cycle.
    std::vector<int> indegree(n);
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        indegree[i] = static_cast<int>(w.in_[i].size());
        if (indegree[i] == 0) {
            ready.push_back(i);
        }
    }
    w.topo_.reserve(n);
    while (!ready.empty()) {
        std::size_t const v = ready.front();
        ready.pop_front();
        w.topo_.push_back(v);
        for (std::size_t h : w.out_[v]) {
            if (--indegree[edges[h].dst] == 0) {
                ready.push_back(edges[h].dst);
            }
        }
    }
    if (w.topo_.size() != n) {
        std::size_t const v = find_cycle_member(edges, w.in_, indegree);
        throw StructuralError("cycle detected through task " + tasks[v].id);
    }

    w.augmented_ = n >= 2 && tasks.front().is_virtual && tasks.back().is_virtual;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (tasks[i].is_virtual) {
            throw StructuralError("virtual task " + tasks[i].id + " is not at the boundary");
        }
    }
    if (w.augmented_) {
        if (!w.in_.front().empty() || !w.out_.back().empty()) {
            throw StructuralError("entry has predecessors or exit has successors");
        }
    } else if (n > 0 && (tasks.front().is_virtual || tasks.back().is_virtual)) {
        throw StructuralError("workflow has only one virtual boundary task");
    }

    w.tasks_ = std::move(tasks);
    w.edges_ = std::move(edges);
    return w;
}

std::vector<std::size_t> Workflow::predecessors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t h : in_edges(i)) {
        out.push_back(edges_[h].src);
    }
    return out;
}

std::vector<std::size_t> Workflow::successors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t h : out_edges(i)) {
        out.push_back(edges_[h].dst);
    }
    return out;
}

std::optional<std::size_t> Workflow::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t Workflow::index_of(std::string_view id) const {
    auto const i = find(id);
    if (!i) {
        throw StructuralError("unknown task id " + std::string(id));
    }
    return *i;
}

std::optional<std::size_t> Workflow::find_edge(std::size_t src, std::size_t dst) const {
    for (std::size_t h : out_edges(src)) {
        if (edges_[h].dst == dst) {
            return h;
        }
    }
    return std::nullopt;
}

std::size_t Workflow::entry() const {
    if (!augmented_) {
        throw StructuralError("workflow is not augmented");
    }
    return 0;
}

std::size_t Workflow::exit() const {
    if (!augmented_) {
        throw StructuralError("workflow is not augmented");
    }
    return tasks_.size() - 1;
}

bool Workflow::touches_virtual(std::size_t h) const {
    DataEdge const & e = edges_.at(h);
    return tasks_[e.src].is_virtual || tasks_[e.dst].is_virtual;
}

Workflow Workflow::with_security(std::span<double const> weights,
                                 std::span<std::optional<double> const> caps) const {
    if (weights.size() != edges_.size() || caps.size() != edges_.size()) {
        throw DomainError("security attribute count does not match the edge count");
    }
    std::vector<DataEdge> edges = edges_;
    for (std::size_t h = 0; h < edges.size(); ++h) {
        edges[h].sec_weight = weights[h];
        edges[h].vuln_cap = caps[h];
    }
    return build(tasks_, std::move(edges));
}

Workflow Workflow::strip_virtual() const {
    if (!augmented_) {
        return *this;
    }
    std::vector<Task> tasks(tasks_.begin() + 1, tasks_.end() - 1);
    std::vector<DataEdge> edges;
    for (std::size_t h = 0; h < edges_.size(); ++h) {
        if (touches_virtual(h)) {
            continue;
        }
        DataEdge e = edges_[h];
        e.src -= 1;
        e.dst -= 1;
        edges.push_back(e);
    }
    return build(std::move(tasks), std::move(edges));
}

bool operator==(Task const & a, Task const & b) {
    return a.id == b.id && a.work == b.work && a.is_virtual == b.is_virtual;
}

bool operator==(DataEdge const & a, DataEdge const & b) {
    return a.src == b.src && a.dst == b.dst && a.size == b.size && a.sec_weight == b.sec_weight &&
           a.vuln_cap == b.vuln_cap;
}

bool operator==(Workflow const & a, Workflow const & b) {
    return a.tasks() == b.tasks() && a.edges() == b.edges();
}

Workflow augment(Workflow const & raw) {
    if (raw.is_augmented()) {
        return raw;
    }
    for (std::string_view id : {kEntryId, kExitId}) {
        if (raw.find(id)) {
            throw StructuralError("task id " + std::string(id) + " is reserved");
        }
    }
    std::size_t const n = raw.size();
    std::vector<Task> tasks;
    tasks.reserve(n + 2);
    tasks.push_back(Task{std::string(kEntryId), 0.0, true});
    for (Task const & t : raw.tasks()) {
        tasks.push_back(t);
    }
    tasks.push_back(Task{std::string(kExitId), 0.0, true});
    std::size_t const exit = n + 1;

    std::vector<DataEdge> edges;
    edges.reserve(raw.edges().size() + 2 * n + 1);
    for (DataEdge e : raw.edges()) {
        e.src += 1;
        e.dst += 1;
        edges.push_back(e);
    }
    // Virtual edges carry no data and no security weight.
    for (std::size_t i = 0; i < n; ++i) {
        if (raw.in_edges(i).empty()) {
            edges.push_back(DataEdge{0, i + 1, 0.0, 0.0, std::nullopt});
        }
        if (raw.out_edges(i).empty()) {
            edges.push_back(DataEdge{i + 1, exit, 0.0, 0.0, std::nullopt});
        }
    }
    if (n == 0) {
        edges.push_back(DataEdge{0, exit, 0.0, 0.0, std::nullopt});
    }
    return Workflow::build(std::move(tasks), std::move(edges));
}

std::vector<int> top_level(Workflow const & w) {
    std::vector<int> level(w.size(), 0);
    for (std::size_t v : w.topological_order()) {
        for (std::size_t h : w.out_edges(v)) {
            std::size_t const s = w.edge(h).dst;
            level[s] = std::max(level[s], level[v] + 1);
        }
    }
    return level;
}

std::vector<double> rank(Workflow const & w, std::span<double const> avg_exec, double avg_bw) {
    if (avg_exec.size() != w.size()) {
        throw DomainError("rank: one mean execution time per task is required");
    }
    if (!(avg_bw > 0.0)) {
        throw DomainError("rank: mean bandwidth must be positive");
    }
    std::vector<double> r(w.size(), 0.0);
    auto const & order = w.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::size_t const v = *it;
        auto const out = w.out_edges(v);
        if (out.empty()) {
            r[v] = avg_exec[v];
            continue;
        }
        double best = 0.0;
        double comm = 0.0;
        for (std::size_t h : out) {
            best = std::max(best, r[w.edge(h).dst]);
            comm += w.edge(h).size / avg_bw;
        }
        r[v] = best + avg_exec[v] + comm;
    }
    return r;
}

std::vector<std::size_t> max_parallel_set(Workflow const & w) {
    std::vector<int> const level = top_level(w);
    int max_level = 0;
    for (int l : level) {
        max_level = std::max(max_level, l);
    }
    std::vector<std::size_t> count(static_cast<std::size_t>(max_level) + 1, 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!w.task(i).is_virtual) {
            ++count[static_cast<std::size_t>(level[i])];
        }
    }
    std::size_t best = 0;
    for (std::size_t l = 1; l < count.size(); ++l) {
        if (count[l] > count[best]) {
            best = l;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!w.task(i).is_virtual && static_cast<std::size_t>(level[i]) == best) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace mcsched
