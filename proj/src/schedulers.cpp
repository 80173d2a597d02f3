#include <mcsched/schedulers.hpp>

#include <mcsched/cipher_assignment.hpp>
#include <mcsched/error.hpp>
#include <mcsched/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>

namespace mcsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normalized(double x, double lo, double hi) { return hi > lo ? (x - lo) / (hi - lo) : 0.0; }

std::vector<std::size_t> real_tasks(Workflow const & w) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!w.task(i).is_virtual) {
            out.push_back(i);
        }
    }
    return out;
}

// Tentative assignments for the moved task's edges are solved separately and
// merged with a DP over every other cross-instance edge. The merged result
// is optimal; among equally fast assignments it may differ from a run over
// the canonical edge order.
class MoveSolver {
public:
    MoveSolver(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
               CipherTable const & table, SecurityConstraints const & cons)
        : w_(w), sys_(sys), pool_(pool), table_(table), cons_(cons),
          scaled_(ScaledBudget::make(cons.system_cap, cons.scale_digits)) {
        if (scaled_.budget < 0) {
            throw InfeasibleError("system vulnerability budget is negative");
        }
    }

    /// Prepares the DP over the cross edges not incident to `task`.
    void focus(Mapping const & mapping, std::size_t task) {
        incident_.clear();
        std::vector<DpItem> items;
        for (std::size_t h = 0; h < w_.edges().size(); ++h) {
            DataEdge const & e = w_.edge(h);
            if (w_.touches_virtual(h)) {
                continue;
            }
            if (e.src == task || e.dst == task) {
                incident_.push_back(h);
            } else if (mapping[e.src] != mapping[e.dst]) {
                items.push_back(make_dp_item(w_, sys_, pool_, mapping, table_, cons_, scaled_, h));
            }
        }
        base_items_ = std::move(items);
        base_ = std::make_unique<DpTable>(base_items_, table_, scaled_.budget, false);
        cache_.clear();
    }

    /// Optimal assignment for `mapping`, which differs from the focused one
    /// at most in the focused task. Empty when nothing fits.
    std::optional<CipherAssignment> solve(Mapping const & mapping) {
        std::vector<DpItem> items;
        std::vector<double> key;
        for (std::size_t h : incident_) {
            DataEdge const & e = w_.edge(h);
            if (mapping[e.src] == mapping[e.dst]) {
                continue;
            }
            DpItem item = make_dp_item(w_, sys_, pool_, mapping, table_, cons_, scaled_, h);
            key.push_back(static_cast<double>(h));
            key.insert(key.end(), item.time.begin(), item.time.end());
            items.push_back(std::move(item));
        }
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, Entry{}).first;
            Entry & en = it->second;
            en.items = std::move(items);
            if (std::any_of(en.items.begin(), en.items.end(), [&](DpItem const & item) {
                    return std::none_of(table_.ciphers().begin(), table_.ciphers().end(),
                                        [&](Cipher const & c) { return c.vulnerability <= item.cap; });
                })) {
                return std::nullopt;
            }
            en.table = std::make_unique<DpTable>(en.items, table_, scaled_.budget, false);
            // Split of the budget between the focused edges and the rest.
            en.time = kInf;
            for (std::int64_t b = 0; b <= en.table->reach(); ++b) {
                double const t = en.table->final_time(b) + base_->final_time(scaled_.budget - b);
                if (t < en.time) {
                    en.time = t;
                    en.split = b;
                }
            }
            if (en.time < kInf) {
                auto const own = en.table->backtrack(en.split);
                auto const rest = base_->backtrack(scaled_.budget - en.split);
                en.assignment.choice.assign(w_.edges().size(), std::nullopt);
                for (std::size_t i = 0; i < en.items.size(); ++i) {
                    en.assignment.choice[en.items[i].edge] = (*own)[i];
                }
                for (std::size_t i = 0; i < base_items_.size(); ++i) {
                    en.assignment.choice[base_items_[i].edge] = (*rest)[i];
                }
                en.assignment.total_time = en.time;
            }
        }
        if (it->second.time == kInf) {
            return std::nullopt;
        }
        return it->second.assignment;
    }

private:
    struct Entry {
        std::vector<DpItem> items;
        std::unique_ptr<DpTable> table;
        double time = kInf;
        std::int64_t split = 0;
        CipherAssignment assignment;
    };

    Workflow const & w_;
    CloudSystem const & sys_;
    ResourcePool const & pool_;
    CipherTable const & table_;
    SecurityConstraints const & cons_;
    ScaledBudget scaled_;
    std::vector<std::size_t> incident_;
    std::vector<DpItem> base_items_;
    std::unique_ptr<DpTable> base_;
    std::map<std::vector<double>, Entry> cache_;
};

// Incumbent ciphers with the moved task's edges patched: edges that now
// cross instances get the strongest cipher, edges that no longer do lose it.
CipherAssignment frozen_assignment(Workflow const & w, CipherTable const & table,
                                   CipherAssignment const & incumbent, Mapping const & mapping,
                                   std::size_t task) {
    CipherAssignment out = incumbent;
    auto patch = [&](std::size_t h) {
        if (w.touches_virtual(h)) {
            return;
        }
        DataEdge const & e = w.edge(h);
        if (mapping[e.src] == mapping[e.dst]) {
            out.choice[h].reset();
        } else if (!out.choice[h]) {
            out.choice[h] = table.strongest();
        }
    };
    for (std::size_t h : w.in_edges(task)) {
        patch(h);
    }
    for (std::size_t h : w.out_edges(task)) {
        patch(h);
    }
    return out;
}

} // namespace

void MetricWeights::validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0) || !(alpha + beta + gamma > 0.0)) {
        throw DomainError("metric weights must be >= 0 with a positive sum");
    }
}

void SchedulerConfig::validate() const {
    lbs_weights.validate();
    ls_weights.validate();
    if (num_iter < 1) {
        throw DomainError("num_iter must be >= 1");
    }
}

std::vector<double> weighted_metric(MetricWeights const & weights, std::span<double const> cost,
                                    std::span<double const> time,
                                    std::span<double const> reliability) {
    std::size_t const n = cost.size();
    if (time.size() != n || reliability.size() != n) {
        throw DomainError("weighted_metric: criteria lengths differ");
    }
    std::vector<double> out(n, 0.0);
    if (n == 0) {
        return out;
    }
    auto const [cmin, cmax] = std::minmax_element(cost.begin(), cost.end());
    auto const [tmin, tmax] = std::minmax_element(time.begin(), time.end());
    auto const [rmin, rmax] = std::minmax_element(reliability.begin(), reliability.end());
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = weights.alpha * normalized(cost[i], *cmin, *cmax) +
                 weights.beta * normalized(time[i], *tmin, *tmax) +
                 weights.gamma * normalized(*rmax - reliability[i], 0.0, *rmax - *rmin);
    }
    return out;
}

PlacementScore placement_score(Workflow const & w, CloudSystem const & sys,
                               ResourcePool const & pool, Mapping const & mapping,
                               std::size_t task, std::size_t instance) {
    TaskOverheads const ov = outgoing_overheads(w, sys, pool, mapping, task, instance);
    std::size_t const type = pool.at(instance).type;
    PlacementScore s;
    s.time = exec_time(w.task(task), sys.vm_type(type)) + ov.transfer_time;
    s.cost = lease_cost(sys, type, s.time) + ov.transfer_cost;
    s.reliability = ov.rel * vm_reliability(sys.vm_type(type), s.time);
    return s;
}

std::vector<std::size_t> lbs_order(Workflow const & w, WorkflowAnalysis const & analysis) {
    std::vector<std::size_t> order = real_tasks(w);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (analysis.levels[a] != analysis.levels[b]) {
            return analysis.levels[a] > analysis.levels[b];
        }
        return analysis.ranks[a] > analysis.ranks[b];
    });
    return order;
}

namespace {

std::vector<double> score_all(Workflow const & w, CloudSystem const & sys,
                              ResourcePool const & pool, Mapping const & mapping,
                              std::size_t task, MetricWeights const & weights) {
    std::vector<double> cost(pool.size()), time(pool.size()), rel(pool.size());
    for (std::size_t r = 0; r < pool.size(); ++r) {
        PlacementScore const s = placement_score(w, sys, pool, mapping, task, r);
        cost[r] = s.cost;
        time[r] = s.time;
        rel[r] = s.reliability;
    }
    return weighted_metric(weights, cost, time, rel);
}

} // namespace

Mapping lbs_allocate(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                     MetricWeights const & weights) {
    weights.validate();
    WorkflowAnalysis const analysis = analyze(w, sys);
    Mapping mapping(w.size());
    std::vector<bool> taken(pool.size(), false);
    std::vector<std::size_t> taken_list;
    int level = -1;
    for (std::size_t v : lbs_order(w, analysis)) {
        if (analysis.levels[v] != level) {
            for (std::size_t r : taken_list) {
                taken[r] = false;
            }
            taken_list.clear();
            level = analysis.levels[v];
        }
        std::vector<double> const metric = score_all(w, sys, pool, mapping, v, weights);
        std::vector<std::size_t> ranked(pool.size());
        std::iota(ranked.begin(), ranked.end(), 0);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [&](std::size_t a, std::size_t b) { return metric[a] < metric[b]; });
        auto const pick = std::find_if(ranked.begin(), ranked.end(),
                                       [&](std::size_t r) { return !taken[r]; });
        if (pick == ranked.end()) {
            throw CapacityError("level " + std::to_string(level) + " has more tasks than the " +
                                std::to_string(pool.size()) + " pool instances");
        }
        mapping[v] = *pick;
        taken[*pick] = true;
        taken_list.push_back(*pick);
    }
    return mapping;
}

Mapping baseline_greedy_cost(Workflow const & w, CloudSystem const & sys,
                             ResourcePool const & pool) {
    if (pool.empty() && !real_tasks(w).empty()) {
        throw CapacityError("empty resource pool");
    }
    WorkflowAnalysis const analysis = analyze(w, sys);
    Mapping mapping(w.size());
    for (std::size_t v : lbs_order(w, analysis)) {
        std::size_t best = 0;
        double best_cost = kInf;
        for (std::size_t r = 0; r < pool.size(); ++r) {
            double const c = placement_score(w, sys, pool, mapping, v, r).cost;
            if (c < best_cost) {
                best_cost = c;
                best = r;
            }
        }
        mapping[v] = best;
    }
    return mapping;
}

Mapping baseline_random(Workflow const & w, ResourcePool const & pool, std::uint64_t seed) {
    Mapping mapping(w.size());
    std::vector<std::size_t> const tasks = real_tasks(w);
    if (pool.empty() && !tasks.empty()) {
        throw CapacityError("empty resource pool");
    }
    Rng rng(seed);
    for (std::size_t v : tasks) {
        mapping[v] = static_cast<std::size_t>(rng.below(pool.size()));
    }
    return mapping;
}

Mapping local_search(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                     CipherTable const & table, SecurityConstraints const & cons,
                     Mapping const & start, SchedulerConfig const & config, LsTrace * trace) {
    config.validate();
    WorkflowAnalysis const analysis = analyze(w, sys);
    std::vector<std::size_t> order = real_tasks(w);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return analysis.ranks[a] > analysis.ranks[b];
    });

    Mapping mapping = start;
    std::vector<std::size_t> load(pool.size(), 0);
    for (std::size_t v : order) {
        ++load.at(mapping[v]);
    }
    CipherAssignment incumbent;
    if (config.frozen_ciphers) {
        incumbent = assign_ciphers_dp(w, sys, pool, mapping, table, cons);
    }
    MoveSolver solver(w, sys, pool, table, cons);
    LsTrace local;

    for (int itr = 1; itr <= config.num_iter; ++itr) {
        local.iterations = itr;
        Mapping const before = mapping;
        for (std::size_t v : order) {
            std::size_t const home = mapping[v];
            --load[home];

            // Instances no other task uses are interchangeable within a type,
            // so the lowest-index one stands for all of them. It wins every tie
            // the others could win, which keeps the result of a full scan.
            std::vector<std::size_t> candidates;
            std::vector<bool> type_seen(sys.vm_types().size(), false);
            std::size_t stay = Mapping::npos;
            for (std::size_t r = 0; r < pool.size(); ++r) {
                if (load[r] == 0) {
                    if (type_seen[pool[r].type]) {
                        continue;
                    }
                    type_seen[pool[r].type] = true;
                }
                if (r == home || (load[home] == 0 && load[r] == 0 && pool[r].type == pool[home].type)) {
                    stay = candidates.size();
                }
                candidates.push_back(r);
            }

            if (!config.frozen_ciphers) {
                solver.focus(mapping, v);
            }
            std::vector<double> cost, span, rel;
            std::vector<std::size_t> feasible;
            std::vector<CipherAssignment> assignments;
            std::size_t stay_pos = Mapping::npos;
            for (std::size_t k = 0; k < candidates.size(); ++k) {
                mapping[v] = candidates[k];
                std::optional<CipherAssignment> ciphers;
                if (config.frozen_ciphers) {
                    ciphers = frozen_assignment(w, table, incumbent, mapping, v);
                } else {
                    ciphers = solver.solve(mapping);
                }
                if (!ciphers) {
                    continue;
                }
                Schedule const s = evaluate(w, sys, pool, table, *ciphers, mapping, analysis,
                                            cons.crypto_capacity);
                ++local.evaluations;
                if (k == stay) {
                    stay_pos = feasible.size();
                }
                feasible.push_back(candidates[k]);
                cost.push_back(s.cost);
                span.push_back(s.makespan);
                rel.push_back(s.reliability);
                if (config.frozen_ciphers) {
                    assignments.push_back(std::move(*ciphers));
                }
            }
            mapping[v] = home;
            if (feasible.empty()) {
                ++load[home];
                continue;
            }
            std::vector<double> const metric = weighted_metric(config.ls_weights, cost, span, rel);
            std::size_t const best = static_cast<std::size_t>(
                std::min_element(metric.begin(), metric.end()) - metric.begin());
            mapping[v] = feasible[best];
            ++load[mapping[v]];
            if (config.frozen_ciphers) {
                incumbent = std::move(assignments[best]);
            }
            local.moves.push_back(LsMove{itr, v, home, mapping[v],
                                         stay_pos == Mapping::npos ? kInf : metric[stay_pos],
                                         metric[best]});
        }
        if (mapping == before) {
            break;
        }
    }
    if (trace) {
        *trace = std::move(local);
    }
    return mapping;
}

std::string Algorithm::name() const {
    std::string s = base == Allocator::lbs ? "lbs" : base == Allocator::random ? "random" : "greedy";
    return local_search ? s + "+ls" : s;
}

std::optional<Algorithm> Algorithm::parse(std::string_view name) {
    Algorithm a;
    constexpr std::string_view suffix = "+ls";
    if (name.size() > suffix.size() && name.substr(name.size() - suffix.size()) == suffix) {
        a.local_search = true;
        name.remove_suffix(suffix.size());
    }
    if (name == "lbs") {
        a.base = Allocator::lbs;
    } else if (name == "random") {
        a.base = Allocator::random;
    } else if (name == "greedy") {
        a.base = Allocator::greedy;
    } else {
        return std::nullopt;
    }
    return a;
}

PipelineResult run_pipeline(Workflow const & w, CloudSystem const & sys, CipherTable const & table,
                            SecurityConstraints const & cons, SchedulerConfig const & config,
                            Algorithm algo) {
    config.validate();
    if (!w.is_augmented()) {
        throw DomainError("run_pipeline: workflow must be augmented");
    }
    PipelineResult out;
    out.pool = build_resource_pool(sys, w);
    switch (algo.base) {
    case Allocator::lbs:
        out.allocation = lbs_allocate(w, sys, out.pool, config.lbs_weights);
        break;
    case Allocator::random:
        out.allocation = baseline_random(w, out.pool, config.seed);
        break;
    case Allocator::greedy:
        out.allocation = baseline_greedy_cost(w, sys, out.pool);
        break;
    }
    Mapping mapping = out.allocation;
    if (algo.local_search) {
        mapping = local_search(w, sys, out.pool, table, cons, mapping, config, &out.trace);
    }
    CipherAssignment const ciphers = assign_ciphers_dp(w, sys, out.pool, mapping, table, cons);
    out.schedule = evaluate(w, sys, out.pool, table, ciphers, mapping, cons.crypto_capacity);
    return out;
}

} // namespace mcsched
