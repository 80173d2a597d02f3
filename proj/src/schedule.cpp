#include <mcsched/schedule.hpp>

#include <mcsched/error.hpp>

#include <algorithm>
#include <numeric>

namespace mcsched {

WorkflowAnalysis analyze(Workflow const & w, CloudSystem const & sys) {
    WorkflowAnalysis a;
    a.levels = top_level(w);
    a.ranks = rank(w, mean_exec_times(w, sys), mean_bandwidth(sys));
    a.eval_order.resize(w.size());
    std::iota(a.eval_order.begin(), a.eval_order.end(), 0);
    std::stable_sort(a.eval_order.begin(), a.eval_order.end(), [&](std::size_t x, std::size_t y) {
        if (a.levels[x] != a.levels[y]) {
            return a.levels[x] < a.levels[y];
        }
        return a.ranks[x] > a.ranks[y];
    });
    return a;
}

TaskOverheads process_task(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                           CipherTable const & table, CipherAssignment const & ciphers,
                           Mapping const & mapping, std::size_t task, CryptoCapacity mode) {
    TaskOverheads out;
    if (w.task(task).is_virtual) {
        return out;
    }
    Placement const here = placement_of(sys, pool, mapping[task]);
    double const capacity = sys.vm_type(pool[here.instance].type).capacity;

    auto cipher_of = [&](std::size_t h) -> Cipher const & {
        auto const & c = ciphers.choice.at(h);
        if (!c) {
            DataEdge const & e = w.edge(h);
            throw DomainError("edge " + w.task(e.src).id + " -> " + w.task(e.dst).id +
                              " crosses instances but has no cipher");
        }
        return table[*c];
    };

    for (std::size_t h : w.in_edges(task)) {
        DataEdge const & e = w.edge(h);
        if (w.task(e.src).is_virtual || mapping[e.src] == here.instance) {
            continue;
        }
        out.dec_time += crypto_time(e.size, cipher_of(h), capacity, false, mode);
    }
    for (std::size_t h : w.out_edges(task)) {
        DataEdge const & e = w.edge(h);
        if (w.task(e.dst).is_virtual || mapping[e.dst] == here.instance) {
            continue;
        }
        Placement const there = placement_of(sys, pool, mapping[e.dst]);
        out.enc_time += crypto_time(e.size, cipher_of(h), capacity, false, mode);
        double const t = comm_time(e.size, here, there, sys);
        out.transfer_time += t;
        out.transfer_cost += transfer_cost(e.size, here, there, sys);
        out.rel *= link_reliability(t, here, there, sys);
    }
    return out;
}

TaskOverheads outgoing_overheads(Workflow const & w, CloudSystem const & sys,
                                 ResourcePool const & pool, Mapping const & mapping,
                                 std::size_t task, std::size_t instance) {
    TaskOverheads out;
    Placement const here = placement_of(sys, pool, instance);
    for (std::size_t h : w.out_edges(task)) {
        DataEdge const & e = w.edge(h);
        if (w.task(e.dst).is_virtual) {
            continue;
        }
        if (!mapping.mapped(e.dst)) {
            throw DomainError("successor " + w.task(e.dst).id + " is not placed yet");
        }
        if (mapping[e.dst] == instance) {
            continue;
        }
        Placement const there = placement_of(sys, pool, mapping[e.dst]);
        double const t = comm_time(e.size, here, there, sys);
        out.transfer_time += t;
        out.transfer_cost += transfer_cost(e.size, here, there, sys);
        out.rel *= link_reliability(t, here, there, sys);
    }
    return out;
}

Schedule evaluate(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                  CipherTable const & table, CipherAssignment const & ciphers,
                  Mapping const & mapping, CryptoCapacity mode) {
    return evaluate(w, sys, pool, table, ciphers, mapping, analyze(w, sys), mode);
}

Schedule evaluate(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                  CipherTable const & table, CipherAssignment const & ciphers,
                  Mapping const & mapping, WorkflowAnalysis const & analysis,
                  CryptoCapacity mode) {
    if (!w.is_augmented()) {
        throw DomainError("evaluate: workflow must be augmented");
    }
    if (mapping.instance.size() != w.size() || ciphers.choice.size() != w.edges().size()) {
        throw DomainError("evaluate: mapping or cipher assignment does not match the workflow");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w.task(i).is_virtual) {
            continue;
        }
        if (!mapping.mapped(i)) {
            throw DomainError("task " + w.task(i).id + " is not mapped");
        }
        if (mapping[i] >= pool.size()) {
            throw DomainError("task " + w.task(i).id + " is mapped outside the pool");
        }
    }

    Schedule s;
    s.mapping = mapping;
    s.ciphers = ciphers;
    s.timings.assign(w.size(), TaskTiming{});
    std::vector<std::size_t> lease_of(pool.size(), Mapping::npos);

    for (std::size_t v : analysis.eval_order) {
        TaskTiming & tt = s.timings[v];
        double ready = 0.0;
        for (std::size_t h : w.in_edges(v)) {
            ready = std::max(ready, s.timings[w.edge(h).src].finish);
        }
        if (w.task(v).is_virtual) {
            tt.start = tt.finish = ready;
            continue;
        }
        std::size_t const inst = mapping[v];
        VmType const & type = sys.vm_type(pool[inst].type);
        TaskOverheads const ov = process_task(w, sys, pool, table, ciphers, mapping, v, mode);
        s.reliability *= ov.rel;
        s.transfer_cost += ov.transfer_cost;

        tt.instance = inst;
        tt.dec = ov.dec_time;
        tt.exec = exec_time(w.task(v), type);
        tt.enc = ov.enc_time;
        tt.transfer = ov.transfer_time;

        if (lease_of[inst] != Mapping::npos) {
            tt.start = std::max(ready, s.leases[lease_of[inst]].finish);
        } else {
            tt.start = std::max(ready, type.boot_time);
            lease_of[inst] = s.leases.size();
            s.leases.push_back(Lease{inst, pool[inst].type, tt.start - type.boot_time, 0.0});
        }
        tt.finish = tt.start + tt.processing();
        s.leases[lease_of[inst]].finish = tt.finish;
    }

    s.makespan = s.timings[w.exit()].finish;
    for (Lease const & l : s.leases) {
        s.lease_cost += lease_cost(sys, l.vm_type, l.duration());
        s.reliability *= vm_reliability(sys.vm_type(l.vm_type), l.duration());
    }
    s.cost = s.lease_cost + s.transfer_cost;
    return s;
}

} // namespace mcsched
