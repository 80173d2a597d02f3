#include <mcsched/experiment.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace mcsched {

namespace {

class Check {
public:
    Check(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

    /// Records a failure unless |got - want| is within the relative tolerance.
    void close(double got, double want, std::string const & what) {
        double const gap = std::abs(got - want);
        if (!(gap <= tol_ * std::max({1.0, std::abs(got), std::abs(want)}))) {
            fail(gap, what + ": got " + format_double(got) + ", expected " + format_double(want));
        }
    }

    /// Records a failure unless got <= bound up to the tolerance.
    void at_most(double got, double bound, std::string const & what) {
        if (!(got <= bound + tol_ * std::max(1.0, std::abs(bound)))) {
            fail(got - bound, what + ": " + format_double(got) + " exceeds " + format_double(bound));
        }
    }

    void require(bool ok, std::string const & what) {
        if (!ok) {
            fail(1.0, what);
        }
    }

    AuditCheck done() const { return AuditCheck{name_, failures_ == 0, residual_, detail_}; }

private:
    void fail(double residual, std::string const & what) {
        if (failures_++ == 0) {
            detail_ = what;
        }
        residual_ = std::max(residual_, std::isnan(residual) ? 1.0 : residual);
    }

    std::string name_;
    double tol_;
    std::size_t failures_ = 0;
    double residual_ = 0.0;
    std::string detail_;
};

} // namespace

bool AuditReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](AuditCheck const & c) { return c.passed; });
}

AuditCheck const * AuditReport::find(std::string_view name) const {
    for (AuditCheck const & c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

AuditReport validate_schedule(ScheduleRecord const & record, double tol) {
    Workflow const & w = record.workflow;
    CloudSystem const & sys = record.cloud;
    ResourcePool const & pool = record.pool;
    CipherTable const & table = record.ciphers;
    Schedule const & s = record.schedule;
    AuditReport report;

    Check mapping("mapping", tol);
    bool placed = s.mapping.instance.size() == w.size() && s.timings.size() == w.size() &&
                  s.ciphers.choice.size() == w.edges().size();
    mapping.require(placed, "schedule does not match the workflow size");
    if (placed) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            std::size_t const r = s.mapping.instance[i];
            bool const ok = w.task(i).is_virtual ? r == Mapping::npos : r < pool.size();
            mapping.require(ok, "task " + w.task(i).id + " has an invalid instance");
            mapping.require(s.timings[i].instance == r,
                            "task " + w.task(i).id + ": timing and mapping disagree");
            placed = placed && ok;
        }
    }
    report.checks.push_back(mapping.done());
    if (!placed) {
        return report;
    }
    auto type_of = [&](std::size_t task) -> VmType const & {
        return sys.vm_type(pool[s.mapping[task]].type);
    };
    auto label = [&](DataEdge const & e) { return w.task(e.src).id + " -> " + w.task(e.dst).id; };
    std::vector<bool> const cross = cross_instance_flags(w, s.mapping);

    Check coverage("cipher_coverage", tol);
    Check system("system_vulnerability", tol);
    Check caps("edge_caps", tol);
    double vulnerability = 0.0;
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        DataEdge const & e = w.edge(h);
        auto const & c = s.ciphers.choice[h];
        coverage.require(cross[h] == c.has_value(),
                         "edge " + label(e) + (cross[h] ? " needs a cipher" : " must not have one"));
        if (!cross[h] || !c || *c >= table.size()) {
            continue;
        }
        double const v = table[*c].vulnerability;
        vulnerability += e.sec_weight * v;
        if (e.vuln_cap) {
            caps.at_most(v, *e.vuln_cap, "edge " + label(e));
        }
    }
    system.at_most(vulnerability, record.constraints.system_cap, "system vulnerability");
    report.checks.push_back(coverage.done());
    report.checks.push_back(system.done());
    report.checks.push_back(caps.done());
    if (!coverage.done().passed) {
        return report;
    }

    Check durations("durations", tol);
    Check precedence("precedence", tol);
    Check boot("boot", tol);
    double transfer_cost_sum = 0.0;
    double link_rel = 1.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        TaskTiming const & t = s.timings[i];
        std::string const id = w.task(i).id;
        for (std::size_t h : w.in_edges(i)) {
            std::size_t const u = w.edge(h).src;
            precedence.at_most(s.timings[u].finish, t.start,
                               "task " + id + " starts before " + w.task(u).id + " finishes");
        }
        if (w.task(i).is_virtual) {
            durations.close(t.finish, t.start, "virtual task " + id + " duration");
            continue;
        }
        VmType const & vt = type_of(i);
        Placement const here{s.mapping[i], vt.provider};
        double dec = 0.0, enc = 0.0, transfer = 0.0;
        for (std::size_t h : w.in_edges(i)) {
            if (cross[h]) {
                dec += crypto_time(w.edge(h).size, table[*s.ciphers.choice[h]], vt.capacity, false,
                                   record.constraints.crypto_capacity);
            }
        }
        for (std::size_t h : w.out_edges(i)) {
            if (!cross[h]) {
                continue;
            }
            DataEdge const & e = w.edge(h);
            Placement const there{s.mapping[e.dst], type_of(e.dst).provider};
            enc += crypto_time(e.size, table[*s.ciphers.choice[h]], vt.capacity, false,
                               record.constraints.crypto_capacity);
            double const ct = comm_time(e.size, here, there, sys);
            transfer += ct;
            transfer_cost_sum += transfer_cost(e.size, here, there, sys);
            link_rel *= link_reliability(ct, here, there, sys);
        }
        durations.close(t.exec, w.task(i).work / vt.capacity, "task " + id + " execution");
        durations.close(t.dec, dec, "task " + id + " decryption");
        durations.close(t.enc, enc, "task " + id + " encryption");
        durations.close(t.transfer, transfer, "task " + id + " transfer");
        durations.close(t.finish, t.start + dec + t.exec + enc + transfer, "task " + id + " finish");
        boot.at_most(vt.boot_time, t.start, "task " + id + " starts before its VM boots");
    }
    report.checks.push_back(durations.done());
    report.checks.push_back(precedence.done());
    report.checks.push_back(boot.done());

    // Instance occupancy: serial execution and one lease per used instance.
    Check overlap("no_overlap", tol);
    Check leases("leases", tol);
    std::map<std::size_t, std::vector<std::size_t>> on;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!w.task(i).is_virtual) {
            on[s.mapping[i]].push_back(i);
        }
    }
    std::map<std::size_t, Lease const *> lease_of;
    for (Lease const & l : s.leases) {
        leases.require(lease_of.emplace(l.instance, &l).second,
                       "instance " + std::to_string(l.instance) + " is leased twice");
        leases.require(l.instance < pool.size() && pool[l.instance].type == l.vm_type,
                       "lease of instance " + std::to_string(l.instance) + " has the wrong type");
    }
    leases.require(lease_of.size() == on.size(), "leases do not match the used instances");
    double lease_cost_sum = 0.0;
    double vm_rel = 1.0;
    for (auto & [inst, tasks] : on) {
        std::sort(tasks.begin(), tasks.end(), [&](std::size_t a, std::size_t b) {
            return s.timings[a].start < s.timings[b].start;
        });
        for (std::size_t k = 1; k < tasks.size(); ++k) {
            overlap.at_most(s.timings[tasks[k - 1]].finish, s.timings[tasks[k]].start,
                            "tasks " + w.task(tasks[k - 1]).id + " and " + w.task(tasks[k]).id +
                                " overlap on instance " + std::to_string(inst));
        }
        auto const it = lease_of.find(inst);
        if (it == lease_of.end()) {
            leases.require(false, "instance " + std::to_string(inst) + " is used but not leased");
            continue;
        }
        Lease const & l = *it->second;
        VmType const & vt = sys.vm_type(pool[inst].type);
        double last = 0.0;
        for (std::size_t t : tasks) {
            last = std::max(last, s.timings[t].finish);
        }
        std::string const where = "instance " + std::to_string(inst);
        leases.close(l.start, s.timings[tasks.front()].start - vt.boot_time, where + " lease start");
        leases.close(l.finish, last, where + " lease finish");
        lease_cost_sum += lease_cost(sys, pool[inst].type, l.duration());
        vm_rel *= vm_reliability(vt, l.duration());
    }
    report.checks.push_back(overlap.done());
    report.checks.push_back(leases.done());

    Check makespan("makespan", tol);
    double latest = 0.0;
    for (TaskTiming const & t : s.timings) {
        latest = std::max(latest, t.finish);
    }
    if (w.is_augmented()) {
        makespan.close(s.makespan, s.timings[w.exit()].finish, "makespan vs exit finish");
    }
    makespan.close(s.makespan, latest, "makespan vs latest finish");
    report.checks.push_back(makespan.done());

    Check cost("cost", tol);
    cost.close(s.lease_cost, lease_cost_sum, "lease cost");
    cost.close(s.transfer_cost, transfer_cost_sum, "transfer cost");
    cost.close(s.cost, lease_cost_sum + transfer_cost_sum, "total cost");
    report.checks.push_back(cost.done());

    Check reliability("reliability", tol);
    reliability.require(s.reliability > 0.0 && s.reliability <= 1.0, "reliability outside (0, 1]");
    reliability.close(s.reliability, link_rel * vm_rel, "reliability product");
    report.checks.push_back(reliability.done());
    return report;
}

} // namespace mcsched
