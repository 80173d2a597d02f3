#pragma once

#include <mcsched/cloud.hpp>
#include <mcsched/random.hpp>
#include <mcsched/workflow.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace testing {

using namespace mcsched;

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::string tid(std::size_t i) { return "t" + std::to_string(i); }

/// Random DAG over n tasks: every edge goes from a lower to a higher index.
inline Workflow random_dag(Rng & rng, std::size_t n, double edge_p, double max_size = 400.0) {
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < n; ++i) {
        tasks.push_back(Task{tid(i), rng.uniform(10.0, 3000.0), false});
    }
    std::vector<EdgeSpec> edges;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (rng.uniform() < edge_p) {
                edges.push_back(EdgeSpec{tid(a), tid(b), rng.uniform(0.0, max_size), 1.0, std::nullopt});
            }
        }
    }
    return Workflow::build(std::move(tasks), edges);
}

/// Chain t0 -> t1 -> ... with the given works and edge sizes.
inline Workflow chain(std::vector<double> const & works, std::vector<double> const & sizes) {
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < works.size(); ++i) {
        tasks.push_back(Task{tid(i), works[i], false});
    }
    std::vector<EdgeSpec> edges;
    for (std::size_t i = 0; i + 1 < works.size(); ++i) {
        edges.push_back(EdgeSpec{tid(i), tid(i + 1), sizes.at(i), 1.0, std::nullopt});
    }
    return Workflow::build(std::move(tasks), edges);
}

/// One per-minute provider with the given VM types (capacity, price, rate).
struct SimpleType {
    double capacity;
    double price;
    double fail_rate = 0.0;
};

inline CloudSystem single_provider(std::vector<SimpleType> const & types, double internal_bw = 20.0,
                                   double link_rate = 0.0) {
    std::vector<Provider> providers{
        Provider{"P", "P", BillingScheme::per_minute, internal_bw, link_rate, 0.0, {}}};
    std::vector<VmType> vms;
    for (std::size_t i = 0; i < types.size(); ++i) {
        VmType t;
        t.name = "vm" + std::to_string(i);
        t.provider = 0;
        t.capacity = types[i].capacity;
        t.price = types[i].price;
        t.boot_time = 97.0;
        t.fail_rate = types[i].fail_rate;
        vms.push_back(t);
    }
    return CloudSystem(std::move(providers), std::move(vms));
}

/// Default cloud with failure rates drawn from [1e-8, 1e-7].
inline CloudSystem random_rates(Rng & rng, CloudSystem sys) {
    for (std::size_t t = 0; t < sys.vm_types().size(); ++t) {
        sys.mutable_vm_type(t).fail_rate = rng.uniform(1e-8, 1e-7);
    }
    for (std::size_t k = 0; k < sys.providers().size(); ++k) {
        sys.mutable_provider(k).link_fail_rate = rng.uniform(1e-8, 1e-7);
    }
    for (std::size_t a = 0; a < sys.providers().size(); ++a) {
        for (std::size_t b = 0; b < sys.providers().size(); ++b) {
            if (a != b) {
                sys.set_link(a, b, InterCloudLink{sys.link(a, b).bandwidth, rng.uniform(1e-8, 1e-7)});
            }
        }
    }
    return sys;
}

} // namespace testing
