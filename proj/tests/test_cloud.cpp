#include "support.hpp"

#include <mcsched/error.hpp>

#include <doctest.h>

#include <cmath>

using namespace mcsched;

namespace {

std::size_t type_named(CloudSystem const & sys, std::string const & provider, std::string const & name) {
    for (std::size_t t = 0; t < sys.vm_types().size(); ++t) {
        VmType const & v = sys.vm_type(t);
        if (v.name == name && sys.provider(v.provider).id == provider) {
            return t;
        }
    }
    FAIL("no VM type " << name);
    return 0;
}

// First instance of the given provider in the default pool layout.
Placement on(CloudSystem const & sys, std::string const & provider, std::size_t instance) {
    return Placement{instance, *sys.find_provider(provider)};
}

} // namespace

TEST_CASE("exec time") {
    CHECK(exec_time(Task{"v", 0, true}, VmType{}) == 0.0);
    VmType t;
    t.capacity = 4;
    CHECK(exec_time(Task{"a", 100, false}, t) == 25.0);
    t.capacity = 1;
    CHECK(exec_time(Task{"a", 7, false}, t) == 7.0);
}

TEST_CASE("comm time") {
    CloudSystem const sys = default_cloud_system();
    Placement const a{0, 0}, b{1, 0}, c{2, 2};
    CHECK(comm_time(500, a, a, sys) == 0.0);
    CHECK(comm_time(40, a, b, sys) == 2.0);
    CHECK(comm_time(100, a, c, sys) == 1.0);
}

TEST_CASE("default cloud matches the published VM prices") {
    CloudSystem const sys = default_cloud_system();
    REQUIRE(sys.providers().size() == 6);
    REQUIRE(sys.vm_types().size() == 24);
    struct Row {
        char const * name;
        double price;
        std::optional<double> base;
    };
    Row const ma[] = {{"B2MS", 0.0015, {}}, {"B4MS", 0.003, {}}, {"B8MS", 0.006, {}}, {"B16MS", 0.012, {}}};
    Row const aws[] = {{"m1.small", 0.06, {}}, {"m1.medium", 0.12, {}}, {"m1.large", 0.24, {}},
                       {"m1.xlarge", 0.45, {}}};
    Row const gcp[] = {{"n1-highcpu-2", 0.0012, 0.014}, {"n1-highcpu-4", 0.0023, 0.025},
                       {"n1-highcpu-8", 0.0047, 0.05}, {"n1-highcpu-16", 0.0093, 0.1}};
    double const caps[] = {4, 8, 16, 32};
    for (std::string const center : {"-1", "-2"}) {
        for (int i = 0; i < 4; ++i) {
            VmType const & m = sys.vm_type(type_named(sys, "MA" + center, ma[i].name));
            CHECK(m.price == ma[i].price);
            CHECK(m.capacity == caps[i]);
            CHECK(m.boot_time == 97.0);
            VmType const & a = sys.vm_type(type_named(sys, "AWS" + center, aws[i].name));
            CHECK(a.price == aws[i].price);
            VmType const & g = sys.vm_type(type_named(sys, "GCP" + center, gcp[i].name));
            CHECK(g.price == gcp[i].price);
            CHECK(g.hybrid_base_price == gcp[i].base);
        }
    }
    CHECK(sys.provider(*sys.find_provider("MA-1")).scheme == BillingScheme::per_minute);
    CHECK(sys.provider(*sys.find_provider("AWS-2")).scheme == BillingScheme::per_hour);
    CHECK(sys.provider(*sys.find_provider("GCP-1")).scheme == BillingScheme::hybrid);
    CHECK(sys.provider(0).internal_bw == 20.0);
    CHECK(sys.link(0, 3).bandwidth == 100.0);
}

TEST_CASE("lease cost hand examples") {
    CHECK(lease_cost(BillingScheme::per_minute, 0.0015, {}, 0) == 0.0);
    CHECK(lease_cost(BillingScheme::per_hour, 0.06, {}, 0) == 0.0);
    CHECK(lease_cost(BillingScheme::hybrid, 0.0012, 0.014, 0) == 0.014);
    CHECK(lease_cost(BillingScheme::per_minute, 0.0015, {}, 90) == doctest::Approx(0.003).epsilon(1e-15));
    CHECK(lease_cost(BillingScheme::per_hour, 0.06, {}, 3601) == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(lease_cost(BillingScheme::hybrid, 0.0012, 0.014, 720) ==
          doctest::Approx(0.0164).epsilon(1e-15));
    CHECK_THROWS_AS(lease_cost(BillingScheme::per_minute, 1, {}, -1), DomainError);
}

TEST_CASE("lease cost is a non-decreasing step function") {
    Rng rng(2);
    for (BillingScheme s : {BillingScheme::per_minute, BillingScheme::per_hour, BillingScheme::hybrid}) {
        double const price = 0.01;
        std::optional<double> const base =
            s == BillingScheme::hybrid ? std::optional<double>(0.05) : std::nullopt;
        double const period = s == BillingScheme::per_hour ? 3600 : 60;
        double prev = 0.0;
        for (double d = 0; d < 9000; d += rng.uniform(0, 40)) {
            double const c = lease_cost(s, price, base, d);
            CHECK(c >= prev);
            prev = c;
            // Oracle: count started periods directly.
            double want = 0.0;
            if (s == BillingScheme::hybrid) {
                double extra = 0;
                for (double t = 600; t < d; t += 60) {
                    ++extra;
                }
                want = 0.05 + extra * price;
            } else {
                double n = 0;
                for (double t = 0; t < d; t += period) {
                    ++n;
                }
                want = n * price;
            }
            CHECK(c == doctest::Approx(want).epsilon(1e-12));
        }
        if (s == BillingScheme::hybrid) {
            CHECK(lease_cost(s, price, base, 600) == lease_cost(s, price, base, 0));
        }
    }
}

TEST_CASE("tiered pricing") {
    std::vector<TariffTier> const ma{{0, 0.0}, {100, 0.11}, {10'000, 0.075}};
    CHECK(tiered_price(ma, 50) == 0.0);
    CHECK(tiered_price(ma, 100) == 0.0);
    CHECK(tiered_price(ma, 200) == doctest::Approx(11.0));
    CHECK(tiered_price(ma, 10'100) == doctest::Approx(9900 * 0.11 + 100 * 0.075));
    std::vector<TariffTier> const gcp{{0, 0.19}, {1'000, 0.18}};
    CHECK(tiered_price(gcp, 2) == doctest::Approx(0.38));
    CHECK(tiered_price(gcp, 0) == 0.0);
}

TEST_CASE("transfer cost") {
    CloudSystem const sys = default_cloud_system();
    // 1 GB = 8000 Mb.
    CHECK(transfer_cost(5000, on(sys, "MA-1", 0), on(sys, "MA-1", 1), sys) == 0.0);
    CHECK(transfer_cost(16'000, on(sys, "MA-1", 0), on(sys, "MA-2", 9), sys) ==
          doctest::Approx(0.16).epsilon(1e-12));
    CHECK(transfer_cost(50 * 8000.0, on(sys, "MA-1", 0), on(sys, "AWS-1", 20), sys) == 0.0);
    CHECK(transfer_cost(200 * 8000.0, on(sys, "MA-1", 0), on(sys, "AWS-1", 20), sys) ==
          doctest::Approx(11.0).epsilon(1e-12));
    // The sender's tariff applies.
    CHECK(transfer_cost(8000, on(sys, "GCP-1", 40), on(sys, "MA-1", 0), sys) ==
          doctest::Approx(0.19).epsilon(1e-12));
    CHECK(transfer_cost(8000, on(sys, "MA-1", 0), on(sys, "GCP-1", 40), sys) == 0.0);
    CHECK(transfer_cost(8000, on(sys, "AWS-1", 0), on(sys, "AWS-2", 1), sys) ==
          doctest::Approx(0.02).epsilon(1e-12));
    CHECK(transfer_cost(8000, on(sys, "GCP-2", 0), on(sys, "GCP-1", 1), sys) ==
          doctest::Approx(0.05).epsilon(1e-12));

    Rng rng(4);
    for (std::size_t a = 0; a < 6; ++a) {
        for (std::size_t b = 0; b < 6; ++b) {
            double prev = -1;
            for (double mb = 0; mb < 3e6; mb += rng.uniform(0, 2e5)) {
                double const c = transfer_cost(mb, Placement{0, a}, Placement{1, b}, sys);
                CHECK(c >= prev);
                prev = c;
            }
        }
    }
}

TEST_CASE("reliability") {
    CloudSystem sys = testing::single_provider({{1, 1}}, 20, 1e-7);
    Placement const x{0, 0}, y{1, 0};
    CHECK(link_reliability(10, x, x, sys) == 1.0);
    CHECK(link_reliability(10, x, y, sys) == doctest::Approx(std::exp(-1e-6)).epsilon(1e-15));
    CHECK(link_reliability(0, x, y, sys) == 1.0);
    CloudSystem const z = testing::single_provider({{1, 1}}, 20, 0);
    CHECK(link_reliability(1e9, x, y, z) == 1.0);

    VmType t;
    t.fail_rate = 1e-7;
    CHECK(vm_reliability(t, 0) == 1.0);
    CHECK(vm_reliability(t, 1000) == doctest::Approx(std::exp(-1e-4)).epsilon(1e-15));
    t.fail_rate = 1e-8;
    CHECK(vm_reliability(t, 3600) == doctest::Approx(std::exp(-3.6e-5)).epsilon(1e-15));
    CHECK_THROWS_AS(vm_reliability(t, -1), DomainError);

    double prev = 1.0;
    for (double d = 1; d < 1e6; d *= 1.7) {
        double const r = vm_reliability(t, d);
        CHECK(r > 0.0);
        CHECK(r < prev);
        prev = r;
    }

    CloudSystem multi = default_cloud_system();
    multi.set_link(0, 2, InterCloudLink{100, 2e-7});
    CHECK(link_reliability(5, Placement{0, 0}, Placement{9, 2}, multi) ==
          doctest::Approx(std::exp(-1e-6)).epsilon(1e-15));
}

TEST_CASE("resource pool size and layout") {
    CloudSystem const sys = default_cloud_system();
    Workflow const single = augment(testing::chain({1}, {}));
    CHECK(build_resource_pool(sys, single).size() == 24);

    std::vector<Task> tasks{{"r", 1, false}};
    std::vector<EdgeSpec> edges;
    for (int i = 0; i < 5; ++i) {
        tasks.push_back({"k" + std::to_string(i), 1, false});
        edges.push_back({"r", "k" + std::to_string(i), 1, 1, {}});
    }
    ResourcePool const pool = build_resource_pool(sys, augment(Workflow::build(tasks, edges)));
    REQUIRE(pool.size() == 120);
    for (std::size_t r = 0; r < pool.size(); ++r) {
        CHECK(pool[r].index == r);
        CHECK(pool[r].type == r / 5);
        CHECK(pool[r].copy == r % 5);
    }
    CHECK(build_resource_pool(sys, augment(Workflow{})).size() == 24);
}

TEST_CASE("cloud config round trip") {
    Rng rng(8);
    CloudSystem const sys = testing::random_rates(rng, default_cloud_system());
    std::string const text = to_cloud_config(sys);
    CloudSystem const back = parse_cloud_config(text);
    CHECK(to_cloud_config(back) == text);
    CHECK(back.link(1, 4).fail_rate == sys.link(1, 4).fail_rate);
    CHECK(back.vm_type(17).hybrid_base_price == sys.vm_type(17).hybrid_base_price);
    CHECK_THROWS_AS(parse_cloud_config("{"), IngestionError);
}

TEST_CASE("cloud validation") {
    CloudSystem sys = default_cloud_system();
    sys.mutable_vm_type(0).hybrid_base_price = 1.0;
    CHECK_THROWS_AS(sys.validate(), DomainError);
    sys = default_cloud_system();
    sys.mutable_provider(0).internal_bw = 0;
    CHECK_THROWS_AS(sys.validate(), DomainError);
    sys = default_cloud_system();
    sys.mutable_provider(0).egress_tiers = {{0, 1}, {0, 2}};
    CHECK_THROWS_AS(sys.validate(), DomainError);
}
