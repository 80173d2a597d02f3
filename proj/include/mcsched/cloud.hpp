#pragma once

#include <mcsched/workflow.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcsched {

enum class BillingScheme { per_minute, per_hour, hybrid };

std::string_view to_string(BillingScheme s);
std::optional<BillingScheme> parse_billing_scheme(std::string_view s);

/// One row of an egress tariff: volume from `from_gb` onward costs `usd_per_gb`
/// until the next row's threshold.
struct TariffTier {
    double from_gb = 0.0;
    double usd_per_gb = 0.0;
};

struct Provider {
    std::string id;
    /// Providers sharing a brand are distinct centers of one vendor.
    std::string brand;
    BillingScheme scheme = BillingScheme::per_minute;
    double internal_bw = 20.0;            // Mbps
    double link_fail_rate = 0.0;          // per second
    double center_transfer_price = 0.0;   // USD/GB between centers of the brand
    std::vector<TariffTier> egress_tiers; // USD/GB towards other brands
};

struct VmType {
    std::string name;
    std::size_t provider = 0;
    double capacity = 1.0; // MIPS
    double price = 0.0;    // USD per billing period
    std::optional<double> hybrid_base_price; // USD for the first ten minutes
    double boot_time = 97.0;  // s
    double fail_rate = 0.0;   // per second
};

/// Network properties of the ordered provider pair (src, dst), src != dst.
struct InterCloudLink {
    double bandwidth = 100.0; // Mbps
    double fail_rate = 0.0;   // per second
};

/// Providers, VM types and the inter-provider link matrix.
class CloudSystem {
public:
    CloudSystem() = default;
    CloudSystem(std::vector<Provider> providers, std::vector<VmType> vm_types,
                InterCloudLink default_link = {});

    std::vector<Provider> const & providers() const { return providers_; }
    std::vector<VmType> const & vm_types() const { return vm_types_; }
    Provider const & provider(std::size_t k) const { return providers_.at(k); }
    VmType const & vm_type(std::size_t t) const { return vm_types_.at(t); }

    InterCloudLink const & link(std::size_t src, std::size_t dst) const;
    void set_link(std::size_t src, std::size_t dst, InterCloudLink link);

    Provider & mutable_provider(std::size_t k) { return providers_.at(k); }
    VmType & mutable_vm_type(std::size_t t) { return vm_types_.at(t); }

    std::optional<std::size_t> find_provider(std::string_view id) const;

    /// Throws DomainError if any invariant of the model is violated.
    void validate() const;

private:
    std::vector<Provider> providers_;
    std::vector<VmType> vm_types_;
    std::vector<InterCloudLink> links_; // row-major, providers x providers
};

/// Six providers (two centers each of MA, AWS, GCP) with four VM types each,
/// priced after the published per-minute, per-hour and hybrid tariffs.
CloudSystem default_cloud_system();

CloudSystem parse_cloud_config(std::string_view text);
CloudSystem load_cloud_config(std::filesystem::path const & path);
std::string to_cloud_config(CloudSystem const & sys);

// Resource pool -------------------------------------------------------------

struct VmInstance {
    std::size_t index = 0;
    std::size_t type = 0;
    std::size_t copy = 0;
};

using ResourcePool = std::vector<VmInstance>;

/// |max_parallel_set| copies of every VM type, type-major.
ResourcePool build_resource_pool(CloudSystem const & sys, Workflow const & w);

/// Where a task runs: the instance and its provider.
struct Placement {
    std::size_t instance = 0;
    std::size_t provider = 0;
};

Placement placement_of(CloudSystem const & sys, ResourcePool const & pool, std::size_t instance);

// Model functions -----------------------------------------------------------

double exec_time(Task const & task, VmType const & type);

double comm_time(double size_mb, Placement const & src, Placement const & dst,
                 CloudSystem const & sys);

/// Billing for one lease. Throws DomainError on a negative duration.
double lease_cost(BillingScheme scheme, double price, std::optional<double> hybrid_base,
                  double duration);
double lease_cost(CloudSystem const & sys, std::size_t vm_type, double duration);

/// Marginal tiered price of `gb` gigabytes.
double tiered_price(std::span<TariffTier const> tiers, double gb);

double transfer_cost(double size_mb, Placement const & src, Placement const & dst,
                     CloudSystem const & sys);

double link_reliability(double comm_time, Placement const & src, Placement const & dst,
                        CloudSystem const & sys);

/// Throws DomainError on a negative duration.
double vm_reliability(VmType const & type, double duration);

/// Mean of work/capacity over every VM type, one entry per task.
std::vector<double> mean_exec_times(Workflow const & w, CloudSystem const & sys);

/// Mean over the internal bandwidth of every provider and the bandwidth of
/// every ordered provider pair.
double mean_bandwidth(CloudSystem const & sys);

} // namespace mcsched
