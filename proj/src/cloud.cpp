#include <mcsched/cloud.hpp>

#include <mcsched/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcsched {

namespace {

constexpr double kMinute = 60.0;
constexpr double kHour = 3600.0;
constexpr double kHybridBase = 600.0;
constexpr double kMegabitsPerGigabyte = 8000.0;

// Billing periods covering `duration`. The slack absorbs rounding noise in
// durations assembled from sums, so 120.0000000001 s still bills 2 minutes.
double periods(double duration, double period) {
    return std::max(0.0, std::ceil(duration / period - 1e-9));
}

} // namespace

std::string_view to_string(BillingScheme s) {
    switch (s) {
    case BillingScheme::per_minute:
        return "per-minute";
    case BillingScheme::per_hour:
        return "per-hour";
    case BillingScheme::hybrid:
        return "hybrid";
    }
    return "?";
}

std::optional<BillingScheme> parse_billing_scheme(std::string_view s) {
    if (s == "per-minute") {
        return BillingScheme::per_minute;
    }
    if (s == "per-hour") {
        return BillingScheme::per_hour;
    }
    if (s == "hybrid") {
        return BillingScheme::hybrid;
    }
    return std::nullopt;
}

CloudSystem::CloudSystem(std::vector<Provider> providers, std::vector<VmType> vm_types,
                         InterCloudLink default_link)
    : providers_(std::move(providers)),
      vm_types_(std::move(vm_types)),
      links_(providers_.size() * providers_.size(), default_link) {}

InterCloudLink const & CloudSystem::link(std::size_t src, std::size_t dst) const {
    if (src >= providers_.size() || dst >= providers_.size()) {
        throw DomainError("provider index out of range");
    }
    return links_[src * providers_.size() + dst];
}

void CloudSystem::set_link(std::size_t src, std::size_t dst, InterCloudLink link) {
    if (src >= providers_.size() || dst >= providers_.size()) {
        throw DomainError("provider index out of range");
    }
    links_[src * providers_.size() + dst] = link;
}

std::optional<std::size_t> CloudSystem::find_provider(std::string_view id) const {
    for (std::size_t k = 0; k < providers_.size(); ++k) {
        if (providers_[k].id == id) {
            return k;
        }
    }
    return std::nullopt;
}

void CloudSystem::validate() const {
    if (providers_.empty() || vm_types_.empty()) {
        throw DomainError("cloud system needs at least one provider and one VM type");
    }
    for (Provider const & p : providers_) {
        if (!(p.internal_bw > 0.0)) {
            throw DomainError("provider " + p.id + ": internal bandwidth must be positive");
        }
        if (!(p.link_fail_rate >= 0.0) || !(p.center_transfer_price >= 0.0)) {
            throw DomainError("provider " + p.id + ": negative rate or price");
        }
        for (std::size_t i = 0; i < p.egress_tiers.size(); ++i) {
            if (!(p.egress_tiers[i].usd_per_gb >= 0.0) || !(p.egress_tiers[i].from_gb >= 0.0)) {
                throw DomainError("provider " + p.id + ": negative tariff tier");
            }
            if (i > 0 && !(p.egress_tiers[i].from_gb > p.egress_tiers[i - 1].from_gb)) {
                throw DomainError("provider " + p.id + ": tier thresholds must increase strictly");
            }
        }
    }
    for (VmType const & t : vm_types_) {
        if (t.provider >= providers_.size()) {
            throw DomainError("VM type " + t.name + " references an unknown provider");
        }
        if (!(t.capacity > 0.0) || !(t.price >= 0.0) || !(t.boot_time >= 0.0) ||
            !(t.fail_rate >= 0.0)) {
            throw DomainError("VM type " + t.name + ": invalid capacity, price, boot or rate");
        }
        bool const hybrid = providers_[t.provider].scheme == BillingScheme::hybrid;
        if (hybrid != t.hybrid_base_price.has_value()) {
            throw DomainError("VM type " + t.name +
                              ": hybrid base price is required exactly for hybrid billing");
        }
        if (t.hybrid_base_price && !(*t.hybrid_base_price >= 0.0)) {
            throw DomainError("VM type " + t.name + ": negative hybrid base price");
        }
    }
    for (std::size_t a = 0; a < providers_.size(); ++a) {
        for (std::size_t b = 0; b < providers_.size(); ++b) {
            if (a == b) {
                continue;
            }
            InterCloudLink const & l = link(a, b);
            if (!(l.bandwidth > 0.0) || !(l.fail_rate >= 0.0)) {
                throw DomainError("link " + providers_[a].id + " -> " + providers_[b].id +
                                  ": invalid bandwidth or rate");
            }
        }
    }
}

CloudSystem default_cloud_system() {
    struct Brand {
        char const * name;
        BillingScheme scheme;
        double center_price;
        std::vector<TariffTier> tiers;
        char const * types[4];
        double prices[4];
        double base[4];
    };
    std::vector<Brand> const brands = {
        {"MA",
         BillingScheme::per_minute,
         0.08,
         {{0, 0.0}, {100, 0.11}, {10'000, 0.075}, {50'000, 0.07}, {150'000, 0.06}},
         {"B2MS", "B4MS", "B8MS", "B16MS"},
         {0.0015, 0.003, 0.006, 0.012},
         {}},
        {"AWS",
         BillingScheme::per_hour,
         0.02,
         {{0, 0.0}, {100, 0.09}, {10'000, 0.085}, {50'000, 0.07}, {150'000, 0.05}},
         {"m1.small", "m1.medium", "m1.large", "m1.xlarge"},
         {0.06, 0.12, 0.24, 0.45},
         {}},
        {"GCP",
         BillingScheme::hybrid,
         0.05,
         {{0, 0.19}, {1'000, 0.18}, {10'000, 0.15}},
         {"n1-highcpu-2", "n1-highcpu-4", "n1-highcpu-8", "n1-highcpu-16"},
         {0.0012, 0.0023, 0.0047, 0.0093},
         {0.014, 0.025, 0.05, 0.1}},
    };
    double const capacities[4] = {4.0, 8.0, 16.0, 32.0};
    double const default_rate = 5.5e-8;

    std::vector<Provider> providers;
    std::vector<VmType> types;
    for (Brand const & b : brands) {
        for (int center = 1; center <= 2; ++center) {
            std::size_t const k = providers.size();
            providers.push_back(Provider{std::string(b.name) + "-" + std::to_string(center), b.name,
                                         b.scheme, 20.0, default_rate, b.center_price, b.tiers});
            for (int p = 0; p < 4; ++p) {
                VmType t;
                t.name = b.types[p];
                t.provider = k;
                t.capacity = capacities[p];
                t.price = b.prices[p];
                if (b.scheme == BillingScheme::hybrid) {
                    t.hybrid_base_price = b.base[p];
                }
                t.boot_time = 97.0;
                t.fail_rate = default_rate;
                types.push_back(std::move(t));
            }
        }
    }
    CloudSystem sys(std::move(providers), std::move(types), InterCloudLink{100.0, default_rate});
    sys.validate();
    return sys;
}

ResourcePool build_resource_pool(CloudSystem const & sys, Workflow const & w) {
    std::size_t const copies = std::max<std::size_t>(1, max_parallel_set(w).size());
    ResourcePool pool;
    pool.reserve(copies * sys.vm_types().size());
    for (std::size_t t = 0; t < sys.vm_types().size(); ++t) {
        for (std::size_t c = 0; c < copies; ++c) {
            pool.push_back(VmInstance{pool.size(), t, c});
        }
    }
    return pool;
}

Placement placement_of(CloudSystem const & sys, ResourcePool const & pool, std::size_t instance) {
    if (instance >= pool.size()) {
        throw DomainError("instance index " + std::to_string(instance) + " outside the pool");
    }
    return Placement{instance, sys.vm_type(pool[instance].type).provider};
}

double exec_time(Task const & task, VmType const & type) { return task.work / type.capacity; }

double comm_time(double size_mb, Placement const & src, Placement const & dst,
                 CloudSystem const & sys) {
    if (src.instance == dst.instance) {
        return 0.0;
    }
    if (src.provider == dst.provider) {
        return size_mb / sys.provider(src.provider).internal_bw;
    }
    return size_mb / sys.link(src.provider, dst.provider).bandwidth;
}

double lease_cost(BillingScheme scheme, double price, std::optional<double> hybrid_base,
                  double duration) {
    if (!(duration >= 0.0)) {
        throw DomainError("lease duration must be non-negative");
    }
    switch (scheme) {
    case BillingScheme::per_minute:
        return periods(duration, kMinute) * price;
    case BillingScheme::per_hour:
        return periods(duration, kHour) * price;
    case BillingScheme::hybrid:
        return hybrid_base.value_or(0.0) + periods(duration - kHybridBase, kMinute) * price;
    }
    return 0.0;
}

double lease_cost(CloudSystem const & sys, std::size_t vm_type, double duration) {
    VmType const & t = sys.vm_type(vm_type);
    return lease_cost(sys.provider(t.provider).scheme, t.price, t.hybrid_base_price, duration);
}

double tiered_price(std::span<TariffTier const> tiers, double gb) {
    double total = 0.0;
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        double const lo = tiers[i].from_gb;
        double const hi =
            i + 1 < tiers.size() ? tiers[i + 1].from_gb : std::numeric_limits<double>::infinity();
        if (gb <= lo) {
            break;
        }
        total += (std::min(gb, hi) - lo) * tiers[i].usd_per_gb;
    }
    return total;
}

double transfer_cost(double size_mb, Placement const & src, Placement const & dst,
                     CloudSystem const & sys) {
    if (src.instance == dst.instance || src.provider == dst.provider) {
        return 0.0;
    }
    Provider const & from = sys.provider(src.provider);
    Provider const & to = sys.provider(dst.provider);
    double const gb = size_mb / kMegabitsPerGigabyte;
    if (!from.brand.empty() && from.brand == to.brand) {
        return gb * from.center_transfer_price;
    }
    return tiered_price(from.egress_tiers, gb);
}

double link_reliability(double comm_time, Placement const & src, Placement const & dst,
                        CloudSystem const & sys) {
    if (!(comm_time >= 0.0)) {
        throw DomainError("communication time must be non-negative");
    }
    if (src.instance == dst.instance) {
        return 1.0;
    }
    double const rate = src.provider == dst.provider ? sys.provider(src.provider).link_fail_rate
                                                     : sys.link(src.provider, dst.provider).fail_rate;
    return std::exp(-rate * comm_time);
}

double vm_reliability(VmType const & type, double duration) {
    if (!(duration >= 0.0)) {
        throw DomainError("lease duration must be non-negative");
    }
    return std::exp(-type.fail_rate * duration);
}

std::vector<double> mean_exec_times(Workflow const & w, CloudSystem const & sys) {
    std::vector<double> out(w.size(), 0.0);
    double inv = 0.0;
    for (VmType const & t : sys.vm_types()) {
        inv += 1.0 / t.capacity;
    }
    inv /= static_cast<double>(sys.vm_types().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = w.task(i).work * inv;
    }
    return out;
}

double mean_bandwidth(CloudSystem const & sys) {
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t const m = sys.providers().size();
    for (std::size_t a = 0; a < m; ++a) {
        sum += sys.provider(a).internal_bw;
        ++count;
        for (std::size_t b = 0; b < m; ++b) {
            if (a != b) {
                sum += sys.link(a, b).bandwidth;
                ++count;
            }
        }
    }
    return sum / static_cast<double>(count);
}

} // namespace mcsched
