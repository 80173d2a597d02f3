#include <mcsched/cloud.hpp>

#include <mcsched/error.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mcsched {

namespace {

using nlohmann::json;

template <class T>
T field(json const & obj, char const * key, std::string const & where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw IngestionError(where + ": missing field '" + key + "'");
    }
    try {
        return it->get<T>();
    } catch (json::exception const &) {
        throw IngestionError(where + "." + key + ": wrong type");
    }
}

template <class T>
T field_or(json const & obj, char const * key, T fallback, std::string const & where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    return field<T>(obj, key, where);
}

InterCloudLink parse_link(json const & j, InterCloudLink fallback, std::string const & where) {
    return InterCloudLink{field_or<double>(j, "bandwidth_mbps", fallback.bandwidth, where),
                          field_or<double>(j, "fail_rate", fallback.fail_rate, where)};
}

} // namespace

CloudSystem parse_cloud_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (json::parse_error const & e) {
        throw IngestionError(std::string("malformed cloud config: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("providers") || !doc.contains("vm_types")) {
        throw IngestionError("cloud config needs 'providers' and 'vm_types'");
    }

    std::vector<Provider> providers;
    for (std::size_t i = 0; i < doc["providers"].size(); ++i) {
        json const & p = doc["providers"][i];
        std::string const where = "providers[" + std::to_string(i) + "]";
        Provider out;
        out.id = field<std::string>(p, "id", where);
        out.brand = field_or<std::string>(p, "brand", out.id, where);
        auto const scheme = parse_billing_scheme(field<std::string>(p, "scheme", where));
        if (!scheme) {
            throw IngestionError(where + ".scheme: expected per-minute, per-hour or hybrid");
        }
        out.scheme = *scheme;
        out.internal_bw = field<double>(p, "internal_bw_mbps", where);
        out.link_fail_rate = field_or<double>(p, "link_fail_rate", 0.0, where);
        out.center_transfer_price = field_or<double>(p, "center_transfer_usd_per_gb", 0.0, where);
        if (p.contains("egress_tiers")) {
            for (json const & t : p["egress_tiers"]) {
                out.egress_tiers.push_back(TariffTier{field<double>(t, "from_gb", where),
                                                      field<double>(t, "usd_per_gb", where)});
            }
        }
        providers.push_back(std::move(out));
    }

    auto provider_index = [&](std::string const & id, std::string const & where) {
        for (std::size_t k = 0; k < providers.size(); ++k) {
            if (providers[k].id == id) {
                return k;
            }
        }
        throw IngestionError(where + ": unknown provider " + id);
    };

    std::vector<VmType> types;
    for (std::size_t i = 0; i < doc["vm_types"].size(); ++i) {
        json const & t = doc["vm_types"][i];
        std::string const where = "vm_types[" + std::to_string(i) + "]";
        VmType out;
        out.name = field<std::string>(t, "name", where);
        out.provider = provider_index(field<std::string>(t, "provider", where), where);
        out.capacity = field<double>(t, "capacity_mips", where);
        out.price = field<double>(t, "price_usd", where);
        if (t.contains("hybrid_base_usd") && !t["hybrid_base_usd"].is_null()) {
            out.hybrid_base_price = field<double>(t, "hybrid_base_usd", where);
        }
        out.boot_time = field_or<double>(t, "boot_time_s", 97.0, where);
        out.fail_rate = field_or<double>(t, "fail_rate", 0.0, where);
        types.push_back(std::move(out));
    }

    InterCloudLink fallback{100.0, 0.0};
    json const inter = doc.value("inter_cloud", json::object());
    if (inter.contains("default")) {
        fallback = parse_link(inter["default"], fallback, "inter_cloud.default");
    }
    CloudSystem sys(std::move(providers), std::move(types), fallback);
    if (inter.contains("links")) {
        for (std::size_t i = 0; i < inter["links"].size(); ++i) {
            json const & l = inter["links"][i];
            std::string const where = "inter_cloud.links[" + std::to_string(i) + "]";
            auto endpoint = [&](char const * key) {
                std::string const id = field<std::string>(l, key, where);
                auto const k = sys.find_provider(id);
                if (!k) {
                    throw IngestionError(where + ": unknown provider " + id);
                }
                return *k;
            };
            std::size_t const a = endpoint("src");
            std::size_t const b = endpoint("dst");
            if (a == b) {
                throw IngestionError(where + ": a link needs two different providers");
            }
            sys.set_link(a, b, parse_link(l, fallback, where));
        }
    }
    try {
        sys.validate();
    } catch (DomainError const & e) {
        throw IngestionError(std::string("invalid cloud config: ") + e.what());
    }
    return sys;
}

CloudSystem load_cloud_config(std::filesystem::path const & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_cloud_config(buf.str());
    } catch (IngestionError const & e) {
        throw IngestionError(path.string() + ": " + e.what());
    }
}

std::string to_cloud_config(CloudSystem const & sys) {
    using ojson = nlohmann::ordered_json;
    ojson doc;
    doc["providers"] = ojson::array();
    for (Provider const & p : sys.providers()) {
        ojson tiers = ojson::array();
        for (TariffTier const & t : p.egress_tiers) {
            tiers.push_back({{"from_gb", t.from_gb}, {"usd_per_gb", t.usd_per_gb}});
        }
        doc["providers"].push_back({{"id", p.id},
                                    {"brand", p.brand},
                                    {"scheme", std::string(to_string(p.scheme))},
                                    {"internal_bw_mbps", p.internal_bw},
                                    {"link_fail_rate", p.link_fail_rate},
                                    {"center_transfer_usd_per_gb", p.center_transfer_price},
                                    {"egress_tiers", std::move(tiers)}});
    }
    doc["vm_types"] = ojson::array();
    for (VmType const & t : sys.vm_types()) {
        ojson row = {{"name", t.name},
                     {"provider", sys.provider(t.provider).id},
                     {"capacity_mips", t.capacity},
                     {"price_usd", t.price}};
        if (t.hybrid_base_price) {
            row["hybrid_base_usd"] = *t.hybrid_base_price;
        }
        row["boot_time_s"] = t.boot_time;
        row["fail_rate"] = t.fail_rate;
        doc["vm_types"].push_back(std::move(row));
    }
    ojson links = ojson::array();
    for (std::size_t a = 0; a < sys.providers().size(); ++a) {
        for (std::size_t b = 0; b < sys.providers().size(); ++b) {
            if (a == b) {
                continue;
            }
            InterCloudLink const & l = sys.link(a, b);
            links.push_back({{"src", sys.provider(a).id},
                             {"dst", sys.provider(b).id},
                             {"bandwidth_mbps", l.bandwidth},
                             {"fail_rate", l.fail_rate}});
        }
    }
    doc["inter_cloud"] = {{"links", std::move(links)}};
    return doc.dump(2) + "\n";
}

} // namespace mcsched
