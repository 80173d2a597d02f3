#include <mcsched/schedule.hpp>

#include <mcsched/error.hpp>

#include <json.hpp>

#include <algorithm>

namespace mcsched {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kFormatTag = "mcsched-schedule/1";

ojson instance_json(std::size_t instance) {
    return instance == Mapping::npos ? ojson(nullptr) : ojson(instance);
}

} // namespace

std::string to_schedule_json(ScheduleRecord const & record) {
    Workflow const & w = record.workflow;
    Schedule const & s = record.schedule;
    CloudSystem const & sys = record.cloud;

    ojson doc;
    doc["format"] = kFormatTag;
    doc["objectives"] = {{"makespan_s", s.makespan},
                         {"cost_usd", s.cost},
                         {"reliability", s.reliability},
                         {"lease_cost_usd", s.lease_cost},
                         {"transfer_cost_usd", s.transfer_cost}};
    doc["constraints"] = {{"system_cap", record.constraints.system_cap},
                          {"scale_digits", record.constraints.scale_digits},
                          {"crypto_capacity", to_string(record.constraints.crypto_capacity)}};

    ojson leases = ojson::array();
    for (Lease const & l : s.leases) {
        VmType const & t = sys.vm_type(l.vm_type);
        leases.push_back({{"instance", l.instance},
                          {"vm_type", t.name},
                          {"provider", sys.provider(t.provider).id},
                          {"start_s", l.start},
                          {"finish_s", l.finish}});
    }
    doc["leases"] = std::move(leases);

    std::size_t const types = sys.vm_types().size();
    std::size_t const copies = types == 0 ? 0 : record.pool.size() / types;
    bool blocked = copies * types == record.pool.size();
    for (VmInstance const & inst : record.pool) {
        blocked = blocked && inst.type == inst.index / std::max<std::size_t>(copies, 1);
    }
    if (!blocked) {
        throw DomainError("to_schedule_json: pool is not one block of copies per VM type");
    }
    doc["pool_copies_per_type"] = copies;

    ojson tasks = ojson::array();
    for (std::size_t i = 0; i < w.size(); ++i) {
        TaskTiming const & t = s.timings.at(i);
        tasks.push_back({{"id", w.task(i).id},
                         {"instance", instance_json(t.instance)},
                         {"start_s", t.start},
                         {"finish_s", t.finish},
                         {"dec_s", t.dec},
                         {"exec_s", t.exec},
                         {"enc_s", t.enc},
                         {"transfer_s", t.transfer}});
    }
    doc["tasks"] = std::move(tasks);

    ojson ciphers = ojson::array();
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        auto const & c = s.ciphers.choice.at(h);
        if (!c) {
            continue;
        }
        DataEdge const & e = w.edge(h);
        ciphers.push_back({{"src", w.task(e.src).id},
                           {"dst", w.task(e.dst).id},
                           {"level", record.ciphers[*c].level}});
    }
    doc["ciphers"] = std::move(ciphers);
    doc["total_crypto_s"] = s.ciphers.total_time;

    doc["workflow"] = ojson::parse(to_native_json(w));
    doc["cloud"] = ojson::parse(to_cloud_config(sys));
    doc["cloud"]["ciphers"] = ojson::parse(to_cipher_json(record.ciphers));
    return doc.dump(2) + "\n";
}

ScheduleRecord parse_schedule_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (nlohmann::json::parse_error const & e) {
        throw IngestionError(std::string("malformed schedule: ") + e.what());
    }
    try {
        if (doc.value("format", std::string()) != kFormatTag) {
            throw IngestionError("schedule: missing or unknown \"format\" tag");
        }
        ScheduleRecord r;
        r.workflow = augment(parse_native_json(doc.at("workflow").dump()));
        std::string const cloud_text = doc.at("cloud").dump();
        r.cloud = parse_cloud_config(cloud_text);
        r.ciphers = parse_cipher_table(cloud_text);

        auto const & cons = doc.at("constraints");
        r.constraints.system_cap = cons.at("system_cap").get<double>();
        r.constraints.scale_digits = cons.value("scale_digits", 1);
        auto const mode = parse_crypto_capacity(cons.value("crypto_capacity", "normalized"));
        if (!mode) {
            throw IngestionError("constraints.crypto_capacity: unknown mode");
        }
        r.constraints.crypto_capacity = *mode;

        std::size_t const copies = doc.at("pool_copies_per_type").get<std::size_t>();
        for (std::size_t t = 0; t < r.cloud.vm_types().size(); ++t) {
            for (std::size_t c = 0; c < copies; ++c) {
                r.pool.push_back(VmInstance{r.pool.size(), t, c});
            }
        }

        Workflow const & w = r.workflow;
        Schedule & s = r.schedule;
        s.mapping.instance.assign(w.size(), Mapping::npos);
        s.timings.assign(w.size(), TaskTiming{});
        auto const & tasks = doc.at("tasks");
        for (std::size_t k = 0; k < tasks.size(); ++k) {
            auto const & row = tasks[k];
            std::string const id = row.at("id").get<std::string>();
            auto const i = w.find(id);
            if (!i) {
                throw IngestionError("tasks[" + std::to_string(k) + "]: unknown task " + id);
            }
            TaskTiming & t = s.timings[*i];
            if (!row.at("instance").is_null()) {
                t.instance = row.at("instance").get<std::size_t>();
                s.mapping.instance[*i] = t.instance;
            }
            t.start = row.at("start_s").get<double>();
            t.finish = row.at("finish_s").get<double>();
            t.dec = row.value("dec_s", 0.0);
            t.exec = row.value("exec_s", 0.0);
            t.enc = row.value("enc_s", 0.0);
            t.transfer = row.value("transfer_s", 0.0);
        }

        for (auto const & row : doc.at("leases")) {
            std::string const name = row.at("vm_type").get<std::string>();
            std::string const provider = row.at("provider").get<std::string>();
            std::optional<std::size_t> type;
            for (std::size_t j = 0; j < r.cloud.vm_types().size(); ++j) {
                VmType const & vt = r.cloud.vm_type(j);
                if (vt.name == name && r.cloud.provider(vt.provider).id == provider) {
                    type = j;
                }
            }
            if (!type) {
                throw IngestionError("leases: unknown VM type " + provider + "/" + name);
            }
            s.leases.push_back(Lease{row.at("instance").get<std::size_t>(), *type,
                                     row.at("start_s").get<double>(),
                                     row.at("finish_s").get<double>()});
        }

        s.ciphers.choice.assign(w.edges().size(), std::nullopt);
        for (auto const & row : doc.at("ciphers")) {
            std::string const src = row.at("src").get<std::string>();
            std::string const dst = row.at("dst").get<std::string>();
            auto const a = w.find(src);
            auto const b = w.find(dst);
            auto const h = a && b ? w.find_edge(*a, *b) : std::nullopt;
            if (!h) {
                throw IngestionError("ciphers: unknown edge " + src + " -> " + dst);
            }
            auto const c = r.ciphers.index_of_level(row.at("level").get<int>());
            if (!c) {
                throw IngestionError("ciphers: unknown level on edge " + src + " -> " + dst);
            }
            s.ciphers.choice[*h] = *c;
        }
        s.ciphers.total_time = doc.value("total_crypto_s", 0.0);

        auto const & obj = doc.at("objectives");
        s.makespan = obj.at("makespan_s").get<double>();
        s.cost = obj.at("cost_usd").get<double>();
        s.reliability = obj.at("reliability").get<double>();
        s.lease_cost = obj.value("lease_cost_usd", 0.0);
        s.transfer_cost = obj.value("transfer_cost_usd", 0.0);
        return r;
    } catch (nlohmann::json::exception const & e) {
        throw IngestionError(std::string("schedule: ") + e.what());
    }
}

} // namespace mcsched
