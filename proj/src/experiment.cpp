#include <mcsched/experiment.hpp>

#include <mcsched/error.hpp>
#include <mcsched/random.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace mcsched {

namespace {

std::string csv_field(std::string const & s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

std::string metric_field(ResultRow const & r, double x) {
    return r.feasible ? format_double(x) : std::string();
}

std::size_t real_task_count(Workflow const & w) {
    std::size_t n = 0;
    for (Task const & t : w.tasks()) {
        n += t.is_virtual ? 0 : 1;
    }
    return n;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    auto const [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t rep) {
    return Rng({seed, static_cast<std::uint64_t>(rep)}).next();
}

RunParams sample_run_params(Workflow const & workflow, CloudSystem const & cloud,
                            CipherTable const & table, double eta, std::uint64_t seed,
                            std::size_t rep, SecuritySampling const & sampling, int scale_digits,
                            CryptoCapacity mode) {
    RunParams p;
    p.run_seed = run_seed(seed, rep);
    Rng rng(p.run_seed);
    Workflow const w = augment(workflow);

    double const scale = std::pow(10.0, scale_digits);
    std::vector<double> weights(w.edges().size(), 0.0);
    std::vector<std::optional<double>> caps(w.edges().size());
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        if (w.touches_virtual(h)) {
            continue;
        }
        double const u = rng.uniform(sampling.weight_lo, sampling.weight_hi);
        weights[h] = std::clamp(std::round(u * scale) / scale, sampling.weight_lo, sampling.weight_hi);
        if (sampling.edge_caps) {
            caps[h] = table[static_cast<std::size_t>(rng.below(table.size()))].vulnerability;
        }
    }
    p.workflow = w.with_security(weights, caps);

    p.cloud = cloud;
    auto rate = [&] { return rng.uniform(sampling.rate_lo, sampling.rate_hi); };
    for (std::size_t t = 0; t < p.cloud.vm_types().size(); ++t) {
        p.cloud.mutable_vm_type(t).fail_rate = rate();
    }
    std::size_t const np = p.cloud.providers().size();
    for (std::size_t k = 0; k < np; ++k) {
        p.cloud.mutable_provider(k).link_fail_rate = rate();
    }
    for (std::size_t a = 0; a < np; ++a) {
        for (std::size_t b = 0; b < np; ++b) {
            if (a != b) {
                InterCloudLink link = p.cloud.link(a, b);
                link.fail_rate = rate();
                p.cloud.set_link(a, b, link);
            }
        }
    }

    p.constraints.system_cap = eta * max_vulnerability(p.workflow, table);
    p.constraints.scale_digits = scale_digits;
    p.constraints.crypto_capacity = mode;
    return p;
}

void ExperimentConfig::validate() const {
    if (algorithms.empty() || etas.empty()) {
        throw DomainError("experiment needs at least one algorithm and one eta");
    }
    for (double eta : etas) {
        if (!(eta >= 0.0 && eta <= 1.0)) {
            throw DomainError("eta must lie in [0, 1], got " + format_double(eta));
        }
    }
    if (reps < 1) {
        throw DomainError("reps must be >= 1");
    }
    scheduler.validate();
}

std::vector<ResultRow> run_sweep(ExperimentConfig const & cfg, SweepProgress const & progress) {
    cfg.validate();
    Workflow const w = augment(cfg.workflow);
    std::size_t const n = real_task_count(w);
    std::vector<ResultRow> rows;
    for (Algorithm const & algo : cfg.algorithms) {
        for (double eta : cfg.etas) {
            for (std::size_t rep = 0; rep < static_cast<std::size_t>(cfg.reps); ++rep) {
                ResultRow row;
                row.workflow = cfg.workflow_name;
                row.n = n;
                row.algorithm = algo.name();
                row.eta = eta;
                row.rep = rep;
                auto const t0 = std::chrono::steady_clock::now();
                try {
                    RunParams const p = sample_run_params(w, cfg.cloud, cfg.ciphers, eta, cfg.seed,
                                                          rep, cfg.sampling, cfg.scale_digits,
                                                          cfg.crypto_capacity);
                    row.seed = p.run_seed;
                    SchedulerConfig sc = cfg.scheduler;
                    sc.seed = p.run_seed;
                    PipelineResult res =
                        run_pipeline(p.workflow, p.cloud, cfg.ciphers, p.constraints, sc, algo);
                    row.makespan = res.schedule.makespan;
                    row.cost = res.schedule.cost;
                    row.reliability = res.schedule.reliability;
                    ScheduleRecord record{p.workflow, p.cloud, std::move(res.pool), cfg.ciphers,
                                          p.constraints, std::move(res.schedule)};
                    AuditReport const audit = validate_schedule(record);
                    row.feasible = audit.ok();
                    for (AuditCheck const & c : audit.checks) {
                        if (!c.passed) {
                            row.error += (row.error.empty() ? "audit failed: " : ", ") + c.name;
                        }
                    }
                } catch (Error const & e) {
                    row.feasible = false;
                    row.error = e.what();
                }
                row.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
                if (progress) {
                    progress(row);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::string raw_csv(std::vector<ResultRow> const & rows) {
    std::ostringstream out;
    out << "workflow,n,algorithm,eta,rep,seed,makespan_s,cost_usd,reliability,feasible,error\n";
    for (ResultRow const & r : rows) {
        out << csv_field(r.workflow) << ',' << r.n << ',' << r.algorithm << ','
            << format_double(r.eta) << ',' << r.rep << ',' << r.seed << ','
            << metric_field(r, r.makespan) << ',' << metric_field(r, r.cost) << ','
            << metric_field(r, r.reliability) << ',' << (r.feasible ? 1 : 0) << ','
            << csv_field(r.error) << '\n';
    }
    return out.str();
}

std::string timings_csv(std::vector<ResultRow> const & rows) {
    std::ostringstream out;
    out << "workflow,algorithm,eta,rep,wall_ms\n";
    for (ResultRow const & r : rows) {
        out << csv_field(r.workflow) << ',' << r.algorithm << ',' << format_double(r.eta) << ','
            << r.rep << ',' << format_double(r.wall_ms) << '\n';
    }
    return out.str();
}

std::string aggregate_csv(std::vector<ResultRow> const & rows) {
    struct Acc {
        std::size_t runs = 0;
        std::vector<double> makespan, cost, reliability;
    };
    using Key = std::tuple<std::string, std::string, double>;
    std::vector<Key> order;
    std::map<Key, Acc> cells;
    for (ResultRow const & r : rows) {
        Key const key{r.workflow, r.algorithm, r.eta};
        auto [it, fresh] = cells.try_emplace(key);
        if (fresh) {
            order.push_back(key);
        }
        ++it->second.runs;
        if (r.feasible) {
            it->second.makespan.push_back(r.makespan);
            it->second.cost.push_back(r.cost);
            it->second.reliability.push_back(r.reliability);
        }
    }
    auto stats = [](std::vector<double> const & xs) -> std::string {
        if (xs.empty()) {
            return ",";
        }
        double mean = 0.0;
        for (double x : xs) {
            mean += x;
        }
        mean /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - mean) * (x - mean);
        }
        double const sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
        return format_double(mean) + "," + format_double(sd);
    };
    std::ostringstream out;
    out << "workflow,algorithm,eta,runs,feasible,makespan_mean,makespan_sd,cost_mean,cost_sd,"
           "reliability_mean,reliability_sd\n";
    for (Key const & key : order) {
        Acc const & a = cells.at(key);
        out << csv_field(std::get<0>(key)) << ',' << std::get<1>(key) << ','
            << format_double(std::get<2>(key)) << ',' << a.runs << ',' << a.makespan.size() << ','
            << stats(a.makespan) << ',' << stats(a.cost) << ',' << stats(a.reliability) << '\n';
    }
    return out.str();
}

std::string rows_json(std::vector<ResultRow> const & rows) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (ResultRow const & r : rows) {
        nlohmann::ordered_json row = {{"workflow", r.workflow}, {"n", r.n},
                                      {"algorithm", r.algorithm}, {"eta", r.eta},
                                      {"rep", r.rep}, {"seed", r.seed},
                                      {"feasible", r.feasible}};
        if (r.feasible) {
            row["makespan_s"] = r.makespan;
            row["cost_usd"] = r.cost;
            row["reliability"] = r.reliability;
        } else {
            row["error"] = r.error;
        }
        doc.push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

} // namespace mcsched
