#include <mcsched/generators.hpp>

#include <mcsched/error.hpp>
#include <mcsched/random.hpp>

#include <charconv>
#include <vector>

namespace mcsched {

namespace {

// Work in MI and output volumes in megabits, each jittered by +-25 %.
struct Builder {
    Rng rng;
    std::vector<Task> tasks;
    std::vector<EdgeSpec> edges;

    explicit Builder(std::uint64_t seed, std::uint64_t family) : rng({seed, family}) {}

    double jitter(double mean) { return mean * rng.uniform(0.75, 1.25); }

    std::string add(std::string const & stem, std::size_t i, double work) {
        std::string id = stem + "_" + std::to_string(i);
        tasks.push_back(Task{id, jitter(work), false});
        return id;
    }

    void link(std::string const & a, std::string const & b, double size) {
        edges.push_back(EdgeSpec{a, b, jitter(size), 1.0, std::nullopt});
    }

    Workflow build() { return Workflow::build(std::move(tasks), edges); }
};

} // namespace

std::string_view to_string(WorkflowFamily f) {
    return f == WorkflowFamily::epigenomics ? "epigenomics" : "cybershake";
}

std::optional<WorkflowFamily> parse_workflow_family(std::string_view s) {
    if (s == "epigenomics") {
        return WorkflowFamily::epigenomics;
    }
    if (s == "cybershake") {
        return WorkflowFamily::cybershake;
    }
    return std::nullopt;
}

Workflow generate_epigenomics(std::size_t n, std::uint64_t seed) {
    if (n < 8) {
        throw DomainError("epigenomics-like workflows need at least 8 tasks");
    }
    std::size_t const chains = (n - 4) / 4;
    std::size_t const extra = (n - 4) % 4;
    Builder b(seed, 1);
    std::string const split = b.add("fastQSplit", 0, 300);
    std::vector<std::string> tails;
    for (std::size_t k = 0; k < chains; ++k) {
        std::string const filter = b.add("filterContams", k, 100);
        b.link(split, filter, 200);
        std::string prev = filter;
        std::size_t const repeats = extra / chains + (k < extra % chains ? 1 : 0);
        for (std::size_t r = 0; r < repeats; ++r) {
            std::string const again = b.add("filterContams" + std::to_string(r + 2), k, 100);
            b.link(prev, again, 150);
            prev = again;
        }
        std::string const sol = b.add("sol2sanger", k, 50);
        b.link(prev, sol, 150);
        std::string const bfq = b.add("fastq2bfq", k, 80);
        b.link(sol, bfq, 150);
        std::string const map = b.add("map", k, 2000);
        b.link(bfq, map, 60);
        tails.push_back(map);
    }
    std::string const merge = b.add("mapMerge", 0, 400);
    for (std::string const & t : tails) {
        b.link(t, merge, 80);
    }
    std::string const index = b.add("maqIndex", 0, 800);
    b.link(merge, index, 300);
    std::string const pileup = b.add("pileup", 0, 500);
    b.link(index, pileup, 300);
    return b.build();
}

Workflow generate_cybershake(std::size_t n, std::uint64_t seed) {
    if (n < 6) {
        throw DomainError("cybershake-like workflows need at least 6 tasks");
    }
    std::size_t const pairs = (n - 4) / 2;
    bool const lone = (n - 4) % 2 == 1;
    Builder b(seed, 2);
    std::string const extract[2] = {b.add("ExtractSGT", 0, 1000), b.add("ExtractSGT", 1, 1000)};
    std::vector<std::string> synth;
    std::vector<std::string> peaks;
    for (std::size_t k = 0; k < pairs + (lone ? 1 : 0); ++k) {
        std::string const s = b.add("SeismogramSynthesis", k, 2500);
        b.link(extract[k % 2], s, 400);
        synth.push_back(s);
        if (k < pairs) {
            std::string const p = b.add("PeakValCalc", k, 10);
            b.link(s, p, 20);
            peaks.push_back(p);
        }
    }
    if (synth.size() == 1) {
        b.link(extract[1], synth[0], 400);
    }
    std::string const zip_seis = b.add("ZipSeis", 0, 200);
    std::string const zip_psa = b.add("ZipPSA", 0, 100);
    for (std::string const & s : synth) {
        b.link(s, zip_seis, 20);
    }
    for (std::string const & p : peaks) {
        b.link(p, zip_psa, 1);
    }
    return b.build();
}

Workflow generate_workflow(WorkflowFamily family, std::size_t n, std::uint64_t seed) {
    return family == WorkflowFamily::epigenomics ? generate_epigenomics(n, seed)
                                                 : generate_cybershake(n, seed);
}

std::optional<Workflow> generate_from_spec(std::string_view spec) {
    constexpr std::string_view prefix = "gen:";
    if (spec.substr(0, prefix.size()) != prefix) {
        return std::nullopt;
    }
    std::vector<std::string_view> parts;
    std::string_view rest = spec.substr(prefix.size());
    while (true) {
        std::size_t const colon = rest.find(':');
        parts.push_back(rest.substr(0, colon));
        if (colon == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(colon + 1);
    }
    auto number = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto const [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size()) {
            throw DomainError("generator spec " + std::string(spec) + ": bad number " +
                              std::string(s));
        }
        return v;
    };
    if (parts.size() < 2 || parts.size() > 3) {
        throw DomainError("generator spec must be gen:<family>:<n>[:<seed>], got " +
                          std::string(spec));
    }
    auto const family = parse_workflow_family(parts[0]);
    if (!family) {
        throw DomainError("unknown workflow family " + std::string(parts[0]));
    }
    std::uint64_t const seed = parts.size() == 3 ? number(parts[2]) : 0;
    return generate_workflow(*family, static_cast<std::size_t>(number(parts[1])), seed);
}

} // namespace mcsched
