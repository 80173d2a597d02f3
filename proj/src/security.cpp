#include <mcsched/security.hpp>

#include <mcsched/error.hpp>

#include <json.hpp>

#include <algorithm>

namespace mcsched {

CipherTable::CipherTable(std::vector<Cipher> ciphers) : ciphers_(std::move(ciphers)) {
    if (ciphers_.empty()) {
        throw DomainError("cipher table is empty");
    }
    std::vector<Cipher> sorted = ciphers_;
    std::sort(sorted.begin(), sorted.end(),
              [](Cipher const & a, Cipher const & b) { return a.level < b.level; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        Cipher const & c = sorted[i];
        if (!(c.vulnerability >= 0.0) || !(c.block_time_us > 0.0)) {
            throw DomainError("cipher level " + std::to_string(c.level) +
                              ": vulnerability must be >= 0 and block time > 0");
        }
        if (i > 0) {
            Cipher const & prev = sorted[i - 1];
            if (prev.level == c.level) {
                throw DomainError("duplicate cipher level " + std::to_string(c.level));
            }
            if (!(c.block_time_us > prev.block_time_us) || c.vulnerability > prev.vulnerability) {
                throw DomainError("cipher level " + std::to_string(c.level) +
                                  " must be slower and no more vulnerable than level " +
                                  std::to_string(prev.level));
            }
        }
    }
}

CipherTable CipherTable::rc6() {
    return CipherTable({
        {1, 4, 29, 98, 3.08},
        {2, 8, 61, 67, 3.58},
        {3, 12, 94, 34, 4.15},
        {4, 16, 118, 10, 4.63},
        {5, 20, 128, 0, 5.21},
    });
}

std::optional<std::size_t> CipherTable::index_of_level(int level) const {
    for (std::size_t i = 0; i < ciphers_.size(); ++i) {
        if (ciphers_[i].level == level) {
            return i;
        }
    }
    return std::nullopt;
}

double CipherTable::max_vulnerability() const {
    double v = 0.0;
    for (Cipher const & c : ciphers_) {
        v = std::max(v, c.vulnerability);
    }
    return v;
}

std::size_t CipherTable::strongest() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ciphers_.size(); ++i) {
        Cipher const & c = ciphers_[i];
        Cipher const & b = ciphers_[best];
        if (c.vulnerability < b.vulnerability ||
            (c.vulnerability == b.vulnerability && c.block_time_us < b.block_time_us)) {
            best = i;
        }
    }
    return best;
}

std::string_view to_string(CryptoCapacity c) {
    return c == CryptoCapacity::normalized ? "normalized" : "per-vm";
}

std::optional<CryptoCapacity> parse_crypto_capacity(std::string_view s) {
    if (s == "normalized") {
        return CryptoCapacity::normalized;
    }
    if (s == "per-vm") {
        return CryptoCapacity::per_vm;
    }
    return std::nullopt;
}

double system_vulnerability(Workflow const & w, CipherTable const & table,
                            CipherAssignment const & assignment,
                            std::vector<bool> const & cross_instance) {
    if (cross_instance.size() != w.edges().size() || assignment.choice.size() != w.edges().size()) {
        throw DomainError("system_vulnerability: one entry per edge is required");
    }
    double total = 0.0;
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        if (!cross_instance[h]) {
            continue;
        }
        auto const & c = assignment.choice[h];
        if (!c) {
            DataEdge const & e = w.edge(h);
            throw DomainError("edge " + w.task(e.src).id + " -> " + w.task(e.dst).id +
                              " crosses instances but has no cipher");
        }
        total += w.edge(h).sec_weight * table[*c].vulnerability;
    }
    return total;
}

double max_vulnerability(Workflow const & w, CipherTable const & table) {
    double const v = table.max_vulnerability();
    double total = 0.0;
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        if (!w.touches_virtual(h)) {
            total += w.edge(h).sec_weight * v;
        }
    }
    return total;
}

double crypto_time(double size_mb, Cipher const & c, double capacity, bool same_instance,
                   CryptoCapacity mode) {
    if (same_instance) {
        return 0.0;
    }
    if (!(capacity > 0.0)) {
        throw DomainError("crypto_time: capacity must be positive");
    }
    double const blocks = size_mb * 1e6 / CipherTable::kBlockBits;
    double const effective = mode == CryptoCapacity::normalized ? 1.0 : capacity;
    return c.block_time_us * blocks * 1e-6 / effective;
}

CipherTable parse_cipher_table(std::string_view config_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(config_text);
    } catch (nlohmann::json::parse_error const & e) {
        throw IngestionError(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("ciphers")) {
        return CipherTable::rc6();
    }
    std::vector<Cipher> ciphers;
    try {
        for (auto const & row : doc.at("ciphers")) {
            ciphers.push_back(Cipher{row.at("level").get<int>(), row.value("rounds", 0),
                                     row.value("plaintexts_log2", 0.0), row.at("vul").get<double>(),
                                     row.at("time_us_per_block").get<double>()});
        }
        return CipherTable(std::move(ciphers));
    } catch (nlohmann::json::exception const & e) {
        throw IngestionError(std::string("ciphers: ") + e.what());
    } catch (DomainError const & e) {
        throw IngestionError(std::string("ciphers: ") + e.what());
    }
}

std::string to_cipher_json(CipherTable const & table) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Cipher const & c : table.ciphers()) {
        rows.push_back({{"level", c.level},
                        {"rounds", c.rounds},
                        {"plaintexts_log2", c.plaintexts_log2},
                        {"vul", c.vulnerability},
                        {"time_us_per_block", c.block_time_us}});
    }
    return rows.dump(2);
}

} // namespace mcsched
