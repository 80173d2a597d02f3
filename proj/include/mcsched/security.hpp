#pragma once

#include <mcsched/workflow.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcsched {

/// A block-cipher variant: more rounds, lower vulnerability, slower blocks.
struct Cipher {
    int level = 0;
    int rounds = 0;
    double plaintexts_log2 = 0.0; // plaintexts needed by the best known attack
    double vulnerability = 0.0;
    double block_time_us = 0.0;   // per 128-bit block at unit capacity
};

class CipherTable {
public:
    static constexpr int kBlockBits = 128;

    CipherTable() = default;
    /// Throws DomainError unless the table is nonempty and ordered so that a
    /// higher level is slower and no more vulnerable.
    explicit CipherTable(std::vector<Cipher> ciphers);

    /// The five RC6 variants with 4 to 20 rounds.
    static CipherTable rc6();

    std::size_t size() const { return ciphers_.size(); }
    Cipher const & operator[](std::size_t i) const { return ciphers_[i]; }
    std::vector<Cipher> const & ciphers() const { return ciphers_; }

    std::optional<std::size_t> index_of_level(int level) const;
    double max_vulnerability() const;

    /// Least vulnerable cipher; the fastest among equals.
    std::size_t strongest() const;

private:
    std::vector<Cipher> ciphers_;
};

enum class CryptoCapacity {
    normalized, ///< every VM encrypts at unit capacity
    per_vm      ///< encryption time scales with 1/capacity of the VM
};

std::string_view to_string(CryptoCapacity c);
std::optional<CryptoCapacity> parse_crypto_capacity(std::string_view s);

struct SecurityConstraints {
    double system_cap = 0.0; ///< bound on the weighted system vulnerability
    int scale_digits = 1;    ///< decimals kept when weights are made integral
    CryptoCapacity crypto_capacity = CryptoCapacity::normalized;
};

/// Cipher per workflow edge, as an index into the table. Edges whose
/// endpoints share an instance (or touch a virtual task) carry none.
struct CipherAssignment {
    std::vector<std::optional<std::size_t>> choice;
    double total_time = 0.0; ///< encryption plus decryption, seconds
};

inline double vulnerability_of(Cipher const & c) { return c.vulnerability; }

/// Weighted vulnerability sum over the edges flagged in `cross_instance`.
/// Throws DomainError when a flagged edge has no cipher.
double system_vulnerability(Workflow const & w, CipherTable const & table,
                            CipherAssignment const & assignment,
                            std::vector<bool> const & cross_instance);

/// System vulnerability with the most vulnerable cipher on every data edge.
double max_vulnerability(Workflow const & w, CipherTable const & table);

/// Encryption (or decryption) time of one edge in seconds.
double crypto_time(double size_mb, Cipher const & c, double capacity, bool same_instance,
                   CryptoCapacity mode);

/// Reads the optional "ciphers" array of a configuration document; returns
/// the RC6 table when the section is absent.
CipherTable parse_cipher_table(std::string_view config_text);
std::string to_cipher_json(CipherTable const & table);

} // namespace mcsched
