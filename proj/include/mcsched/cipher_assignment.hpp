#pragma once

#include <mcsched/cloud.hpp>
#include <mcsched/mapping.hpp>
#include <mcsched/security.hpp>
#include <mcsched/workflow.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mcsched {

/// Decimal scaling that turns weights and the system budget into integers.
struct ScaledBudget {
    std::int64_t scale = 10;  ///< 10^scale_digits
    std::int64_t budget = 0;  ///< floor(system_cap * scale); negative when infeasible

    static ScaledBudget make(double system_cap, int scale_digits);
    std::int64_t weight(double w) const;
};

/// One cross-instance edge as seen by the cipher assignment.
struct DpItem {
    std::size_t edge = 0;
    std::int64_t weight = 0;   ///< scaled security weight
    double cap = 0.0;          ///< per-edge vulnerability bound (+inf when unset)
    std::vector<double> time;  ///< encryption + decryption seconds, per cipher
};

/// Item for edge h under `mapping`, which must place both endpoints.
DpItem make_dp_item(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                    Mapping const & mapping, CipherTable const & table,
                    SecurityConstraints const & cons, ScaledBudget const & scaled, std::size_t h);

/// Items for every cross-instance edge of `mapping`, in edge order.
/// Encryption runs on the producer's VM, decryption on the consumer's.
std::vector<DpItem> make_dp_items(Workflow const & w, CloudSystem const & sys,
                                  ResourcePool const & pool, Mapping const & mapping,
                                  CipherTable const & table, SecurityConstraints const & cons);

/// Full dynamic-programming table: best time for the first h items under a
/// scaled vulnerability budget b, and the cipher chosen for item h.
///
/// Row h only stores budgets up to the largest contribution the first h
/// items can make; larger budgets read the last stored cell, which holds the
/// same value the dense table would.
class DpTable {
public:
    static constexpr std::uint8_t kNone = 0xff;

    DpTable(std::span<DpItem const> items, CipherTable const & table, std::int64_t budget,
            bool keep_times = true);

    std::size_t items() const { return widths_.size() - 1; }
    std::int64_t budget() const { return budget_; }
    /// Largest budget that still changes the result: min(budget, sum of max needs).
    std::int64_t reach() const { return widths_.back() - 1; }

    /// h in [0, items], b in [0, budget]. +inf when no assignment fits.
    double best_time(std::size_t h, std::int64_t b) const;
    /// Cipher index chosen for item h (h >= 1).
    std::optional<std::size_t> best_cipher(std::size_t h, std::int64_t b) const;

    /// Best time for all items under every budget b in [0, budget].
    double final_time(std::int64_t b) const;

    /// Cipher per item recovered from dp[items][b] backwards (b defaults to
    /// the full budget). Empty when dp[items][b] is infeasible.
    std::optional<std::vector<std::size_t>> backtrack() const { return backtrack(budget_); }
    std::optional<std::vector<std::size_t>> backtrack(std::int64_t b) const;

    /// Scaled vulnerability of cipher c on item h, or -1 if it breaks the cap.
    std::int64_t need(std::size_t h, std::size_t c) const { return need_[(h - 1) * ciphers_ + c]; }

private:
    std::size_t cell(std::size_t h, std::int64_t b) const;

    std::int64_t budget_;
    std::size_t ciphers_;
    std::vector<std::int64_t> widths_;  // cells stored per row
    std::vector<std::size_t> offsets_;  // row start in choice_/times_
    std::vector<std::int64_t> need_;
    std::vector<std::uint8_t> choice_;
    std::vector<double> times_;         // empty unless keep_times
    std::vector<double> last_row_;
};

/// Minimum-time cipher assignment under the system budget and per-edge caps.
/// Throws InfeasibleError naming the first violated constraint.
CipherAssignment assign_ciphers_dp(Workflow const & w, CloudSystem const & sys,
                                   ResourcePool const & pool, Mapping const & mapping,
                                   CipherTable const & table, SecurityConstraints const & cons);

/// Same, from prepared items.
CipherAssignment assign_ciphers_dp(Workflow const & w, std::span<DpItem const> items,
                                   CipherTable const & table, ScaledBudget const & budget);

/// Exhaustive oracle over every cipher combination (at most 12 items).
/// Ties go to the lexicographically smallest level vector. Throws SizeError
/// for larger instances and InfeasibleError when nothing fits.
CipherAssignment assign_ciphers_bruteforce(Workflow const & w, CloudSystem const & sys,
                                           ResourcePool const & pool, Mapping const & mapping,
                                           CipherTable const & table,
                                           SecurityConstraints const & cons,
                                           std::uint64_t * examined = nullptr);

CipherAssignment assign_ciphers_bruteforce(Workflow const & w, std::span<DpItem const> items,
                                           CipherTable const & table, ScaledBudget const & budget,
                                           std::uint64_t * examined = nullptr);

inline constexpr std::size_t kBruteForceLimit = 12;

} // namespace mcsched
