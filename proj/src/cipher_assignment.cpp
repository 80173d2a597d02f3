#include <mcsched/cipher_assignment.hpp>

#include <mcsched/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mcsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string edge_label(Workflow const & w, std::size_t h) {
    DataEdge const & e = w.edge(h);
    return w.task(e.src).id + " -> " + w.task(e.dst).id;
}

// Cipher visiting order: least vulnerable first, so that a strict `<`
// keeps the lower vulnerability among equal times.
std::vector<std::size_t> tie_break_order(CipherTable const & table) {
    std::vector<std::size_t> order(table.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return table[a].vulnerability < table[b].vulnerability;
    });
    return order;
}

std::int64_t scaled_need(DpItem const & item, Cipher const & c) {
    if (c.vulnerability > item.cap) {
        return -1;
    }
    return std::llround(static_cast<double>(item.weight) * c.vulnerability);
}

void check_feasible_inputs(Workflow const & w, std::span<DpItem const> items,
                           CipherTable const & table, ScaledBudget const & budget) {
    if (budget.budget < 0) {
        throw InfeasibleError("system vulnerability budget is negative");
    }
    for (DpItem const & item : items) {
        bool any = false;
        for (Cipher const & c : table.ciphers()) {
            any = any || c.vulnerability <= item.cap;
        }
        if (!any) {
            throw InfeasibleError("edge " + edge_label(w, item.edge) +
                                  ": no cipher within the vulnerability cap " +
                                  std::to_string(item.cap));
        }
    }
}

CipherAssignment finish(Workflow const & w, std::span<DpItem const> items,
                        std::vector<std::size_t> const & path) {
    CipherAssignment out;
    out.choice.assign(w.edges().size(), std::nullopt);
    for (std::size_t i = 0; i < items.size(); ++i) {
        out.choice[items[i].edge] = path[i];
        out.total_time += items[i].time[path[i]];
    }
    return out;
}

} // namespace

ScaledBudget ScaledBudget::make(double system_cap, int scale_digits) {
    if (scale_digits < 0 || scale_digits > 9) {
        throw DomainError("scale_digits must lie in [0, 9]");
    }
    ScaledBudget s;
    s.scale = 1;
    for (int i = 0; i < scale_digits; ++i) {
        s.scale *= 10;
    }
    double const x = system_cap * static_cast<double>(s.scale);
    // Products such as 0.7 * 98 * 10 land a hair below the integer they denote.
    s.budget = static_cast<std::int64_t>(std::floor(x + 1e-9 * std::max(1.0, std::abs(x))));
    return s;
}

std::int64_t ScaledBudget::weight(double w) const {
    return std::llround(w * static_cast<double>(scale));
}

DpItem make_dp_item(Workflow const & w, CloudSystem const & sys, ResourcePool const & pool,
                    Mapping const & mapping, CipherTable const & table,
                    SecurityConstraints const & cons, ScaledBudget const & scaled, std::size_t h) {
    DataEdge const & e = w.edge(h);
    double const enc_cap = sys.vm_type(pool.at(mapping[e.src]).type).capacity;
    double const dec_cap = sys.vm_type(pool.at(mapping[e.dst]).type).capacity;
    DpItem item;
    item.edge = h;
    item.weight = scaled.weight(e.sec_weight);
    item.cap = e.vuln_cap.value_or(kInf);
    item.time.reserve(table.size());
    for (Cipher const & c : table.ciphers()) {
        item.time.push_back(crypto_time(e.size, c, enc_cap, false, cons.crypto_capacity) +
                            crypto_time(e.size, c, dec_cap, false, cons.crypto_capacity));
    }
    return item;
}

std::vector<DpItem> make_dp_items(Workflow const & w, CloudSystem const & sys,
                                  ResourcePool const & pool, Mapping const & mapping,
                                  CipherTable const & table, SecurityConstraints const & cons) {
    ScaledBudget const scaled = ScaledBudget::make(cons.system_cap, cons.scale_digits);
    std::vector<bool> const cross = cross_instance_flags(w, mapping);
    std::vector<DpItem> items;
    for (std::size_t h = 0; h < w.edges().size(); ++h) {
        if (cross[h]) {
            items.push_back(make_dp_item(w, sys, pool, mapping, table, cons, scaled, h));
        }
    }
    return items;
}

DpTable::DpTable(std::span<DpItem const> items, CipherTable const & table, std::int64_t budget,
                 bool keep_times)
    : budget_(budget), ciphers_(table.size()) {
    if (budget < 0) {
        throw DomainError("DpTable: budget must be non-negative");
    }
    if (table.size() >= kNone) {
        throw DomainError("DpTable: too many ciphers");
    }
    std::size_t const k = items.size();
    std::vector<std::size_t> const order = tie_break_order(table);

    need_.resize(k * ciphers_);
    widths_.resize(k + 1);
    offsets_.resize(k + 1);
    widths_[0] = 1;
    std::int64_t reach = 0; // largest admissible contribution of the prefix
    for (std::size_t h = 1; h <= k; ++h) {
        std::int64_t top = 0;
        for (std::size_t c = 0; c < ciphers_; ++c) {
            std::int64_t const n = scaled_need(items[h - 1], table[c]);
            need_[(h - 1) * ciphers_ + c] = n;
            top = std::max(top, n);
        }
        reach += top;
        widths_[h] = std::min(budget, reach) + 1;
    }
    std::size_t total = 0;
    for (std::size_t h = 0; h <= k; ++h) {
        offsets_[h] = total;
        total += static_cast<std::size_t>(widths_[h]);
    }
    choice_.assign(total, kNone);
    if (keep_times) {
        times_.assign(total, kInf);
        times_[0] = 0.0;
    }

    std::vector<double> prev(1, 0.0);
    std::vector<double> cur;
    for (std::size_t h = 1; h <= k; ++h) {
        std::int64_t const wp = widths_[h - 1];
        std::int64_t const wc = widths_[h];
        cur.assign(static_cast<std::size_t>(wc), kInf);
        std::uint8_t * ch = choice_.data() + offsets_[h];
        for (std::size_t c : order) {
            std::int64_t const n = need(h, c);
            if (n < 0 || n >= wc) {
                continue;
            }
            double const t = items[h - 1].time[c];
            auto const tag = static_cast<std::uint8_t>(c);
            std::int64_t const split = std::min(wc, n + wp);
            for (std::int64_t b = n; b < split; ++b) {
                double const v = prev[static_cast<std::size_t>(b - n)] + t;
                if (v < cur[b]) {
                    cur[b] = v;
                    ch[b] = tag;
                }
            }
            // Budgets past the previous row's reach all see its last cell.
            double const tail = prev[static_cast<std::size_t>(wp - 1)] + t;
            for (std::int64_t b = split; b < wc; ++b) {
                if (tail < cur[b]) {
                    cur[b] = tail;
                    ch[b] = tag;
                }
            }
        }
        if (keep_times) {
            std::copy(cur.begin(), cur.end(), times_.begin() + static_cast<std::ptrdiff_t>(offsets_[h]));
        }
        prev.swap(cur);
    }
    last_row_ = std::move(prev);
}

std::size_t DpTable::cell(std::size_t h, std::int64_t b) const {
    if (h >= widths_.size() || b < 0 || b > budget_) {
        throw DomainError("DpTable: index out of range");
    }
    return offsets_[h] + static_cast<std::size_t>(std::min(b, widths_[h] - 1));
}

double DpTable::best_time(std::size_t h, std::int64_t b) const {
    if (times_.empty()) {
        if (h == items()) {
            return final_time(b);
        }
        throw DomainError("DpTable: times were not kept");
    }
    return times_[cell(h, b)];
}

double DpTable::final_time(std::int64_t b) const {
    std::size_t const h = items();
    return last_row_[cell(h, b) - offsets_[h]];
}

std::optional<std::size_t> DpTable::best_cipher(std::size_t h, std::int64_t b) const {
    if (h == 0) {
        return std::nullopt;
    }
    std::uint8_t const c = choice_[cell(h, b)];
    if (c == kNone) {
        return std::nullopt;
    }
    return c;
}

std::optional<std::vector<std::size_t>> DpTable::backtrack(std::int64_t b) const {
    if (b < 0 || b > budget_) {
        throw DomainError("DpTable: index out of range");
    }
    std::size_t const k = items();
    std::vector<std::size_t> path(k);
    for (std::size_t h = k; h >= 1; --h) {
        b = std::min(b, widths_[h] - 1);
        std::uint8_t const c = choice_[offsets_[h] + static_cast<std::size_t>(b)];
        if (c == kNone) {
            return std::nullopt;
        }
        path[h - 1] = c;
        b -= need(h, c);
    }
    return path;
}

CipherAssignment assign_ciphers_dp(Workflow const & w, std::span<DpItem const> items,
                                   CipherTable const & table, ScaledBudget const & budget) {
    check_feasible_inputs(w, items, table, budget);
    if (items.empty()) {
        return finish(w, items, {});
    }
    DpTable const dp(items, table, budget.budget, false);
    auto const path = dp.backtrack();
    if (!path) {
        throw InfeasibleError("system vulnerability budget " + std::to_string(budget.budget) + "/" +
                              std::to_string(budget.scale) +
                              " cannot be met by any cipher assignment");
    }
    return finish(w, items, *path);
}

CipherAssignment assign_ciphers_dp(Workflow const & w, CloudSystem const & sys,
                                   ResourcePool const & pool, Mapping const & mapping,
                                   CipherTable const & table, SecurityConstraints const & cons) {
    auto const items = make_dp_items(w, sys, pool, mapping, table, cons);
    return assign_ciphers_dp(w, items, table,
                             ScaledBudget::make(cons.system_cap, cons.scale_digits));
}

CipherAssignment assign_ciphers_bruteforce(Workflow const & w, std::span<DpItem const> items,
                                           CipherTable const & table, ScaledBudget const & budget,
                                           std::uint64_t * examined) {
    if (items.size() > kBruteForceLimit) {
        throw SizeError("brute force limited to " + std::to_string(kBruteForceLimit) +
                        " cross-instance edges, got " + std::to_string(items.size()));
    }
    check_feasible_inputs(w, items, table, budget);

    // Level order makes the odometer walk level vectors lexicographically.
    std::vector<std::size_t> by_level(table.size());
    std::iota(by_level.begin(), by_level.end(), 0);
    std::sort(by_level.begin(), by_level.end(),
              [&](std::size_t a, std::size_t b) { return table[a].level < table[b].level; });

    std::size_t const k = items.size();
    std::vector<std::size_t> digit(k, 0);
    std::vector<std::size_t> best;
    double best_time = kInf;
    std::uint64_t count = 0;
    while (true) {
        ++count;
        std::int64_t used = 0;
        double time = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
            Cipher const & c = table[by_level[digit[i]]];
            std::int64_t const n = scaled_need(items[i], c);
            ok = n >= 0;
            used += n;
            time += items[i].time[by_level[digit[i]]];
        }
        if (ok && used <= budget.budget && time < best_time) {
            best_time = time;
            best.resize(k);
            for (std::size_t i = 0; i < k; ++i) {
                best[i] = by_level[digit[i]];
            }
        }
        std::size_t pos = k;
        while (pos > 0) {
            --pos;
            if (++digit[pos] < table.size()) {
                break;
            }
            digit[pos] = 0;
            if (pos == 0) {
                pos = k + 1;
                break;
            }
        }
        if (k == 0 || pos == k + 1) {
            break;
        }
    }
    if (examined) {
        *examined = count;
    }
    if (best_time == kInf) {
        throw InfeasibleError("no cipher combination satisfies the system vulnerability budget");
    }
    return finish(w, items, best);
}

CipherAssignment assign_ciphers_bruteforce(Workflow const & w, CloudSystem const & sys,
                                           ResourcePool const & pool, Mapping const & mapping,
                                           CipherTable const & table,
                                           SecurityConstraints const & cons,
                                           std::uint64_t * examined) {
    auto const items = make_dp_items(w, sys, pool, mapping, table, cons);
    return assign_ciphers_bruteforce(w, items, table,
                                     ScaledBudget::make(cons.system_cap, cons.scale_digits),
                                     examined);
}

} // namespace mcsched
