#include "fairalloc/methods.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace fairalloc {

DayBatch batch_day(std::span<const Fill> fills) {
    if (fills.empty()) {
        throw std::invalid_argument("day batch needs at least one fill");
    }
    DayBatch batch;
    batch.day = fills.front().day;
    BigInt buy_notional = 0;
    BigInt sell_notional = 0;
    for (const Fill& fill : fills) {
        if (fill.day != batch.day) {
            throw std::invalid_argument("day batch spans multiple days");
        }
        if (fill.qty > 0) {
            batch.buys.push_back(fill);
            batch.buy_qty += fill.qty;
            buy_notional += BigInt(fill.price) * fill.qty;
        } else {
            batch.sells.push_back(fill);
            batch.sell_qty += fill.qty;
            sell_notional += BigInt(fill.price) * (-fill.qty);
        }
    }
    const auto price_desc = [](const Fill& a, const Fill& b) { return a.price > b.price; };
    std::stable_sort(batch.buys.begin(), batch.buys.end(), price_desc);
    std::stable_sort(batch.sells.begin(), batch.sells.end(), price_desc);
    if (batch.buy_qty > 0) {
        batch.avg_buy = Rational(buy_notional, BigInt(batch.buy_qty));
    }
    if (batch.sell_qty < 0) {
        batch.avg_sell = Rational(sell_notional, BigInt(-batch.sell_qty));
    }
    return batch;
}

std::vector<DayBatch> batch_days(std::span<const Fill> fills) {
    std::vector<DayBatch> batches;
    std::size_t start = 0;
    while (start < fills.size()) {
        std::size_t end = start;
        while (end < fills.size() && fills[end].day == fills[start].day) {
            ++end;
        }
        batches.push_back(batch_day(fills.subspan(start, end - start)));
        start = end;
    }
    return batches;
}

namespace {

std::vector<std::size_t> accounts_by_size(const AccountBook& book) {
    std::vector<std::size_t> order(book.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return book.at(a).aum > book.at(b).aum;
    });
    return order;
}

// Final ledger state after validating and applying one allocation per fill.
LedgerState replay_state(std::span<const Fill> fills, std::span<const AllocationVector> allocations,
                         const AccountBook& book) {
    validate_blotter(fills);
    if (fills.size() != allocations.size())
        throw std::invalid_argument("replay: " + std::to_string(fills.size()) + " fills vs " +
                                    std::to_string(allocations.size()) + " allocations");
    LedgerState state = LedgerState::open(book.size());
    for (std::size_t i = 0; i < fills.size(); ++i) state.apply_fill(fills[i], allocations[i]);
    return state;
}

// Splits each fill's lots across accounts: the accounts, visited in `order`,
// consume the fills front to back until their side quota is exhausted. Fill
// and quota signs must agree (one side of one day).
std::vector<std::vector<Qty>> consume_side(const std::vector<Fill>& fills,
                                           const std::vector<Qty>& quotas,
                                           const std::vector<std::size_t>& order, std::size_t n) {
    std::vector<std::vector<Qty>> parts(fills.size(), std::vector<Qty>(n, 0));
    std::size_t cursor = 0;
    Qty account_left = order.empty() ? 0 : std::abs(quotas[order[0]]);
    for (std::size_t fi = 0; fi < fills.size(); ++fi) {
        Qty fill_left = std::abs(fills[fi].qty);
        const Qty sign = fills[fi].qty > 0 ? 1 : -1;
        while (fill_left > 0) {
            while (account_left == 0 && cursor + 1 < order.size()) {
                ++cursor;
                account_left = std::abs(quotas[order[cursor]]);
            }
            if (account_left == 0) {
                throw std::logic_error("side quotas do not cover the side's fills");
            }
            const Qty take = std::min(fill_left, account_left);
            parts[fi][order[cursor]] += sign * take;
            fill_left -= take;
            account_left -= take;
        }
    }
    return parts;
}

MethodResult assemble(std::string method, std::vector<AllocationVector> allocations,
                      LedgerState ledger, const AccountBook& book) {
    MethodResult result;
    result.method = std::move(method);
    result.allocations = std::move(allocations);
    result.ledger = std::move(ledger);
    result.fund_position = result.ledger.fund.net_position;
    result.fund_pnl = result.ledger.fund.cum_pnl;
    result.positions.reserve(book.size());
    result.cum_pnl.reserve(book.size());
    result.marked_pnl.reserve(book.size());
    for (std::size_t i = 0; i < book.size(); ++i) {
        result.positions.push_back(result.ledger.accounts[i].net_position);
        result.cum_pnl.emplace_back(result.ledger.accounts[i].cum_pnl);
        result.marked_pnl.emplace_back(result.ledger.accounts[i].cum_pnl);
    }
    return result;
}

// Cash generated by the assigned trades at their actual fill prices: sells
// add proceeds, buys subtract cost.
std::vector<Rational> cash_at_fill_prices(std::span<const Fill> fills,
                                          std::span<const AllocationVector> allocations,
                                          std::size_t n) {
    std::vector<BigInt> cash(n, BigInt(0));
    for (std::size_t fi = 0; fi < fills.size(); ++fi) {
        for (std::size_t i = 0; i < n; ++i) {
            cash[i] -= BigInt(allocations[fi].parts[i]) * fills[fi].price;
        }
    }
    std::vector<Rational> out;
    out.reserve(n);
    for (const BigInt& c : cash) {
        out.emplace_back(c);
    }
    return out;
}

}  // namespace

MethodResult run_simple_rounding(std::span<const Fill> fills, const AccountBook& book,
                                 ResidualPolicy& policy) {
    validate_blotter(fills);
    LedgerState state = LedgerState::open(book.size());
    std::vector<AllocationVector> allocations;
    allocations.reserve(fills.size());
    for (const Fill& fill : fills) {
        AllocationVector alloc = allocate_fill_proportional(fill, book, policy);
        state.apply_fill(fill, alloc);
        allocations.push_back(std::move(alloc));
    }
    return assemble("simple", std::move(allocations), std::move(state), book);
}

MethodResult run_hpha(std::span<const Fill> fills, const AccountBook& book,
                      ResidualPolicy& policy) {
    validate_blotter(fills);
    const std::size_t n = book.size();
    const std::vector<std::size_t> order = accounts_by_size(book);
    std::unordered_map<std::int64_t, std::size_t> index_of_seq;
    for (std::size_t i = 0; i < fills.size(); ++i) {
        index_of_seq.emplace(fills[i].seq, i);
    }
    std::vector<std::vector<Qty>> parts(fills.size(), std::vector<Qty>(n, 0));

    std::size_t start = 0;
    while (start < fills.size()) {
        std::size_t end = start;
        while (end < fills.size() && fills[end].day == fills[start].day) {
            ++end;
        }
        const DayBatch batch = batch_day(fills.subspan(start, end - start));
        // Highest prices go to the largest accounts, on both sides: quotas are
        // the rounded pro-rata side totals, consumed down the price-sorted list.
        for (const bool buy_side : {true, false}) {
            const std::vector<Fill>& side = buy_side ? batch.buys : batch.sells;
            const Qty total = buy_side ? batch.buy_qty : batch.sell_qty;
            if (side.empty()) {
                continue;
            }
            FractionalTargets targets = fractional_targets(total, book, batch.day);
            const std::vector<Qty> quotas = round_sum_preserving(targets, book, policy);
            const std::vector<std::vector<Qty>> side_parts = consume_side(side, quotas, order, n);
            for (std::size_t j = 0; j < side.size(); ++j) {
                parts[index_of_seq.at(side[j].seq)] = side_parts[j];
            }
        }
        start = end;
    }

    std::vector<AllocationVector> allocations;
    allocations.reserve(fills.size());
    for (std::size_t i = 0; i < fills.size(); ++i) {
        allocations.push_back(AllocationVector{fills[i].seq, parts[i]});
    }
    LedgerState state = replay_state(fills, allocations, book);
    MethodResult result = assemble("hpha", std::move(allocations), std::move(state), book);
    // Headline figures follow the assignment's own cash: proceeds minus cost
    // at the prices each account actually received. The ledger value equals
    // that cash plus the open position at the final price.
    result.cum_pnl = cash_at_fill_prices(fills, result.allocations, n);
    return result;
}

MethodResult run_aps(std::span<const Fill> fills, const AccountBook& book, ResidualPolicy& policy,
                     std::span<const ApsDayQuantities> overrides) {
    validate_blotter(fills);
    const std::size_t n = book.size();
    const std::vector<std::size_t> order = accounts_by_size(book);
    std::unordered_map<std::int64_t, std::size_t> index_of_seq;
    for (std::size_t i = 0; i < fills.size(); ++i) {
        index_of_seq.emplace(fills[i].seq, i);
    }
    for (const ApsDayQuantities& o : overrides) {
        const bool known = std::any_of(fills.begin(), fills.end(),
                                       [&](const Fill& f) { return f.day == o.day; });
        if (!known) {
            throw std::invalid_argument("quantity override references a day not in the blotter");
        }
    }

    std::vector<std::vector<Qty>> parts(fills.size(), std::vector<Qty>(n, 0));
    std::vector<Rational> cash(n, Rational(0));

    std::size_t start = 0;
    while (start < fills.size()) {
        std::size_t end = start;
        while (end < fills.size() && fills[end].day == fills[start].day) {
            ++end;
        }
        const std::span<const Fill> day_fills = fills.subspan(start, end - start);
        const DayBatch batch = batch_day(day_fills);
        const ApsDayQuantities* override_row = nullptr;
        for (const ApsDayQuantities& o : overrides) {
            if (o.day == batch.day) {
                override_row = &o;
            }
        }
        for (const bool buy_side : {true, false}) {
            const Qty total = buy_side ? batch.buy_qty : batch.sell_qty;
            if (total == 0) {
                continue;
            }
            std::vector<Qty> quotas;
            const std::optional<std::vector<Qty>>* forced = nullptr;
            if (override_row != nullptr) {
                forced = buy_side ? &override_row->buy_parts : &override_row->sell_parts;
            }
            if (forced != nullptr && forced->has_value()) {
                quotas = **forced;
                if (quotas.size() != n) {
                    throw std::invalid_argument("quantity override width does not match accounts");
                }
                Qty sum = 0;
                for (Qty q : quotas) {
                    if ((total > 0 && q < 0) || (total < 0 && q > 0)) {
                        throw std::invalid_argument("quantity override trades against the side");
                    }
                    sum += q;
                }
                if (sum != total) {
                    throw std::invalid_argument("quantity override does not sum to the side total");
                }
            } else {
                FractionalTargets targets = fractional_targets(total, book, batch.day);
                quotas = round_sum_preserving(targets, book, policy);
            }
            // Every contract on this side books at the day's average price.
            const Rational& avg = buy_side ? *batch.avg_buy : *batch.avg_sell;
            for (std::size_t i = 0; i < n; ++i) {
                cash[i] -= avg * quotas[i];
            }
            // The quantity composition consumes fills in execution order; it
            // only matters for the position trajectory, not for P&L.
            std::vector<Fill> side;
            for (const Fill& f : day_fills) {
                if ((f.qty > 0) == buy_side) {
                    side.push_back(f);
                }
            }
            const std::vector<std::vector<Qty>> side_parts = consume_side(side, quotas, order, n);
            for (std::size_t j = 0; j < side.size(); ++j) {
                parts[index_of_seq.at(side[j].seq)] = side_parts[j];
            }
        }
        start = end;
    }

    std::vector<AllocationVector> allocations;
    allocations.reserve(fills.size());
    for (std::size_t i = 0; i < fills.size(); ++i) {
        allocations.push_back(AllocationVector{fills[i].seq, parts[i]});
    }
    LedgerState state = replay_state(fills, allocations, book);
    MethodResult result = assemble("aps", std::move(allocations), std::move(state), book);
    const Money final_price = fills.back().price;
    for (std::size_t i = 0; i < n; ++i) {
        result.cum_pnl[i] = cash[i];
        result.marked_pnl[i] = cash[i] + Rational(result.positions[i]) * final_price;
    }
    return result;
}

MethodResult run_replay(std::span<const Fill> fills, std::span<const AllocationVector> allocations,
                        const AccountBook& book, std::string label) {
    LedgerState state = replay_state(fills, allocations, book);
    std::vector<AllocationVector> kept(allocations.begin(), allocations.end());
    return assemble(std::move(label), std::move(kept), std::move(state), book);
}

MethodResult run_four(std::span<const Fill> fills, const AccountBook& book,
                      const FourOptions& options) {
    validate_blotter(fills);
    LedgerState state = LedgerState::open(book.size());
    std::vector<AllocationVector> allocations;
    allocations.reserve(fills.size());
    ReinforcementWeights weights;
    bool have_weights = false;
    int last_bucket = std::numeric_limits<int>::min();
    for (const Fill& fill : fills) {
        const ReinforcementWeights* active = nullptr;
        if (options.weights_enabled) {
            const int bucket = weight_bucket(options.weight_frequency, fill.day);
            if (!have_weights || bucket == -1 || bucket != last_bucket) {
                weights = reinforcement_weights(state, book, options.weight_frequency);
                have_weights = true;
                last_bucket = bucket;
            }
            active = &weights;
        }
        AllocationVector alloc = allocate_fill_four(fill, state, book, options.search, active);
        state.add_parts(fill, alloc);
        allocations.push_back(std::move(alloc));
    }
    return assemble("four", std::move(allocations), std::move(state), book);
}

}  // namespace fairalloc
