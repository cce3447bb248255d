#include "fairalloc/ledger.hpp"

#include <stdexcept>
#include <string>

namespace fairalloc {

namespace {

Money checked_bucket(Qty net_position, Money prev_price, Money price) {
    __int128 pnl = static_cast<__int128>(net_position) * (price - prev_price);
    if (pnl > INT64_MAX || pnl < INT64_MIN)
        throw std::overflow_error("bucket P&L overflows minor-unit range");
    return static_cast<Money>(pnl);
}

Money checked_add(Money a, Money b) {
    Money out;
    if (__builtin_add_overflow(a, b, &out))
        throw std::overflow_error("cumulative P&L overflows minor-unit range");
    return out;
}

void mark_one(AccountState& state, Money prev_price, Money price) {
    state.last_bucket_pnl = checked_bucket(state.net_position, prev_price, price);
    state.cum_pnl = checked_add(state.cum_pnl, state.last_bucket_pnl);
}

}  // namespace

Money bucket_pnl(Qty net_position, Money prev_price, Money price) {
    if (prev_price <= 0 || price <= 0)
        throw std::invalid_argument("bucket_pnl requires positive prices");
    return checked_bucket(net_position, prev_price, price);
}

void LedgerState::mark(Money price) {
    if (!last_price) {
        // First event establishes the reference price, no P&L.
        for (AccountState& account : accounts) account.last_bucket_pnl = 0;
        fund.last_bucket_pnl = 0;
        return;
    }
    mark_one(fund, *last_price, price);
    for (AccountState& account : accounts) mark_one(account, *last_price, price);
}

void LedgerState::add_parts(const Fill& fill, const AllocationVector& alloc) {
    fund.net_position += fill.qty;
    for (std::size_t i = 0; i < accounts.size(); ++i)
        accounts[i].net_position += alloc.parts[i];
}

void LedgerState::apply_fill(const Fill& fill, const AllocationVector& alloc) {
    validate_allocation(fill, alloc, accounts.size());
    mark(fill.price);
    add_parts(fill, alloc);
    last_price = fill.price;
}

namespace {

TrajectoryRow snapshot_row(const Fill& fill, const AllocationVector* alloc,
                           const LedgerState& state) {
    TrajectoryRow row;
    row.seq = fill.seq;
    row.day = fill.day;
    row.price = fill.price;
    row.qty = fill.qty;
    row.fund = {fill.qty, state.fund.net_position, state.fund.last_bucket_pnl,
                state.fund.cum_pnl};
    row.accounts.reserve(state.accounts.size());
    for (std::size_t i = 0; i < state.accounts.size(); ++i) {
        const AccountState& account = state.accounts[i];
        row.accounts.push_back({alloc ? alloc->parts[i] : 0, account.net_position,
                                account.last_bucket_pnl, account.cum_pnl});
    }
    return row;
}

}  // namespace

std::vector<TrajectoryRow> replay(std::span<const Fill> fills,
                                  std::span<const AllocationVector> allocations,
                                  const AccountBook& book) {
    validate_blotter(fills);
    if (fills.size() != allocations.size())
        throw std::invalid_argument("replay: " + std::to_string(fills.size()) + " fills vs " +
                                    std::to_string(allocations.size()) + " allocations");
    LedgerState state = LedgerState::open(book.size());
    std::vector<TrajectoryRow> rows;
    rows.reserve(fills.size());
    for (std::size_t i = 0; i < fills.size(); ++i) {
        state.apply_fill(fills[i], allocations[i]);
        rows.push_back(snapshot_row(fills[i], &allocations[i], state));
    }
    return rows;
}

std::vector<TrajectoryRow> fund_trajectory(std::span<const Fill> fills) {
    if (fills.empty()) throw std::invalid_argument("fund_trajectory: no fills");
    validate_blotter(fills);
    LedgerState state = LedgerState::open(0);
    std::vector<TrajectoryRow> rows;
    rows.reserve(fills.size());
    for (const Fill& fill : fills) {
        // No allocation to validate: the fund takes the whole quantity.
        state.mark(fill.price);
        state.fund.net_position += fill.qty;
        state.last_price = fill.price;
        rows.push_back(snapshot_row(fill, nullptr, state));
    }
    return rows;
}

}  // namespace fairalloc
