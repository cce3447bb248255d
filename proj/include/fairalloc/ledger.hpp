#pragma once

#include "fairalloc/core.hpp"

#include <optional>
#include <span>
#include <vector>

namespace fairalloc {

struct AccountState {
    Qty net_position = 0;
    Money cum_pnl = 0;
    Money last_bucket_pnl = 0;
};

// Mark-to-market between consecutive event prices: position * (price - prev).
Money bucket_pnl(Qty net_position, Money prev_price, Money price);

// Event-sequenced book for the fund and every account. Every event price marks
// ALL positions, whether or not an account received part of the fill; the first
// event only establishes last_price. Value-like, single writer.
struct LedgerState {
    AccountState fund;
    std::vector<AccountState> accounts;
    std::optional<Money> last_price;

    static LedgerState open(std::size_t account_count) {
        LedgerState state;
        state.accounts.resize(account_count);
        return state;
    }

    // Bucket P&L for fund and accounts against (last_price -> price).
    void mark(Money price);

    // Position updates only; alloc must already be validated.
    void add_parts(const Fill& fill, const AllocationVector& alloc);

    // mark + add_parts + last_price update. Rejects invalid allocations with
    // the state unchanged.
    void apply_fill(const Fill& fill, const AllocationVector& alloc);
};

struct TrajectoryCell {
    Qty part = 0;
    Qty net_position = 0;
    Money bucket_pnl = 0;
    Money cum_pnl = 0;
};

struct TrajectoryRow {
    std::int64_t seq = 0;
    int day = 1;
    Money price = 0;
    Qty qty = 0;
    TrajectoryCell fund;
    std::vector<TrajectoryCell> accounts;
};

// Full per-fill trajectory for fund and accounts. One allocation per fill in
// matching seq order; errors name the offending seq.
std::vector<TrajectoryRow> replay(std::span<const Fill> fills,
                                  std::span<const AllocationVector> allocations,
                                  const AccountBook& book);

// Fund-only trajectory, no allocation involved.
std::vector<TrajectoryRow> fund_trajectory(std::span<const Fill> fills);

}  // namespace fairalloc
