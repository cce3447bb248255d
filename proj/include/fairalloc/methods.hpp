#pragma once

#include "fairalloc/core.hpp"
#include "fairalloc/four.hpp"
#include "fairalloc/ledger.hpp"
#include "fairalloc/rounding.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairalloc {

// One trading day's fills split by side, with quantity-weighted average
// prices kept exact. Fill lists are sorted by price descending (ties keep
// sequence order) — the order the high-price-high-account assignment consumes.
struct DayBatch {
    int day = 0;
    std::vector<Fill> buys;
    std::vector<Fill> sells;
    Qty buy_qty = 0;   // total bought, >= 0
    Qty sell_qty = 0;  // total sold, <= 0
    std::optional<Rational> avg_buy;
    std::optional<Rational> avg_sell;
};

// All fills must share one day.
DayBatch batch_day(std::span<const Fill> fills);

// Splits an ordered blotter into consecutive day batches.
std::vector<DayBatch> batch_days(std::span<const Fill> fills);

// Outcome of running one allocation method over a blotter. cum_pnl is the
// method's own accounting: the marked ledger value for per-fill methods, cash
// at assigned fill prices for the high-price assignment, cash at day-average
// prices for average pricing. marked_pnl values any open position at the
// final event price on top of that cash, which makes methods comparable; for
// per-fill methods the two coincide.
struct MethodResult {
    std::string method;
    std::vector<AllocationVector> allocations;  // one per fill, blotter order
    LedgerState ledger;                         // replayed at actual fill prices
    std::vector<Qty> positions;                 // terminal per-account net positions
    std::vector<Rational> cum_pnl;
    std::vector<Rational> marked_pnl;
    Qty fund_position = 0;
    Money fund_pnl = 0;
};

MethodResult run_simple_rounding(std::span<const Fill> fills, const AccountBook& book,
                                 ResidualPolicy& policy);

MethodResult run_hpha(std::span<const Fill> fills, const AccountBook& book, ResidualPolicy& policy);

// Hand-set per-account day/side quantities replacing the rounded ones, for
// reproducing manually adjusted average-pricing runs. Quantities must sum to
// the day's side total.
struct ApsDayQuantities {
    int day = 0;
    std::optional<std::vector<Qty>> buy_parts;
    std::optional<std::vector<Qty>> sell_parts;
};

MethodResult run_aps(std::span<const Fill> fills, const AccountBook& book, ResidualPolicy& policy,
                     std::span<const ApsDayQuantities> overrides = {});

// Applies externally supplied allocations (one per fill) through the ledger.
MethodResult run_replay(std::span<const Fill> fills, std::span<const AllocationVector> allocations,
                        const AccountBook& book, std::string label = "replay");

struct FourOptions {
    SearchConfig search;
    bool weights_enabled = false;
    WeightFrequency weight_frequency = WeightFrequency::PerFill;
};

MethodResult run_four(std::span<const Fill> fills, const AccountBook& book,
                      const FourOptions& options = {});

}  // namespace fairalloc
