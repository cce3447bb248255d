#include <doctest.h>

#include "fairalloc/ledger.hpp"

#include <stdexcept>
#include <vector>

#include "fixtures.hpp"

using namespace fairalloc;

TEST_CASE("bucket_pnl is position times price change") {
    CHECK(bucket_pnl(8, 10000, 13000) == 24000);
    CHECK(bucket_pnl(-16, 11000, 8000) == 48000);
    CHECK(bucket_pnl(0, 10000, 13000) == 0);
    CHECK(bucket_pnl(5, 11000, 11000) == 0);
    CHECK_THROWS_AS(bucket_pnl(1, 0, 100), std::invalid_argument);
    CHECK_THROWS_AS(bucket_pnl(INT64_MAX / 2, 1, INT64_MAX / 2), std::overflow_error);
}

TEST_CASE("fund trajectory reproduces the worked example") {
    auto fills = testdata::sample_fills();
    auto rows = fund_trajectory(fills);
    REQUIRE(rows.size() == 8);

    const Qty expected_np[] = {8, 10, 6, -4, -8, -12, -16, 0};
    const Money expected_bucket[] = {0, 24000, 20000, -6000, 12000, -4000, 6000, 48000};
    const Money expected_cum[] = {0, 24000, 44000, 38000, 50000, 46000, 52000, 100000};
    for (int i = 0; i < 8; ++i) {
        CAPTURE(i);
        CHECK(rows[i].fund.net_position == expected_np[i]);
        CHECK(rows[i].fund.bucket_pnl == expected_bucket[i]);
        CHECK(rows[i].fund.cum_pnl == expected_cum[i]);
    }
    CHECK(rows.back().fund.net_position == 0);  // blotter ends flat
}

TEST_CASE("first event establishes the reference price without P&L") {
    LedgerState state = LedgerState::open(1);
    state.apply_fill({1, 1, 50000, 10}, {1, {10}});
    CHECK(state.fund.cum_pnl == 0);
    CHECK(state.accounts[0].cum_pnl == 0);
    CHECK(state.last_price == 50000);
}

TEST_CASE("marking touches every account, allocated or not") {
    LedgerState state = LedgerState::open(2);
    state.apply_fill({1, 1, 10000, 4}, {1, {4, 0}});  // whole fill to account 0
    state.apply_fill({2, 1, 10100, 1}, {2, {0, 1}});
    // Account 0 held 4 through a +1.00 move even though fill 2 gave it nothing.
    CHECK(state.accounts[0].cum_pnl == 400);
    CHECK(state.accounts[1].cum_pnl == 0);  // flat during the move
    CHECK(state.fund.cum_pnl == 400);
}

TEST_CASE("apply_fill rejects bad allocations with state unchanged") {
    LedgerState state = LedgerState::open(2);
    state.apply_fill({1, 1, 10000, 4}, {1, {3, 1}});

    LedgerState before = state;
    CHECK_THROWS_AS(state.apply_fill({2, 1, 10100, 4}, {2, {3, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(state.apply_fill({2, 1, 10100, 4}, {2, {5, -1}}), std::invalid_argument);
    CHECK_THROWS_AS(state.apply_fill({2, 1, 10100, 4}, {9, {3, 1}}), std::invalid_argument);
    CHECK(state.fund.net_position == before.fund.net_position);
    CHECK(state.fund.cum_pnl == before.fund.cum_pnl);
    CHECK(state.last_price == before.last_price);
}

TEST_CASE("replay produces per-account trajectories that sum to the fund") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    auto allocations = testdata::make_allocations(
        fills, {{7, 1}, {2, 0}, {-4, 0}, {-9, -1}, {-4, 0}, {-4, 0}, {-4, 0}, {14, 2}});

    auto rows = replay(fills, allocations, book);
    REQUIRE(rows.size() == 8);
    for (const auto& row : rows) {
        Qty np_sum = 0;
        Money cum_sum = 0;
        for (const auto& cell : row.accounts) {
            np_sum += cell.net_position;
            cum_sum += cell.cum_pnl;
        }
        CAPTURE(row.seq);
        CHECK(np_sum == row.fund.net_position);
        CHECK(cum_sum == row.fund.cum_pnl);
    }

    const Money acct1_cum[] = {0, 21000, 39000, 34000, 46000, 42000, 48000, 96000};
    const Money acct2_cum[] = {0, 3000, 5000, 4000, 4000, 4000, 4000, 4000};
    for (int i = 0; i < 8; ++i) {
        CAPTURE(i);
        CHECK(rows[i].accounts[0].cum_pnl == acct1_cum[i]);
        CHECK(rows[i].accounts[1].cum_pnl == acct2_cum[i]);
    }
    CHECK(rows.back().accounts[0].net_position == -2);
    CHECK(rows.back().accounts[1].net_position == 2);
}

TEST_CASE("replay rejects mismatched inputs") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    std::vector<AllocationVector> short_allocs = {{1, {8, 0}}};
    CHECK_THROWS_AS(replay(fills, short_allocs, book), std::invalid_argument);

    auto wrong_seq = testdata::make_allocations(
        fills, {{7, 1}, {2, 0}, {-4, 0}, {-9, -1}, {-4, 0}, {-4, 0}, {-4, 0}, {14, 2}});
    wrong_seq[3].fill_seq = 99;
    CHECK_THROWS_AS(replay(fills, wrong_seq, book), std::invalid_argument);
}

TEST_CASE("blotter validation catches ordering and domain errors") {
    CHECK_THROWS_AS(validate_blotter(std::vector<Fill>{{1, 1, 100, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_blotter(std::vector<Fill>{{1, 1, 0, 5}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_blotter(std::vector<Fill>{{1, 0, 100, 5}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_blotter(std::vector<Fill>{{2, 1, 100, 5}, {2, 1, 100, 5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_blotter(std::vector<Fill>{{1, 2, 100, 5}, {2, 1, 100, 5}}),
                    std::invalid_argument);
}
