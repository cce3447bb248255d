#include <doctest.h>

#include "fairalloc/rounding.hpp"

#include <cstdlib>
#include <vector>

#include "fixtures.hpp"

using namespace fairalloc;

TEST_CASE("fractional targets are exact and sum to the quantity") {
    auto book = testdata::sample_book();
    auto targets = fractional_targets(8, book);
    REQUIRE(targets.targets.size() == 2);
    CHECK(targets.targets[0] == Rational(36, 5));  // 7.2
    CHECK(targets.targets[1] == Rational(4, 5));   // 0.8
    CHECK(targets.targets[0] + targets.targets[1] == 8);

    auto neg = fractional_targets(-10, book);
    CHECK(neg.targets[0] == -9);
    CHECK(neg.targets[1] == -1);
}

TEST_CASE("proportional rounding reproduces the worked example splits") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    auto policy = ResidualPolicy::largest_account();

    const std::vector<std::vector<Qty>> expected = {
        {7, 1}, {2, 0}, {-4, 0}, {-9, -1}, {-4, 0}, {-4, 0}, {-4, 0}, {14, 2}};
    for (std::size_t i = 0; i < fills.size(); ++i) {
        auto alloc = allocate_fill_proportional(fills[i], book, policy);
        CAPTURE(fills[i].seq);
        CHECK(alloc.fill_seq == fills[i].seq);
        CHECK(alloc.parts == expected[i]);
    }
}

TEST_CASE("residual taken from the least favored account on half ties") {
    // Targets 4.5 / 0.5 both round up; one unit must come back, and it comes
    // from the smaller account so the larger keeps its rounded share.
    auto book = testdata::sample_book();
    auto policy = ResidualPolicy::largest_account();
    auto targets = fractional_targets(5, book);
    CHECK(targets.targets[0] == Rational(9, 2));
    CHECK(round_sum_preserving(targets, book, policy) == std::vector<Qty>{5, 0});
}

TEST_CASE("with-fill residuals go to the favored account first") {
    // Equal thirds of 1: targets 1/3 each round to zero, one unit short.
    AccountBook book({{"A", 100}, {"B", 100}, {"C", 100}});
    auto policy = ResidualPolicy::largest_account();
    auto targets = fractional_targets(1, book);
    CHECK(round_sum_preserving(targets, book, policy) == std::vector<Qty>{1, 0, 0});

    auto sell = fractional_targets(-1, book);
    CHECK(round_sum_preserving(sell, book, policy) == std::vector<Qty>{-1, 0, 0});
}

TEST_CASE("fixup never pushes a part across zero") {
    AccountBook book({{"A", 100}, {"B", 100}});
    auto policy = ResidualPolicy::largest_account();
    auto targets = fractional_targets(1, book);  // 0.5 / 0.5 -> (1, 1) -> one comes back
    auto parts = round_sum_preserving(targets, book, policy);
    CHECK(parts == std::vector<Qty>{1, 0});

    auto neg = fractional_targets(-1, book);
    CHECK(round_sum_preserving(neg, book, policy) == std::vector<Qty>{-1, 0});
}

TEST_CASE("rotation policy shifts the preference order") {
    AccountBook book({{"A", 300}, {"B", 200}, {"C", 100}});

    SUBCASE("daily rotation advances when the day changes") {
        auto policy = ResidualPolicy::rotation();
        CHECK(policy.preference(book, 1) == std::vector<std::size_t>{0, 1, 2});
        CHECK(policy.preference(book, 1) == std::vector<std::size_t>{0, 1, 2});
        CHECK(policy.preference(book, 2) == std::vector<std::size_t>{1, 2, 0});
        CHECK(policy.preference(book, 2) == std::vector<std::size_t>{1, 2, 0});
        CHECK(policy.preference(book, 3) == std::vector<std::size_t>{2, 0, 1});
        CHECK(policy.preference(book, 4) == std::vector<std::size_t>{0, 1, 2});
    }

    SUBCASE("cycle length counts invocations instead of days") {
        auto policy = ResidualPolicy::rotation(2);
        CHECK(policy.preference(book, 1) == std::vector<std::size_t>{0, 1, 2});
        CHECK(policy.preference(book, 1) == std::vector<std::size_t>{0, 1, 2});
        CHECK(policy.preference(book, 1) == std::vector<std::size_t>{1, 2, 0});
        CHECK(policy.preference(book, 1) == std::vector<std::size_t>{1, 2, 0});
        CHECK(policy.preference(book, 1) == std::vector<std::size_t>{2, 0, 1});
    }

    CHECK_THROWS_AS(ResidualPolicy::rotation(-1), std::invalid_argument);
}

TEST_CASE("random policy is deterministic per seed") {
    AccountBook book({{"A", 300}, {"B", 200}, {"C", 100}, {"D", 50}});
    auto a = ResidualPolicy::random(42);
    auto b = ResidualPolicy::random(42);
    for (int i = 0; i < 10; ++i) {
        auto pa = a.preference(book, 1);
        CHECK(pa == b.preference(book, 1));
        // Always a permutation of every account index.
        std::vector<bool> seen(book.size(), false);
        for (auto idx : pa) seen[idx] = true;
        for (std::size_t j = 0; j < book.size(); ++j) CHECK(seen[j]);
    }
}

TEST_CASE("rounded parts stay within one unit of their exact targets") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.range(2, 8));
        std::vector<Account> accounts;
        for (int i = 0; i < n; ++i)
            accounts.push_back({"A" + std::to_string(i + 1),
                                static_cast<Money>(rng.range(1, 1000000))});
        AccountBook book(accounts);
        auto policy = ResidualPolicy::largest_account();

        Qty qty = static_cast<Qty>(rng.range(1, 500));
        if (rng.below(2) == 0) qty = -qty;
        auto targets = fractional_targets(qty, book);
        auto parts = round_sum_preserving(targets, book, policy);

        Qty sum = 0;
        for (int i = 0; i < n; ++i) {
            CAPTURE(trial);
            CAPTURE(i);
            sum += parts[i];
            // Sign admissibility and the within-one bound.
            CHECK(((qty > 0 && parts[i] >= 0) || (qty < 0 && parts[i] <= 0)));
            CHECK(abs(Rational(parts[i]) - targets.targets[i]) <= 1);
        }
        CHECK(sum == qty);
    }
}
