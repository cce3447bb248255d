#pragma once

#include "fairalloc/money.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fairalloc {

// One executed leg of a bunched order. qty > 0 buys, qty < 0 sells, never 0.
struct Fill {
    std::int64_t seq = 0;  // strictly increasing event index
    int day = 1;           // positive, non-decreasing with seq
    Money price = 0;       // minor units, > 0
    Qty qty = 0;
};

struct Account {
    std::string id;
    Money aum = 0;  // minor units, > 0
};

// Validated account set with exact allocation factors alpha_i = aum_i / sum(aum).
// Account order is the input order and is stable everywhere downstream.
class AccountBook {
public:
    explicit AccountBook(std::vector<Account> accounts);

    std::size_t size() const { return accounts_.size(); }
    const Account& at(std::size_t i) const { return accounts_[i]; }
    const std::vector<Account>& accounts() const { return accounts_; }
    const Rational& alpha(std::size_t i) const { return alpha_[i]; }
    Money total_aum() const { return total_aum_; }
    std::optional<std::size_t> index_of(std::string_view id) const;

private:
    std::vector<Account> accounts_;
    std::vector<Rational> alpha_;
    std::unordered_map<std::string, std::size_t> index_;
    Money total_aum_ = 0;
};

// Integer split of one fill across accounts, index-aligned with an AccountBook.
struct AllocationVector {
    std::int64_t fill_seq = 0;
    std::vector<Qty> parts;

    Qty sum() const;
};

// Sum preservation plus sign admissibility: every part carries the fill's
// sign or is zero (accounts never trade with each other). Throws
// std::invalid_argument naming the offending fill.
void validate_allocation(const Fill& fill, const AllocationVector& alloc,
                         std::size_t account_count);

// seq strictly increasing, day positive and non-decreasing, price > 0, qty != 0.
void validate_blotter(std::span<const Fill> fills);

}  // namespace fairalloc
