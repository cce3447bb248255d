#pragma once

#include "fairalloc/core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fairalloc {

// Parse failure pointing at the exact spot: "fills.csv:3: field 'qty': ...".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, int line, const std::string& field,
               const std::string& message);

    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

// Blotter file: header `seq,day,price,qty`, price in decimal currency.
// Validated (via validate_blotter) before returning.
std::vector<Fill> parse_blotter(const std::string& path);

// Accounts file: header `account_id,aum`, aum in decimal currency.
std::vector<Account> parse_accounts(const std::string& path);

// Allocation file: header `seq,account_id,qty`, one row per nonzero part.
// Returns one vector per distinct seq, in first-appearance order, each with
// book-ordered parts. Unknown account ids and duplicate (seq, account) pairs
// are rejected; validity against a blotter is the replaying caller's job.
std::vector<AllocationVector> parse_allocations(const std::string& path, const AccountBook& book);

}  // namespace fairalloc
