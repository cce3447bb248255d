#include "fairalloc/core.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace fairalloc {

AccountBook::AccountBook(std::vector<Account> accounts) : accounts_(std::move(accounts)) {
    if (accounts_.empty()) throw std::invalid_argument("account set is empty");
    for (std::size_t i = 0; i < accounts_.size(); ++i) {
        const Account& account = accounts_[i];
        if (account.id.empty())
            throw std::invalid_argument("account " + std::to_string(i) + " has an empty id");
        if (account.aum <= 0)
            throw std::invalid_argument("account '" + account.id + "' has non-positive aum");
        if (!index_.emplace(account.id, i).second)
            throw std::invalid_argument("duplicate account id '" + account.id + "'");
        if (account.aum > INT64_MAX - total_aum_)
            throw std::overflow_error("total aum overflows");
        total_aum_ += account.aum;
    }
    alpha_.reserve(accounts_.size());
    for (const Account& account : accounts_)
        alpha_.emplace_back(account.aum, total_aum_);
}

std::optional<std::size_t> AccountBook::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Qty AllocationVector::sum() const {
    return std::accumulate(parts.begin(), parts.end(), Qty{0});
}

void validate_allocation(const Fill& fill, const AllocationVector& alloc,
                         std::size_t account_count) {
    const std::string where = "allocation for fill seq " + std::to_string(fill.seq);
    if (alloc.fill_seq != fill.seq)
        throw std::invalid_argument(where + ": references seq " + std::to_string(alloc.fill_seq));
    if (alloc.parts.size() != account_count)
        throw std::invalid_argument(where + ": has " + std::to_string(alloc.parts.size()) +
                                    " parts for " + std::to_string(account_count) + " accounts");
    for (Qty part : alloc.parts) {
        if (part != 0 && (part > 0) != (fill.qty > 0))
            throw std::invalid_argument(where + ": part " + std::to_string(part) +
                                        " opposes fill qty " + std::to_string(fill.qty));
    }
    if (alloc.sum() != fill.qty)
        throw std::invalid_argument(where + ": parts sum to " + std::to_string(alloc.sum()) +
                                    ", fill qty is " + std::to_string(fill.qty));
}

void validate_blotter(std::span<const Fill> fills) {
    const Fill* prev = nullptr;
    for (const Fill& fill : fills) {
        const std::string where = "fill seq " + std::to_string(fill.seq);
        if (fill.qty == 0) throw std::invalid_argument(where + ": qty is 0");
        if (fill.price <= 0) throw std::invalid_argument(where + ": price must be positive");
        if (fill.day <= 0) throw std::invalid_argument(where + ": day must be positive");
        if (prev) {
            if (fill.seq <= prev->seq)
                throw std::invalid_argument(where + ": seq not strictly increasing");
            if (fill.day < prev->day)
                throw std::invalid_argument(where + ": day decreases");
        }
        prev = &fill;
    }
}

}  // namespace fairalloc
