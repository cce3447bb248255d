#include "fairalloc/harness.hpp"

#include "fairalloc/four.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace fairalloc {

std::vector<Rational> divergence_trajectory(std::span<const Fill> fills,
                                            std::span<const AllocationVector> allocations,
                                            const AccountBook& book) {
    if (fills.size() != allocations.size())
        throw std::invalid_argument("divergence trajectory needs one allocation per fill");
    LedgerState state = LedgerState::open(book.size());
    std::vector<Rational> out;
    out.reserve(fills.size());
    for (std::size_t i = 0; i < fills.size(); ++i) {
        state.apply_fill(fills[i], allocations[i]);
        out.push_back(divergence(state, book).q);
    }
    return out;
}

namespace {

MethodRow finish_row(std::span<const Fill> fills, const AccountBook& book, MethodResult result) {
    MethodRow row;
    row.label = result.method;
    row.q_trajectory = divergence_trajectory(fills, result.allocations, book);
    row.terminal_q = row.q_trajectory.empty() ? Rational(0) : row.q_trajectory.back();
    row.result = std::move(result);
    return row;
}

}  // namespace

MethodRow run_method(const std::string& name, std::span<const Fill> fills, const AccountBook& book,
                     const RunConfig& config) {
    MethodResult result;
    if (name == "simple") {
        ResidualPolicy policy = config.make_policy();
        result = run_simple_rounding(fills, book, policy);
    } else if (name == "hpha") {
        ResidualPolicy policy = config.make_policy();
        result = run_hpha(fills, book, policy);
    } else if (name == "aps") {
        ResidualPolicy policy = config.make_policy();
        result = run_aps(fills, book, policy);
    } else if (name == "four") {
        result = run_four(fills, book, config.four);
    } else {
        throw std::invalid_argument("unknown method '" + name + "'");
    }
    return finish_row(fills, book, std::move(result));
}

std::vector<AllocationVector> align_allocations(std::span<const Fill> fills,
                                                std::span<const AllocationVector> rows,
                                                const std::string& origin) {
    std::map<std::int64_t, const AllocationVector*> by_seq;
    for (const AllocationVector& row : rows) {
        if (!by_seq.emplace(row.fill_seq, &row).second)
            throw std::invalid_argument(origin + ": duplicate allocation for seq " +
                                        std::to_string(row.fill_seq));
    }
    std::vector<AllocationVector> aligned;
    aligned.reserve(fills.size());
    for (const Fill& fill : fills) {
        const auto it = by_seq.find(fill.seq);
        if (it == by_seq.end())
            throw std::invalid_argument(origin + ": no allocation rows for fill seq " +
                                        std::to_string(fill.seq));
        aligned.push_back(*it->second);
        by_seq.erase(it);
    }
    if (!by_seq.empty())
        throw std::invalid_argument(origin + ": allocation for seq " +
                                    std::to_string(by_seq.begin()->first) +
                                    " has no matching fill");
    return aligned;
}

ComparisonReport compare(std::span<const Fill> fills, const AccountBook& book,
                         const RunConfig& config, std::span<const ReplayInput> replays) {
    ComparisonReport report;
    report.config = config;
    for (const char* name : {"simple", "hpha", "aps", "four"})
        report.rows.push_back(run_method(name, fills, book, config));
    for (const ReplayInput& replay : replays)
        report.rows.push_back(
            finish_row(fills, book, run_replay(fills, replay.allocations, book, replay.label)));
    return report;
}

}  // namespace fairalloc
