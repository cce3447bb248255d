#include "fairalloc/report.hpp"

#include "fairalloc/ledger.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fairalloc {

namespace {

using nlohmann::ordered_json;

const char* mode_name(SearchMode mode) {
    return mode == SearchMode::Proportional ? "proportional" : "corrective";
}

const char* frequency_name(WeightFrequency frequency) {
    switch (frequency) {
        case WeightFrequency::PerFill: return "per_fill";
        case WeightFrequency::Weekly: return "weekly";
        case WeightFrequency::Monthly: return "monthly";
        case WeightFrequency::Quarterly: return "quarterly";
    }
    return "per_fill";
}

// P&L rationals carry minor units; render them as currency.
std::string money_text(const Rational& minor_units) {
    return format_rational(minor_units / kMinorPerUnit, kMinorScale);
}

// Divergence is squared minor units; render in squared currency units.
std::string q_text(const Rational& q) {
    return format_scientific(to_double(q / (Rational(kMinorPerUnit) * kMinorPerUnit)));
}

ordered_json day_averages_to_json(std::span<const Fill> fills) {
    ordered_json out = ordered_json::array();
    for (const DayBatch& batch : batch_days(fills)) {
        ordered_json row{{"day", batch.day}};
        row["avg_buy"] =
            batch.avg_buy ? ordered_json(format_rational(*batch.avg_buy / kMinorPerUnit, 4))
                          : ordered_json(nullptr);
        row["avg_sell"] =
            batch.avg_sell ? ordered_json(format_rational(*batch.avg_sell / kMinorPerUnit, 4))
                           : ordered_json(nullptr);
        out.push_back(std::move(row));
    }
    return out;
}

ordered_json accounts_to_json(const AccountBook& book) {
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < book.size(); ++i) {
        out.push_back({{"id", book.at(i).id},
                       {"aum", format_money(book.at(i).aum)},
                       {"alpha", format_rational(book.alpha(i), 4)}});
    }
    return out;
}

ordered_json method_to_json(const MethodRow& row, const AccountBook& book) {
    ordered_json accounts = ordered_json::array();
    for (std::size_t i = 0; i < book.size(); ++i) {
        accounts.push_back({{"id", book.at(i).id},
                            {"net_position", row.result.positions[i]},
                            {"cum_pnl", money_text(row.result.cum_pnl[i])},
                            {"marked_pnl", money_text(row.result.marked_pnl[i])}});
    }
    ordered_json trail = ordered_json::array();
    for (const Rational& q : row.q_trajectory) trail.push_back(q_text(q));
    return {{"method", row.label},
            {"fund",
             {{"net_position", row.result.fund_position},
              {"cum_pnl", format_money(row.result.fund_pnl)}}},
            {"accounts", accounts},
            {"terminal_q", q_text(row.terminal_q)},
            {"q_trajectory", trail}};
}

}  // namespace

ordered_json config_to_json(const RunConfig& config) {
    const SearchConfig& search = config.four.search;
    return {{"method", config.method},
            {"policy", config.policy},
            {"rotation_cycle", config.rotation_cycle},
            {"seed", config.seed},
            {"four",
             {{"k", search.k},
              {"mode", mode_name(search.mode)},
              {"probe", search.probe > 0 ? format_money(search.probe) : "auto"},
              {"nmax", search.nmax},
              {"weights",
               {{"enabled", config.four.weights_enabled},
                {"frequency", frequency_name(config.four.weight_frequency)}}}}}};
}

ordered_json run_to_json(const MethodRow& row, std::span<const Fill> fills,
                         const AccountBook& book, const RunConfig& config) {
    ordered_json allocations = ordered_json::array();
    for (const AllocationVector& alloc : row.result.allocations)
        allocations.push_back({{"seq", alloc.fill_seq}, {"parts", alloc.parts}});
    ordered_json out = method_to_json(row, book);
    out["allocations"] = std::move(allocations);
    return {{"config", config_to_json(config)},
            {"accounts", accounts_to_json(book)},
            {"day_averages", day_averages_to_json(fills)},
            {"result", std::move(out)}};
}

std::string run_to_csv(const MethodRow& row, std::span<const Fill> fills, const AccountBook& book) {
    const std::vector<TrajectoryRow> rows = replay(fills, row.result.allocations, book);
    std::ostringstream out;
    out << "seq,day,price,qty,fund_np,fund_cum_pnl";
    for (std::size_t i = 0; i < book.size(); ++i) {
        const std::string& id = book.at(i).id;
        out << ",part_" << id << ",np_" << id << ",cum_pnl_" << id;
    }
    out << "\n";
    for (const TrajectoryRow& r : rows) {
        out << r.seq << "," << r.day << "," << format_money(r.price) << "," << r.qty << ","
            << r.fund.net_position << "," << format_money(r.fund.cum_pnl);
        for (const TrajectoryCell& cell : r.accounts)
            out << "," << cell.part << "," << cell.net_position << ","
                << format_money(cell.cum_pnl);
        out << "\n";
    }
    return out.str();
}

ordered_json comparison_to_json(const ComparisonReport& report, std::span<const Fill> fills,
                                const AccountBook& book) {
    ordered_json methods = ordered_json::array();
    for (const MethodRow& row : report.rows) methods.push_back(method_to_json(row, book));
    return {{"config", config_to_json(report.config)},
            {"accounts", accounts_to_json(book)},
            {"day_averages", day_averages_to_json(fills)},
            {"methods", std::move(methods)}};
}

std::string comparison_to_csv(const ComparisonReport& report, const AccountBook& book) {
    std::ostringstream out;
    out << "method,fund_np,fund_cum_pnl";
    for (std::size_t i = 0; i < book.size(); ++i) {
        const std::string& id = book.at(i).id;
        out << ",np_" << id << ",cum_pnl_" << id;
    }
    out << ",terminal_q\n";
    for (const MethodRow& row : report.rows) {
        out << row.label << "," << row.result.fund_position << ","
            << format_money(row.result.fund_pnl);
        for (std::size_t i = 0; i < book.size(); ++i)
            out << "," << row.result.positions[i] << "," << money_text(row.result.cum_pnl[i]);
        out << "," << q_text(row.terminal_q) << "\n";
    }
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace fairalloc
