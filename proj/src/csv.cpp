#include "fairalloc/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace fairalloc {

ParseError::ParseError(const std::string& path, int line, const std::string& field,
                       const std::string& message)
    : std::runtime_error(path + ":" + std::to_string(line) + ": field '" + field + "': " + message),
      line_(line),
      field_(field) {}

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

// Reads all rows, checks the header, and hands each data row (with its
// 1-based line number) to the callback.
template <typename RowFn>
void for_each_row(const std::string& path, const std::vector<std::string>& header, RowFn&& fn) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "", "cannot open file");
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    bool saw_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_row(line);
        if (!saw_header) {
            if (cells != header) {
                std::string want;
                for (const std::string& h : header) want += (want.empty() ? "" : ",") + h;
                throw ParseError(path, line_no, "", "expected header '" + want + "'");
            }
            saw_header = true;
            continue;
        }
        if (cells.size() != header.size())
            throw ParseError(path, line_no, "",
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(cells.size()));
        saw_data = true;
        fn(line_no, cells);
    }
    if (!saw_header) throw ParseError(path, line_no, "", "empty file");
    if (!saw_data) throw ParseError(path, line_no, "", "no data rows");
}

std::int64_t parse_int(const std::string& path, int line, const std::string& field,
                       const std::string& text) {
    std::int64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(path, line, field, "not an integer: '" + text + "'");
    return value;
}

Money parse_currency(const std::string& path, int line, const std::string& field,
                     const std::string& text) {
    try {
        return parse_money(text);
    } catch (const std::exception& e) {
        throw ParseError(path, line, field, e.what());
    }
}

}  // namespace

std::vector<Fill> parse_blotter(const std::string& path) {
    std::vector<Fill> fills;
    for_each_row(path, {"seq", "day", "price", "qty"},
                 [&](int line, const std::vector<std::string>& cells) {
                     Fill fill;
                     fill.seq = parse_int(path, line, "seq", cells[0]);
                     const std::int64_t day = parse_int(path, line, "day", cells[1]);
                     if (day <= 0 || day > INT32_MAX)
                         throw ParseError(path, line, "day", "must be a positive day index");
                     fill.day = static_cast<int>(day);
                     fill.price = parse_currency(path, line, "price", cells[2]);
                     if (fill.price <= 0) throw ParseError(path, line, "price", "must be positive");
                     fill.qty = parse_int(path, line, "qty", cells[3]);
                     if (fill.qty == 0) throw ParseError(path, line, "qty", "must be nonzero");
                     if (!fills.empty()) {
                         if (fill.seq <= fills.back().seq)
                             throw ParseError(path, line, "seq", "not strictly increasing");
                         if (fill.day < fills.back().day)
                             throw ParseError(path, line, "day", "decreases");
                     }
                     fills.push_back(fill);
                 });
    validate_blotter(fills);
    return fills;
}

std::vector<Account> parse_accounts(const std::string& path) {
    std::vector<Account> accounts;
    std::set<std::string> seen;
    for_each_row(path, {"account_id", "aum"},
                 [&](int line, const std::vector<std::string>& cells) {
                     Account account;
                     account.id = cells[0];
                     if (account.id.empty()) throw ParseError(path, line, "account_id", "empty id");
                     if (!seen.insert(account.id).second)
                         throw ParseError(path, line, "account_id",
                                          "duplicate id '" + account.id + "'");
                     account.aum = parse_currency(path, line, "aum", cells[1]);
                     if (account.aum <= 0) throw ParseError(path, line, "aum", "must be positive");
                     accounts.push_back(std::move(account));
                 });
    return accounts;
}

std::vector<AllocationVector> parse_allocations(const std::string& path, const AccountBook& book) {
    std::vector<AllocationVector> out;
    std::map<std::int64_t, std::size_t> row_of_seq;  // seq -> index in out
    std::set<std::pair<std::int64_t, std::size_t>> seen;
    for_each_row(
        path, {"seq", "account_id", "qty"}, [&](int line, const std::vector<std::string>& cells) {
            const std::int64_t seq = parse_int(path, line, "seq", cells[0]);
            const auto account = book.index_of(cells[1]);
            if (!account)
                throw ParseError(path, line, "account_id", "unknown account '" + cells[1] + "'");
            const Qty qty = parse_int(path, line, "qty", cells[2]);
            if (!seen.emplace(seq, *account).second)
                throw ParseError(path, line, "account_id",
                                 "duplicate row for seq " + std::to_string(seq) + ", account '" +
                                     cells[1] + "'");
            auto [it, fresh] = row_of_seq.emplace(seq, out.size());
            if (fresh) out.push_back(AllocationVector{seq, std::vector<Qty>(book.size(), 0)});
            out[it->second].parts[*account] = qty;
        });
    return out;
}

}  // namespace fairalloc
