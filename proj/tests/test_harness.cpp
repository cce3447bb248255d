#include <doctest.h>

#include "fairalloc/csv.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/report.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace fairalloc;

namespace {

const char* kSampleFillsCsv =
    "seq,day,price,qty\n"
    "1,1,100.00,8\n"
    "2,1,130.00,2\n"
    "3,1,150.00,-4\n"
    "4,1,140.00,-10\n"
    "5,2,110.00,-4\n"
    "6,2,115.00,-4\n"
    "7,2,110.00,-4\n"
    "8,2,80.00,16\n";

const char* kSampleAccountsCsv =
    "account_id,aum\n"
    "A1,90000.00\n"
    "A2,10000.00\n";

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

// Runs fn and returns the ParseError it must throw.
template <typename Fn>
ParseError capture_parse_error(Fn&& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error");
    return ParseError("", 0, "", "");
}

}  // namespace

TEST_CASE("blotter files parse into validated fills") {
    const auto path = write_temp("fills_ok.csv", kSampleFillsCsv);
    auto fills = parse_blotter(path.string());
    REQUIRE(fills.size() == 8);
    CHECK(fills[0].seq == 1);
    CHECK(fills[0].price == 10000);
    CHECK(fills[0].qty == 8);
    CHECK(fills[4].day == 2);
    CHECK(fills[7].price == 8000);
    CHECK(fills[7].qty == 16);
}

TEST_CASE("blotter parse errors point at the offending cell") {
    const auto bad_qty = write_temp("fills_bad_qty.csv",
                                    "seq,day,price,qty\n"
                                    "1,1,100.00,8\n"
                                    "2,1,130.00,two\n");
    auto e = capture_parse_error([&] { parse_blotter(bad_qty.string()); });
    CHECK(e.line() == 3);
    CHECK(e.field() == "qty");
    CHECK(std::string(e.what()).find("not an integer") != std::string::npos);

    const auto bad_header = write_temp("fills_bad_header.csv", "seq,price,qty\n1,100.00,8\n");
    CHECK(capture_parse_error([&] { parse_blotter(bad_header.string()); }).line() == 1);

    const auto day_back = write_temp("fills_day_back.csv",
                                     "seq,day,price,qty\n1,2,100.00,8\n2,1,130.00,2\n");
    CHECK(capture_parse_error([&] { parse_blotter(day_back.string()); }).field() == "day");

    const auto dup_seq = write_temp("fills_dup_seq.csv",
                                    "seq,day,price,qty\n1,1,100.00,8\n1,1,130.00,2\n");
    CHECK(capture_parse_error([&] { parse_blotter(dup_seq.string()); }).field() == "seq");

    const auto sub_cent = write_temp("fills_sub_cent.csv", "seq,day,price,qty\n1,1,100.001,8\n");
    CHECK(capture_parse_error([&] { parse_blotter(sub_cent.string()); }).field() == "price");

    const auto zero_qty = write_temp("fills_zero_qty.csv", "seq,day,price,qty\n1,1,100.00,0\n");
    CHECK(capture_parse_error([&] { parse_blotter(zero_qty.string()); }).field() == "qty");

    const auto empty = write_temp("fills_empty.csv", "");
    CHECK(std::string(capture_parse_error([&] { parse_blotter(empty.string()); }).what())
              .find("empty file") != std::string::npos);

    const auto header_only = write_temp("fills_header_only.csv", "seq,day,price,qty\n");
    CHECK(std::string(capture_parse_error([&] { parse_blotter(header_only.string()); }).what())
              .find("no data rows") != std::string::npos);

    CHECK_THROWS_AS(parse_blotter("/nonexistent/fills.csv"), ParseError);
}

TEST_CASE("account files parse and reject duplicates") {
    const auto path = write_temp("accounts_ok.csv", kSampleAccountsCsv);
    auto accounts = parse_accounts(path.string());
    REQUIRE(accounts.size() == 2);
    CHECK(accounts[0].id == "A1");
    CHECK(accounts[0].aum == 9000000);
    CHECK(accounts[1].aum == 1000000);

    const auto dup = write_temp("accounts_dup.csv", "account_id,aum\nA1,100.00\nA1,200.00\n");
    CHECK(capture_parse_error([&] { parse_accounts(dup.string()); }).field() == "account_id");

    const auto flat = write_temp("accounts_flat.csv", "account_id,aum\nA1,0.00\n");
    CHECK(capture_parse_error([&] { parse_accounts(flat.string()); }).field() == "aum");
}

TEST_CASE("allocation files group rows by fill") {
    auto book = testdata::sample_book();
    const auto path = write_temp("alloc_ok.csv",
                                 "seq,account_id,qty\n"
                                 "1,A1,7\n"
                                 "1,A2,1\n"
                                 "2,A1,2\n"
                                 "3,A1,-4\n");
    auto rows = parse_allocations(path.string(), book);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].fill_seq == 1);
    CHECK(rows[0].parts == std::vector<Qty>{7, 1});
    CHECK(rows[1].parts == std::vector<Qty>{2, 0});  // unmentioned account fills with zero
    CHECK(rows[2].parts == std::vector<Qty>{-4, 0});

    const auto unknown = write_temp("alloc_unknown.csv", "seq,account_id,qty\n1,A9,7\n");
    CHECK(capture_parse_error([&] { parse_allocations(unknown.string(), book); }).field() ==
          "account_id");

    const auto dup = write_temp("alloc_dup.csv", "seq,account_id,qty\n1,A1,7\n1,A1,1\n");
    CHECK(capture_parse_error([&] { parse_allocations(dup.string(), book); }).line() == 3);
}

TEST_CASE("aligning allocations to the blotter requires an exact match") {
    auto fills = testdata::sample_fills();
    auto allocations = testdata::make_allocations(
        fills, {{7, 1}, {2, 0}, {-4, 0}, {-9, -1}, {-4, 0}, {-4, 0}, {-4, 0}, {14, 2}});

    auto aligned = align_allocations(fills, allocations, "alloc.csv");
    CHECK(aligned.size() == fills.size());

    auto missing = allocations;
    missing.pop_back();
    CHECK_THROWS_AS(align_allocations(fills, missing, "alloc.csv"), std::invalid_argument);

    auto extra = allocations;
    extra.push_back({99, {1, 0}});
    CHECK_THROWS_AS(align_allocations(fills, extra, "alloc.csv"), std::invalid_argument);

    auto duplicate = allocations;
    duplicate[1].fill_seq = 1;
    CHECK_THROWS_AS(align_allocations(fills, duplicate, "alloc.csv"), std::invalid_argument);

    // Out-of-order rows align fine: order comes from the blotter.
    auto shuffled = allocations;
    std::swap(shuffled[0], shuffled[5]);
    auto realigned = align_allocations(fills, shuffled, "alloc.csv");
    CHECK(realigned[0].fill_seq == 1);
    CHECK(realigned[0].parts == std::vector<Qty>{7, 1});
}

TEST_CASE("config parsing fills defaults and rejects unknown keys") {
    RunConfig defaults = parse_config("{}");
    CHECK(defaults.method == "four");
    CHECK(defaults.policy == "largest_account");
    CHECK(defaults.four.search.k == 2);
    CHECK(defaults.four.search.mode == SearchMode::Proportional);
    CHECK(defaults.four.search.probe == 0);
    CHECK(defaults.four.search.nmax == 12);
    CHECK_FALSE(defaults.four.weights_enabled);

    RunConfig full = parse_config(R"({
        "method": "aps",
        "policy": "rotation",
        "rotation_cycle": 3,
        "seed": 99,
        "four": {
            "k": 1,
            "mode": "corrective",
            "probe": "1.50",
            "nmax": 6,
            "weights": {"enabled": true, "frequency": "monthly"}
        }
    })");
    CHECK(full.method == "aps");
    CHECK(full.policy == "rotation");
    CHECK(full.rotation_cycle == 3);
    CHECK(full.seed == 99);
    CHECK(full.four.search.k == 1);
    CHECK(full.four.search.mode == SearchMode::Corrective);
    CHECK(full.four.search.probe == 150);
    CHECK(full.four.search.nmax == 6);
    CHECK(full.four.weights_enabled);
    CHECK(full.four.weight_frequency == WeightFrequency::Monthly);

    // Whole currency units are accepted for the probe.
    CHECK(parse_config(R"({"four": {"probe": 3}})").four.search.probe == 300);

    CHECK_THROWS_AS(parse_config("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"methodd": "four"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"four": {"width": 2}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"four": {"weights": {"on": true}}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"method": "newton"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"policy": "alphabetical"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"rotation_cycle": -1})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"four": {"k": -1}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"four": {"nmax": 0}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"four": {"probe": -2}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"four": {"mode": "fast"}})"), std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::invalid_argument);
}

TEST_CASE("config builds the residual policy it names") {
    RunConfig config;
    CHECK(config.make_policy().kind() == ResidualPolicy::Kind::LargestAccount);
    config.policy = "rotation";
    config.rotation_cycle = 5;
    auto rotation = config.make_policy();
    CHECK(rotation.kind() == ResidualPolicy::Kind::Rotation);
    CHECK(rotation.cycle() == 5);
    config.policy = "random";
    config.seed = 7;
    auto random = config.make_policy();
    CHECK(random.kind() == ResidualPolicy::Kind::Random);
    CHECK(random.seed() == 7);
    config.policy = "biggest";
    CHECK_THROWS_AS(config.make_policy(), std::invalid_argument);
}

TEST_CASE("run_method dispatches by name") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    RunConfig config;

    auto row = run_method("simple", fills, book, config);
    CHECK(row.label == "simple");
    CHECK(row.result.cum_pnl[0] == 96000);
    REQUIRE(row.q_trajectory.size() == 8);
    CHECK(row.terminal_q == row.q_trajectory.back());

    auto four_row = run_method("four", fills, book, config);
    CHECK(four_row.terminal_q == 0);

    CHECK_THROWS_AS(run_method("newton", fills, book, config), std::invalid_argument);
}

TEST_CASE("divergence trail tracks the allocation ledger after every fill") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    auto allocations = testdata::make_allocations(
        fills, {{7, 1}, {2, 0}, {-4, 0}, {-9, -1}, {-4, 0}, {-4, 0}, {-4, 0}, {14, 2}});

    auto trail = divergence_trajectory(fills, allocations, book);
    REQUIRE(trail.size() == 8);
    CHECK(trail[0] == 0);  // first event carries no P&L
    // After the second fill: gaps 2000/3 and -6000 minor units.
    CHECK(trail[1] == Rational(2000, 3) * Rational(2000, 3) + Rational(36000000));
    // Terminal: gaps -20000/3 and 60000 minor units.
    CHECK(trail[7] == Rational(20000, 3) * Rational(20000, 3) + Rational(3600000000LL));
}

TEST_CASE("compare stacks the methods and any replays") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    RunConfig config;
    std::vector<ReplayInput> replays(1);
    replays[0].label = "desk";
    replays[0].allocations = testdata::make_allocations(
        fills, {{8, 0}, {2, 0}, {-3, -1}, {-10, 0}, {-4, 0}, {-4, 0}, {-3, -1}, {14, 2}});

    auto report = compare(fills, book, config, replays);
    REQUIRE(report.rows.size() == 5);
    CHECK(report.rows[0].label == "simple");
    CHECK(report.rows[1].label == "hpha");
    CHECK(report.rows[2].label == "aps");
    CHECK(report.rows[3].label == "four");
    CHECK(report.rows[4].label == "desk");
    CHECK(report.rows[3].terminal_q == 0);
    CHECK(report.rows[4].result.cum_pnl[0] == 90000);
}

TEST_CASE("json report renders fixed-format figures") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    RunConfig config;
    config.method = "simple";

    auto row = run_method("simple", fills, book, config);
    auto doc = run_to_json(row, fills, book, config);

    CHECK(doc["config"]["method"] == "simple");
    CHECK(doc["config"]["four"]["probe"] == "auto");
    CHECK(doc["accounts"][0]["id"] == "A1");
    CHECK(doc["accounts"][0]["alpha"] == "0.9000");
    CHECK(doc["accounts"][1]["aum"] == "10000.00");
    CHECK(doc["day_averages"][0]["avg_buy"] == "106.0000");
    CHECK(doc["day_averages"][0]["avg_sell"] == "142.8571");
    CHECK(doc["day_averages"][1]["avg_buy"] == "80.0000");
    CHECK(doc["day_averages"][1]["avg_sell"] == "111.6667");
    CHECK(doc["result"]["method"] == "simple");
    CHECK(doc["result"]["fund"]["net_position"] == 0);
    CHECK(doc["result"]["fund"]["cum_pnl"] == "1000.00");
    CHECK(doc["result"]["accounts"][0]["cum_pnl"] == "960.00");
    CHECK(doc["result"]["accounts"][1]["net_position"] == 2);
    CHECK(doc["result"]["terminal_q"] == "3.644444e+05");
    CHECK(doc["result"]["allocations"][0]["parts"] == std::vector<Qty>{7, 1});
    CHECK(doc["result"]["q_trajectory"][0] == "0.000000e+00");
}

TEST_CASE("csv reports carry the per-fill trajectory") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    RunConfig config;

    auto row = run_method("simple", fills, book, config);
    auto text = run_to_csv(row, fills, book);
    CHECK(text.find("seq,day,price,qty,fund_np,fund_cum_pnl,part_A1,np_A1,cum_pnl_A1,"
                    "part_A2,np_A2,cum_pnl_A2\n") == 0);
    CHECK(text.find("\n8,2,80.00,16,0,1000.00,14,-2,960.00,2,2,40.00\n") != std::string::npos);
    CHECK(text.find("\n7,2,110.00,-4,-16,520.00,") != std::string::npos);  // corrected bucket
}

TEST_CASE("comparison csv summarizes each method on one line") {
    auto fills = testdata::sample_fills();
    auto book = testdata::sample_book();
    RunConfig config;

    auto report = compare(fills, book, config);
    auto text = comparison_to_csv(report, book);
    CHECK(text.find("method,fund_np,fund_cum_pnl,np_A1,cum_pnl_A1,np_A2,cum_pnl_A2,terminal_q\n") ==
          0);
    CHECK(text.find("simple,0,1000.00,-2,960.00,2,40.00,3.644444e+05\n") != std::string::npos);
    CHECK(text.find("hpha,0,1000.00,-1,1010.00,1,-10.00,9.111111e+04\n") != std::string::npos);
    CHECK(text.find("aps,0,1000.00,-1,1011.48,1,-11.48,3.644444e+05\n") != std::string::npos);
    CHECK(text.find("four,0,1000.00,0,900.00,0,100.00,0.000000e+00\n") != std::string::npos);
}

TEST_CASE("write_text reports unwritable paths") {
    CHECK_THROWS_AS(write_text("/nonexistent/dir/report.json", "x"), std::runtime_error);
    const auto path = std::filesystem::temp_directory_path() / "write_ok.txt";
    write_text(path.string(), "hello");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "hello");
}
