#pragma once

#include "fairalloc/core.hpp"
#include "fairalloc/methods.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fairalloc {

// Scenario generator shape. Every quantity is drawn from the scenario's own
// seeded stream, so a (spec, seed) pair pins every generated byte.
struct SimSpec {
    int scenarios = 500;
    int fills = 200;
    int accounts = 10;
    int fills_per_day = 8;
    std::string aum_distribution = "log_skew";  // "uniform" | "log_skew"
    Money aum_min = 100'000 * kMinorPerUnit;
    Money aum_max = 10'000'000 * kMinorPerUnit;
    Money start_price = 100 * kMinorPerUnit;
    Money tick = 25;          // price increment, minor units
    int max_tick_move = 8;    // per-fill move: uniform in [-max, +max] ticks
    Qty qty_min = 1;
    Qty qty_max = 50;
    bool flatten_final = true;  // last fill closes the book when possible
    std::uint64_t seed = 1;
    FourOptions four;
};

SimSpec parse_sim_spec(const std::string& json_text, const std::string& origin = "spec");
SimSpec load_sim_spec(const std::string& path);
nlohmann::ordered_json sim_spec_to_json(const SimSpec& spec);

// One scenario's inputs, reproducible from (spec, scenario index).
struct Scenario {
    std::vector<Fill> fills;
    std::vector<Account> accounts;
};

Scenario generate_scenario(const SimSpec& spec, std::uint64_t index);

inline constexpr std::array<const char*, 4> kSimMethods{"simple", "hpha", "aps", "four"};

struct MetricStats {
    double mean = 0, max = 0, p50 = 0, p90 = 0, p99 = 0;
};

struct MethodStats {
    std::string method;
    MetricStats return_gap;  // terminal sum over accounts of |r - r_i|
    MetricStats terminal_q;  // terminal sum of squared P&L gaps
};

struct PairedComparison {
    std::string method;  // compared against four
    int wins = 0;        // scenarios where four's return gap is strictly smaller
    int losses = 0;
    int ties = 0;
    double p_value = 1.0;  // one-sided sign test on wins
};

struct SimResult {
    SimSpec spec;
    std::vector<MethodStats> stats;            // per method, kSimMethods order
    std::vector<PairedComparison> four_vs;     // vs simple, hpha, aps
    // Per-scenario terminal metrics, kSimMethods order, kept for inspection.
    std::vector<std::array<double, 4>> return_gaps;
    std::vector<std::array<double, 4>> terminal_qs;
};

// threads = 0 picks the hardware count. Results are identical for any thread
// count: scenarios own independent seed streams and are reduced in index order.
SimResult simulate(const SimSpec& spec, int threads = 0);

nlohmann::ordered_json sim_result_to_json(const SimResult& result);
std::string sim_result_to_csv(const SimResult& result);

// One-sided sign test: probability of at least `wins` successes in
// `wins + losses` fair coin flips.
double sign_test_p_value(int wins, int losses);

}  // namespace fairalloc
