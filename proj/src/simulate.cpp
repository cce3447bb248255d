#include "fairalloc/simulate.hpp"

#include "fairalloc/four.hpp"
#include "fairalloc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fairalloc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
    throw std::invalid_argument(origin + ": " + message);
}

Money parse_money_field(const json& value, const std::string& origin, const std::string& key) {
    if (value.is_string()) {
        try {
            return parse_money(value.get<std::string>());
        } catch (const std::exception& e) {
            fail(origin, key + ": " + e.what());
        }
    }
    if (value.is_number_integer()) return value.get<std::int64_t>() * kMinorPerUnit;
    fail(origin, key + " must be a decimal string or whole currency units");
}

std::int64_t require_int(const json& value, const std::string& origin, const std::string& key) {
    if (!value.is_number_integer()) fail(origin, key + " must be an integer");
    return value.get<std::int64_t>();
}

}  // namespace

SimSpec parse_sim_spec(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(origin, std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail(origin, "top level must be an object");
    static const std::set<std::string> known{
        "scenarios", "fills",   "accounts",     "fills_per_day", "aum_distribution",
        "aum_min",   "aum_max", "start_price",  "tick",          "max_tick_move",
        "qty_min",   "qty_max", "flatten_final", "seed"};
    for (const auto& [key, value] : root.items()) {
        (void)value;
        if (!known.contains(key)) fail(origin, "unknown key '" + key + "'");
    }

    SimSpec spec;
    if (root.contains("scenarios")) spec.scenarios = static_cast<int>(require_int(root["scenarios"], origin, "scenarios"));
    if (root.contains("fills")) spec.fills = static_cast<int>(require_int(root["fills"], origin, "fills"));
    if (root.contains("accounts")) spec.accounts = static_cast<int>(require_int(root["accounts"], origin, "accounts"));
    if (root.contains("fills_per_day")) spec.fills_per_day = static_cast<int>(require_int(root["fills_per_day"], origin, "fills_per_day"));
    if (root.contains("aum_distribution")) {
        spec.aum_distribution = root["aum_distribution"].get<std::string>();
        if (spec.aum_distribution != "uniform" && spec.aum_distribution != "log_skew")
            fail(origin, "aum_distribution must be 'uniform' or 'log_skew'");
    }
    if (root.contains("aum_min")) spec.aum_min = parse_money_field(root["aum_min"], origin, "aum_min");
    if (root.contains("aum_max")) spec.aum_max = parse_money_field(root["aum_max"], origin, "aum_max");
    if (root.contains("start_price")) spec.start_price = parse_money_field(root["start_price"], origin, "start_price");
    if (root.contains("tick")) {
        // Ticks are already a minor-unit step, not whole currency.
        spec.tick = require_int(root["tick"], origin, "tick");
    }
    if (root.contains("max_tick_move")) spec.max_tick_move = static_cast<int>(require_int(root["max_tick_move"], origin, "max_tick_move"));
    if (root.contains("qty_min")) spec.qty_min = require_int(root["qty_min"], origin, "qty_min");
    if (root.contains("qty_max")) spec.qty_max = require_int(root["qty_max"], origin, "qty_max");
    if (root.contains("flatten_final")) {
        if (!root["flatten_final"].is_boolean()) fail(origin, "flatten_final must be a boolean");
        spec.flatten_final = root["flatten_final"].get<bool>();
    }
    if (root.contains("seed")) spec.seed = root["seed"].get<std::uint64_t>();

    if (spec.scenarios < 1) fail(origin, "scenarios must be at least 1");
    if (spec.fills < 1) fail(origin, "fills must be at least 1");
    if (spec.accounts < 1) fail(origin, "accounts must be at least 1");
    if (spec.fills_per_day < 1) fail(origin, "fills_per_day must be at least 1");
    if (spec.aum_min <= 0 || spec.aum_max < spec.aum_min) fail(origin, "aum range is empty");
    if (spec.start_price <= 0) fail(origin, "start_price must be positive");
    if (spec.tick < 1) fail(origin, "tick must be at least 1 minor unit");
    if (spec.max_tick_move < 0) fail(origin, "max_tick_move must be non-negative");
    if (spec.qty_min < 1 || spec.qty_max < spec.qty_min) fail(origin, "qty range is empty");
    return spec;
}

SimSpec load_sim_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path + ": cannot open spec file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_sim_spec(buffer.str(), path);
}

ordered_json sim_spec_to_json(const SimSpec& spec) {
    return {{"scenarios", spec.scenarios},
            {"fills", spec.fills},
            {"accounts", spec.accounts},
            {"fills_per_day", spec.fills_per_day},
            {"aum_distribution", spec.aum_distribution},
            {"aum_min", format_money(spec.aum_min)},
            {"aum_max", format_money(spec.aum_max)},
            {"start_price", format_money(spec.start_price)},
            {"tick", spec.tick},
            {"max_tick_move", spec.max_tick_move},
            {"qty_min", spec.qty_min},
            {"qty_max", spec.qty_max},
            {"flatten_final", spec.flatten_final},
            {"seed", spec.seed}};
}

Scenario generate_scenario(const SimSpec& spec, std::uint64_t index) {
    Rng rng(mix_seed(spec.seed, index));
    Scenario scenario;

    scenario.accounts.reserve(spec.accounts);
    const double log_span = std::log(static_cast<double>(spec.aum_max) /
                                     static_cast<double>(spec.aum_min));
    for (int i = 0; i < spec.accounts; ++i) {
        Money aum;
        if (spec.aum_distribution == "uniform") {
            aum = rng.range(spec.aum_min, spec.aum_max);
        } else {
            // Log-uniform: a few large accounts dominate, the realistic shape
            // for co-mingled funds.
            const double u = rng.unit();
            aum = static_cast<Money>(static_cast<double>(spec.aum_min) * std::exp(u * log_span));
            aum = std::clamp(aum, spec.aum_min, spec.aum_max);
        }
        scenario.accounts.push_back({"A" + std::to_string(i + 1), aum});
    }

    scenario.fills.reserve(spec.fills);
    Money price = spec.start_price;
    Qty net = 0;
    for (int i = 0; i < spec.fills; ++i) {
        if (i > 0) {
            const std::int64_t move = rng.range(-spec.max_tick_move, spec.max_tick_move);
            price = std::max(spec.tick, price + move * spec.tick);
        }
        Qty qty;
        const bool closing = spec.flatten_final && i == spec.fills - 1 && net != 0;
        if (closing) {
            qty = -net;
        } else {
            qty = rng.range(spec.qty_min, spec.qty_max);
            if (rng.below(2) == 1) qty = -qty;
        }
        net += qty;
        scenario.fills.push_back(Fill{i + 1, 1 + i / spec.fills_per_day, price, qty});
    }
    return scenario;
}

double sign_test_p_value(int wins, int losses) {
    const int n = wins + losses;
    if (n == 0) return 1.0;
    // P[X >= wins] for X ~ Binomial(n, 1/2), summed in log space.
    double p = 0.0;
    for (int k = wins; k <= n; ++k) {
        const double log_choose =
            std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        p += std::exp(log_choose - n * std::log(2.0));
    }
    return std::min(p, 1.0);
}

namespace {

MetricStats stats_of(std::vector<double> values) {
    MetricStats stats;
    if (values.empty()) return stats;
    double sum = 0;
    for (double v : values) sum += v;
    stats.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    stats.max = values.back();
    const auto quantile = [&](double q) {
        const std::size_t rank =
            std::min(values.size() - 1,
                     static_cast<std::size_t>(q * static_cast<double>(values.size())));
        return values[rank];
    };
    stats.p50 = quantile(0.50);
    stats.p90 = quantile(0.90);
    stats.p99 = quantile(0.99);
    return stats;
}

// Terminal return gap and Q from a method's marked P&L, so methods with
// different position accounting are compared on the same footing.
std::pair<double, double> terminal_metrics(const MethodResult& result, const AccountBook& book) {
    const Rational fund_pnl(result.fund_pnl);
    Rational gap_sum = 0;
    Rational q = 0;
    for (std::size_t i = 0; i < book.size(); ++i) {
        const Rational d = fund_pnl - result.marked_pnl[i] / book.alpha(i);
        q += d * d;
        gap_sum += d < 0 ? -d : d;
    }
    // sum |r - r_i| = sum |D_i| / total AUM
    const Rational gap = gap_sum / book.total_aum();
    // q accumulates squared minor units; report it in squared currency units.
    q /= Rational(kMinorPerUnit) * kMinorPerUnit;
    return {to_double(gap), to_double(q)};
}

void run_scenario(const SimSpec& spec, std::uint64_t index, std::array<double, 4>& gaps,
                  std::array<double, 4>& qs) {
    const Scenario scenario = generate_scenario(spec, index);
    const AccountBook book(scenario.accounts);
    for (std::size_t m = 0; m < kSimMethods.size(); ++m) {
        const std::string method = kSimMethods[m];
        MethodResult result;
        if (method == "simple") {
            ResidualPolicy policy = ResidualPolicy::largest_account();
            result = run_simple_rounding(scenario.fills, book, policy);
        } else if (method == "hpha") {
            ResidualPolicy policy = ResidualPolicy::largest_account();
            result = run_hpha(scenario.fills, book, policy);
        } else if (method == "aps") {
            ResidualPolicy policy = ResidualPolicy::largest_account();
            result = run_aps(scenario.fills, book, policy);
        } else {
            result = run_four(scenario.fills, book, spec.four);
        }
        const auto [gap, q] = terminal_metrics(result, book);
        gaps[m] = gap;
        qs[m] = q;
    }
}

}  // namespace

SimResult simulate(const SimSpec& spec, int threads) {
    SimResult result;
    result.spec = spec;
    const int n = spec.scenarios;
    result.return_gaps.resize(n);
    result.terminal_qs.resize(n);

    int worker_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    worker_count = std::clamp(worker_count, 1, n);
    if (worker_count == 1) {
        for (int i = 0; i < n; ++i)
            run_scenario(spec, i, result.return_gaps[i], result.terminal_qs[i]);
    } else {
        // Strided split; every scenario owns its seed stream, and results land
        // in index order, so the outcome matches the single-threaded run.
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        std::vector<std::exception_ptr> errors(worker_count);
        for (int w = 0; w < worker_count; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (int i = w; i < n; i += worker_count)
                        run_scenario(spec, i, result.return_gaps[i], result.terminal_qs[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& t : workers) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (std::size_t m = 0; m < kSimMethods.size(); ++m) {
        std::vector<double> gaps(n), qs(n);
        for (int i = 0; i < n; ++i) {
            gaps[i] = result.return_gaps[i][m];
            qs[i] = result.terminal_qs[i][m];
        }
        result.stats.push_back({kSimMethods[m], stats_of(std::move(gaps)), stats_of(std::move(qs))});
    }

    const std::size_t four_index = 3;
    for (std::size_t m = 0; m < four_index; ++m) {
        PairedComparison cmp;
        cmp.method = kSimMethods[m];
        for (int i = 0; i < n; ++i) {
            const double four_gap = result.return_gaps[i][four_index];
            const double other_gap = result.return_gaps[i][m];
            if (four_gap < other_gap)
                ++cmp.wins;
            else if (four_gap > other_gap)
                ++cmp.losses;
            else
                ++cmp.ties;
        }
        cmp.p_value = sign_test_p_value(cmp.wins, cmp.losses);
        result.four_vs.push_back(cmp);
    }
    return result;
}

namespace {

ordered_json stats_to_json(const MetricStats& stats) {
    return {{"mean", format_scientific(stats.mean)},
            {"max", format_scientific(stats.max)},
            {"p50", format_scientific(stats.p50)},
            {"p90", format_scientific(stats.p90)},
            {"p99", format_scientific(stats.p99)}};
}

}  // namespace

ordered_json sim_result_to_json(const SimResult& result) {
    ordered_json methods = ordered_json::array();
    for (const MethodStats& stats : result.stats)
        methods.push_back({{"method", stats.method},
                           {"return_gap", stats_to_json(stats.return_gap)},
                           {"terminal_q", stats_to_json(stats.terminal_q)}});
    ordered_json versus = ordered_json::array();
    for (const PairedComparison& cmp : result.four_vs)
        versus.push_back({{"method", cmp.method},
                          {"wins", cmp.wins},
                          {"losses", cmp.losses},
                          {"ties", cmp.ties},
                          {"sign_test_p", format_scientific(cmp.p_value)}});
    return {{"spec", sim_spec_to_json(result.spec)},
            {"methods", std::move(methods)},
            {"four_vs", std::move(versus)}};
}

std::string sim_result_to_csv(const SimResult& result) {
    std::ostringstream out;
    out << "method,gap_mean,gap_max,gap_p50,gap_p90,gap_p99,q_mean,q_max,q_p50,q_p90,q_p99\n";
    for (const MethodStats& stats : result.stats) {
        out << stats.method;
        for (const MetricStats* metric : {&stats.return_gap, &stats.terminal_q})
            out << "," << format_scientific(metric->mean) << "," << format_scientific(metric->max)
                << "," << format_scientific(metric->p50) << "," << format_scientific(metric->p90)
                << "," << format_scientific(metric->p99);
        out << "\n";
    }
    return out.str();
}

}  // namespace fairalloc
