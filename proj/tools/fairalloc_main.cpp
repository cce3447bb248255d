#include "fairalloc/csv.hpp"
#include "fairalloc/harness.hpp"
#include "fairalloc/report.hpp"
#include "fairalloc/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace fairalloc;

struct CommonArgs {
    std::string fills_path;
    std::string accounts_path;
    std::string config_path;
    std::string out_path;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--fills", args.fills_path, "Blotter CSV (seq,day,price,qty)")->required();
    cmd->add_option("--accounts", args.accounts_path, "Accounts CSV (account_id,aum)")->required();
    cmd->add_option("--config", args.config_path, "Config JSON");
    cmd->add_option("--out", args.out_path, "Output path (default stdout)");
    cmd->add_option("--format", args.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

struct LoadedRun {
    std::vector<Fill> fills;
    AccountBook book;
    RunConfig config;
};

LoadedRun load_common(const CommonArgs& args) {
    std::vector<Fill> fills = parse_blotter(args.fills_path);
    AccountBook book(parse_accounts(args.accounts_path));
    RunConfig config = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
    return {std::move(fills), std::move(book), std::move(config)};
}

void emit(const CommonArgs& args, const nlohmann::ordered_json& json_doc,
          const std::string& csv_doc) {
    if (args.format == "csv")
        write_text(args.out_path, csv_doc);
    else
        write_text(args.out_path, json_doc.dump(2) + "\n");
}

int do_run(const CommonArgs& args, const std::string& method_flag) {
    LoadedRun loaded = load_common(args);
    if (!method_flag.empty()) loaded.config.method = method_flag;
    const MethodRow row = run_method(loaded.config.method, loaded.fills, loaded.book, loaded.config);
    emit(args, run_to_json(row, loaded.fills, loaded.book, loaded.config),
         run_to_csv(row, loaded.fills, loaded.book));
    return 0;
}

int do_replay(const CommonArgs& args, const std::string& alloc_path, const std::string& label) {
    LoadedRun loaded = load_common(args);
    const std::vector<AllocationVector> rows = parse_allocations(alloc_path, loaded.book);
    const std::vector<AllocationVector> aligned =
        align_allocations(loaded.fills, rows, alloc_path);
    MethodResult result = run_replay(loaded.fills, aligned, loaded.book, label);
    MethodRow row;
    row.label = result.method;
    row.q_trajectory = divergence_trajectory(loaded.fills, result.allocations, loaded.book);
    row.terminal_q = row.q_trajectory.empty() ? Rational(0) : row.q_trajectory.back();
    row.result = std::move(result);
    emit(args, run_to_json(row, loaded.fills, loaded.book, loaded.config),
         run_to_csv(row, loaded.fills, loaded.book));
    return 0;
}

int do_compare(const CommonArgs& args, const std::vector<std::string>& replay_specs) {
    LoadedRun loaded = load_common(args);
    std::vector<ReplayInput> replays;
    for (const std::string& spec : replay_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            throw std::invalid_argument("--replay expects label=path, got '" + spec + "'");
        const std::string label = spec.substr(0, eq);
        const std::string path = spec.substr(eq + 1);
        const std::vector<AllocationVector> rows = parse_allocations(path, loaded.book);
        replays.push_back({label, align_allocations(loaded.fills, rows, path)});
    }
    const ComparisonReport report = compare(loaded.fills, loaded.book, loaded.config, replays);
    emit(args, comparison_to_json(report, loaded.fills, loaded.book),
         comparison_to_csv(report, loaded.book));
    return 0;
}

int do_simulate(const std::string& spec_path, bool seed_set, std::uint64_t seed, int threads,
                const CommonArgs& args) {
    SimSpec spec = load_sim_spec(spec_path);
    if (seed_set) spec.seed = seed;
    const SimResult result = simulate(spec, threads);
    emit(args, sim_result_to_json(result), sim_result_to_csv(result));
    return 0;
}

void print_error(const std::exception& e, const std::string& kind, int line,
                 const std::string& field) {
    nlohmann::ordered_json record{{"error", {{"kind", kind}, {"message", e.what()}}}};
    if (line >= 0) record["error"]["line"] = line;
    if (!field.empty()) record["error"]["field"] = field;
    std::cerr << record.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bunched-order trade allocation: proportional rounding, day-batched "
                 "assignment, average pricing, and divergence-minimizing search"};
    app.require_subcommand(1);

    CommonArgs run_args;
    std::string run_method_flag;
    CLI::App* run_cmd = app.add_subcommand("run", "Allocate a blotter with one method");
    add_common(run_cmd, run_args);
    run_cmd->add_option("--method", run_method_flag, "simple | hpha | aps | four")
        ->check(CLI::IsMember({"simple", "hpha", "aps", "four"}));

    CommonArgs replay_args;
    std::string alloc_path;
    std::string replay_label = "replay";
    CLI::App* replay_cmd = app.add_subcommand("replay", "Apply a recorded allocation file");
    add_common(replay_cmd, replay_args);
    replay_cmd->add_option("--alloc", alloc_path, "Allocation CSV (seq,account_id,qty)")
        ->required();
    replay_cmd->add_option("--label", replay_label, "Row label in the report");

    CommonArgs compare_args;
    std::vector<std::string> replay_specs;
    CLI::App* compare_cmd = app.add_subcommand("compare", "Run every method side by side");
    add_common(compare_cmd, compare_args);
    compare_cmd->add_option("--replay", replay_specs,
                            "Extra replay row as label=path (repeatable)");

    CommonArgs sim_args;
    std::string spec_path;
    std::uint64_t seed = 0;
    int threads = 0;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Seeded Monte Carlo across methods");
    sim_cmd->add_option("--spec", spec_path, "Simulation spec JSON")->required();
    CLI::Option* seed_opt = sim_cmd->add_option("--seed", seed, "Master seed override");
    sim_cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");
    sim_cmd->add_option("--out", sim_args.out_path, "Output path (default stdout)");
    sim_cmd->add_option("--format", sim_args.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(run_args, run_method_flag);
        if (replay_cmd->parsed()) return do_replay(replay_args, alloc_path, replay_label);
        if (compare_cmd->parsed()) return do_compare(compare_args, replay_specs);
        if (sim_cmd->parsed())
            return do_simulate(spec_path, seed_opt->count() > 0, seed, threads, sim_args);
    } catch (const ParseError& e) {
        print_error(e, "parse", e.line(), e.field());
        return 1;
    } catch (const std::invalid_argument& e) {
        print_error(e, "invalid_input", -1, "");
        return 1;
    } catch (const std::exception& e) {
        print_error(e, "internal", -1, "");
        return 1;
    }
    return 0;
}
