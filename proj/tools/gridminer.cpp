// gridminer: data-grid simulator and standalone mining / query commands.
//
// Exit codes: 0 success, 1 usage, 2 input validation, 3 internal invariant
// violation.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gridminer/errors.hpp"
#include "gridminer/mining.hpp"
#include "gridminer/query.hpp"
#include "gridminer/simulation.hpp"
#include "gridminer/sprint.hpp"
#include "gridminer/topology.hpp"
#include "gridminer/workload.hpp"

namespace gm = gridminer;

namespace {

constexpr int kUsage = 1;
constexpr int kInvalid = 2;
constexpr int kInternal = 3;

gm::PartitionPolicy parse_policy(const std::string& text) {
    if (text == "round_robin") return gm::PartitionPolicy::round_robin;
    if (text == "hash_on_id") return gm::PartitionPolicy::hash_on_id;
    throw gm::ValidationError("unknown partition policy '" + text + "'");
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gm::ValidationError("cannot write " + path);
    out << text;
}

struct SimulateArgs {
    std::string config, workload, trace, report, trust = "0.25";
    std::uint64_t seed = 0;
    bool sequential = false;
    unsigned workers = 1;
    std::vector<std::string> fails;
};

int run_simulate(const SimulateArgs& a) {
    auto grid = gm::load_topology(gm::read_text_file(a.config), a.config);
    auto workload = gm::load_workload_file(a.workload);

    gm::SimulationOptions options;
    options.seed = a.seed;
    options.trust_threshold = gm::Rational::parse(a.trust);
    if (options.trust_threshold < gm::Rational(0) || options.trust_threshold > gm::Rational(1))
        throw gm::ValidationError("--trust-threshold must be in [0, 1]");
    for (const auto& f : a.fails) options.failures.insert(gm::parse_failure(f));
    options.delivery = a.sequential ? gm::DeliveryMode::sequential : gm::DeliveryMode::multicast;
    options.workers = std::max(1u, a.workers);
    options.trace = !a.trace.empty();

    gm::Simulation sim(std::move(grid), std::move(workload), options);
    auto text = gm::render_report(sim.run());
    if (a.report.empty())
        std::cout << text;
    else
        write_file(a.report, text);
    if (!a.trace.empty()) {
        std::string lines;
        for (const auto& line : sim.trace()) lines += line + "\n";
        write_file(a.trace, lines);
    }
    return 0;
}

struct MineArgs {
    std::string data, minsup, policy = "round_robin", sample_rate = "0.5";
    std::size_t partitions = 1;
    bool probabilistic = false;
    double delta = 0.05;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

int run_mine(const MineArgs& a) {
    std::ifstream in(a.data);
    if (!in) throw gm::ValidationError("cannot open " + a.data);
    auto records = gm::read_sequences(in, a.data);
    auto parts = gm::partition_dataset(records, a.partitions, parse_policy(a.policy));
    auto minsup = gm::Rational::parse(a.minsup);

    std::vector<gm::mining::Pattern> patterns;
    if (a.probabilistic) {
        gm::mining::SamplingParams params{gm::Rational::parse(a.sample_rate), a.delta, a.seed};
        patterns = gm::mining::mine_frequent_prob(parts, minsup, params, std::max(1u, a.workers));
    } else {
        patterns = gm::mining::mine_frequent(parts, minsup, std::max(1u, a.workers));
    }
    std::cout << gm::mining::format_patterns(patterns);
    return 0;
}

struct ClassifyArgs {
    std::string data, target, policy = "round_robin";
    std::size_t max_depth = 4, min_records = 2, partitions = 1;
    unsigned workers = 1;
};

int run_classify(const ClassifyArgs& a) {
    std::ifstream in(a.data);
    if (!in) throw gm::ValidationError("cannot open " + a.data);
    auto ds = gm::read_tuples_csv(in, a.target, a.data);
    auto parts = gm::partition_dataset(ds.records, a.partitions, parse_policy(a.policy));
    auto tree = gm::mining::build_tree(parts, ds.schema, {a.max_depth, a.min_records}, std::max(1u, a.workers));
    std::cout << tree.render(ds.schema);
    return 0;
}

struct ReformulateArgs {
    std::string query, schema, mappings;
    std::size_t max_steps = 16;
};

int run_reformulate(const ReformulateArgs& a) {
    auto q = gm::query::parse_query(a.query, a.schema);
    auto mappings = gm::query::load_mappings(gm::read_text_file(a.mappings), a.mappings);
    for (const auto& r : gm::query::reformulate(q, mappings, {a.max_steps}))
        std::cout << r.schema_id << '\t' << gm::query::format_query(r) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridminer: data-grid mining simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a workload through the simulated data grid");
    simulate->add_option("--config", sim.config, "Topology JSON")->required();
    simulate->add_option("--workload", sim.workload, "Workload JSON")->required();
    simulate->add_option("--seed", sim.seed, "Run seed");
    simulate->add_option("--trace", sim.trace, "Write the event trace here");
    simulate->add_flag("--sequential-delivery", sim.sequential, "Deliver results one client at a time");
    simulate->add_option("--workers", sim.workers, "Worker threads for task payloads");
    simulate->add_option("--trust-threshold", sim.trust, "Minimum trust for eligibility (0..1)");
    simulate->add_option("--fail", sim.fails, "Inject a failure: <gridlet_id>:<task_ordinal> (repeatable)");
    simulate->add_option("--report", sim.report, "Write the JSON report here (default: stdout)");

    MineArgs mine;
    auto* mine_cmd = app.add_subcommand("mine", "Mine frequent sequences");
    mine_cmd->add_option("--data", mine.data, "Sequence file, one per line")->required();
    mine_cmd->add_option("--minsup", mine.minsup, "Minimum support in (0, 1]")->required();
    mine_cmd->add_option("--partitions", mine.partitions, "Number of partitions");
    mine_cmd->add_option("--policy", mine.policy, "round_robin or hash_on_id");
    mine_cmd->add_flag("--probabilistic", mine.probabilistic, "Sample-based estimate");
    mine_cmd->add_option("--sample-rate", mine.sample_rate, "Sample rate q in (0, 1]");
    mine_cmd->add_option("--delta", mine.delta, "Failure probability in (0, 1)");
    mine_cmd->add_option("--seed", mine.seed, "Sampling seed");
    mine_cmd->add_option("--workers", mine.workers, "Worker threads");

    ClassifyArgs cls;
    auto* classify = app.add_subcommand("classify", "Build a gini decision tree");
    classify->add_option("--data", cls.data, "CSV with header")->required();
    classify->add_option("--target", cls.target, "Class label column")->required();
    classify->add_option("--max-depth", cls.max_depth, "Maximum tree depth");
    classify->add_option("--min-records", cls.min_records, "Nodes smaller than this become leaves");
    classify->add_option("--partitions", cls.partitions, "Number of partitions");
    classify->add_option("--policy", cls.policy, "round_robin or hash_on_id");
    classify->add_option("--workers", cls.workers, "Worker threads");

    ReformulateArgs ref;
    auto* reformulate = app.add_subcommand("reformulate", "Rewrite a path query across schema mappings");
    reformulate->add_option("--query", ref.query, "Path query, e.g. /dept/emp/age[>30]")->required();
    reformulate->add_option("--schema", ref.schema, "Schema the query is posed against")->required();
    reformulate->add_option("--mappings", ref.mappings, "Mappings JSON")->required();
    reformulate->add_option("--max-steps", ref.max_steps, "Drop rewrites longer than this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*mine_cmd) return run_mine(mine);
        if (*classify) return run_classify(cls);
        if (*reformulate) return run_reformulate(ref);
    } catch (const gm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
