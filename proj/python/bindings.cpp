// Python bindings for the gridminer core. Rationals cross the boundary as
// (numerator, denominator) pairs or "n/d" strings; gridminer/__init__.py
// turns them into fractions.Fraction.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gridminer/aggregator.hpp"
#include "gridminer/errors.hpp"
#include "gridminer/mining.hpp"
#include "gridminer/query.hpp"
#include "gridminer/scheduler.hpp"
#include "gridminer/simulation.hpp"
#include "gridminer/sprint.hpp"
#include "gridminer/workload.hpp"

namespace py = pybind11;
namespace gm = gridminer;

namespace {

using RationalPair = std::pair<std::int64_t, std::int64_t>;

RationalPair pair_of(const gm::Rational& r) { return {r.num(), r.den()}; }

gm::PartitionPolicy policy_of(const std::string& text) {
    if (text == "round_robin") return gm::PartitionPolicy::round_robin;
    if (text == "hash_on_id") return gm::PartitionPolicy::hash_on_id;
    throw gm::ValidationError("unknown partition policy '" + text + "'");
}

std::vector<gm::DataPartition> sequence_partitions(const std::vector<gm::Sequence>& sequences, std::size_t partitions,
                                                   const std::string& policy) {
    std::vector<gm::Record> records;
    records.reserve(sequences.size());
    for (std::size_t i = 0; i < sequences.size(); ++i) records.push_back({i, sequences[i]});
    return gm::partition_dataset(records, partitions, policy_of(policy));
}

py::list patterns_out(const std::vector<gm::mining::Pattern>& patterns) {
    py::list out;
    for (const auto& p : patterns) {
        if (p.epsilon)
            out.append(py::make_tuple(p.items, pair_of(p.support), *p.epsilon));
        else
            out.append(py::make_tuple(p.items, pair_of(p.support)));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "gridminer core: level-wise sequence mining, gini trees, path-query reformulation, grid simulation";

    py::register_exception<gm::Error>(m, "GridminerError", PyExc_ValueError);

    m.def("is_subsequence", [](const gm::Sequence& pattern, const gm::Sequence& seq) {
        return gm::mining::is_subsequence(pattern, seq);
    });

    m.def(
        "mine",
        [](const std::vector<gm::Sequence>& sequences, const std::string& minsup, std::size_t partitions,
           const std::string& policy, unsigned workers) {
            auto parts = sequence_partitions(sequences, partitions, policy);
            std::vector<gm::mining::Pattern> patterns;
            {
                py::gil_scoped_release release;
                patterns = gm::mining::mine_frequent(parts, gm::Rational::parse(minsup), std::max(1u, workers));
            }
            return patterns_out(patterns);
        },
        py::arg("sequences"), py::arg("minsup"), py::arg("partitions") = 1, py::arg("policy") = "round_robin",
        py::arg("workers") = 1);

    m.def(
        "mine_prob",
        [](const std::vector<gm::Sequence>& sequences, const std::string& minsup, const std::string& sample_rate,
           double delta, std::uint64_t seed, std::size_t partitions, const std::string& policy) {
            auto parts = sequence_partitions(sequences, partitions, policy);
            gm::mining::SamplingParams params{gm::Rational::parse(sample_rate), delta, seed};
            return patterns_out(gm::mining::mine_frequent_prob(parts, gm::Rational::parse(minsup), params));
        },
        py::arg("sequences"), py::arg("minsup"), py::arg("sample_rate") = "1/2", py::arg("delta") = 0.05,
        py::arg("seed") = 0, py::arg("partitions") = 1, py::arg("policy") = "round_robin");

    m.def("hoeffding_epsilon", &gm::mining::hoeffding_epsilon, py::arg("m"), py::arg("delta"));

    m.def("gini", [](const std::vector<std::uint64_t>& counts) { return pair_of(gm::mining::gini(counts)); });

    m.def(
        "classify",
        [](const std::string& csv_text, const std::string& target, std::size_t max_depth, std::size_t min_records,
           std::size_t partitions) {
            std::istringstream in(csv_text);
            auto ds = gm::read_tuples_csv(in, target);
            auto parts = gm::partition_dataset(ds.records, partitions);
            return gm::mining::build_tree(parts, ds.schema, {max_depth, min_records}).render(ds.schema);
        },
        py::arg("csv_text"), py::arg("target"), py::arg("max_depth") = 4, py::arg("min_records") = 2,
        py::arg("partitions") = 1);

    m.def(
        "reformulate",
        [](const std::string& query, const std::string& schema, const std::string& mappings_json,
           std::size_t max_steps) {
            auto q = gm::query::parse_query(query, schema);
            auto mappings = gm::query::load_mappings(mappings_json);
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& r : gm::query::reformulate(q, mappings, {max_steps}))
                out.emplace_back(r.schema_id, gm::query::format_query(r));
            return out;
        },
        py::arg("query"), py::arg("schema"), py::arg("mappings_json") = "[]", py::arg("max_steps") = 16);

    m.def(
        "select_gridlet",
        [](const std::vector<std::uint64_t>& busy, const std::vector<std::uint64_t>& queue_len,
           const std::vector<std::pair<std::uint64_t, std::uint64_t>>& trust, const std::string& threshold)
            -> std::optional<std::size_t> {
            if (queue_len.size() != busy.size() || trust.size() != busy.size())
                throw gm::ValidationError("busy, queue_len and trust must have equal length");
            std::vector<gm::GridletStatus> st;
            for (std::size_t i = 0; i < busy.size(); ++i)
                st.push_back({i, busy[i], queue_len[i], gm::TrustScore(trust[i].first, trust[i].second)});
            auto chosen = gm::select_gridlet(st, gm::Rational::parse(threshold));
            if (!chosen) return std::nullopt;
            return static_cast<std::size_t>(*chosen);
        },
        py::arg("busy"), py::arg("queue_len"), py::arg("trust"), py::arg("threshold") = "1/4");

    m.def(
        "delivery_times",
        [](const std::vector<std::uint64_t>& latencies, std::uint64_t at, bool sequential) {
            std::vector<gm::ClientSpec> clients;
            for (std::size_t i = 0; i < latencies.size(); ++i) clients.push_back({i, latencies[i]});
            if (clients.empty()) throw gm::ValidationError("at least one client is required");
            std::vector<std::uint64_t> out;
            for (const auto& d :
                 gm::multicast(clients, at, sequential ? gm::DeliveryMode::sequential : gm::DeliveryMode::multicast))
                out.push_back(d.time);
            return out;
        },
        py::arg("latencies"), py::arg("at") = 0, py::arg("sequential") = false);

    m.def(
        "simulate",
        [](const std::string& config_path, const std::string& workload_path, std::uint64_t seed, bool sequential,
           unsigned workers, const std::string& trust_threshold, const std::vector<std::string>& failures) {
            gm::SimulationOptions opt;
            opt.seed = seed;
            opt.delivery = sequential ? gm::DeliveryMode::sequential : gm::DeliveryMode::multicast;
            opt.workers = std::max(1u, workers);
            opt.trust_threshold = gm::Rational::parse(trust_threshold);
            opt.trace = true;
            for (const auto& f : failures) opt.failures.insert(gm::parse_failure(f));
            auto grid = gm::load_topology(gm::read_text_file(config_path), config_path);
            auto workload = gm::load_workload_file(workload_path);
            std::string report;
            std::vector<std::string> trace;
            {
                py::gil_scoped_release release;
                gm::Simulation sim(std::move(grid), std::move(workload), opt);
                report = gm::render_report(sim.run());
                trace = sim.trace();
            }
            return py::make_tuple(report, trace);
        },
        py::arg("config_path"), py::arg("workload_path"), py::arg("seed") = 0, py::arg("sequential") = false,
        py::arg("workers") = 1, py::arg("trust_threshold") = "1/4", py::arg("failures") = std::vector<std::string>{});
}
