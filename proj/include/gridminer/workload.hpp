#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridminer/mining.hpp"
#include "gridminer/query.hpp"
#include "gridminer/simkernel.hpp"
#include "gridminer/sprint.hpp"
#include "gridminer/topology.hpp"

namespace gridminer {

struct MineJob {
    std::vector<Record> records;
    std::size_t partitions = 1;
    PartitionPolicy policy = PartitionPolicy::round_robin;
    Rational minsup{1, 2};
    struct Sampling {
        Rational sample_rate{1, 2};
        double delta = 0.05;
    };
    std::optional<Sampling> sampling;
};

struct ClassifyJob {
    TupleDataset data;
    std::size_t partitions = 1;
    PartitionPolicy policy = PartitionPolicy::round_robin;
    mining::TreeParams params;
};

struct PathQueryJob {
    struct Source {
        std::string schema_id;
        std::vector<Record> records;
        std::size_t partitions = 1;
        PartitionPolicy policy = PartitionPolicy::round_robin;
    };
    query::PathQuery query;
    std::vector<query::SchemaMapping> mappings;
    std::vector<Source> sources;
    query::ReformulateOptions options;
};

/// N independent tasks of equal cost; a pure load generator.
struct SyntheticJob {
    std::size_t tasks = 1;
    std::uint64_t cost = 1;
};

struct JobSpec {
    SimTime submit = 0;
    ClientId client = 0;
    std::vector<ClientId> recipients;  // defaults to {client}
    std::variant<MineJob, ClassifyJob, PathQueryJob, SyntheticJob> work;
};

struct Workload {
    std::vector<JobSpec> jobs;
};

/// Parses a workload JSON document. Data, mapping and tree files are
/// resolved against `base_dir`. Throws ParseError / ValidationError with the
/// workload file name and job field path.
Workload load_workload(std::string_view json_text, const std::filesystem::path& base_dir,
                       const std::string& source = "workload");

Workload load_workload_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gridminer
