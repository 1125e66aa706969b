#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridminer/topology.hpp"

namespace gridminer::query {

using Path = std::vector<std::string>;

enum class Comparator { eq, lt, gt };

struct Predicate {
    Comparator op = Comparator::eq;
    Scalar literal;

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

/// Linear root-to-node path with an optional comparison on the node value.
struct PathQuery {
    std::string schema_id;
    Path steps;
    std::optional<Predicate> predicate;

    friend bool operator==(const PathQuery&, const PathQuery&) = default;
};

/// Grammar: `/label(/label)*([=|<|>]literal)?`, e.g. `/dept/emp/age[>30]`.
/// A literal that parses as a number is numeric; wrap it in double quotes to
/// force a string. Throws ParseError.
PathQuery parse_query(std::string_view text, std::string schema_id = "");

/// Inverse of parse_query (the schema is not part of the text).
std::string format_query(const PathQuery& q);

struct SchemaMapping {
    std::string from_schema;
    std::string to_schema;
    std::vector<std::pair<Path, Path>> pairs;  // (source path, target path)
};

/// JSON list of `{"from":"A","to":"B","pairs":[[["dept","emp"],["division","person"]]]}`.
/// Throws ParseError / ValidationError (from == to, duplicate source path,
/// empty path or label).
std::vector<SchemaMapping> load_mappings(std::string_view json_text, const std::string& source = "mappings");

struct ReformulateOptions {
    /// Rewrites longer than this are dropped. Cyclic mappings that grow a
    /// path would otherwise reach infinitely many (schema, steps) states.
    std::size_t max_steps = 16;
};

/// Transitive closure of prefix rewrites reachable from q, excluding q
/// itself, deduplicated and sorted by (schema_id, steps). The predicate is
/// carried unchanged.
std::vector<PathQuery> reformulate(const PathQuery& q, std::span<const SchemaMapping> mappings,
                                   const ReformulateOptions& options = {});

struct SubQuery {
    PathQuery query;
    PartitionId partition_id = 0;
    std::uint64_t cost = 1;
};

struct ExecutionPlan {
    PathQuery original;
    std::vector<PathQuery> reformulations;
    std::vector<SubQuery> sub_queries;  // aggregation is a dedupe-union on record id
};

/// One sub-query per (query in {q} + reformulations, partition with the same
/// schema), costing scan_cost per record (at least 1).
ExecutionPlan plan(const PathQuery& q, std::span<const SchemaMapping> mappings,
                   std::span<const DataPartition> partitions, std::uint64_t scan_cost = 1,
                   const ReformulateOptions& options = {});

struct Match {
    RecordId record_id = 0;
    std::optional<Scalar> value;  // empty when the matched node is interior

    friend bool operator==(const Match&, const Match&) = default;
};

struct SubQueryResult {
    std::vector<Match> matches;  // at most one per record, sorted by record id
    std::uint64_t skipped = 0;   // records dropped for literal/value type mismatch
};

/// Evaluates q against each labeled-tree record. A record matches at the
/// first node (preorder) whose root path equals q.steps and whose value
/// satisfies the predicate. If any such path node has a value of the wrong
/// kind (or none) for the literal, the record is skipped instead. Throws
/// TaskError for non-tree records.
SubQueryResult eval_subquery(const PathQuery& q, const DataPartition& part);

}  // namespace gridminer::query
