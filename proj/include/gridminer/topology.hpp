#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gridminer {

using GridletId = std::uint64_t;
using ClientId = std::uint64_t;
using RecordId = std::uint64_t;
using PartitionId = std::uint64_t;

struct GridletSpec {
    GridletId id = 0;
    std::uint64_t cpu_rate = 1;  // work units per tick
    std::uint64_t latency = 0;   // ticks per message to/from the scheduler
};

struct ClientSpec {
    ClientId id = 0;
    std::uint64_t latency = 0;
};

/// Work-unit prices of the sub-task kinds.
struct CostModel {
    std::uint64_t count = 1;  // per (candidate x sequence) in support counting
    std::uint64_t scan = 1;   // per record scanned by a path sub-query
    std::uint64_t split = 1;  // per (record x attribute) in split statistics
};

struct Grid {
    std::vector<GridletSpec> gridlets;
    std::vector<ClientSpec> clients;
    CostModel costs;

    const GridletSpec* find_gridlet(GridletId id) const;
    const ClientSpec* find_client(ClientId id) const;
};

/// Parses the JSON topology config. `source` names the file in diagnostics.
/// Throws ParseError (with line or field path) or ValidationError.
Grid load_topology(std::string_view json_text, const std::string& source = "config");

// ---------------------------------------------------------------------------
// Records

using Item = std::uint32_t;
using Sequence = std::vector<Item>;

/// A numeric or string value: tuple attributes, tree leaves, query literals.
using Scalar = std::variant<double, std::string>;

std::string format_scalar(const Scalar& value);

struct AttributeTuple {
    std::vector<Scalar> values;  // one per attribute, in schema order
    std::string label;           // class label

    friend bool operator==(const AttributeTuple&, const AttributeTuple&) = default;
};

struct LabeledNode {
    std::string label;
    std::optional<Scalar> value;  // leaves only
    std::vector<LabeledNode> children;

    friend bool operator==(const LabeledNode&, const LabeledNode&) = default;
};

struct LabeledTree {
    std::vector<LabeledNode> roots;

    friend bool operator==(const LabeledTree&, const LabeledTree&) = default;
};

struct Record {
    RecordId id = 0;
    std::variant<Sequence, AttributeTuple, LabeledTree> body;

    friend bool operator==(const Record&, const Record&) = default;
};

struct DataPartition {
    PartitionId id = 0;
    std::optional<GridletId> host_gridlet;
    std::string schema_id;
    std::vector<Record> records;
};

enum class PartitionPolicy { round_robin, hash_on_id };

/// Splits records into p partitions (ids 0..p-1). Round-robin keeps input
/// order within each partition; hash_on_id sends a record to id mod p.
/// Throws ValidationError when p == 0.
std::vector<DataPartition> partition_dataset(std::span<const Record> records, std::size_t p,
                                             PartitionPolicy policy = PartitionPolicy::round_robin,
                                             const std::string& schema_id = "");

/// Hosts partition i on gridlet i mod |gridlets| (in config order).
void assign_hosts(std::span<DataPartition> partitions, const Grid& grid);

// ---------------------------------------------------------------------------
// Dataset readers

/// One sequence per line, whitespace-separated non-negative integers. Blank
/// lines are skipped; record ids count the non-blank lines from 0.
std::vector<Record> read_sequences(std::istream& in, const std::string& source = "sequences");

enum class AttributeKind { numeric, categorical };

struct TupleSchema {
    std::vector<std::string> attributes;  // non-target columns, file order
    std::vector<AttributeKind> kinds;
    std::string target;
};

struct TupleDataset {
    TupleSchema schema;
    std::vector<Record> records;
};

/// CSV with a header row. A column is numeric when every value parses as a
/// number. No quoting support.
TupleDataset read_tuples_csv(std::istream& in, const std::string& target, const std::string& source = "csv");

/// JSON array of `{"id": n, "tree": {...}}` (id optional, defaults to the
/// array index). Objects become child nodes, arrays repeat a label, numbers
/// and strings become leaf values.
std::vector<Record> read_trees_json(std::string_view json_text, const std::string& source = "trees");

LabeledTree tree_from_json_text(std::string_view json_text);

}  // namespace gridminer
