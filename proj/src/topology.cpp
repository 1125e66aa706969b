#include "gridminer/topology.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "gridminer/errors.hpp"
#include "json_util.hpp"

namespace gridminer {

using nlohmann::json;
using nlohmann::ordered_json;

const GridletSpec* Grid::find_gridlet(GridletId id) const {
    for (const auto& g : gridlets)
        if (g.id == id) return &g;
    return nullptr;
}

const ClientSpec* Grid::find_client(ClientId id) const {
    for (const auto& c : clients)
        if (c.id == id) return &c;
    return nullptr;
}

Grid load_topology(std::string_view json_text, const std::string& source) {
    json doc = detail::parse_json(json_text, source);
    if (!doc.is_object()) throw ParseError(source, "top level must be an object");

    Grid grid;
    std::set<std::uint64_t> seen;
    auto claim = [&](std::uint64_t id, const std::string& path) {
        if (!seen.insert(id).second) throw ValidationError(source + ": " + path + ": duplicate id " + std::to_string(id));
    };

    if (auto it = doc.find("gridlets"); it != doc.end()) {
        if (!it->is_array()) throw ParseError(source + ": gridlets", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string path = source + ": gridlets[" + std::to_string(i) + "]";
            const json& g = (*it)[i];
            GridletSpec spec;
            spec.id = detail::as_uint(detail::require(g, "id", path), path + ".id");
            spec.cpu_rate = detail::as_uint(detail::require(g, "cpu_rate", path), path + ".cpu_rate");
            if (auto lat = g.find("latency"); lat != g.end()) spec.latency = detail::as_uint(*lat, path + ".latency");
            if (spec.cpu_rate < 1) throw ValidationError(path + ".cpu_rate: must be >= 1");
            claim(spec.id, path + ".id");
            grid.gridlets.push_back(spec);
        }
    }
    if (auto it = doc.find("clients"); it != doc.end()) {
        if (!it->is_array()) throw ParseError(source + ": clients", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string path = source + ": clients[" + std::to_string(i) + "]";
            const json& c = (*it)[i];
            ClientSpec spec;
            spec.id = detail::as_uint(detail::require(c, "id", path), path + ".id");
            if (auto lat = c.find("latency"); lat != c.end()) spec.latency = detail::as_uint(*lat, path + ".latency");
            claim(spec.id, path + ".id");
            grid.clients.push_back(spec);
        }
    }
    if (auto it = doc.find("costs"); it != doc.end()) {
        std::string path = source + ": costs";
        if (!it->is_object()) throw ParseError(path, "expected an object");
        auto read = [&](const char* key, std::uint64_t& slot) {
            if (auto v = it->find(key); v != it->end()) {
                slot = detail::as_uint(*v, path + "." + key);
                if (slot < 1) throw ValidationError(path + "." + key + ": must be >= 1");
            }
        };
        read("count", grid.costs.count);
        read("scan", grid.costs.scan);
        read("split", grid.costs.split);
    }
    return grid;
}

std::string format_scalar(const Scalar& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(value));
    return std::string(buf, res.ptr);
}

std::vector<DataPartition> partition_dataset(std::span<const Record> records, std::size_t p, PartitionPolicy policy,
                                             const std::string& schema_id) {
    if (p == 0) throw ValidationError("partition count must be >= 1");
    std::vector<DataPartition> parts(p);
    for (std::size_t i = 0; i < p; ++i) {
        parts[i].id = i;
        parts[i].schema_id = schema_id;
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::size_t slot = policy == PartitionPolicy::round_robin ? i % p : records[i].id % p;
        parts[slot].records.push_back(records[i]);
    }
    return parts;
}

void assign_hosts(std::span<DataPartition> partitions, const Grid& grid) {
    if (grid.gridlets.empty()) return;
    for (std::size_t i = 0; i < partitions.size(); ++i)
        partitions[i].host_gridlet = grid.gridlets[i % grid.gridlets.size()].id;
}

std::vector<Record> read_sequences(std::istream& in, const std::string& source) {
    std::vector<Record> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        Sequence seq;
        std::string_view rest(line);
        while (true) {
            auto start = rest.find_first_not_of(" \t\r");
            if (start == std::string_view::npos) break;
            rest.remove_prefix(start);
            auto end = rest.find_first_of(" \t\r");
            auto token = rest.substr(0, end);
            Item item = 0;
            auto res = std::from_chars(token.data(), token.data() + token.size(), item);
            if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
                throw ParseError(source + ":" + std::to_string(line_no),
                                 "expected a non-negative integer, got '" + std::string(token) + "'");
            seq.push_back(item);
            if (end == std::string_view::npos) break;
            rest.remove_prefix(end);
        }
        if (seq.empty()) continue;
        out.push_back(Record{out.size(), std::move(seq)});
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::optional<double> parse_number(std::string_view text) {
    double value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

}  // namespace

TupleDataset read_tuples_csv(std::istream& in, const std::string& target, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) header = split_csv_line(line);
    }
    if (header.empty()) throw ValidationError(source + ": empty dataset");

    std::size_t target_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == target) target_col = i;
    if (target_col == header.size()) throw ValidationError(source + ": missing target column '" + target + "'");

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError(source + ":" + std::to_string(line_no), "expected " + std::to_string(header.size()) +
                                                                         " fields, got " +
                                                                         std::to_string(fields.size()));
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw ValidationError(source + ": empty dataset");

    TupleDataset ds;
    ds.schema.target = target;
    std::vector<std::size_t> columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == target_col) continue;
        bool numeric = true;
        for (const auto& row : rows) numeric = numeric && parse_number(row[c]).has_value();
        columns.push_back(c);
        ds.schema.attributes.push_back(header[c]);
        ds.schema.kinds.push_back(numeric ? AttributeKind::numeric : AttributeKind::categorical);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        AttributeTuple tuple;
        tuple.label = rows[r][target_col];
        for (std::size_t a = 0; a < columns.size(); ++a) {
            const auto& text = rows[r][columns[a]];
            if (ds.schema.kinds[a] == AttributeKind::numeric)
                tuple.values.emplace_back(*parse_number(text));
            else
                tuple.values.emplace_back(text);
        }
        ds.records.push_back(Record{r, std::move(tuple)});
    }
    return ds;
}

namespace {

void append_nodes(const std::string& label, const ordered_json& value, std::vector<LabeledNode>& out, const std::string& path) {
    if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (value[i].is_array()) throw ParseError(path, "nested arrays are not allowed");
            append_nodes(label, value[i], out, path + "[" + std::to_string(i) + "]");
        }
        return;
    }
    LabeledNode node;
    node.label = label;
    if (value.is_object()) {
        for (const auto& [key, child] : value.items()) append_nodes(key, child, node.children, path + "." + key);
    } else if (value.is_number()) {
        node.value = value.get<double>();
    } else if (value.is_string()) {
        node.value = value.get<std::string>();
    } else {
        throw ParseError(path, "leaf values must be numbers or strings");
    }
    out.push_back(std::move(node));
}

LabeledTree tree_from_json(const ordered_json& obj, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "tree must be an object");
    LabeledTree tree;
    for (const auto& [key, child] : obj.items()) append_nodes(key, child, tree.roots, path + "." + key);
    return tree;
}

}  // namespace

LabeledTree tree_from_json_text(std::string_view json_text) {
    return tree_from_json(detail::parse_json<ordered_json>(json_text, "tree"), "tree");
}

std::vector<Record> read_trees_json(std::string_view json_text, const std::string& source) {
    ordered_json doc = detail::parse_json<ordered_json>(json_text, source);
    if (!doc.is_array()) throw ParseError(source, "expected an array of records");
    std::vector<Record> out;
    std::set<RecordId> ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        std::string path = source + ": [" + std::to_string(i) + "]";
        const ordered_json& entry = doc[i];
        RecordId id = i;
        if (entry.is_object() && entry.contains("id")) id = detail::as_uint(entry["id"], path + ".id");
        if (!ids.insert(id).second) throw ValidationError(path + ".id: duplicate record id " + std::to_string(id));
        out.push_back(Record{id, tree_from_json(detail::require(entry, "tree", path), path + ".tree")});
    }
    return out;
}

}  // namespace gridminer
