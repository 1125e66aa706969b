#include "gridminer/query.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <set>
#include <tuple>

#include "gridminer/errors.hpp"
#include "json_util.hpp"

namespace gridminer::query {

namespace {

Scalar parse_literal(std::string_view text) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
        return std::string(text.substr(1, text.size() - 2));
    double value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (!text.empty() && res.ec == std::errc{} && res.ptr == text.data() + text.size() && std::isfinite(value))
        return value;
    return std::string(text);
}

bool is_prefix(const Path& prefix, const Path& steps) {
    return prefix.size() <= steps.size() && std::equal(prefix.begin(), prefix.end(), steps.begin());
}

}  // namespace

PathQuery parse_query(std::string_view text, std::string schema_id) {
    auto fail = [&](const std::string& why) { return ParseError("query '" + std::string(text) + "'", why); };
    PathQuery q;
    q.schema_id = std::move(schema_id);

    std::string_view path = text;
    if (auto open = text.find('['); open != std::string_view::npos) {
        if (text.back() != ']') throw fail("predicate must end with ']'");
        auto body = text.substr(open + 1, text.size() - open - 2);
        path = text.substr(0, open);
        if (body.empty()) throw fail("empty predicate");
        Predicate pred;
        switch (body.front()) {
            case '=': pred.op = Comparator::eq; break;
            case '<': pred.op = Comparator::lt; break;
            case '>': pred.op = Comparator::gt; break;
            default: throw fail("predicate must start with =, < or >");
        }
        body.remove_prefix(1);
        if (body.empty()) throw fail("missing literal");
        pred.literal = parse_literal(body);
        q.predicate = std::move(pred);
    }
    if (path.empty() || path.front() != '/') throw fail("path must start with '/'");
    path.remove_prefix(1);
    while (true) {
        auto slash = path.find('/');
        auto label = path.substr(0, slash);
        if (label.empty()) throw fail("empty label");
        if (label.find_first_of("[]") != std::string_view::npos) throw fail("stray bracket in label");
        q.steps.emplace_back(label);
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash + 1);
    }
    return q;
}

std::string format_query(const PathQuery& q) {
    std::string out;
    for (const auto& step : q.steps) out += "/" + step;
    if (q.predicate) {
        out += '[';
        out += q.predicate->op == Comparator::eq ? '=' : q.predicate->op == Comparator::lt ? '<' : '>';
        const auto& lit = q.predicate->literal;
        if (const auto* s = std::get_if<std::string>(&lit)) {
            // quote strings that would otherwise read back as numbers
            bool numeric_looking = std::holds_alternative<double>(parse_literal(*s));
            out += numeric_looking ? "\"" + *s + "\"" : *s;
        } else {
            out += format_scalar(lit);
        }
        out += ']';
    }
    return out;
}

std::vector<SchemaMapping> load_mappings(std::string_view json_text, const std::string& source) {
    auto doc = detail::parse_json(json_text, source);
    if (!doc.is_array()) throw ParseError(source, "expected a list of mappings");
    auto read_path = [](const nlohmann::json& j, const std::string& where) {
        if (!j.is_array() || j.empty()) throw ParseError(where, "path must be a non-empty list of labels");
        Path p;
        for (std::size_t i = 0; i < j.size(); ++i) {
            p.push_back(detail::as_string(j[i], where + "[" + std::to_string(i) + "]"));
            if (p.back().empty()) throw ValidationError(where + ": empty label");
        }
        return p;
    };

    std::vector<SchemaMapping> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        std::string where = source + ": [" + std::to_string(i) + "]";
        const auto& m = doc[i];
        SchemaMapping mapping;
        mapping.from_schema = detail::as_string(detail::require(m, "from", where), where + ".from");
        mapping.to_schema = detail::as_string(detail::require(m, "to", where), where + ".to");
        if (mapping.from_schema == mapping.to_schema)
            throw ValidationError(where + ": mapping from a schema to itself ('" + mapping.from_schema + "')");
        const auto& pairs = detail::require(m, "pairs", where);
        if (!pairs.is_array()) throw ParseError(where + ".pairs", "expected a list");
        std::set<Path> sources;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            std::string pw = where + ".pairs[" + std::to_string(k) + "]";
            if (!pairs[k].is_array() || pairs[k].size() != 2) throw ParseError(pw, "expected [source, target]");
            auto src = read_path(pairs[k][0], pw + "[0]");
            auto dst = read_path(pairs[k][1], pw + "[1]");
            if (!sources.insert(src).second) throw ValidationError(pw + ": duplicate source path");
            mapping.pairs.emplace_back(std::move(src), std::move(dst));
        }
        out.push_back(std::move(mapping));
    }
    return out;
}

std::vector<PathQuery> reformulate(const PathQuery& q, std::span<const SchemaMapping> mappings,
                                   const ReformulateOptions& options) {
    using State = std::pair<std::string, Path>;
    std::set<State> visited{{q.schema_id, q.steps}};
    std::deque<State> frontier{{q.schema_id, q.steps}};

    while (!frontier.empty()) {
        State current = std::move(frontier.front());
        frontier.pop_front();
        for (const auto& mapping : mappings) {
            if (mapping.from_schema != current.first) continue;
            for (const auto& [src, dst] : mapping.pairs) {
                if (!is_prefix(src, current.second)) continue;
                std::size_t len = dst.size() + current.second.size() - src.size();
                if (len > options.max_steps) continue;
                Path steps = dst;
                steps.insert(steps.end(), current.second.begin() + static_cast<std::ptrdiff_t>(src.size()),
                             current.second.end());
                State next{mapping.to_schema, std::move(steps)};
                if (visited.insert(next).second) frontier.push_back(std::move(next));
            }
        }
    }

    std::vector<PathQuery> out;
    for (const auto& [schema, steps] : visited) {
        if (schema == q.schema_id && steps == q.steps) continue;
        out.push_back(PathQuery{schema, steps, q.predicate});
    }
    return out;  // std::set iteration is already (schema, steps) order
}

ExecutionPlan plan(const PathQuery& q, std::span<const SchemaMapping> mappings,
                   std::span<const DataPartition> partitions, std::uint64_t scan_cost,
                   const ReformulateOptions& options) {
    ExecutionPlan result;
    result.original = q;
    result.reformulations = reformulate(q, mappings, options);

    auto add = [&](const PathQuery& query) {
        for (const auto& part : partitions) {
            if (part.schema_id != query.schema_id) continue;
            std::uint64_t cost = std::max<std::uint64_t>(1, scan_cost * part.records.size());
            result.sub_queries.push_back(SubQuery{query, part.id, cost});
        }
    };
    add(q);
    for (const auto& r : result.reformulations) add(r);
    return result;
}

namespace {

enum class Verdict { no, yes, mismatch };

Verdict test_predicate(const std::optional<Scalar>& value, const Predicate& pred) {
    if (!value || value->index() != pred.literal.index()) return Verdict::mismatch;
    auto cmp = [&](const auto& a, const auto& b) {
        switch (pred.op) {
            case Comparator::eq: return a == b;
            case Comparator::lt: return a < b;
            case Comparator::gt: return a > b;
        }
        return false;
    };
    bool holds = std::visit(
        [&](const auto& lhs) {
            using T = std::decay_t<decltype(lhs)>;
            return cmp(lhs, std::get<T>(pred.literal));
        },
        *value);
    return holds ? Verdict::yes : Verdict::no;
}

void collect(const LabeledNode& node, const Path& steps, std::size_t depth, std::vector<const LabeledNode*>& out) {
    if (node.label != steps[depth]) return;
    if (depth + 1 == steps.size()) {
        out.push_back(&node);
        return;
    }
    for (const auto& child : node.children) collect(child, steps, depth + 1, out);
}

}  // namespace

SubQueryResult eval_subquery(const PathQuery& q, const DataPartition& part) {
    SubQueryResult result;
    if (q.steps.empty()) return result;
    for (const auto& record : part.records) {
        const auto* tree = std::get_if<LabeledTree>(&record.body);
        if (!tree) throw TaskError("partition " + std::to_string(part.id) + " does not hold labeled trees");

        std::vector<const LabeledNode*> hits;
        for (const auto& root : tree->roots) collect(root, q.steps, 0, hits);
        if (hits.empty()) continue;

        if (!q.predicate) {
            result.matches.push_back({record.id, hits.front()->value});
            continue;
        }
        bool mismatch = std::any_of(hits.begin(), hits.end(), [&](const LabeledNode* n) {
            return test_predicate(n->value, *q.predicate) == Verdict::mismatch;
        });
        if (mismatch) {
            ++result.skipped;
            continue;
        }
        for (const auto* n : hits) {
            if (test_predicate(n->value, *q.predicate) == Verdict::yes) {
                result.matches.push_back({record.id, n->value});
                break;
            }
        }
    }
    std::stable_sort(result.matches.begin(), result.matches.end(),
                     [](const Match& a, const Match& b) { return a.record_id < b.record_id; });
    return result;
}

}  // namespace gridminer::query
