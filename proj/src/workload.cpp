#include "gridminer/workload.hpp"

#include <fstream>
#include <sstream>

#include "gridminer/errors.hpp"
#include "json_util.hpp"

namespace gridminer {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

Rational read_rational(const json& value, const std::string& path) {
    try {
        if (value.is_string()) return Rational::parse(value.get<std::string>());
        if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
        if (value.is_number_float()) {
            // shortest round-trip text keeps 0.1 as 1/10
            return Rational::parse(json(value).dump());
        }
    } catch (const ParseError&) {
    }
    throw ParseError(path, "expected a number or fraction");
}

PartitionPolicy read_policy(const json& job, const std::string& path) {
    auto it = job.find("policy");
    if (it == job.end()) return PartitionPolicy::round_robin;
    auto text = detail::as_string(*it, path + ".policy");
    if (text == "round_robin") return PartitionPolicy::round_robin;
    if (text == "hash_on_id") return PartitionPolicy::hash_on_id;
    throw ParseError(path + ".policy", "expected round_robin or hash_on_id");
}

std::size_t read_partitions(const json& job, const std::string& path) {
    auto it = job.find("partitions");
    if (it == job.end()) return 1;
    auto p = detail::as_uint(*it, path + ".partitions");
    if (p == 0) throw ValidationError(path + ".partitions: must be >= 1");
    return p;
}

std::uint64_t read_uint_or(const json& job, const char* key, std::uint64_t fallback, const std::string& path) {
    auto it = job.find(key);
    return it == job.end() ? fallback : detail::as_uint(*it, path + "." + key);
}

class Loader {
public:
    Loader(std::filesystem::path base, std::string source) : base_(std::move(base)), source_(std::move(source)) {}

    JobSpec job(const json& j, std::size_t index) {
        std::string path = source_ + ": jobs[" + std::to_string(index) + "]";
        JobSpec spec;
        spec.submit = detail::as_uint(detail::require(j, "submit", path), path + ".submit");
        spec.client = detail::as_uint(detail::require(j, "client", path), path + ".client");
        if (auto it = j.find("recipients"); it != j.end()) {
            if (!it->is_array() || it->empty()) throw ParseError(path + ".recipients", "expected a non-empty list");
            for (std::size_t i = 0; i < it->size(); ++i)
                spec.recipients.push_back(detail::as_uint((*it)[i], path + ".recipients[" + std::to_string(i) + "]"));
        } else {
            spec.recipients = {spec.client};
        }

        auto kind = detail::as_string(detail::require(j, "kind", path), path + ".kind");
        if (kind == "mine")
            spec.work = mine(j, path);
        else if (kind == "classify")
            spec.work = classify(j, path);
        else if (kind == "path_query")
            spec.work = path_query(j, path);
        else if (kind == "synthetic")
            spec.work = synthetic(j, path);
        else
            throw ParseError(path + ".kind", "unknown job kind '" + kind + "'");
        return spec;
    }

private:
    std::filesystem::path resolve(const json& j, const char* key, const std::string& path) {
        return base_ / detail::as_string(detail::require(j, key, path), path + "." + key);
    }

    MineJob mine(const json& j, const std::string& path) {
        MineJob job;
        auto file = resolve(j, "data", path);
        std::istringstream in(read_text_file(file));
        job.records = read_sequences(in, file.string());
        job.partitions = read_partitions(j, path);
        job.policy = read_policy(j, path);
        job.minsup = read_rational(detail::require(j, "minsup", path), path + ".minsup");
        mining::check_minsup(job.minsup);
        if (auto it = j.find("probabilistic"); it != j.end()) {
            std::string pp = path + ".probabilistic";
            if (!it->is_object()) throw ParseError(pp, "expected an object");
            MineJob::Sampling s;
            if (auto r = it->find("sample_rate"); r != it->end()) s.sample_rate = read_rational(*r, pp + ".sample_rate");
            if (auto d = it->find("delta"); d != it->end()) {
                if (!d->is_number()) throw ParseError(pp + ".delta", "expected a number");
                s.delta = d->get<double>();
            }
            if (s.sample_rate <= Rational(0) || s.sample_rate > Rational(1))
                throw ValidationError(pp + ".sample_rate: must be in (0, 1]");
            if (!(s.delta > 0.0 && s.delta < 1.0)) throw ValidationError(pp + ".delta: must be in (0, 1)");
            job.sampling = s;
        }
        return job;
    }

    ClassifyJob classify(const json& j, const std::string& path) {
        ClassifyJob job;
        auto file = resolve(j, "data", path);
        auto target = detail::as_string(detail::require(j, "target", path), path + ".target");
        std::istringstream in(read_text_file(file));
        job.data = read_tuples_csv(in, target, file.string());
        job.partitions = read_partitions(j, path);
        job.policy = read_policy(j, path);
        job.params.max_depth = read_uint_or(j, "max_depth", job.params.max_depth, path);
        job.params.min_records = read_uint_or(j, "min_records", job.params.min_records, path);
        return job;
    }

    PathQueryJob path_query(const json& j, const std::string& path) {
        PathQueryJob job;
        auto schema = detail::as_string(detail::require(j, "schema", path), path + ".schema");
        auto text = detail::as_string(detail::require(j, "query", path), path + ".query");
        job.query = query::parse_query(text, schema);
        if (j.contains("mappings")) {
            auto file = resolve(j, "mappings", path);
            job.mappings = query::load_mappings(read_text_file(file), file.string());
        }
        job.options.max_steps = read_uint_or(j, "max_steps", job.options.max_steps, path);
        const auto& sources = detail::require(j, "sources", path);
        if (!sources.is_array()) throw ParseError(path + ".sources", "expected a list");
        for (std::size_t i = 0; i < sources.size(); ++i) {
            std::string sp = path + ".sources[" + std::to_string(i) + "]";
            PathQueryJob::Source src;
            src.schema_id = detail::as_string(detail::require(sources[i], "schema", sp), sp + ".schema");
            auto file = resolve(sources[i], "data", sp);
            src.records = read_trees_json(read_text_file(file), file.string());
            src.partitions = read_partitions(sources[i], sp);
            src.policy = read_policy(sources[i], sp);
            job.sources.push_back(std::move(src));
        }
        return job;
    }

    SyntheticJob synthetic(const json& j, const std::string& path) {
        SyntheticJob job;
        job.tasks = detail::as_uint(detail::require(j, "tasks", path), path + ".tasks");
        job.cost = read_uint_or(j, "cost", 1, path);
        if (job.cost < 1) throw ValidationError(path + ".cost: must be >= 1");
        return job;
    }

    std::filesystem::path base_;
    std::string source_;
};

}  // namespace

Workload load_workload(std::string_view json_text, const std::filesystem::path& base_dir, const std::string& source) {
    json doc = detail::parse_json(json_text, source);
    const auto& jobs = detail::require(doc, "jobs", source);
    if (!jobs.is_array()) throw ParseError(source + ": jobs", "expected a list");

    Loader loader(base_dir, source);
    Workload workload;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        workload.jobs.push_back(loader.job(jobs[i], i));
        if (i > 0 && workload.jobs[i].submit < workload.jobs[i - 1].submit)
            throw ValidationError(source + ": jobs[" + std::to_string(i) + "].submit: submit times must not decrease");
    }
    return workload;
}

Workload load_workload_file(const std::filesystem::path& path) {
    return load_workload(read_text_file(path), path.parent_path(), path.string());
}

}  // namespace gridminer
