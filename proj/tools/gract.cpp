#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gract/index.hpp"
#include "gract/ingest.hpp"
#include "gract/oracle.hpp"
#include "gract/query.hpp"

using namespace gract;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BuildFlags {
    std::string input;
    std::string format = "csv";
    bool header = false;
    Instant period = 120;
    unsigned k = 2;
    unsigned perm_sample = Permutation::kDefaultSampleRate;
    double cell_size = 1.0;
    double time_step = 1.0;
    double time_origin = 0.0;
    double speed_cap = std::numeric_limits<double>::infinity();
    Instant gap = 15;
};

void add_build_flags(CLI::App& app, BuildFlags& f) {
    app.add_option("--input", f.input, "Raw records (id,time,x,y)")->required()->check(CLI::ExistingFile);
    app.add_option("--format", f.format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}))->capture_default_str();
    app.add_flag("--header", f.header, "CSV input starts with a header line");
    app.add_option("--period", f.period, "Instants between snapshots")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--k", f.k, "k2-tree arity")->check(CLI::Range(2U, 16U))->capture_default_str();
    app.add_option("--perm-sample", f.perm_sample, "Permutation back-pointer sample rate")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--cell-size", f.cell_size, "Projected units per cell")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--time-step", f.time_step, "Seconds per instant")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--time-origin", f.time_origin, "Timestamp of instant 0")->capture_default_str();
    app.add_option("--speed-cap", f.speed_cap, "Projected units per second; faster records are dropped")
        ->check(CLI::PositiveNumber);
    app.add_option("--gap", f.gap, "Instants between samples that split a trajectory")->check(CLI::Range(2, 1 << 30))
        ->capture_default_str();
}

TrajectorySet ingest(const BuildFlags& f) {
    std::vector<RawRecord> records;
    if (f.format == "csv") {
        std::ifstream in(f.input);
        if (!in) throw std::runtime_error("cannot open " + f.input);
        records = parse_csv(in, f.header);
    } else {
        std::ifstream in(f.input, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + f.input);
        const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        records = parse_binary(bytes);
    }
    NormalizeParams np;
    np.cell_size = f.cell_size;
    np.time_step = f.time_step;
    np.time_origin = f.time_origin;
    np.speed_cap = f.speed_cap;
    np.gap_threshold = f.gap;
    return to_trajectory_set(normalize(std::move(records), np));
}

IndexParams index_params(const BuildFlags& f) { return {f.period, f.k, f.perm_sample}; }

void print_stats(std::ostream& out, const IndexStats& s) {
    out << "objects " << s.objects << "\n"
        << "instants " << s.last_instant + 1 << "\n"
        << "grid_side " << s.grid_side << "\n"
        << "period " << s.period << "\n"
        << "snapshots " << s.snapshots << "\n"
        << "portions " << s.portions << "\n"
        << "max_speed " << s.max_speed << "\n"
        << "snapshot_bytes " << s.snapshot_bytes << "\n"
        << "log_bytes " << s.log_bytes << "\n"
        << "event_bytes " << s.event_bytes << "\n"
        << "dictionary_bytes " << s.dictionary_bytes << "\n"
        << "total_bytes " << s.total_bytes << "\n"
        << "raw_symbols " << s.raw_symbols << "\n"
        << "compressed_symbols " << s.compressed_symbols << "\n"
        << "events " << s.events << "\n"
        << "rules " << s.rules << "\n"
        << "grammar_depth " << s.grammar_depth << "\n";
    std::ostringstream ratio;
    ratio.precision(4);
    ratio << std::fixed << s.log_ratio;
    out << "log_ratio " << ratio.str() << "\n";
}

// Query flags shared by `query` and workload lines.
struct QueryFlags {
    std::string type;
    std::int64_t id = 0;
    Instant t = 0;
    Instant t_begin = 0;
    Instant t_end = 0;
    std::int64_t x1 = 0, y1 = 0, x2 = -1, y2 = -1;
    std::int64_t px = 0, py = 0;
    std::size_t k_nn = 1;
};

void add_query_flags(CLI::App& app, QueryFlags& f) {
    app.add_option("--type", f.type, "object | trajectory | time-slice | time-interval | knn")->required()
        ->check(CLI::IsMember({"object", "trajectory", "time-slice", "time-interval", "knn"}));
    app.add_option("--id", f.id, "Object id (object, trajectory)");
    app.add_option("--t", f.t, "Instant (object, time-slice, knn)");
    app.add_option("--t-begin", f.t_begin, "First instant (trajectory, time-interval)");
    app.add_option("--t-end", f.t_end, "Last instant (trajectory, time-interval)");
    app.add_option("--x1", f.x1, "Region west column");
    app.add_option("--y1", f.y1, "Region south row");
    app.add_option("--x2", f.x2, "Region east column");
    app.add_option("--y2", f.y2, "Region north row");
    app.add_option("--px", f.px, "knn query point x");
    app.add_option("--py", f.py, "knn query point y");
    app.add_option("--k-nn", f.k_nn, "Neighbours to return")->check(CLI::PositiveNumber);
}

Query to_query(const CLI::App& app, const QueryFlags& f) {
    Query q;
    q.type = *parse_query_type(f.type);
    auto need = [&](std::initializer_list<const char*> names) {
        for (const char* name : names) {
            if (app.count(name) == 0) throw UsageError(f.type + " query needs " + name);
        }
    };
    switch (q.type) {
        case QueryType::Object:
            need({"--id", "--t"});
            break;
        case QueryType::Trajectory:
            need({"--id", "--t-begin", "--t-end"});
            break;
        case QueryType::TimeSlice:
            need({"--x1", "--y1", "--x2", "--y2", "--t"});
            break;
        case QueryType::TimeInterval:
            need({"--x1", "--y1", "--x2", "--y2", "--t-begin", "--t-end"});
            break;
        case QueryType::Knn:
            need({"--px", "--py", "--t", "--k-nn"});
            break;
    }
    if (f.t_end < f.t_begin) throw UsageError("--t-end is before --t-begin");
    if (f.id < 0 || f.id > std::numeric_limits<ObjectId>::max()) throw UsageError("--id out of range");
    q.id = static_cast<ObjectId>(f.id);
    q.t = f.t;
    q.t_begin = f.t_begin;
    q.t_end = f.t_end;
    q.region = {f.x1, f.y1, f.x2, f.y2};
    q.point = {f.px, f.py};
    q.k = f.k_nn;
    return q;
}

// Empty answers caused by a query outside the index extent get a warning.
void warn_outside_extent(const Index& index, const Query& q) {
    auto warn = [](const std::string& what) { std::cerr << "warning: " << what << "; result is empty\n"; };
    const Region grid{0, 0, static_cast<std::int64_t>(index.grid_side()) - 1,
                      static_cast<std::int64_t>(index.grid_side()) - 1};
    const bool uses_id = q.type == QueryType::Object || q.type == QueryType::Trajectory;
    const bool uses_t = q.type == QueryType::Object || q.type == QueryType::TimeSlice || q.type == QueryType::Knn;
    const bool uses_region = q.type == QueryType::TimeSlice || q.type == QueryType::TimeInterval;
    if (uses_id && q.id >= index.object_count()) warn("object " + std::to_string(q.id) + " is not in the index");
    if (uses_t && q.t > index.last_instant()) {
        warn("instant " + std::to_string(q.t) + " is after the last instant " + std::to_string(index.last_instant()));
    }
    if (!uses_t && q.t_begin > index.last_instant()) {
        warn("interval starts after the last instant " + std::to_string(index.last_instant()));
    }
    if (uses_region && !grid.intersects(q.region)) warn("region does not intersect the grid");
}

std::string format_distance(double d) {
    std::ostringstream s;
    s.precision(6);
    s << std::fixed << d;
    return s.str();
}

void write_csv(std::ostream& out, const Query& q, const QueryAnswer& a) {
    switch (q.type) {
        case QueryType::Object:
            out << "id,t,x,y\n";
            if (a.position) out << q.id << "," << q.t << "," << a.position->x << "," << a.position->y << "\n";
            break;
        case QueryType::Trajectory:
            out << "id,t,x,y\n";
            for (const auto& tc : a.trajectory) out << q.id << "," << tc.t << "," << tc.cell.x << "," << tc.cell.y << "\n";
            break;
        case QueryType::TimeSlice:
            out << "id,x,y\n";
            for (const auto& p : a.placed) out << p.id << "," << p.cell.x << "," << p.cell.y << "\n";
            break;
        case QueryType::TimeInterval:
            out << "id\n";
            for (auto id : a.ids) out << id << "\n";
            break;
        case QueryType::Knn:
            out << "rank,id,distance\n";
            for (std::size_t i = 0; i < a.neighbors.size(); ++i) {
                out << i + 1 << "," << a.neighbors[i].id << "," << format_distance(a.neighbors[i].distance) << "\n";
            }
            break;
    }
}

void write_json(std::ostream& out, const Query& q, const QueryAnswer& a) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["type"] = to_string(q.type);
    json params;
    json results = json::array();
    switch (q.type) {
        case QueryType::Object:
            params["id"] = q.id;
            params["t"] = q.t;
            if (a.position) results.push_back({{"id", q.id}, {"t", q.t}, {"x", a.position->x}, {"y", a.position->y}});
            break;
        case QueryType::Trajectory:
            params["id"] = q.id;
            params["t_begin"] = q.t_begin;
            params["t_end"] = q.t_end;
            for (const auto& tc : a.trajectory) {
                results.push_back({{"id", q.id}, {"t", tc.t}, {"x", tc.cell.x}, {"y", tc.cell.y}});
            }
            break;
        case QueryType::TimeSlice:
        case QueryType::TimeInterval:
            params["region"] = {q.region.x1, q.region.y1, q.region.x2, q.region.y2};
            if (q.type == QueryType::TimeSlice) {
                params["t"] = q.t;
                for (const auto& p : a.placed) results.push_back({{"id", p.id}, {"x", p.cell.x}, {"y", p.cell.y}});
            } else {
                params["t_begin"] = q.t_begin;
                params["t_end"] = q.t_end;
                for (auto id : a.ids) results.push_back({{"id", id}});
            }
            break;
        case QueryType::Knn:
            params["point"] = {q.point.x, q.point.y};
            params["t"] = q.t;
            params["k"] = q.k;
            for (std::size_t i = 0; i < a.neighbors.size(); ++i) {
                results.push_back({{"rank", i + 1},
                                   {"id", a.neighbors[i].id},
                                   {"squared_distance", a.neighbors[i].squared_distance},
                                   {"distance", a.neighbors[i].distance}});
            }
            break;
    }
    doc["query"] = params;
    doc["results"] = results;
    out << doc.dump(2) << "\n";
}

int cmd_build(const BuildFlags& f, const std::string& output) {
    const TrajectorySet data = ingest(f);
    const Index index = Index::build(data, index_params(f));
    index.save(output);
    print_stats(std::cout, index.stats());
    return kOk;
}

int cmd_query(const std::string& index_path, const std::string& format, const CLI::App& app, const QueryFlags& f) {
    const Query q = to_query(app, f);
    const Index index = Index::load(index_path);
    warn_outside_extent(index, q);
    const QueryAnswer a = run_query(index, q);
    if (format == "json") {
        write_json(std::cout, q, a);
    } else {
        write_csv(std::cout, q, a);
    }
    return kOk;
}

std::vector<Query> read_workload(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Query> out;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        CLI::App parser{"workload line"};
        QueryFlags f;
        add_query_flags(parser, f);
        try {
            parser.parse(line, false);
            out.push_back(to_query(parser, f));
        } catch (const std::exception& e) {
            throw UsageError(path + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return out;
}

int cmd_bench(const std::string& index_path, const std::string& workload, unsigned repeat) {
    const auto queries = read_workload(workload);
    const Index index = Index::load(index_path);
    std::map<QueryType, std::vector<double>> micros;
    std::map<QueryType, std::size_t> results;
    for (unsigned r = 0; r < repeat; ++r) {
        for (const auto& q : queries) {
            const auto start = std::chrono::steady_clock::now();
            const QueryAnswer a = run_query(index, q);
            const auto stop = std::chrono::steady_clock::now();
            micros[q.type].push_back(std::chrono::duration<double, std::micro>(stop - start).count());
            results[q.type] += a.size();
        }
    }
    std::cout << "type,count,mean_us,median_us,p95_us,results\n";
    for (auto type : kAllQueryTypes) {
        auto it = micros.find(type);
        if (it == micros.end()) continue;
        auto& v = it->second;
        std::sort(v.begin(), v.end());
        double sum = 0;
        for (double x : v) sum += x;
        const std::size_t n = v.size();
        const double median = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
        const double p95 = v[std::min(n - 1, static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n))) - 1)];
        std::cout << to_string(type) << "," << n << "," << format_distance(sum / static_cast<double>(n)) << ","
                  << format_distance(median) << "," << format_distance(p95) << "," << results[type] << "\n";
    }
    return kOk;
}

int cmd_verify(const BuildFlags& f, std::size_t queries, std::uint64_t seed, bool inject_fault) {
    const TrajectorySet data = ingest(f);
    Index index = Index::build(data, index_params(f));
    if (inject_fault && !index.inject_snapshot_fault()) {
        std::cerr << "warning: first snapshot has fewer than two objects; no fault injected\n";
    }
    const Oracle oracle(data);
    std::mt19937_64 rng(seed);
    for (auto type : kAllQueryTypes) {
        for (std::size_t i = 0; i < queries; ++i) {
            const Query q = random_query(type, data.object_count(), data.last_instant, data.grid_side, rng);
            const QueryAnswer got = run_query(index, q);
            const QueryAnswer want = run_query(oracle, q);
            if (!same_answer(got, want)) {
                std::cout << "FAIL " << to_string(type) << " query " << i + 1 << " of " << queries << " (seed " << seed
                          << ")\n"
                          << "query: " << q.to_flags() << "\n"
                          << "index: " << got.to_string() << "\n"
                          << "oracle: " << want.to_string() << "\n";
                return kFailure;
            }
        }
    }
    std::cout << "PASS 5×" << queries << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed trajectory index: build, query, stats, bench, verify"};
    app.require_subcommand(1);

    BuildFlags build_flags;
    std::string output;
    auto* build = app.add_subcommand("build", "Ingest raw records and write an index file; prints its statistics");
    add_build_flags(*build, build_flags);
    build->add_option("--output", output, "Index file to write")->required();

    std::string index_path;
    std::string out_format = "csv";
    QueryFlags query_flags;
    auto* query = app.add_subcommand("query", "Run one query against an index file");
    query->add_option("--index", index_path, "Index file")->required()->check(CLI::ExistingFile);
    add_query_flags(*query, query_flags);
    query->add_option("--out", out_format, "csv or json")->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    query->footer(
        "CSV columns by type:\n"
        "  object, trajectory: id,t,x,y (ascending t)\n"
        "  time-slice:         id,x,y (ascending id)\n"
        "  time-interval:      id (ascending id)\n"
        "  knn:                rank,id,distance (ascending distance, then id)\n"
        "JSON: {\"type\", \"query\", \"results\"} with the same rows as objects, keys in that order.\n"
        "Queries outside the index extent give an empty result and a warning on stderr.");

    std::string stats_path;
    auto* stats = app.add_subcommand("stats", "Print the size breakdown of an index file");
    stats->add_option("--index", stats_path, "Index file")->required()->check(CLI::ExistingFile);

    std::string bench_index;
    std::string workload;
    unsigned repeat = 1;
    auto* bench = app.add_subcommand("bench", "Time a workload; CSV of latency per query type on stdout");
    bench->add_option("--index", bench_index, "Index file")->required()->check(CLI::ExistingFile);
    bench->add_option("--workload", workload, "One query per line, using the query flags")->required()
        ->check(CLI::ExistingFile);
    bench->add_option("--repeat", repeat, "Runs of the whole workload")->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->footer("Columns: type,count,mean_us,median_us,p95_us,results. count is executions, results the "
                  "summed answer sizes. Blank lines and lines starting with # are skipped.");

    BuildFlags verify_flags;
    std::size_t queries = 200;
    std::uint64_t seed = 1;
    bool inject_fault = false;
    auto* verify = app.add_subcommand("verify", "Build an index and compare random queries with a brute-force scan");
    add_build_flags(*verify, verify_flags);
    verify->add_option("--queries", queries, "Random queries per type")->capture_default_str();
    verify->add_option("--seed", seed, "Random seed")->capture_default_str();
    verify->add_flag("--inject-fault", inject_fault, "Corrupt the first snapshot before querying");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*build) return cmd_build(build_flags, output);
        if (*query) return cmd_query(index_path, out_format, *query, query_flags);
        if (*stats) {
            print_stats(std::cout, Index::load(stats_path).stats());
            return kOk;
        }
        if (*bench) return cmd_bench(bench_index, workload, repeat);
        if (*verify) return cmd_verify(verify_flags, queries, seed, inject_fault);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}
