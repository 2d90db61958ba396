#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mwhardy/czo.hpp"
#include "mwhardy/library.hpp"

namespace mwhardy {

inline constexpr int kSchemaVersion = 1;

/// Parsed run configuration. Every field is range-checked by parse_config.
struct RunConfig {
    std::string command;
    Grid grid;
    nlohmann::json weight;   // weight family document
    nlohmann::json function; // function family document, may be null
    double p = 1.0;
    double q = kInfinity;
    int s = 0;
    double a = 1.0, b = 0.25, l = 2.0;
    int N = 1;
    int dictionary_size = 12;
    std::optional<double> alpha;     // absolute level
    std::optional<double> alpha_fraction; // of the proxy maximum
    std::vector<int> levels{-4, -1}; // ladder j range for czd
    int atom_levels = 16;
    double eta = 0.0;
    nlohmann::json kernel = "hilbert";
    int atoms = 20;
    double min_edge = 0.0, max_edge = 0.0; // 0 selects 4h and L
    bool all_offsets = false;
    std::string mode = "pointwise";
    ReducingStrategy strategy = ReducingStrategy::Auto;
    bool acceptance = false;
    std::uint64_t seed = 0;
};

/// Throws SchemaError on any malformed or out-of-range field.
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);

MatrixWeight weight_from_json(const Grid& g, const nlohmann::json& spec);
FunctionSpec function_from_json(const nlohmann::json& spec, int n, int m);
Kernel kernel_from_json(const nlohmann::json& spec, int n);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::string name; // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Assertion {
    std::string name;
    bool passed = true;
    std::string detail;
    nlohmann::json witness;
};

struct Report {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json config;
    nlohmann::json constants = nlohmann::json::object();
    std::vector<Table> tables;
    std::vector<Assertion> assertions;
    std::vector<std::pair<std::string, std::string>> files; // extra outputs: name, bytes
    double seconds = 0.0;

    bool passed() const;
};

Report run(const RunConfig& config);

/// Scalar-oracle cross-check; PreconditionError for m > 1.
Report oracle_scalar(const RunConfig& config);

/// %.17g with '.' as decimal separator.
std::string format_number(double v);
std::string to_csv(const Table& t);

/// One CSV per table, summary.json, and witness.json when an assertion failed.
void write_report(const Report& report, const std::filesystem::path& dir);

} // namespace mwhardy
