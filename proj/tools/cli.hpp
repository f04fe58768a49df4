#pragma once

#include "jost/analysis.hpp"
#include "jost/expansion.hpp"
#include "jost/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace jost::cli {

using json = nlohmann::json;

enum ExitCode : int { ok = 0, usage_error = 2, numerical_error = 3 };

/// Malformed configuration, expansion file or command-line value.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeedSpec {
    cplx energy;
    SheetSelector sheet;
};

struct SpectrumBlock {
    std::optional<std::pair<double, double>> interval;
    double samples_per_unit = 400.0;
    std::vector<SeedSpec> seeds;
    std::string table;  // optional expansion file used instead of the direct solver
};

struct ScanBlock {
    double from = 0.2, to = 12.0, step = 0.02;
};

struct ExpandBlock {
    cplx center{5.0, 0.0};
    int order = 5;
};

struct EvalBlock {
    std::string table;
    std::optional<cplx> energy;
    std::optional<SheetSelector> sheet;
};

struct AccuracyBlock {
    std::string table;
    EnergyGrid grid;
    std::optional<SheetSelector> sheet;
};

struct DomainBlock {
    EnergyGrid grid;
};

struct RunConfig {
    ChannelSet channels;
    std::shared_ptr<const RadialPotential> potential;
    SolverSettings solver;
    SpectrumBlock spectrum;
    ScanBlock scan;
    ExpandBlock expand;
    EvalBlock eval;
    AccuracyBlock accuracy_map;
    DomainBlock domain;
    std::filesystem::path base_dir;
};

/// Reads a JSON document; ConfigError on I/O or syntax problems.
json load_json_file(const std::filesystem::path& path);

/// Applies "dotted.path=value"; the value is parsed as JSON, falling back to a string.
void apply_override(json& doc, const std::string& assignment);

/// Validates the document (unknown keys rejected) and builds the run configuration.
/// Relative file names are resolved against `base_dir`.
RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir = {});

json table_to_json(const ExpansionTable& table);
ExpansionTable table_from_json(const json& doc);
ExpansionTable load_table(const std::filesystem::path& path);

/// "re,im" or "re".
cplx parse_energy(const std::string& text);

/// Runs the command line; returns the process exit code. Normal output goes to `out`
/// unless --out is given, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jost::cli
