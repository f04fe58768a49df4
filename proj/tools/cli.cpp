#include "cli.hpp"

#include "jost/errors.hpp"
#include "jost/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace jost::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
        if (!known) fail(where, "unknown key '" + item.key() + "'");
    }
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "expected a finite number");
    return v;
}

int get_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

cplx get_complex(const json& j, const std::string& where) {
    if (j.is_number()) return {get_number(j, where), 0.0};
    if (!j.is_array() || j.size() != 2) fail(where, "expected a number or a [re, im] pair");
    return {get_number(j[0], where + "[0]"), get_number(j[1], where + "[1]")};
}

std::pair<double, double> get_range(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) fail(where, "expected a [from, to] pair");
    const double a = get_number(j[0], where + "[0]");
    const double b = get_number(j[1], where + "[1]");
    if (!(b >= a)) fail(where, "range must be ordered");
    return {a, b};
}

SheetSelector get_sheet(const std::string& text, const std::string& where, std::size_t channels) {
    SheetSelector s;
    try {
        s = SheetSelector::parse(text);
    } catch (const Error& e) {
        fail(where, e.what());
    }
    if (s.size() != channels) fail(where, "sheet '" + text + "' does not match the channel count");
    return s;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& where, std::size_t n) {
    if (!j.is_array() || j.size() != n) fail(where, "expected an " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (!j[r].is_array() || j[r].size() != n) fail(where, "row " + std::to_string(r) + " has the wrong length");
        for (std::size_t c = 0; c < n; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                get_number(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

EnergyGrid get_grid(const json& j, const std::string& where, EnergyGrid grid) {
    check_keys(j, where, {"re", "im", "n_re", "n_im"});
    if (j.contains("re")) std::tie(grid.re_min, grid.re_max) = get_range(j["re"], where + ".re");
    if (j.contains("im")) std::tie(grid.im_min, grid.im_max) = get_range(j["im"], where + ".im");
    if (j.contains("n_re")) grid.n_re = get_int(j["n_re"], where + ".n_re");
    if (j.contains("n_im")) grid.n_im = get_int(j["n_im"], where + ".n_im");
    try {
        grid.validate();
    } catch (const Error& e) {
        fail(where, e.what());
    }
    return grid;
}

ChannelSet parse_channels(const json& doc) {
    if (!doc.contains("channels")) fail("config", "missing 'channels'");
    const json& list = doc["channels"];
    if (!list.is_array() || list.empty()) fail("channels", "expected a non-empty list");
    std::vector<Channel> channels;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "channels[" + std::to_string(i) + "]";
        check_keys(list[i], where, {"threshold", "mass", "l"});
        Channel c;
        if (list[i].contains("threshold")) c.threshold = get_number(list[i]["threshold"], where + ".threshold");
        if (list[i].contains("mass")) c.reduced_mass = get_number(list[i]["mass"], where + ".mass");
        if (list[i].contains("l")) c.angular_momentum = get_int(list[i]["l"], where + ".l");
        channels.push_back(c);
    }
    const double hbar = doc.contains("hbar") ? get_number(doc["hbar"], "hbar") : 1.0;
    try {
        return ChannelSet(std::move(channels), hbar);
    } catch (const Error& e) {
        fail("channels", e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
    const std::filesystem::path p(file);
    return p.is_absolute() || base.empty() ? p : base / p;
}

std::shared_ptr<const RadialPotential> parse_potential(const json& j, std::size_t n,
                                                       const std::filesystem::path& base) {
    if (!j.is_object()) fail("potential", "expected an object");
    if (!j.contains("type")) fail("potential", "missing 'type'");
    const std::string type = get_string(j["type"], "potential.type");
    std::shared_ptr<const RadialPotential> p;
    try {
        if (type == "noro_taylor") {
            check_keys(j, "potential", {"type", "radius_scale"});
            if (n != 2) fail("potential", "noro_taylor needs two channels");
            p = std::make_shared<NoroTaylorPotential>();
        } else if (type == "zero") {
            check_keys(j, "potential", {"type", "radius_scale"});
            p = std::make_shared<ZeroPotential>(n);
        } else if (type == "exponential") {
            check_keys(j, "potential", {"type", "strength", "power", "decay", "radius_scale"});
            if (!j.contains("strength")) fail("potential", "missing 'strength'");
            const Eigen::MatrixXd strength = get_matrix(j["strength"], "potential.strength", n);
            const double power = j.contains("power") ? get_number(j["power"], "potential.power") : 0.0;
            if (!j.contains("decay")) fail("potential", "missing 'decay'");
            if (j["decay"].is_number())
                p = std::make_shared<ExponentialPotential>(strength, power, get_number(j["decay"], "potential.decay"));
            else
                p = std::make_shared<ExponentialPotential>(strength, power,
                                                           get_matrix(j["decay"], "potential.decay", n));
        } else if (type == "table") {
            check_keys(j, "potential", {"type", "file", "radius_scale"});
            if (!j.contains("file")) fail("potential", "missing 'file'");
            std::shared_ptr<const TabulatedPotential> table =
                TabulatedPotential::load(resolve(base, get_string(j["file"], "potential.file")));
            if (table->channels() != n) fail("potential", "table channel count does not match 'channels'");
            p = table;
        } else {
            fail("potential.type", "unknown potential '" + type + "'");
        }
        if (j.contains("radius_scale"))
            p = std::make_shared<ScaledRadiusPotential>(p, get_number(j["radius_scale"], "potential.radius_scale"));
    } catch (const Error& e) {
        fail("potential", e.what());
    }
    return p;
}

SolverSettings parse_solver(const json& doc) {
    SolverSettings s;
    if (!doc.contains("solver")) return s;
    const json& j = doc["solver"];
    check_keys(j, "solver", {"r_min", "R", "theta", "rel_tol", "abs_tol", "max_steps"});
    if (j.contains("r_min")) s.r_min = get_number(j["r_min"], "solver.r_min");
    if (j.contains("R")) s.R = get_number(j["R"], "solver.R");
    if (j.contains("theta")) {
        if (j["theta"].is_string()) {
            if (j["theta"] != "auto") fail("solver.theta", "expected a number or \"auto\"");
        } else {
            s.theta = get_number(j["theta"], "solver.theta");
        }
    }
    if (j.contains("rel_tol")) s.rel_tol = get_number(j["rel_tol"], "solver.rel_tol");
    if (j.contains("abs_tol")) s.abs_tol = get_number(j["abs_tol"], "solver.abs_tol");
    if (j.contains("max_steps")) {
        const int steps = get_int(j["max_steps"], "solver.max_steps");
        if (steps <= 0) fail("solver.max_steps", "must be positive");
        s.max_steps = static_cast<std::size_t>(steps);
    }
    try {
        s.validate();
    } catch (const Error& e) {
        fail("solver", e.what());
    }
    return s;
}

json solver_to_json(const SolverSettings& s) {
    json j = {{"r_min", s.r_min}, {"R", s.R}, {"rel_tol", s.rel_tol}, {"abs_tol", s.abs_tol},
              {"max_steps", s.max_steps}};
    if (s.theta)
        j["theta"] = *s.theta;
    else
        j["theta"] = "auto";
    return j;
}

json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where, std::size_t n) {
    if (!j.is_array() || j.size() != n) fail(where, "expected " + std::to_string(n) + " rows");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (!j[r].is_array() || j[r].size() != n) fail(where, "row " + std::to_string(r) + " has the wrong length");
        for (std::size_t c = 0; c < n; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                get_complex(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError("override key '" + key + "' descends into a non-object");
            *node = json::object();
        }
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc, "config",
               {"channels", "hbar", "potential", "solver", "spectrum", "scan", "expand", "eval", "accuracy_map",
                "domain"});
    ChannelSet cs = parse_channels(doc);
    if (!doc.contains("potential")) fail("config", "missing 'potential'");
    auto potential = parse_potential(doc["potential"], cs.size(), base_dir);
    RunConfig cfg{cs, potential, parse_solver(doc), {}, {}, {}, {}, {}, {}, base_dir};
    const std::size_t n = cs.size();

    if (doc.contains("spectrum")) {
        const json& j = doc["spectrum"];
        check_keys(j, "spectrum", {"interval", "samples_per_unit", "seeds", "table"});
        if (j.contains("interval")) {
            cfg.spectrum.interval = get_range(j["interval"], "spectrum.interval");
            if (!(cfg.spectrum.interval->second > cfg.spectrum.interval->first))
                fail("spectrum.interval", "must have positive length");
        }
        if (j.contains("samples_per_unit")) {
            cfg.spectrum.samples_per_unit = get_number(j["samples_per_unit"], "spectrum.samples_per_unit");
            if (!(cfg.spectrum.samples_per_unit > 0.0)) fail("spectrum.samples_per_unit", "must be positive");
        }
        if (j.contains("seeds")) {
            if (!j["seeds"].is_array()) fail("spectrum.seeds", "expected a list");
            for (std::size_t i = 0; i < j["seeds"].size(); ++i) {
                const std::string where = "spectrum.seeds[" + std::to_string(i) + "]";
                const json& s = j["seeds"][i];
                check_keys(s, where, {"energy", "sheet"});
                if (!s.contains("energy")) fail(where, "missing 'energy'");
                const SheetSelector sheet = s.contains("sheet")
                                                ? get_sheet(get_string(s["sheet"], where + ".sheet"), where + ".sheet", n)
                                                : physical_sheet(cs);
                cfg.spectrum.seeds.push_back({get_complex(s["energy"], where + ".energy"), sheet});
            }
        }
        if (j.contains("table")) cfg.spectrum.table = get_string(j["table"], "spectrum.table");
    }
    if (doc.contains("scan")) {
        const json& j = doc["scan"];
        check_keys(j, "scan", {"range", "step"});
        if (j.contains("range")) std::tie(cfg.scan.from, cfg.scan.to) = get_range(j["range"], "scan.range");
        if (j.contains("step")) cfg.scan.step = get_number(j["step"], "scan.step");
        if (!(cfg.scan.step > 0.0)) fail("scan.step", "must be positive");
    }
    if (doc.contains("expand")) {
        const json& j = doc["expand"];
        check_keys(j, "expand", {"center", "order"});
        if (j.contains("center")) cfg.expand.center = get_complex(j["center"], "expand.center");
        if (j.contains("order")) cfg.expand.order = get_int(j["order"], "expand.order");
        if (cfg.expand.order < 0) fail("expand.order", "must be non-negative");
    }
    if (doc.contains("eval")) {
        const json& j = doc["eval"];
        check_keys(j, "eval", {"table", "energy", "sheet"});
        if (j.contains("table")) cfg.eval.table = get_string(j["table"], "eval.table");
        if (j.contains("energy")) cfg.eval.energy = get_complex(j["energy"], "eval.energy");
        if (j.contains("sheet")) cfg.eval.sheet = get_sheet(get_string(j["sheet"], "eval.sheet"), "eval.sheet", n);
    }
    cfg.accuracy_map.grid = EnergyGrid{4.0, 6.0, -1.0, 1.0, 101, 101};
    if (doc.contains("accuracy_map")) {
        const json& j = doc["accuracy_map"];
        check_keys(j, "accuracy_map", {"table", "grid", "sheet"});
        if (j.contains("table")) cfg.accuracy_map.table = get_string(j["table"], "accuracy_map.table");
        if (j.contains("grid")) cfg.accuracy_map.grid = get_grid(j["grid"], "accuracy_map.grid", cfg.accuracy_map.grid);
        if (j.contains("sheet"))
            cfg.accuracy_map.sheet =
                get_sheet(get_string(j["sheet"], "accuracy_map.sheet"), "accuracy_map.sheet", n);
    }
    cfg.domain.grid = EnergyGrid{-1.0, 12.0, -4.0, 4.0, 131, 2};
    if (doc.contains("domain")) {
        const json& j = doc["domain"];
        check_keys(j, "domain", {"grid"});
        if (j.contains("grid")) cfg.domain.grid = get_grid(j["grid"], "domain.grid", cfg.domain.grid);
    }
    return cfg;
}

json table_to_json(const ExpansionTable& table) {
    json channels = json::array();
    for (const auto& c : table.channels.channels())
        channels.push_back({{"threshold", c.threshold}, {"mass", c.reduced_mass}, {"l", c.angular_momentum}});
    json a = json::array(), b = json::array();
    for (const auto& m : table.a) a.push_back(matrix_to_json(m));
    for (const auto& m : table.b) b.push_back(matrix_to_json(m));
    return {{"format", "jost-expansion"},
            {"version", 1},
            {"center", complex_to_json(table.center)},
            {"order", table.order},
            {"hbar", table.channels.hbar()},
            {"channels", channels},
            {"potential", table.potential},
            {"solver", solver_to_json(table.settings)},
            {"a", a},
            {"b", b}};
}

ExpansionTable table_from_json(const json& doc) {
    check_keys(doc, "table", {"format", "version", "center", "order", "hbar", "channels", "potential", "solver", "a", "b"});
    for (const char* key : {"format", "version", "center", "order", "channels", "a", "b"})
        if (!doc.contains(key)) fail("table", std::string("missing '") + key + "'");
    if (get_string(doc["format"], "table.format") != "jost-expansion") fail("table.format", "not an expansion table");
    if (get_int(doc["version"], "table.version") != 1) fail("table.version", "unsupported version");
    json channel_doc = {{"channels", doc["channels"]}};
    if (doc.contains("hbar")) channel_doc["hbar"] = doc["hbar"];
    ChannelSet cs = parse_channels(channel_doc);
    const int order = get_int(doc["order"], "table.order");
    if (order < 0) fail("table.order", "must be non-negative");
    const auto terms = static_cast<std::size_t>(order) + 1;
    if (!doc["a"].is_array() || doc["a"].size() != terms || !doc["b"].is_array() || doc["b"].size() != terms)
        fail("table", "coefficient lists must have order + 1 entries");
    SolverSettings settings;
    if (doc.contains("solver")) settings = parse_solver(json{{"solver", doc["solver"]}});
    ExpansionTable table{get_complex(doc["center"], "table.center"),
                         order,
                         {},
                         {},
                         settings,
                         cs,
                         doc.contains("potential") ? get_string(doc["potential"], "table.potential") : ""};
    for (std::size_t i = 0; i < terms; ++i) {
        table.a.push_back(matrix_from_json(doc["a"][i], "table.a[" + std::to_string(i) + "]", cs.size()));
        table.b.push_back(matrix_from_json(doc["b"][i], "table.b[" + std::to_string(i) + "]", cs.size()));
    }
    return table;
}

ExpansionTable load_table(const std::filesystem::path& path) {
    return table_from_json(load_json_file(path));
}

cplx parse_energy(const std::string& text) {
    const auto comma = text.find(',');
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v)) throw ConfigError("bad energy '" + text + "'");
        return v;
    };
    if (comma == std::string::npos) return {number(text), 0.0};
    return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
}

namespace {

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    unsigned jobs = default_jobs();
    std::string out;
    std::string table;
    std::string energy;
    std::string sheet;
};

RunConfig load_run_config(const Options& o) {
    if (o.config.empty()) throw ConfigError("--config is required for this command");
    const std::filesystem::path path(o.config);
    json doc = load_json_file(path);
    for (const auto& ov : o.overrides) apply_override(doc, ov);
    return parse_config(doc, path.parent_path());
}

// Table path from the command line (relative to the working directory) or the config.
std::filesystem::path table_path(const Options& o, const std::string& from_config, const RunConfig* cfg,
                                 const char* what) {
    if (!o.table.empty()) return o.table;
    if (!from_config.empty()) return resolve(cfg ? cfg->base_dir : std::filesystem::path{}, from_config);
    throw ConfigError(std::string(what) + " needs an expansion table (--table or config)");
}

void require_same_channels(const ChannelSet& a, const ChannelSet& b) {
    bool same = a.size() == b.size() && a.hbar() == b.hbar();
    for (std::size_t n = 0; same && n < a.size(); ++n)
        same = a[n].threshold == b[n].threshold && a[n].reduced_mass == b[n].reduced_mass &&
               a[n].angular_momentum == b[n].angular_momentum;
    if (!same) throw ConfigError("expansion table channels do not match the configuration");
}

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_run_config(o);
    std::unique_ptr<JostSource> source;
    if (!cfg.spectrum.table.empty()) {
        ExpansionTable table = load_table(resolve(cfg.base_dir, cfg.spectrum.table));
        require_same_channels(table.channels, cfg.channels);
        source = std::make_unique<ExpansionSource>(std::move(table), cfg.spectrum.table);
    } else {
        source = std::make_unique<DirectSource>(cfg.channels, *cfg.potential, cfg.solver);
    }

    std::vector<SpectralPoint> points;
    if (cfg.spectrum.interval) {
        ScanSettings scan;
        scan.samples_per_unit = cfg.spectrum.samples_per_unit;
        scan.jobs = o.jobs;
        points = bound_state_scan(*source, cfg.spectrum.interval->first, cfg.spectrum.interval->second, scan);
    }

    const auto& seeds = cfg.spectrum.seeds;
    std::vector<std::optional<SpectralPoint>> found(seeds.size());
    std::vector<std::string> failures(seeds.size());
    parallel_for(seeds.size(), o.jobs, [&](std::size_t i) {
        try {
            found[i] = find_spectral_point(*source, seeds[i].energy, seeds[i].sheet);
        } catch (const Error& e) {
            failures[i] = e.what();
        }
    });
    int code = ok;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!found[i]) {
            err << "seed " << i << " (" << seeds[i].energy << ", " << seeds[i].sheet.to_string()
                << "): " << failures[i] << '\n';
            code = numerical_error;
            continue;
        }
        const bool duplicate = std::any_of(points.begin(), points.end(), [&](const SpectralPoint& p) {
            return p.sheet == found[i]->sheet && std::abs(p.energy - found[i]->energy) <= 1e-8;
        });
        if (!duplicate) points.push_back(*found[i]);
    }
    write_spectrum_csv(out, points);
    return code;
}

int cmd_scan(const Options& o, std::ostream& out, std::ostream&) {
    const RunConfig cfg = load_run_config(o);
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& c : cfg.channels.channels()) lowest = std::min(lowest, c.threshold);
    if (!(cfg.scan.to > lowest)) throw ConfigError("scan range lies entirely below the lowest threshold: no open channels");

    const auto count = static_cast<std::size_t>(std::floor((cfg.scan.to - cfg.scan.from) / cfg.scan.step + 1e-9)) + 1;
    const SheetSelector sheet = physical_sheet(cfg.channels);
    const auto n = static_cast<Eigen::Index>(cfg.channels.size());
    std::vector<CrossSectionRow> rows(count);
    parallel_for(count, o.jobs, [&](std::size_t i) {
        const double e = cfg.scan.from + cfg.scan.step * static_cast<double>(i);
        try {
            const JostPair jp = integrate_direct(cfg.channels, *cfg.potential, {e, 0.0}, sheet, cfg.solver);
            rows[i] = cross_sections(cfg.channels, e, s_matrix(cfg.channels, jp));
        } catch (const SingularPoint&) {
            rows[i] = {e, Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN())};
        }
    });
    write_cross_section_csv(out, cfg.channels.size(), rows);
    return ok;
}

int cmd_expand(const Options& o, std::ostream& out, std::ostream&) {
    const RunConfig cfg = load_run_config(o);
    const ExpansionTable table =
        integrate_coefficients(cfg.channels, *cfg.potential, cfg.expand.center, cfg.expand.order, cfg.solver);
    out << table_to_json(table).dump(2) << '\n';
    return ok;
}

void write_matrix_rows(std::ostream& os, const char* name, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << name << ',' << r + 1 << ',' << c + 1 << ',' << m(r, c).real() << ',' << m(r, c).imag() << '\n';
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> cfg;
    if (!o.config.empty()) cfg = load_run_config(o);
    const ExpansionTable table = load_table(table_path(o, cfg ? cfg->eval.table : "", cfg ? &*cfg : nullptr, "eval"));
    if (cfg) require_same_channels(table.channels, cfg->channels);

    cplx energy;
    if (!o.energy.empty())
        energy = parse_energy(o.energy);
    else if (cfg && cfg->eval.energy)
        energy = *cfg->eval.energy;
    else
        throw ConfigError("eval needs an energy (--energy or eval.energy)");

    SheetSelector sheet = physical_sheet(table.channels);
    if (!o.sheet.empty())
        sheet = get_sheet(o.sheet, "--sheet", table.channels.size());
    else if (cfg && cfg->eval.sheet)
        sheet = *cfg->eval.sheet;

    const JostPair jp = jost_from_expansion(table, energy, sheet);
    const auto old_precision = out.precision(15);
    out << "quantity,row,col,re,im\n";
    out << "energy,,," << energy.real() << ',' << energy.imag() << '\n';
    write_matrix_rows(out, "F_in", jp.F_in);
    write_matrix_rows(out, "F_out", jp.F_out);
    const cplx det = determinant(jp.F_in);
    out << "det,,," << det.real() << ',' << det.imag() << '\n';
    try {
        write_matrix_rows(out, "S", s_matrix(table.channels, jp));
    } catch (const SingularPoint& e) {
        err << "S-matrix omitted: " << e.what() << '\n';
    }
    out.precision(old_precision);
    return ok;
}

int cmd_accuracy_map(const Options& o, std::ostream& out, std::ostream&) {
    const RunConfig cfg = load_run_config(o);
    const ExpansionTable table = load_table(table_path(o, cfg.accuracy_map.table, &cfg, "accuracy-map"));
    require_same_channels(table.channels, cfg.channels);
    SheetSelector sheet = cfg.accuracy_map.sheet.value_or(physical_sheet(cfg.channels));
    if (!o.sheet.empty()) sheet = get_sheet(o.sheet, "--sheet", cfg.channels.size());
    const AccuracyMap map =
        accuracy_map(table, cfg.channels, *cfg.potential, cfg.accuracy_map.grid, sheet, cfg.solver, o.jobs);
    write_accuracy_csv(out, map);
    return ok;
}

int cmd_domain(const Options& o, std::ostream& out, std::ostream&) {
    const RunConfig cfg = load_run_config(o);
    const EnergyGrid& g = cfg.domain.grid;
    const auto old_precision = out.precision(12);
    out << "kind,re_E,im_E\n";
    const double im_reach = std::max(std::abs(g.im_min), std::abs(g.im_max));
    for (int i = 0; i < g.n_re; ++i) {
        const double re = g.point(static_cast<std::size_t>(i)).real();
        const auto edge = domain_upper_edge(cfg.channels, *cfg.potential, re, im_reach);
        if (!edge || *edge >= im_reach) continue;
        if (*edge <= g.im_max && *edge >= g.im_min) out << "boundary," << re << ',' << *edge << '\n';
        if (*edge > 0.0 && -*edge <= g.im_max && -*edge >= g.im_min) out << "boundary," << re << ',' << -*edge << '\n';
    }
    if (g.re_max > g.re_min)
        for (double x : domain_real_axis_crossings(cfg.channels, *cfg.potential, g.re_min, g.re_max))
            out << "crossing," << x << ",0\n";
    out.precision(old_precision);
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-channel Jost matrices: spectra, cross sections and power-series expansions", "jost"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", o.config, "configuration file (JSON)");
        if (config_required) opt->required();
        sub->add_option("--override", o.overrides, "override a config entry, e.g. solver.R=50")->take_all();
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", o.out, "write the result to this file instead of stdout");
    };

    auto* spectrum = app.add_subcommand("spectrum", "bound-state scan and resonance searches");
    add_common(spectrum, true);
    auto* scan = app.add_subcommand("scan", "cross sections on a real energy grid");
    add_common(scan, true);
    auto* expand = app.add_subcommand("expand", "power-series expansion table around expand.center");
    add_common(expand, true);
    auto* eval = app.add_subcommand("eval", "evaluate an expansion table at one energy");
    add_common(eval, false);
    eval->add_option("--table", o.table, "expansion table (JSON)");
    eval->add_option("--energy", o.energy, "energy as re,im");
    eval->add_option("--sheet", o.sheet, "sheet as a sign string, e.g. --");
    auto* accuracy = app.add_subcommand("accuracy-map", "relative error of an expansion on a grid");
    add_common(accuracy, true);
    accuracy->add_option("--table", o.table, "expansion table (JSON)");
    accuracy->add_option("--sheet", o.sheet, "sheet as a sign string");
    auto* domain = app.add_subcommand("domain", "boundary of the convergence domain of the expansion");
    add_common(domain, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage_error;
    }

    try {
        std::ostringstream buffer;
        int code = ok;
        if (spectrum->parsed())
            code = cmd_spectrum(o, buffer, err);
        else if (scan->parsed())
            code = cmd_scan(o, buffer, err);
        else if (expand->parsed())
            code = cmd_expand(o, buffer, err);
        else if (eval->parsed())
            code = cmd_eval(o, buffer, err);
        else if (accuracy->parsed())
            code = cmd_accuracy_map(o, buffer, err);
        else if (domain->parsed())
            code = cmd_domain(o, buffer, err);
        if (o.out.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(o.out, std::ios::binary);
            if (!file) throw ConfigError("cannot write '" + o.out + "'");
            file << buffer.str();
        }
        return code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return usage_error;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return usage_error;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << '\n';
        return numerical_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return numerical_error;
    }
}

}  // namespace jost::cli
