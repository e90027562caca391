#include "sectopo/io/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "sectopo/errors.hpp"

namespace sectopo::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError("expected a finite number, got '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("expected a non-negative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("expected true or false, got '" + v + "'");
}

std::array<double, 3> to_triple(const std::string& v) {
    std::array<double, 3> out{};
    std::size_t k = 0;
    std::string_view rest = v;
    while (true) {
        const auto comma = rest.find(',');
        if (k == 3) throw ConfigError("expected three comma-separated numbers, got '" + v + "'");
        out[k++] = to_double(std::string(trim(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (k != 3) throw ConfigError("expected three comma-separated numbers, got '" + v + "'");
    return out;
}

std::string format_triple(const std::array<double, 3>& t) {
    return format_double(t[0]) + ", " + format_double(t[1]) + ", " + format_double(t[2]);
}

struct Field {
    const char* section;
    const char* key;
    const char* doc;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class Get>
Field number(const char* section, const char* key, const char* doc, Get member) {
    return {section, key, doc,
            [member](RunConfig& c, const std::string& v) { member(c) = to_double(v); },
            [member](const RunConfig& c) { return format_double(member(c)); }};
}

template <class Get>
Field count(const char* section, const char* key, const char* doc, Get member) {
    return {section, key, doc,
            [member](RunConfig& c, const std::string& v) {
                using T = std::remove_reference_t<decltype(member(c))>;
                const std::uint64_t x = to_u64(v);
                if (x > std::numeric_limits<T>::max()) throw ConfigError("value out of range: " + v);
                member(c) = static_cast<T>(x);
            },
            [member](const RunConfig& c) { return std::to_string(member(c)); }};
}

template <class Get>
Field flag(const char* section, const char* key, const char* doc, Get member) {
    return {section, key, doc, [member](RunConfig& c, const std::string& v) { member(c) = to_bool(v); },
            [member](const RunConfig& c) {
                return std::string(member(c) ? "true" : "false");
            }};
}

template <class Get>
Field triple(const char* section, const char* key, const char* doc, Get member) {
    return {section, key, doc, [member](RunConfig& c, const std::string& v) { member(c) = to_triple(v); },
            [member](const RunConfig& c) { return format_triple(member(c)); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"run", "system", "pendulum or satellite",
         [](RunConfig& c, const std::string& v) {
             if (v == "pendulum") c.system = SystemKind::Pendulum;
             else if (v == "satellite") c.system = SystemKind::Satellite;
             else throw ConfigError("system must be pendulum or satellite, got '" + v + "'");
         },
         [](const RunConfig& c) { return std::string(to_string(c.system)); }},
        count("run", "seed", "master seed of every random draw", [](auto& c) -> auto& { return c.seed; }),
        count("run", "threads", "worker threads of the scan (results do not depend on it)",
              [](auto& c) -> auto& { return c.threads; }),

        triple("pendulum", "lengths", "segment lengths", [](auto& c) -> auto& { return c.pendulum.lengths; }),
        triple("pendulum", "masses", "point masses", [](auto& c) -> auto& { return c.pendulum.masses; }),
        number("pendulum", "eps1", "attachment fraction along segment 1",
               [](auto& c) -> auto& { return c.pendulum.eps1; }),
        number("pendulum", "eps2", "attachment fraction along segment 2",
               [](auto& c) -> auto& { return c.pendulum.eps2; }),
        number("pendulum", "gravity", "uniform field along -y", [](auto& c) -> auto& { return c.pendulum.gravity; }),
        {"pendulum", "initial", "random (seeded draw) or angles (alpha, alpha_dot)",
         [](RunConfig& c, const std::string& v) {
             if (v == "random") c.pendulum_random = true;
             else if (v == "angles") c.pendulum_random = false;
             else throw ConfigError("initial must be random or angles, got '" + v + "'");
         },
         [](const RunConfig& c) { return std::string(c.pendulum_random ? "random" : "angles"); }},
        triple("pendulum", "alpha", "segment angles", [](auto& c) -> auto& { return c.alpha; }),
        triple("pendulum", "alpha_dot", "segment angular rates", [](auto& c) -> auto& { return c.alpha_dot; }),
        number("pendulum", "velocity_scale", "random rates are uniform on [-w, w]",
               [](auto& c) -> auto& { return c.velocity_scale; }),

        {"satellite", "form", "reduced (alpha = 4/3, beta = 0 only) or general",
         [](RunConfig& c, const std::string& v) {
             if (v == "reduced") c.satellite.form = SatelliteForm::Reduced;
             else if (v == "general") c.satellite.form = SatelliteForm::General;
             else throw ConfigError("form must be reduced or general, got '" + v + "'");
         },
         [](const RunConfig& c) {
             return std::string(c.satellite.form == SatelliteForm::Reduced ? "reduced" : "general");
         }},
        number("satellite", "alpha", "inertia ratio", [](auto& c) -> auto& { return c.satellite.alpha; }),
        number("satellite", "beta", "p_phi / alpha", [](auto& c) -> auto& { return c.satellite.beta; }),
        number("satellite", "psi", "initial psi", [](auto& c) -> auto& { return c.satellite_state.psi; }),
        number("satellite", "theta", "initial theta", [](auto& c) -> auto& { return c.satellite_state.theta; }),
        number("satellite", "p_psi", "initial p_psi", [](auto& c) -> auto& { return c.satellite_state.p_psi; }),
        number("satellite", "p_theta", "initial p_theta",
               [](auto& c) -> auto& { return c.satellite_state.p_theta; }),

        number("integrator", "rel_tol", "relative error per step",
               [](auto& c) -> auto& { return c.integrator.rel_tol; }),
        number("integrator", "abs_tol", "absolute error per step",
               [](auto& c) -> auto& { return c.integrator.abs_tol; }),
        number("integrator", "max_step", "largest step", [](auto& c) -> auto& { return c.integrator.max_step; }),
        number("integrator", "projection_tol", "constraint residual after projection",
               [](auto& c) -> auto& { return c.integrator.projection_tol; }),
        number("integrator", "baumgarte_gamma", "constraint stabilization rate",
               [](auto& c) -> auto& { return c.integrator.baumgarte_gamma; }),
        number("integrator", "t_end", "length of every trajectory",
               [](auto& c) -> auto& { return c.integrator.t_end; }),
        count("integrator", "max_crossings", "section points kept per plane, 0 = all",
              [](auto& c) -> auto& { return c.integrator.max_crossings; }),

        number("section", "slab_halfwidth", "half-width of the slab around the second plane equation",
               [](auto& c) -> auto& { return c.slab_halfwidth; }),
        flag("section", "require_stable_curves", "Curves must survive halving the slab",
             [](auto& c) -> auto& { return c.require_stable_curves; }),
        count("section", "search", "initial conditions tried by the section command",
              [](auto& c) -> auto& { return c.search; }),
        number("section", "search_radius", "satellite search box half-width",
               [](auto& c) -> auto& { return c.search_radius; }),

        count("classifier", "n_min", "fewer points give Empty", [](auto& c) -> auto& { return c.classifier.n_min; }),
        number("classifier", "link_factor", "linking distance over median nearest-neighbour distance",
               [](auto& c) -> auto& { return c.classifier.link_factor; }),
        number("classifier", "point_diam_factor", "largest Points cluster, in slab units",
               [](auto& c) -> auto& { return c.classifier.point_diam_factor; }),
        number("classifier", "curve_diam_factor", "smallest Curves cluster, in slab units",
               [](auto& c) -> auto& { return c.classifier.curve_diam_factor; }),
        number("classifier", "dim_lo", "largest Points correlation dimension",
               [](auto& c) -> auto& { return c.classifier.dim_lo; }),
        number("classifier", "dim_hi", "smallest Curves correlation dimension",
               [](auto& c) -> auto& { return c.classifier.dim_hi; }),
        number("classifier", "degenerate_band", "centre band of the slab, in slab units",
               [](auto& c) -> auto& { return c.classifier.degenerate_band; }),
        number("classifier", "degenerate_fraction", "share of points in the centre band that marks a degenerate plane",
               [](auto& c) -> auto& { return c.classifier.degenerate_fraction; }),
        number("classifier", "min_offset_spread", "neighbour offset spread needed for Curves, in slab units",
               [](auto& c) -> auto& { return c.classifier.min_offset_spread; }),

        number("simulate", "dump_interval", "time between dumped states",
               [](auto& c) -> auto& { return c.dump_interval; }),

        number("scan", "eps1_min", "", [](auto& c) -> auto& { return c.scan.eps1_min; }),
        number("scan", "eps1_max", "", [](auto& c) -> auto& { return c.scan.eps1_max; }),
        number("scan", "eps2_min", "", [](auto& c) -> auto& { return c.scan.eps2_min; }),
        number("scan", "eps2_max", "", [](auto& c) -> auto& { return c.scan.eps2_max; }),
        number("scan", "grid_step", "spacing of the eps grid", [](auto& c) -> auto& { return c.scan.grid_step; }),
        count("scan", "samples_per_cell", "initial conditions per grid cell",
              [](auto& c) -> auto& { return c.scan.samples_per_cell; }),
    };
    return table;
}

const Field* find_field(std::string_view section, std::string_view key) {
    for (const Field& f : fields())
        if (section == f.section && key == f.key) return &f;
    return nullptr;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string_view to_string(SystemKind kind) {
    return kind == SystemKind::Pendulum ? "pendulum" : "satellite";
}

IniDocument parse_ini(std::string_view text) {
    IniDocument doc;
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

        const auto hash = line.find_first_of("#;");
        line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError("malformed section header '" + std::string(line) + "'", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected key = value, got '" + std::string(line) + "'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("missing key before '='", line_no);
        if (section.empty()) throw ConfigError("key outside of any [section]", line_no, key);
        const std::string full = section + "." + key;
        if (doc.entries.count(full))
            throw ConfigError("duplicate key", line_no, full);
        doc.entries[full] = {std::string(trim(line.substr(eq + 1))), line_no};
    }
    return doc;
}

namespace {

// Qualifies the field of a sub-object's error with its config section.
template <class T>
void validate_in(const T& part, const char* section) {
    try {
        part.validate();
    } catch (const ConfigError& e) {
        if (e.field().empty()) throw;
        throw ConfigError(e.what(), e.line(), std::string(section) + "." + e.field());
    }
}

} // namespace

void RunConfig::validate() const {
    validate_in(pendulum, "pendulum");
    validate_in(satellite, "satellite");
    integrator.validate();
    classifier.validate();
    if (!(slab_halfwidth > 0.0)) throw ConfigError("slab_halfwidth must be positive", 0, "slab_halfwidth");
    if (search < 1) throw ConfigError("search must be at least 1", 0, "search");
    if (!(search_radius >= 0.0)) throw ConfigError("search_radius must be non-negative", 0, "search_radius");
    if (!(dump_interval > 0.0)) throw ConfigError("dump_interval must be positive", 0, "dump_interval");
    if (!(velocity_scale >= 0.0))
        throw ConfigError("velocity_scale must be non-negative", 0, "velocity_scale");
    if (threads < 1) throw ConfigError("threads must be at least 1", 0, "threads");
    if (!(satellite_state.theta > 0.0 && satellite_state.theta < std::numbers::pi))
        throw ConfigError("theta must lie in (0, pi)", 0, "theta");
    scan_config().validate();
}

SectionOptions RunConfig::section_options() const {
    return {slab_halfwidth, require_stable_curves, integrator, classifier};
}

ScanConfig RunConfig::scan_config() const {
    ScanConfig s = scan;
    s.seed = seed;
    s.threads = threads;
    s.velocity_scale = velocity_scale;
    s.slab_halfwidth = slab_halfwidth;
    s.require_stable_curves = require_stable_curves;
    s.chain = pendulum;
    s.chain.gravity = 0.0;
    s.integrator = integrator;
    s.classifier = classifier;
    return s;
}

RunConfig parse_run_config(std::string_view text) {
    const IniDocument doc = parse_ini(text);
    RunConfig cfg;
    for (const auto& [full, entry] : doc.entries) {
        const auto dot = full.find('.');
        const Field* f = find_field(std::string_view(full).substr(0, dot), std::string_view(full).substr(dot + 1));
        if (!f) throw ConfigError("unknown key", entry.line, full);
        try {
            f->set(cfg, entry.value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), entry.line, full);
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        // Point at the line that set the offending key, if the file set it.
        for (const auto& [full, entry] : doc.entries)
            if (!e.field().empty() && (full == e.field() || full.substr(full.find('.') + 1) == e.field()))
                throw ConfigError(e.what(), entry.line, full);
        throw;
    }
    return cfg;
}

std::string to_ini(const RunConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const Field& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out << '\n';
            section = f.section;
            out << '[' << section << "]\n";
        }
        if (*f.doc) out << "# " << f.doc << '\n';
        out << f.key << " = " << f.get(cfg) << '\n';
    }
    return out.str();
}

} // namespace sectopo::io
