#include "sectopo/io/results.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "sectopo/io/config.hpp"
#include "sectopo/io/svg.hpp"

namespace sectopo::io {

using nlohmann::json;

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

void commit(const std::filesystem::path& dir, const Artifacts& artifacts) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, contents] : artifacts) write_atomic(dir / name, contents);
}

std::string csv_number(double x) {
    if (std::isnan(x)) return "nan";
    return format_double(x);
}

std::string section_csv(const SectionCloud& cloud) {
    std::ostringstream out;
    out << "schema_version,t,x1,x2,x3,x4,u,v\n";
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        out << kSchemaVersion << ',' << csv_number(cloud.times[k]);
        for (double x : cloud.points[k]) out << ',' << csv_number(x);
        out << ',' << csv_number(cloud.plane_coords[k][0]) << ',' << csv_number(cloud.plane_coords[k][1]) << '\n';
    }
    return out.str();
}

std::string samples_csv(const std::vector<std::pair<double, Phase>>& rows) {
    std::ostringstream out;
    out << "schema_version,t,x1,x2,x3,x4\n";
    for (const auto& [t, x] : rows) {
        out << kSchemaVersion << ',' << csv_number(t);
        for (double v : x) out << ',' << csv_number(v);
        out << '\n';
    }
    return out.str();
}

json verdict_json(const Verdict& v) {
    json j;
    j["label"] = std::string(to_string(v.label));
    j["n_points"] = v.n_points;
    j["n_clusters"] = v.n_clusters;
    j["max_cluster_diameter"] = v.max_cluster_diameter;
    // NaN has no JSON spelling; null marks "not computed".
    j["correlation_dimension"] = std::isnan(v.correlation_dimension) ? json(nullptr) : json(v.correlation_dimension);
    j["delta_used"] = v.delta_used;
    j["degenerate_plane"] = v.degenerate_plane;
    j["offset_spread"] = v.offset_spread;
    return j;
}

json plane_record_json(const PlaneRecord& rec) {
    json j;
    j["label"] = rec.label;
    j["verdict"] = verdict_json(rec.verdict);
    j["half_slab_label"] = std::string(to_string(rec.half_slab_label));
    j["final_label"] = std::string(to_string(rec.final_label));
    return j;
}

json scan_json(const ScanResult& result) {
    const ScanConfig& c = result.config;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "scan";
    j["grid"] = {{"eps1_min", c.eps1_min}, {"eps1_max", c.eps1_max}, {"eps2_min", c.eps2_min},
                 {"eps2_max", c.eps2_max}, {"grid_step", c.grid_step}, {"samples_per_cell", c.samples_per_cell},
                 {"seed", c.seed}, {"t_end", c.integrator.t_end}, {"slab_halfwidth", c.slab_halfwidth},
                 {"velocity_scale", c.velocity_scale}};
    j["eps1_values"] = result.eps1_values;
    j["eps2_values"] = result.eps2_values;
    j["marginal_eps1"] = result.marginal_eps1;
    json cells = json::array();
    for (const ScanCell& cell : result.cells) {
        json jc;
        jc["eps1"] = cell.eps1;
        jc["eps2"] = cell.eps2;
        jc["n_samples"] = cell.n_samples;
        jc["n_empty_or_points"] = cell.n_empty_or_points;
        jc["n_failed"] = cell.n_failed;
        jc["proportion"] = cell.proportion;
        json samples = json::array();
        for (const SampleRecord& s : cell.samples) {
            json js;
            js["index"] = s.index;
            js["failed"] = s.failed;
            if (s.failed) js["failure"] = s.failure;
            js["energy"] = s.energy;
            js["angular_momentum"] = s.angular_momentum;
            js["has_curves"] = s.has_curves();
            json planes = json::array();
            for (const PlaneRecord& p : s.planes) planes.push_back(plane_record_json(p));
            js["planes"] = std::move(planes);
            samples.push_back(std::move(js));
        }
        jc["samples"] = std::move(samples);
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j;
}

std::string scan_cells_csv(const ScanResult& result) {
    std::ostringstream out;
    out << "schema_version,eps1,eps2,n_samples,n_empty_or_points,n_failed,proportion\n";
    for (const ScanCell& c : result.cells)
        out << kSchemaVersion << ',' << csv_number(c.eps1) << ',' << csv_number(c.eps2) << ',' << c.n_samples << ','
            << c.n_empty_or_points << ',' << c.n_failed << ',' << csv_number(c.proportion) << '\n';
    return out.str();
}

std::string scan_matrix_csv(const ScanResult& result) {
    std::ostringstream out;
    out << "schema_version,eps2\\eps1";
    for (double e1 : result.eps1_values) out << ',' << csv_number(e1);
    out << '\n';
    for (std::size_t j = 0; j < result.eps2_values.size(); ++j) {
        out << kSchemaVersion << ',' << csv_number(result.eps2_values[j]);
        for (std::size_t i = 0; i < result.eps1_values.size(); ++i)
            out << ',' << csv_number(result.cell(i, j).proportion);
        out << '\n';
    }
    return out.str();
}

std::string heatmap_svg_from_json(const json& scan) {
    HeatmapGrid grid;
    grid.x_values = scan.at("eps1_values").get<std::vector<double>>();
    grid.y_values = scan.at("eps2_values").get<std::vector<double>>();
    for (const json& cell : scan.at("cells")) grid.values.push_back(cell.at("proportion").get<double>());
    grid.x_label = "eps1";
    grid.y_label = "eps2";
    grid.title = "Proportion of trajectories without Curves";
    return render_heatmap_svg(grid);
}

std::string marginal_svg_from_json(const json& scan) {
    BarChart chart;
    chart.x_values = scan.at("eps1_values").get<std::vector<double>>();
    chart.heights = scan.at("marginal_eps1").get<std::vector<double>>();
    chart.x_label = "eps1";
    chart.y_label = "mean proportion over eps2";
    chart.title = "Marginal over eps1";
    return render_bar_svg(chart);
}

std::string scatter_svg_from_json(const json& sections) {
    std::vector<ScatterPanel> panels;
    for (const json& plane : sections.at("planes")) {
        ScatterPanel p;
        p.title = plane.at("final_label").get<std::string>() + "  " + plane.at("label").get<std::string>();
        const auto axes = plane.at("axis_labels").get<std::vector<std::string>>();
        p.x_label = axes.at(0);
        p.y_label = axes.at(1);
        for (const json& uv : plane.at("points")) p.points.push_back({uv.at(0).get<double>(), uv.at(1).get<double>()});
        panels.push_back(std::move(p));
    }
    return render_scatter_svg(panels, sections.value("title", ""));
}

} // namespace sectopo::io
