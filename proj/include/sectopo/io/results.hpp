#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sectopo/kamscan.hpp"
#include "sectopo/sections.hpp"

namespace sectopo::io {

inline constexpr int kSchemaVersion = 1;

/// File name (relative to the output directory) and contents.
using Artifact = std::pair<std::string, std::string>;
using Artifacts = std::vector<Artifact>;

/// Writes to a temporary sibling and renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Creates dir if needed and writes every artifact atomically. Nothing is
/// written before all contents exist, so a failed run leaves no results.
void commit(const std::filesystem::path& dir, const Artifacts& artifacts);

/// Shortest round-trip text for CSV cells.
std::string csv_number(double x);

/// schema_version,t,x1,x2,x3,x4,u,v
std::string section_csv(const SectionCloud& cloud);

/// schema_version,t,x1,x2,x3,x4 rows for sampled states.
std::string samples_csv(const std::vector<std::pair<double, Phase>>& rows);

nlohmann::json verdict_json(const Verdict& v);
nlohmann::json plane_record_json(const PlaneRecord& rec);
nlohmann::json scan_json(const ScanResult& result);

/// schema_version,eps1,eps2,n_samples,n_empty_or_points,n_failed,proportion
std::string scan_cells_csv(const ScanResult& result);
/// Proportions with eps2 down the rows and eps1 across the columns.
std::string scan_matrix_csv(const ScanResult& result);

/// Figures rebuilt from the JSON documents, so the report command can
/// redraw them from files alone.
std::string heatmap_svg_from_json(const nlohmann::json& scan);
std::string marginal_svg_from_json(const nlohmann::json& scan);
std::string scatter_svg_from_json(const nlohmann::json& sections);

} // namespace sectopo::io
