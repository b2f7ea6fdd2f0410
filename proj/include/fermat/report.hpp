#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fermat/hessian.hpp"
#include "fermat/morse.hpp"
#include "fermat/spacetime.hpp"
#include "fermat/timelike.hpp"

namespace fermat {

using Json = nlohmann::json;

// Report lines are JSON objects tagged with "record"; the layouts are listed in
// docs/schemas.md and mirrored by report_schema_errors.
inline constexpr int kReportSchemaVersion = 1;

Json point_json(const ChartPoint& p);
Json geodesic_json(const GeodesicSolution& geod);
Json conjugates_json(const ConjugateReport& r);
Json lift_json(const SpacetimeCurve& lift);
Json index_comparison_json(const IndexComparison& c);
Json timelike_json(const TimelikeCurve& curve, const TimelikeIndex& idx);
Json discrete_index_json(const DiscreteIndex& d);
Json morse_json(const MorseSeries& series, const MorseCheck& check, const PoincareProfile& profile);
Json lensing_json(const LensingResult& r);

// compact, sorted keys, one object per line
std::string to_jsonl(const std::vector<Json>& lines);

// Missing or mistyped keys of one report line (empty when it conforms).
std::vector<std::string> report_schema_errors(const Json& line);

void write_text_file(const std::string& path, const std::string& content);
// two whitespace-separated columns, 17 significant digits
void write_plot_data(const std::string& path, const std::vector<std::pair<double, double>>& series);

// first two ambient coordinates along the curve ((s, x) in dimension one)
std::vector<std::pair<double, double>> path_plot_series(const GeodesicSolution& geod, int samples = 201);

}  // namespace fermat
