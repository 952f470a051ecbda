#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hfm/grid.hpp"
#include "json.hpp"

namespace hfm {

enum class ReportKind { DiscreteH, LebesgueLower, LebesgueUpper, ClassicalCover, BoxCount };

std::string_view to_string(ReportKind kind);
ReportKind parse_report_kind(std::string_view text);

/// One evaluation record; the unit of CSV and JSON output.
struct MeasureReport {
    std::string spec_id;
    Index n = 1;
    double delta = 0.0;
    double s = 0.0;
    Index halo = 0;
    ReportKind kind = ReportKind::DiscreteH;
    double value = 0.0;  // NaN for skipped cells
    Index piece_count = 0;
    std::string status = "ok";

    bool skipped() const { return status.rfind("skipped:", 0) == 0; }
};

/// Exact equality, with NaN values comparing equal to each other.
bool same_report(const MeasureReport& a, const MeasureReport& b);

inline constexpr std::string_view kCsvHeader =
    "spec_id,n,delta,s,halo,kind,value,piece_count,status";

/// 17 significant digits, enough to round-trip any double.
std::string format_real(double x);

std::string to_csv_row(const MeasureReport& r);
MeasureReport parse_csv_row(std::string_view line);
void write_csv(std::ostream& out, const std::vector<MeasureReport>& rows);
std::vector<MeasureReport> read_csv(std::istream& in);

nlohmann::json to_json(const MeasureReport& r);
MeasureReport report_from_json(const nlohmann::json& j);

}  // namespace hfm
