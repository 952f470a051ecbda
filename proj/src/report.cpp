#include "hfm/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "hfm/error.hpp"

namespace hfm {

namespace {

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

double parse_real(const std::string& text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw MeasureError(ErrorCode::InvalidInput, "bad number " + text);
    return v;
}

Index parse_index(const std::string& text) {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw MeasureError(ErrorCode::InvalidInput, "bad integer " + text);
    return v;
}

}  // namespace

std::string_view to_string(ReportKind kind) {
    switch (kind) {
        case ReportKind::DiscreteH: return "discrete_h";
        case ReportKind::LebesgueLower: return "lebesgue_lower";
        case ReportKind::LebesgueUpper: return "lebesgue_upper";
        case ReportKind::ClassicalCover: return "classical_cover";
        case ReportKind::BoxCount: return "box_count";
    }
    return "unknown";
}

ReportKind parse_report_kind(std::string_view text) {
    for (auto k : {ReportKind::DiscreteH, ReportKind::LebesgueLower, ReportKind::LebesgueUpper,
                   ReportKind::ClassicalCover, ReportKind::BoxCount}) {
        if (to_string(k) == text) return k;
    }
    throw MeasureError(ErrorCode::InvalidInput, "unknown report kind " + std::string(text));
}

bool same_report(const MeasureReport& a, const MeasureReport& b) {
    const bool values_match =
        (std::isnan(a.value) && std::isnan(b.value)) || a.value == b.value;
    return a.spec_id == b.spec_id && a.n == b.n && a.delta == b.delta && a.s == b.s &&
           a.halo == b.halo && a.kind == b.kind && values_match &&
           a.piece_count == b.piece_count && a.status == b.status;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv_row(const MeasureReport& r) {
    std::string row = csv_field(r.spec_id);
    row += ',' + std::to_string(r.n);
    row += ',' + format_real(r.delta);
    row += ',' + format_real(r.s);
    row += ',' + std::to_string(r.halo);
    row += ',' + std::string(to_string(r.kind));
    row += ',' + format_real(r.value);
    row += ',' + std::to_string(r.piece_count);
    row += ',' + csv_field(r.status);
    return row;
}

MeasureReport parse_csv_row(std::string_view line) {
    const auto f = split_csv(line);
    if (f.size() != 9)
        throw MeasureError(ErrorCode::InvalidInput,
                           "expected 9 CSV fields, got " + std::to_string(f.size()));
    MeasureReport r;
    try {
        r.spec_id = f[0];
        r.n = parse_index(f[1]);
        r.delta = parse_real(f[2]);
        r.s = parse_real(f[3]);
        r.halo = parse_index(f[4]);
        r.kind = parse_report_kind(f[5]);
        r.value = parse_real(f[6]);
        r.piece_count = parse_index(f[7]);
        r.status = f[8];
    } catch (const std::logic_error& e) {
        throw MeasureError(ErrorCode::InvalidInput, std::string("CSV row: ") + e.what());
    }
    return r;
}

void write_csv(std::ostream& out, const std::vector<MeasureReport>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << to_csv_row(r) << '\n';
}

std::vector<MeasureReport> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw MeasureError(ErrorCode::InvalidInput, "missing CSV header");
    std::vector<MeasureReport> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(parse_csv_row(line));
    }
    return rows;
}

nlohmann::json to_json(const MeasureReport& r) {
    nlohmann::json j;
    j["spec_id"] = r.spec_id;
    j["n"] = r.n;
    j["delta"] = r.delta;
    j["s"] = r.s;
    j["halo"] = r.halo;
    j["kind"] = std::string(to_string(r.kind));
    if (std::isnan(r.value))
        j["value"] = nullptr;
    else
        j["value"] = r.value;
    j["piece_count"] = r.piece_count;
    j["status"] = r.status;
    return j;
}

MeasureReport report_from_json(const nlohmann::json& j) {
    MeasureReport r;
    try {
        r.spec_id = j.at("spec_id").get<std::string>();
        r.n = j.at("n").get<Index>();
        r.delta = j.at("delta").get<double>();
        r.s = j.at("s").get<double>();
        r.halo = j.at("halo").get<Index>();
        r.kind = parse_report_kind(j.at("kind").get<std::string>());
        r.value = j.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                          : j.at("value").get<double>();
        r.piece_count = j.at("piece_count").get<Index>();
        r.status = j.at("status").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw MeasureError(ErrorCode::InvalidInput, std::string("report JSON: ") + e.what());
    }
    return r;
}

}  // namespace hfm
