#include "hfm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "hfm/error.hpp"

namespace hfm {

namespace {

template <class T>
T parse_number(std::string_view text, std::string_view what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw MeasureError(ErrorCode::InvalidInput,
                           "bad " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    while (true) {
        const auto end = text.find(sep, begin);
        parts.push_back(text.substr(begin, end - begin));
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    return parts;
}

std::string skip_reason(ErrorCode code) {
    switch (code) {
        case ErrorCode::GridTooCoarse: return "skipped:grid_too_coarse";
        case ErrorCode::InvalidS: return "skipped:invalid_s";
        default: break;
    }
    std::string name(to_string(code));
    std::string snake;
    for (char c : name) {
        if (std::isupper(static_cast<unsigned char>(c)) && !snake.empty()) snake += '_';
        snake += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return "skipped:" + snake;
}

struct Cell {
    Index n;
    double delta;
    double s;
};

}  // namespace

std::vector<double> DeltaRule::deltas_for(GridScale scale) const {
    switch (kind) {
        case Kind::List: return values;
        case Kind::Power: return {std::pow(static_cast<double>(scale.n()), exponent)};
        case Kind::Geometric: {
            std::vector<double> out;
            for (int k = first; k <= last; ++k) out.push_back(std::pow(base, -k));
            return out;
        }
    }
    return {};
}

DeltaRule DeltaRule::parse(std::string_view text) {
    const auto parts = split(text, ':');
    DeltaRule rule;
    if (parts.size() == 2 && parts[0] == "pow") {
        rule.kind = Kind::Power;
        rule.exponent = parse_number<double>(parts[1], "delta exponent");
        return rule;
    }
    if (parts.size() == 4 && parts[0] == "geom") {
        rule.kind = Kind::Geometric;
        rule.base = parse_number<double>(parts[1], "delta base");
        rule.first = parse_number<int>(parts[2], "first exponent");
        rule.last = parse_number<int>(parts[3], "last exponent");
        if (!(rule.base > 1.0) || rule.first > rule.last)
            throw MeasureError(ErrorCode::InvalidInput, "geom rule needs base > 1 and K0 <= K1");
        return rule;
    }
    throw MeasureError(ErrorCode::InvalidInput,
                       "delta rule must be pow:E or geom:B:K0:K1, got " + std::string(text));
}

DeltaRule DeltaRule::list(std::vector<double> values) {
    DeltaRule rule;
    rule.values = std::move(values);
    return rule;
}

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw MeasureError(ErrorCode::InvalidInput, "format must be csv or json");
}

void SweepConfig::validate() const {
    if (scales.empty()) throw MeasureError(ErrorCode::InvalidInput, "sweep needs at least one n");
    if (s_values.empty()) throw MeasureError(ErrorCode::InvalidInput, "sweep needs at least one s");
    if (deltas.kind == DeltaRule::Kind::List && deltas.values.empty())
        throw MeasureError(ErrorCode::InvalidInput, "sweep needs deltas or a delta rule");
    for (Index n : scales) GridScale{n};
}

SweepConfig merge_sweep_config(SweepConfig base, const nlohmann::json& j) {
    try {
        if (j.contains("spec")) base.spec = parse_set_spec(j.at("spec"));
        if (j.contains("spec_path")) base.spec = load_set_spec(j.at("spec_path").get<std::string>());
        if (j.contains("n")) base.scales = j.at("n").get<std::vector<Index>>();
        if (j.contains("delta")) base.deltas = DeltaRule::list(j.at("delta").get<std::vector<double>>());
        if (j.contains("delta_rule"))
            base.deltas = DeltaRule::parse(j.at("delta_rule").get<std::string>());
        if (j.contains("s")) base.s_values = j.at("s").get<std::vector<double>>();
        if (j.contains("halo_rule")) base.halo = HaloRule::parse(j.at("halo_rule").get<std::string>());
        if (j.contains("halo")) base.halo = {HaloRule::Kind::Fixed, j.at("halo").get<Index>()};
        if (j.contains("format")) base.format = parse_output_format(j.at("format").get<std::string>());
        if (j.contains("out")) base.output_path = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw MeasureError(ErrorCode::InvalidInput, std::string("sweep config: ") + e.what());
    }
    return base;
}

std::vector<MeasureReport> run_sweep(const SweepConfig& config, unsigned threads) {
    config.validate();
    std::vector<Cell> cells;
    for (Index n : config.scales) {
        for (double delta : config.deltas.deltas_for(GridScale(n)))
            for (double s : config.s_values) cells.push_back({n, delta, s});
    }

    std::vector<MeasureReport> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const Cell& c = cells[i];
            const GridScale scale(c.n);
            const Index halo = config.halo.radius(scale);
            try {
                rows[i] = theorem_rhs(config.spec, {c.s, c.delta, scale}, halo);
            } catch (const MeasureError& e) {
                MeasureReport& r = rows[i];
                r.spec_id = config.spec.id;
                r.n = c.n;
                r.delta = c.delta;
                r.s = c.s;
                r.halo = halo;
                r.kind = ReportKind::DiscreteH;
                r.value = std::numeric_limits<double>::quiet_NaN();
                r.piece_count = 0;
                r.status = skip_reason(e.code());
            }
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }

    std::stable_sort(rows.begin(), rows.end(), [](const MeasureReport& a, const MeasureReport& b) {
        if (a.spec_id != b.spec_id) return a.spec_id < b.spec_id;
        if (a.n != b.n) return a.n < b.n;
        if (a.delta != b.delta) return a.delta < b.delta;
        return a.s < b.s;
    });
    return rows;
}

void write_reports(std::ostream& out, const std::vector<MeasureReport>& rows, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_csv(out, rows);
        return;
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
}

}  // namespace hfm
