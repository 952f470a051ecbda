#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hfm/analysis.hpp"
#include "hfm/generators.hpp"
#include "hfm/report.hpp"
#include "json.hpp"

namespace hfm {

/// Either an explicit list of deltas or a rule evaluated per grid:
///   "pow:E"         delta = n^E
///   "geom:B:K0:K1"  delta = B^-k for k = K0 .. K1
struct DeltaRule {
    enum class Kind { List, Power, Geometric };
    Kind kind = Kind::List;
    std::vector<double> values;
    double exponent = -0.75;
    double base = 3.0;
    int first = 1;
    int last = 1;

    std::vector<double> deltas_for(GridScale scale) const;
    static DeltaRule parse(std::string_view text);
    static DeltaRule list(std::vector<double> values);
};

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(std::string_view text);

struct SweepConfig {
    SetSpec spec;
    std::vector<Index> scales;
    DeltaRule deltas;
    std::vector<double> s_values;
    HaloRule halo;
    std::string output_path;  // empty: standard output
    OutputFormat format = OutputFormat::Csv;

    /// Throws InvalidInput when a list is empty.
    void validate() const;
};

/// Fields of a JSON sweep config: spec (object) or spec_path, n, delta,
/// delta_rule, s, halo, halo_rule, format, out. Missing fields keep the
/// values already in `base`.
SweepConfig merge_sweep_config(SweepConfig base, const nlohmann::json& j);

/// One discrete_h report per (n, delta, s) cell, sorted by
/// (spec_id, n, delta, s). Failing cells become rows with status
/// "skipped:<reason>" and a NaN value.
std::vector<MeasureReport> run_sweep(const SweepConfig& config, unsigned threads = 1);

void write_reports(std::ostream& out, const std::vector<MeasureReport>& rows, OutputFormat format);

}  // namespace hfm
