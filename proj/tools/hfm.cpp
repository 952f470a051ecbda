// Command-line front end: measure, sweep, dimension, compare, lebesgue.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfm/analysis.hpp"
#include "hfm/error.hpp"
#include "hfm/generators.hpp"
#include "hfm/measure.hpp"
#include "hfm/report.hpp"
#include "hfm/sweep.hpp"
#include "json.hpp"

namespace {

using namespace hfm;

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCoarse = 3;
constexpr int kExitNoBracket = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::GridTooCoarse: return kExitCoarse;
        case ErrorCode::NoBracket: return kExitNoBracket;
        case ErrorCode::InvalidInput:
        case ErrorCode::InvalidS:
        case ErrorCode::InvalidEta:
        case ErrorCode::InvalidEps:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::ScaleMismatch:
        case ErrorCode::StageTooLarge: return kExitConfig;
        default: return kExitOther;
    }
}

struct HaloFlags {
    std::optional<Index> halo;
    std::string rule = "sqrt_n";

    void attach(CLI::App* cmd) {
        auto* fixed = cmd->add_option("--halo", halo, "Fixed halo radius in grid points");
        cmd->add_option("--halo-rule", rule, "sqrt_n or fixed:K")->excludes(fixed);
    }
    HaloRule resolve() const {
        if (halo) {
            if (*halo < 1) throw MeasureError(ErrorCode::InvalidInput, "--halo must be >= 1");
            return {HaloRule::Kind::Fixed, *halo};
        }
        return HaloRule::parse(rule);
    }
};

// Writes to --out when given, otherwise to stdout.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MeasureError(ErrorCode::InvalidInput, "cannot write " + path);
    write(out);
}

void print_json(const std::string& path, const nlohmann::json& j) {
    emit(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Hausdorff measures on finite grids"};
    app.require_subcommand(1);
    long long seed = 0;
    app.add_option("--seed", seed, "Reserved; every computation is deterministic");

    // measure
    auto* measure = app.add_subcommand("measure", "Evaluate h_delta^s on the dilated rendering");
    std::string m_spec, m_format = "json", m_out, m_delta_rule;
    Index m_n = 0;
    std::optional<double> m_delta;
    double m_s = 1.0;
    HaloFlags m_halo;
    measure->add_option("--spec", m_spec, "SetSpec JSON file")->required();
    measure->add_option("--n", m_n, "Grid resolution")->required();
    auto* m_delta_opt = measure->add_option("--delta", m_delta, "Largest piece diameter");
    measure->add_option("--delta-rule", m_delta_rule, "pow:E")->excludes(m_delta_opt);
    measure->add_option("--s", m_s, "Exponent in (0, 1]")->required();
    m_halo.attach(measure);
    measure->add_option("--format", m_format, "csv or json");
    measure->add_option("--out", m_out, "Output file (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Evaluate every (n, delta, s) cell");
    std::string w_config, w_spec, w_delta_rule, w_format, w_out;
    std::vector<Index> w_n;
    std::vector<double> w_delta, w_s;
    HaloFlags w_halo;
    unsigned w_threads = 1;
    sweep->add_option("--config", w_config, "JSON sweep config; flags override its fields");
    sweep->add_option("--spec", w_spec, "SetSpec JSON file");
    sweep->add_option("--n", w_n, "Grid resolution (repeatable)");
    auto* w_delta_opt = sweep->add_option("--delta", w_delta, "Delta value (repeatable)");
    sweep->add_option("--delta-rule", w_delta_rule, "pow:E or geom:B:K0:K1")->excludes(w_delta_opt);
    sweep->add_option("--s", w_s, "Exponent (repeatable)");
    w_halo.attach(sweep);
    sweep->add_option("--format", w_format, "csv or json");
    sweep->add_option("--out", w_out, "Output file (default stdout)");
    sweep->add_option("--threads", w_threads, "Worker threads");

    // dimension
    auto* dimension = app.add_subcommand("dimension", "Critical exponent over a delta schedule");
    std::string d_spec, d_method = "discrete", d_out;
    int d_steps = 4;
    Index d_resolution = 4096;
    HaloFlags d_halo;
    dimension->add_option("--spec", d_spec, "SetSpec JSON file")->required();
    dimension->add_option("--method", d_method, "discrete or classical");
    dimension->add_option("--steps", d_steps, "Schedule length (>= 3)");
    dimension->add_option("--resolution", d_resolution, "Breakpoint grid of the classical method");
    d_halo.attach(dimension);
    dimension->add_option("--out", d_out, "Output file (default stdout)");

    // compare
    auto* compare = app.add_subcommand("compare", "Counting-based estimate next to box counting");
    std::string c_spec, c_out;
    Index c_n = Index{1} << 20;
    HaloFlags c_halo;
    compare->add_option("--spec", c_spec, "SetSpec JSON file")->required();
    compare->add_option("--n", c_n, "Grid resolution for box counting");
    c_halo.attach(compare);
    compare->add_option("--out", c_out, "Output file (default stdout)");

    // lebesgue
    auto* lebesgue = app.add_subcommand("lebesgue", "Lower and upper discrete Lebesgue measure");
    std::string l_spec, l_format = "csv", l_out;
    Index l_n = 1'000'000;
    HaloFlags l_halo;
    lebesgue->add_option("--spec", l_spec, "SetSpec JSON file")->required();
    lebesgue->add_option("--n", l_n, "Grid resolution");
    l_halo.attach(lebesgue);
    lebesgue->add_option("--format", l_format, "csv or json");
    lebesgue->add_option("--out", l_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*measure) {
            const SetSpec spec = load_set_spec(m_spec);
            const GridScale scale(m_n);
            double delta = 0.0;
            if (m_delta) {
                delta = *m_delta;
            } else if (!m_delta_rule.empty()) {
                const auto ds = DeltaRule::parse(m_delta_rule).deltas_for(scale);
                if (ds.size() != 1)
                    throw MeasureError(ErrorCode::InvalidInput, "measure takes a single delta");
                delta = ds.front();
            } else {
                throw MeasureError(ErrorCode::InvalidInput, "--delta or --delta-rule is required");
            }
            const auto format = parse_output_format(m_format);
            const auto report =
                theorem_rhs(spec, {m_s, delta, scale}, m_halo.resolve().radius(scale));
            if (format == OutputFormat::Json)
                print_json(m_out, to_json(report));
            else
                emit(m_out, [&](std::ostream& out) { write_csv(out, {report}); });
        } else if (*sweep) {
            SweepConfig config;
            config.deltas = DeltaRule::list({});
            if (!w_config.empty()) {
                std::ifstream in(w_config);
                if (!in) throw MeasureError(ErrorCode::InvalidInput, "cannot open " + w_config);
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw MeasureError(ErrorCode::InvalidInput, w_config + ": " + e.what());
                }
                config = merge_sweep_config(config, j);
            }
            bool have_spec = !w_config.empty() && !config.spec.id.empty();
            if (!w_spec.empty()) {
                config.spec = load_set_spec(w_spec);
                have_spec = true;
            }
            if (!have_spec) throw MeasureError(ErrorCode::InvalidInput, "sweep needs a spec");
            if (!w_n.empty()) config.scales = w_n;
            if (!w_delta.empty()) config.deltas = DeltaRule::list(w_delta);
            if (!w_delta_rule.empty()) config.deltas = DeltaRule::parse(w_delta_rule);
            if (!w_s.empty()) config.s_values = w_s;
            if (w_halo.halo || sweep->count("--halo-rule") > 0) config.halo = w_halo.resolve();
            if (!w_format.empty()) config.format = parse_output_format(w_format);
            if (!w_out.empty()) config.output_path = w_out;

            const auto rows = run_sweep(config, w_threads);
            emit(config.output_path,
                 [&](std::ostream& out) { write_reports(out, rows, config.format); });
        } else if (*dimension) {
            const SetSpec spec = load_set_spec(d_spec);
            DimensionOptions options;
            if (d_method == "discrete")
                options.method = DimensionMethod::DiscreteMeasure;
            else if (d_method == "classical")
                options.method = DimensionMethod::ClassicalCover;
            else
                throw MeasureError(ErrorCode::InvalidInput, "method must be discrete or classical");
            options.halo = d_halo.resolve();
            options.resolution = d_resolution;
            const auto schedule = default_schedule(spec, options.halo, d_steps);
            const auto result = dimension_estimate(spec, schedule, options);
            const auto ref = analytic_reference(spec);

            nlohmann::json j;
            j["spec_id"] = spec.id;
            j["method"] = d_method;
            j["dimension"] = result.dimension;
            j["reference_dimension"] =
                optional_number(ref ? std::optional<double>(ref->dimension) : std::nullopt);
            j["schedule"] = nlohmann::json::array();
            for (const auto& step : schedule)
                j["schedule"].push_back({{"n", step.n}, {"delta", step.delta}, {"stage", step.stage}});
            j["probes"] = result.probes.size();
            print_json(d_out, j);
        } else if (*compare) {
            const SetSpec spec = load_set_spec(c_spec);
            DimensionOptions options;
            options.halo = c_halo.resolve();
            const auto counting =
                dimension_estimate(spec, default_schedule(spec, options.halo), options);

            const GridScale scale(c_n);
            std::vector<Index> sizes;
            for (Index b = 16; b <= c_n / 64; b *= 2) sizes.push_back(b);
            const auto box = box_count_estimate(render(spec, scale), sizes);

            nlohmann::json j;
            j["spec_id"] = spec.id;
            j["counting_estimate"] = counting.dimension;
            j["box_estimate"] = box.dimension;
            j["difference"] = box.dimension - counting.dimension;
            j["box_n"] = c_n;
            j["box_counts"] = nlohmann::json::array();
            for (const auto& [b, hits] : box.counts) j["box_counts"].push_back({b, hits});
            print_json(c_out, j);
        } else if (*lebesgue) {
            const SetSpec spec = load_set_spec(l_spec);
            const GridScale scale(l_n);
            const Index halo = l_halo.resolve().radius(scale);
            const auto format = parse_output_format(l_format);
            const auto bounds = lebesgue_bounds(spec, scale, halo);
            std::vector<MeasureReport> rows(2);
            for (auto& r : rows) {
                r.spec_id = spec.id;
                r.n = l_n;
                r.delta = 0.0;
                r.s = 1.0;
                r.halo = halo;
            }
            rows[0].kind = ReportKind::LebesgueLower;
            rows[0].value = bounds.lower;
            rows[1].kind = ReportKind::LebesgueUpper;
            rows[1].value = bounds.upper;
            emit(l_out, [&](std::ostream& out) { write_reports(out, rows, format); });
        }
    } catch (const MeasureError& e) {
        std::cerr << "hfm: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "hfm: " << e.what() << '\n';
        return kExitOther;
    }
    return 0;
}
