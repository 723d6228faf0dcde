// Command-line entry point: subgroup selection, pseudo-outcome generation,
// simulation studies, and report rendering. Machine-readable artifacts go to
// --out (or stdout); all logging goes to stderr.

#include "subsel/dataset.hpp"
#include "subsel/errors.hpp"
#include "subsel/glm.hpp"
#include "subsel/hte.hpp"
#include "subsel/iss.hpp"
#include "subsel/rng.hpp"
#include "subsel/serialize.hpp"
#include "subsel/simeval.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;
using namespace subsel;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

void emit(const std::optional<std::string>& path, const std::string& text) {
    if (path) {
        io::write_text(*path, text);
    } else {
        std::cout << text;
    }
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (const char ch : cell) {
        if (ch == '"') quoted += "\"\"";
        quoted += ch;
    }
    quoted += "\"";
    return quoted;
}

struct SelectArgs {
    std::string data_path, schema_path, method;
    double tau = 0.0, alpha = 0.1;
    std::string side = "lower";
    std::uint64_t seed = 0;
    int sims = 1000;
    std::string scheme = "frontier";
    std::string scaling = "unit-variance";
    std::optional<std::string> out, probes, selected;
};

// Columns that participate in selection (direction != none).
std::vector<int> selectable_columns(const std::vector<data::ColumnSpec>& columns) {
    std::vector<int> idx;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].direction != data::Direction::none) idx.push_back(static_cast<int>(j));
    }
    if (idx.empty()) throw config_error("schema has no selectable columns");
    return idx;
}

Eigen::MatrixXd scale_points(const Eigen::MatrixXd& raw,
                             const std::vector<data::ColumnSpec>& columns,
                             const data::ScalingRecord& record) {
    Eigen::MatrixXd scaled = raw;
    for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
        const auto& name = columns[static_cast<std::size_t>(j)].name;
        for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
            scaled(i, j) = record.apply(name, raw(i, j));
        }
    }
    return scaled;
}

// Echoes the probe file verbatim with the 0/1 flag columns appended.
void write_selected_csv(const std::string& path,
                        const std::vector<std::vector<std::string>>& probe_rows,
                        const std::vector<std::pair<std::string, std::vector<int>>>& flag_columns) {
    std::ostringstream out;
    for (std::size_t r = 0; r < probe_rows.size(); ++r) {
        for (const auto& cell : probe_rows[r]) out << csv_escape(cell) << ',';
        for (std::size_t f = 0; f < flag_columns.size(); ++f) {
            if (r == 0) {
                out << flag_columns[f].first;
            } else {
                out << flag_columns[f].second[r - 1];
            }
            if (f + 1 < flag_columns.size()) out << ',';
        }
        out << '\n';
    }
    io::write_text(path, out.str());
}

int cmd_select(const SelectArgs& args) {
    if (!(args.alpha > 0.0 && args.alpha < 1.0)) throw config_error("alpha must lie in (0,1)");
    if (args.side != "lower" && args.side != "upper" && args.side != "two-sided") {
        throw config_error("side must be lower, upper or two-sided");
    }
    if (args.method != "iss" && args.method != "glm") {
        throw config_error("method must be iss or glm");
    }
    if (args.probes && !args.selected) throw config_error("--probes requires --selected");
    const io::Schema schema = io::load_schema(args.schema_path);
    data::Dataset ds = data::load_csv(args.data_path, schema.columns, schema.response,
                                      schema.treatment, schema.response_kind);
    auto [scaled, record] = data::minmax_scale(ds);

    // Probe points, if any, mapped through the same scaling.
    std::vector<std::vector<std::string>> probe_rows;
    std::optional<Eigen::MatrixXd> probe_scaled;
    if (args.probes) {
        probe_rows = data::read_csv(*args.probes);
        const Eigen::MatrixXd probe_raw =
            data::load_points_csv(*args.probes, schema.columns, scaled.codings);
        probe_scaled = scale_points(probe_raw, schema.columns, record);
    }

    json artifact;
    std::vector<std::pair<std::string, std::vector<int>>> flags;

    if (args.method == "iss") {
        iss::Options opts;
        opts.tau = args.tau;
        opts.alpha = args.alpha;
        opts.kind = schema.response_kind == data::ResponseKind::binary
                        ? iss::ResponseTest::binary
                        : iss::ResponseTest::quantile;
        opts.scheme = args.scheme == "holm" ? iss::Scheme::holm : iss::Scheme::frontier;
        if (args.scheme != "holm" && args.scheme != "frontier") {
            throw config_error("scheme must be frontier or holm");
        }
        if (args.scaling == "unit-variance") {
            opts.scaling = iss::PreScaling::unit_variance;
        } else if (args.scaling == "minmax") {
            opts.scaling = iss::PreScaling::minmax;
        } else if (args.scaling == "none") {
            opts.scaling = iss::PreScaling::none;
        } else {
            throw config_error("scaling must be unit-variance, minmax or none");
        }

        auto classify = [&](const iss::UpperSetRegion& region, const std::string& label) {
            if (!probe_scaled) return;
            std::vector<int> sel;
            sel.reserve(static_cast<std::size_t>(probe_scaled->rows()));
            for (Eigen::Index i = 0; i < probe_scaled->rows(); ++i) {
                sel.push_back(region.contains(probe_scaled->row(i).transpose()) ? 1 : 0);
            }
            flags.emplace_back(label, std::move(sel));
        };

        if (args.side == "two-sided") {
            auto [lo, hi] = iss::select_two_sided(scaled, opts);
            artifact = json{{"side", "two-sided"},
                            {"lower", io::region_to_json(lo, schema.columns, record, args.seed)},
                            {"upper", io::region_to_json(hi, schema.columns, record, args.seed)}};
            classify(lo, "selected_lower");
            classify(hi, "selected_upper");
        } else {
            const iss::UpperSetRegion region = args.side == "lower"
                                                   ? iss::select_lower(scaled, opts)
                                                   : iss::select_upper(scaled, opts);
            artifact = io::region_to_json(region, schema.columns, record, args.seed);
            classify(region, "selected");
        }
    } else if (args.method == "glm") {
        const auto sel_cols = selectable_columns(schema.columns);
        for (const int j : sel_cols) {
            if (schema.columns[static_cast<std::size_t>(j)].kind == data::ColumnKind::categorical) {
                throw config_error("column '" + schema.columns[static_cast<std::size_t>(j)].name +
                                   "' is categorical; the band method needs numeric columns");
            }
        }
        Eigen::MatrixXd Xs(scaled.n(), static_cast<Eigen::Index>(sel_cols.size()));
        for (std::size_t k = 0; k < sel_cols.size(); ++k) {
            Xs.col(static_cast<Eigen::Index>(k)) = scaled.X.col(sel_cols[k]);
        }
        const glm::Link link = schema.response_kind == data::ResponseKind::binary
                                   ? glm::Link::logit
                                   : glm::Link::identity;
        const glm::GlmFit fit = glm::fit_glm(Xs, scaled.y, link);
        const glm::EvaluationSet K = glm::EvaluationSet::from_rows(Xs);

        auto probe_slice = [&](Eigen::Index i) {
            Eigen::VectorXd x(static_cast<Eigen::Index>(sel_cols.size()));
            for (std::size_t k = 0; k < sel_cols.size(); ++k) x(static_cast<Eigen::Index>(k)) = (*probe_scaled)(i, sel_cols[k]);
            return x;
        };
        auto classify = [&](const glm::BandRegion& region, const std::string& label) {
            if (!probe_scaled) return;
            std::vector<int> sel;
            sel.reserve(static_cast<std::size_t>(probe_scaled->rows()));
            for (Eigen::Index i = 0; i < probe_scaled->rows(); ++i) {
                sel.push_back(region.contains(probe_slice(i)) ? 1 : 0);
            }
            flags.emplace_back(label, std::move(sel));
        };

        if (args.side == "two-sided") {
            const glm::BandRegion lo = glm::select(fit, K, args.tau, args.alpha,
                                                   glm::Mode::two_sided_lower, args.sims, args.seed);
            const glm::BandRegion hi = glm::select(fit, K, args.tau, args.alpha,
                                                   glm::Mode::two_sided_upper, args.sims, args.seed);
            artifact = json{{"side", "two-sided"},
                            {"lower", io::region_to_json(lo, schema.columns, record, args.seed)},
                            {"upper", io::region_to_json(hi, schema.columns, record, args.seed)}};
            classify(lo, "selected_lower");
            classify(hi, "selected_upper");
        } else {
            const glm::Mode mode = args.side == "lower" ? glm::Mode::lower : glm::Mode::upper;
            const glm::BandRegion region =
                glm::select(fit, K, args.tau, args.alpha, mode, args.sims, args.seed);
            artifact = io::region_to_json(region, schema.columns, record, args.seed);
            classify(region, "selected");
        }
    } else {
        throw config_error("method must be iss or glm");
    }

    artifact["config"] = {{"data", args.data_path},   {"schema", args.schema_path},
                          {"method", args.method},    {"tau", args.tau},
                          {"alpha", args.alpha},      {"side", args.side},
                          {"seed", args.seed},        {"sims", args.sims},
                          {"scheme", args.scheme},    {"scaling", args.scaling}};
    emit(args.out, artifact.dump(2) + "\n");

    if (args.probes) {
        write_selected_csv(*args.selected, probe_rows, flags);
    }
    return 0;
}

struct PseudoArgs {
    std::string data_path, schema_path;
    std::uint64_t seed = 0;
    int folds = 4;
    double clip_lo = 0.01, clip_hi = 0.99;
    std::string propensity = "logistic";
    std::optional<std::string> out, provenance;
};

int cmd_pseudo(const PseudoArgs& args) {
    const io::Schema schema = io::load_schema(args.schema_path);
    if (!schema.treatment) throw data_error("schema does not name a treatment column");
    const data::Dataset ds = data::load_csv(args.data_path, schema.columns, schema.response,
                                            schema.treatment, schema.response_kind);

    hte::CrossfitConfig config;
    config.clip_lo = args.clip_lo;
    config.clip_hi = args.clip_hi;
    if (args.propensity.rfind("known:", 0) == 0) {
        config.propensity = hte::known_propensity(std::stod(args.propensity.substr(6)));
    } else if (args.propensity == "logistic") {
        config.propensity = hte::ridge_logistic();
    } else {
        throw config_error("propensity must be 'logistic' or 'known:<p>'");
    }
    config.outcome = schema.response_kind == data::ResponseKind::binary ? hte::ridge_logistic()
                                                                        : hte::ridge_linear();

    const hte::FoldAssignment folds =
        hte::assign_folds(static_cast<int>(ds.n()), args.folds, args.seed);
    const hte::PseudoOutcomeSet pseudo = hte::crossfit(ds.X, ds.y, *ds.t, folds, config);

    // Echo the input file with the pseudo-outcome appended.
    const auto rows = data::read_csv(args.data_path);
    std::ostringstream out;
    for (const auto& cell : rows.front()) out << csv_escape(cell) << ',';
    out << "y_tilde\n";
    for (std::size_t r = 1; r < rows.size(); ++r) {
        for (const auto& cell : rows[r]) out << csv_escape(cell) << ',';
        out << io::format_double(pseudo.y_tilde(static_cast<Eigen::Index>(r - 1))) << '\n';
    }
    emit(args.out, out.str());

    json prov = {{"n", ds.n()},
                 {"folds", pseudo.K},
                 {"fold_sizes", pseudo.folds.fold_sizes()},
                 {"seed", args.seed},
                 {"clip", {pseudo.clip_lo, pseudo.clip_hi}},
                 {"propensity", pseudo.propensity_name},
                 {"outcome", pseudo.outcome_name}};
    std::optional<std::string> prov_path = args.provenance;
    if (!prov_path && args.out) prov_path = *args.out + ".provenance.json";
    if (prov_path) io::write_text(*prov_path, prov.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const std::string& config_path,
                 const std::optional<std::string>& out,
                 const std::optional<std::string>& csv) {
    const sim::StudySpec spec = io::load_study(config_path);
    std::cerr << "running scenario '" << spec.scenario << "' with n=" << spec.n
              << " B=" << spec.B << " M=" << spec.M << "\n";
    const sim::MetricsReport report = sim::run_study(spec);
    for (const auto& m : report.methods) {
        std::cerr << "  " << m.method << ": type1=" << m.type1.estimate
                  << " fsr=" << m.fsr.estimate << " power=" << m.power.estimate << "\n";
    }
    emit(out, io::report_to_json(report).dump(2) + "\n");
    if (csv) {
        std::ostringstream tidy;
        io::write_tidy_csv(report, tidy);
        io::write_text(*csv, tidy.str());
    }
    return 0;
}

int cmd_report(const std::string& in, const std::optional<std::string>& csv) {
    const sim::MetricsReport report = io::report_from_json(io::load_json(in));
    std::ostringstream tidy;
    io::write_tidy_csv(report, tidy);
    if (csv) {
        io::write_text(*csv, tidy.str());
    } else {
        std::cout << tidy.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subgroup selection with family-wise error control"};
    app.require_subcommand(1);

    SelectArgs sel;
    std::string sel_out, sel_probes, sel_selected;
    auto* select = app.add_subcommand("select", "Select a subgroup from a dataset");
    select->add_option("--data", sel.data_path, "covariate-response CSV")->required();
    select->add_option("--schema", sel.schema_path, "schema JSON")->required();
    select->add_option("--method", sel.method, "iss or glm")->required();
    select->add_option("--tau", sel.tau, "response threshold")->required();
    select->add_option("--alpha", sel.alpha, "nominal Type I error rate")->required();
    select->add_option("--side", sel.side, "lower, upper or two-sided");
    select->add_option("--seed", sel.seed, "random seed")->required();
    select->add_option("--sims", sel.sims, "critical-value simulations (glm)");
    select->add_option("--scheme", sel.scheme, "iss multiple-testing scheme: frontier or holm");
    select->add_option("--scaling", sel.scaling, "iss pre-scaling: unit-variance, minmax or none");
    select->add_option("--out", sel_out, "region JSON path (default stdout)");
    select->add_option("--probes", sel_probes, "probe points CSV to classify");
    select->add_option("--selected", sel_selected, "output CSV for classified probes");

    PseudoArgs ps;
    std::string ps_out, ps_prov;
    auto* pseudo = app.add_subcommand("pseudo", "Cross-fitted pseudo-outcomes for treatment effects");
    pseudo->add_option("--data", ps.data_path, "covariate-treatment-response CSV")->required();
    pseudo->add_option("--schema", ps.schema_path, "schema JSON")->required();
    pseudo->add_option("--seed", ps.seed, "random seed")->required();
    pseudo->add_option("--folds", ps.folds, "cross-fitting folds");
    pseudo->add_option("--clip-lo", ps.clip_lo, "propensity clip lower bound");
    pseudo->add_option("--clip-hi", ps.clip_hi, "propensity clip upper bound");
    pseudo->add_option("--propensity", ps.propensity, "'logistic' or 'known:<p>'");
    pseudo->add_option("--out", ps_out, "output CSV path (default stdout)");
    pseudo->add_option("--provenance", ps_prov, "provenance JSON path");

    std::string sim_config, sim_out, sim_csv;
    auto* simulate = app.add_subcommand("simulate", "Run a simulation study");
    simulate->add_option("--config", sim_config, "study configuration JSON")->required();
    simulate->add_option("--out", sim_out, "report JSON path (default stdout)");
    simulate->add_option("--csv", sim_csv, "tidy CSV path");

    std::string rep_in, rep_csv;
    auto* report = app.add_subcommand("report", "Re-render a report as tidy CSV");
    report->add_option("--in", rep_in, "report JSON")->required();
    report->add_option("--csv", rep_csv, "tidy CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (select->parsed()) {
            if (!sel_out.empty()) sel.out = sel_out;
            if (!sel_probes.empty()) sel.probes = sel_probes;
            if (!sel_selected.empty()) sel.selected = sel_selected;
            return cmd_select(sel);
        }
        if (pseudo->parsed()) {
            if (!ps_out.empty()) ps.out = ps_out;
            if (!ps_prov.empty()) ps.provenance = ps_prov;
            return cmd_pseudo(ps);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_config,
                                sim_out.empty() ? std::nullopt : std::optional(sim_out),
                                sim_csv.empty() ? std::nullopt : std::optional(sim_csv));
        }
        if (report->parsed()) {
            return cmd_report(rep_in, rep_csv.empty() ? std::nullopt : std::optional(rep_csv));
        }
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
