#include "subsel/serialize.hpp"

#include "subsel/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace subsel::io {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (rows.empty()) return {};
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
        }
    }
    return m;
}

json columns_to_json(const std::vector<data::ColumnSpec>& columns) {
    json arr = json::array();
    for (const auto& c : columns) {
        arr.push_back({{"name", c.name},
                       {"kind", data::to_string(c.kind)},
                       {"direction", data::to_string(c.direction)}});
    }
    return arr;
}

std::vector<data::ColumnSpec> columns_from_json(const json& arr) {
    std::vector<data::ColumnSpec> columns;
    for (const auto& c : arr) {
        data::ColumnSpec spec;
        spec.name = c.at("name").get<std::string>();
        spec.kind = data::column_kind_from_string(c.at("kind").get<std::string>());
        spec.direction = c.contains("direction")
                             ? data::direction_from_string(c.at("direction").get<std::string>())
                             : data::Direction::none;
        columns.push_back(std::move(spec));
    }
    return columns;
}

std::uint64_t fnv1a(const void* bytes, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw data_error("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file '" + path + "'");
    out << text;
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

Schema schema_from_json(const json& j) {
    Schema schema;
    if (!j.contains("columns") || !j.at("columns").is_array() || j.at("columns").empty()) {
        throw config_error("schema must list at least one column");
    }
    schema.columns = columns_from_json(j.at("columns"));
    if (!j.contains("response")) throw config_error("schema must name the response column");
    schema.response = j.at("response").get<std::string>();
    if (j.contains("treatment") && !j.at("treatment").is_null()) {
        schema.treatment = j.at("treatment").get<std::string>();
    }
    if (j.contains("response_kind")) {
        const auto kind = j.at("response_kind").get<std::string>();
        if (kind == "binary") {
            schema.response_kind = data::ResponseKind::binary;
        } else if (kind == "continuous") {
            schema.response_kind = data::ResponseKind::continuous;
        } else {
            throw config_error("response_kind must be 'binary' or 'continuous'");
        }
    }
    return schema;
}

Schema load_schema(const std::string& path) {
    return schema_from_json(load_json(path));
}

// ---------------------------------------------------------------------------
// Scaling record
// ---------------------------------------------------------------------------

json scaling_to_json(const data::ScalingRecord& record) {
    json arr = json::array();
    for (const auto& e : record.entries) {
        json entry = {{"name", e.name}, {"affine", e.affine}};
        if (e.affine) {
            entry["lo"] = e.lo;
            entry["hi"] = e.hi;
        }
        if (!e.levels.empty()) entry["levels"] = e.levels;
        arr.push_back(std::move(entry));
    }
    return json{{"columns", arr}};
}

data::ScalingRecord scaling_from_json(const json& j) {
    data::ScalingRecord record;
    if (!j.contains("columns")) return record;
    for (const auto& e : j.at("columns")) {
        data::ScalingRecord::Entry entry;
        entry.name = e.at("name").get<std::string>();
        entry.affine = e.value("affine", false);
        if (entry.affine) {
            entry.lo = e.at("lo").get<double>();
            entry.hi = e.at("hi").get<double>();
        }
        if (e.contains("levels")) entry.levels = e.at("levels").get<std::vector<std::string>>();
        record.entries.push_back(std::move(entry));
    }
    return record;
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

json region_to_json(const iss::UpperSetRegion& region,
                    const std::vector<data::ColumnSpec>& columns,
                    const data::ScalingRecord& scaling,
                    std::uint64_t seed) {
    json generators = json::array();
    for (const auto& g : region.generators) generators.push_back(vector_to_json(g));

    json plain = json::array();
    for (const auto& col : region.mapper.plain) {
        plain.push_back({{"source", col.source},
                         {"source_index", col.source_index},
                         {"sign", col.sign},
                         {"divisor", col.divisor}});
    }
    json mapper = {{"raw_dim", region.mapper.raw_dim}, {"plain", plain}};
    if (region.mapper.antichain) {
        const auto& part = *region.mapper.antichain;
        json combos = json::array();
        for (const auto& combo : part.encoder.combos) combos.push_back(combo);
        mapper["antichain"] = {{"sources", part.sources},
                               {"source_indices", part.source_indices},
                               {"combos", combos},
                               {"divisor", part.divisor}};
    } else {
        mapper["antichain"] = nullptr;
    }

    return json{{"method", "iss"},
                {"side", iss::to_string(region.side)},
                {"tau", region.tau},
                {"alpha", region.alpha},
                {"generators", generators},
                {"direction_spec", columns_to_json(columns)},
                {"scaling", scaling_to_json(scaling)},
                {"mapper", mapper},
                {"seed", seed}};
}

iss::UpperSetRegion iss_region_from_json(const json& j) {
    iss::UpperSetRegion region;
    region.side = iss::side_from_string(j.at("side").get<std::string>());
    region.tau = j.at("tau").get<double>();
    region.alpha = j.at("alpha").get<double>();
    for (const auto& g : j.at("generators")) region.generators.push_back(vector_from_json(g));

    const auto& mapper = j.at("mapper");
    region.mapper.raw_dim = mapper.at("raw_dim").get<int>();
    for (const auto& col : mapper.at("plain")) {
        region.mapper.plain.push_back({col.at("source").get<std::string>(),
                                       col.at("source_index").get<int>(),
                                       col.at("sign").get<double>(),
                                       col.at("divisor").get<double>()});
    }
    if (!mapper.at("antichain").is_null()) {
        const auto& part = mapper.at("antichain");
        iss::PointMapper::AntichainPart anti;
        anti.sources = part.at("sources").get<std::vector<std::string>>();
        anti.source_indices = part.at("source_indices").get<std::vector<int>>();
        anti.encoder.source_columns = anti.sources;
        for (const auto& combo : part.at("combos")) {
            anti.encoder.combos.push_back(combo.get<std::vector<double>>());
        }
        anti.divisor = part.at("divisor").get<double>();
        region.mapper.antichain = std::move(anti);
    }
    return region;
}

json region_to_json(const glm::BandRegion& region,
                    const std::vector<data::ColumnSpec>& columns,
                    const data::ScalingRecord& scaling,
                    std::uint64_t seed) {
    std::uint64_t digest = 0xcbf29ce484222325ULL;
    for (const auto& x : region.K.points) {
        digest = fnv1a(x.data(), sizeof(double) * static_cast<std::size_t>(x.size()), digest);
    }
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016" PRIx64, digest);

    return json{{"method", "glm"},
                {"link", glm::to_string(region.fit.link)},
                {"mode", glm::to_string(region.mode)},
                {"beta_hat", vector_to_json(region.fit.beta_hat)},
                {"V_hat", matrix_to_json(region.fit.V_hat)},
                {"c", region.c},
                {"g_tau", region.g_tau},
                {"n", region.fit.n},
                {"sigma_hat", region.fit.sigma_hat},
                {"residual_df", region.fit.residual_df},
                {"box_lo", vector_to_json(region.box_lo)},
                {"box_hi", vector_to_json(region.box_hi)},
                {"K_digest", {{"count", region.K.points.size()}, {"fnv1a", hex}}},
                {"columns", columns_to_json(columns)},
                {"scaling", scaling_to_json(scaling)},
                {"seed", seed}};
}

glm::BandRegion glm_region_from_json(const json& j) {
    glm::BandRegion region;
    region.fit.link = glm::link_from_string(j.at("link").get<std::string>());
    region.mode = glm::mode_from_string(j.at("mode").get<std::string>());
    region.fit.beta_hat = vector_from_json(j.at("beta_hat"));
    region.fit.V_hat = matrix_from_json(j.at("V_hat"));
    region.fit.n = j.value("n", 0);
    region.fit.sigma_hat = j.value("sigma_hat", 0.0);
    region.fit.residual_df = j.value("residual_df", 0);
    region.c = j.at("c").get<double>();
    region.g_tau = j.at("g_tau").get<double>();
    region.box_lo = vector_from_json(j.at("box_lo"));
    region.box_hi = vector_from_json(j.at("box_hi"));
    return region;
}

// ---------------------------------------------------------------------------
// Study configuration and reports
// ---------------------------------------------------------------------------

namespace {

iss::PreScaling prescaling_from_string(const std::string& s) {
    if (s == "unit-variance") return iss::PreScaling::unit_variance;
    if (s == "minmax") return iss::PreScaling::minmax;
    if (s == "none") return iss::PreScaling::none;
    throw config_error("unknown scaling mode '" + s + "'");
}

std::string to_string(iss::PreScaling s) {
    switch (s) {
        case iss::PreScaling::unit_variance: return "unit-variance";
        case iss::PreScaling::minmax: return "minmax";
        case iss::PreScaling::none: return "none";
    }
    return "unit-variance";
}

iss::Scheme scheme_from_string(const std::string& s) {
    if (s == "frontier") return iss::Scheme::frontier;
    if (s == "holm") return iss::Scheme::holm;
    throw config_error("unknown testing scheme '" + s + "'");
}

std::string to_string(iss::Scheme s) {
    return s == iss::Scheme::frontier ? "frontier" : "holm";
}

json method_to_json(const sim::MethodOptions& m) {
    json j = {{"name", m.name}};
    if (m.name == "iss") {
        j["scheme"] = to_string(m.scheme);
        j["scaling"] = to_string(m.scaling);
    } else {
        j["sims"] = m.glm_sims;
    }
    return j;
}

sim::MethodOptions method_from_json(const json& j) {
    sim::MethodOptions m;
    m.name = j.at("name").get<std::string>();
    if (j.contains("scheme")) m.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    if (j.contains("scaling")) m.scaling = prescaling_from_string(j.at("scaling").get<std::string>());
    if (j.contains("sims")) m.glm_sims = j.at("sims").get<int>();
    return m;
}

json summary_to_json(const sim::MetricSummary& s) {
    return json{{"estimate", s.estimate}, {"se", s.se}};
}

sim::MetricSummary summary_from_json(const json& j) {
    return {j.at("estimate").get<double>(), j.at("se").get<double>()};
}

} // namespace

sim::StudySpec study_from_json(const json& j) {
    sim::StudySpec spec;
    spec.scenario = j.at("scenario").get<std::string>();
    spec.n = j.value("n", 250);
    spec.B = j.value("B", 200);
    spec.M = j.value("M", 100000);
    spec.alpha = j.value("alpha", 0.1);
    if (!j.contains("seed")) throw config_error("study configuration must set a seed");
    spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tau_override") && !j.at("tau_override").is_null()) {
        spec.tau_override = j.at("tau_override").get<double>();
    }
    if (j.contains("model") && !j.at("model").is_null()) {
        spec.model_override = sim::response_model_from_string(j.at("model").get<std::string>());
    }
    spec.folds = j.value("folds", 4);
    if (!j.contains("methods") || j.at("methods").empty()) {
        throw config_error("study configuration must list methods");
    }
    for (const auto& m : j.at("methods")) spec.methods.push_back(method_from_json(m));
    return spec;
}

sim::StudySpec load_study(const std::string& path) {
    return study_from_json(load_json(path));
}

json report_to_json(const sim::MetricsReport& report) {
    json methods = json::array();
    for (const auto& m : report.methods) {
        json reps = json::array();
        for (const auto& r : m.replications) {
            reps.push_back({{"type1", r.type1},
                            {"fsr", r.fsr},
                            {"power", r.power},
                            {"selected_fraction", r.selected_fraction}});
        }
        methods.push_back({{"name", m.method},
                           {"failures", m.failures},
                           {"type1", summary_to_json(m.type1)},
                           {"fsr", summary_to_json(m.fsr)},
                           {"power", summary_to_json(m.power)},
                           {"replications", reps}});
    }

    json spec_methods = json::array();
    for (const auto& m : report.spec.methods) spec_methods.push_back(method_to_json(m));

    json study = {{"scenario", report.spec.scenario},
                  {"n", report.spec.n},
                  {"B", report.spec.B},
                  {"M", report.spec.M},
                  {"alpha", report.spec.alpha},
                  {"seed", report.spec.seed},
                  {"folds", report.spec.folds},
                  {"model", sim::to_string(report.model)},
                  {"methods", spec_methods}};
    study["tau_override"] =
        report.spec.tau_override ? json(*report.spec.tau_override) : json(nullptr);

    return json{{"study", study},
                {"scenario", {{"name", report.spec.scenario},
                              {"tau", report.tau},
                              {"s_tau_size_target", report.size_target},
                              {"s_tau_size_reference", report.size_reference}}},
                {"methods", methods}};
}

sim::MetricsReport report_from_json(const json& j) {
    sim::MetricsReport report;
    const auto& study = j.at("study");
    report.spec.scenario = study.at("scenario").get<std::string>();
    report.spec.n = study.at("n").get<int>();
    report.spec.B = study.at("B").get<int>();
    report.spec.M = study.at("M").get<int>();
    report.spec.alpha = study.at("alpha").get<double>();
    report.spec.seed = study.at("seed").get<std::uint64_t>();
    report.spec.folds = study.value("folds", 4);
    report.model = sim::response_model_from_string(study.at("model").get<std::string>());
    if (study.contains("tau_override") && !study.at("tau_override").is_null()) {
        report.spec.tau_override = study.at("tau_override").get<double>();
    }
    for (const auto& m : study.at("methods")) report.spec.methods.push_back(method_from_json(m));

    const auto& scenario = j.at("scenario");
    report.tau = scenario.at("tau").get<double>();
    report.size_target = scenario.at("s_tau_size_target").get<double>();
    report.size_reference = scenario.at("s_tau_size_reference").get<double>();

    for (const auto& m : j.at("methods")) {
        sim::MethodReport mr;
        mr.method = m.at("name").get<std::string>();
        mr.failures = m.value("failures", 0);
        mr.type1 = summary_from_json(m.at("type1"));
        mr.fsr = summary_from_json(m.at("fsr"));
        mr.power = summary_from_json(m.at("power"));
        for (const auto& r : m.at("replications")) {
            mr.replications.push_back({r.at("type1").get<int>(), r.at("fsr").get<double>(),
                                       r.at("power").get<double>(),
                                       r.at("selected_fraction").get<double>()});
        }
        report.methods.push_back(std::move(mr));
    }
    return report;
}

void write_tidy_csv(const sim::MetricsReport& report, std::ostream& out) {
    out << "scenario,n,B,M,alpha,method,metric,estimate,se\n";
    for (const auto& m : report.methods) {
        const auto row = [&](const char* metric, const sim::MetricSummary& s) {
            out << report.spec.scenario << ',' << report.spec.n << ',' << report.spec.B << ','
                << report.spec.M << ',' << format_double(report.spec.alpha) << ',' << m.method
                << ',' << metric << ',' << format_double(s.estimate) << ',' << format_double(s.se)
                << '\n';
        };
        row("type1", m.type1);
        row("fsr", m.fsr);
        row("power", m.power);
    }
}

} // namespace subsel::io
