#include "subsel/simeval.hpp"

#include "subsel/errors.hpp"
#include "subsel/hte.hpp"
#include "subsel/special.hpp"

#include <algorithm>
#include <cmath>

namespace subsel::sim {

namespace {

// Substream labels for the master seed.
constexpr std::uint64_t kCovariateStream = 1;
constexpr std::uint64_t kResponseStream = 2;
constexpr std::uint64_t kProbeStream = 3;
constexpr std::uint64_t kFoldStream = 4;
constexpr std::uint64_t kMethodStream = 5;

double expit(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

// Decreasing logistic regression function calibrated so that the measure of
// S_tau under Uniform[0,1] equals one half at tau = 0.76.
struct LogisticCurve {
    double intercept = logit(0.76) + 4.0;
    double slope = -8.0;
    double operator()(double x) const { return expit(intercept + slope * x); }
};

double piecewise_linear(double x, const std::vector<std::pair<double, double>>& knots) {
    if (x <= knots.front().first) return knots.front().second;
    for (std::size_t k = 1; k < knots.size(); ++k) {
        if (x <= knots[k].first) {
            const auto& [x0, y0] = knots[k - 1];
            const auto& [x1, y1] = knots[k];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    return knots.back().second;
}

GroundTruth regression_scenario(const std::string& name) {
    GroundTruth gt;
    gt.kind = GroundTruth::Kind::regression;
    gt.name = name;
    gt.generator = {{"exposure", false}};
    gt.selection = {{"exposure", 0, data::Direction::decreasing}};

    const LogisticCurve curve;
    if (name == "logistic") {
        gt.tau = 0.76;
        gt.eval = [curve](const Eigen::RowVectorXd& x) { return curve(x(0)); };
        gt.size_target = 0.5;
        gt.size_reference = 0.50;
    } else if (name == "logistic-truncated") {
        gt.tau = 0.76;
        const double cap = gt.tau - 0.01;
        gt.eval = [curve, cap](const Eigen::RowVectorXd& x) { return std::min(curve(x(0)), cap); };
        gt.size_target = 0.0;
        gt.size_reference = 0.0;
    } else if (name == "step") {
        gt.tau = 0.34;
        gt.eval = [](const Eigen::RowVectorXd& x) { return x(0) < 0.78 ? 0.70 : 0.10; };
        gt.size_target = 0.78;
        gt.size_reference = 0.78;
    } else if (name == "logistic-quadratic") {
        gt.tau = 0.75;
        // Inverted-U on the logit scale: peak at 0.35, superlevel set
        // [0.1, 0.6] of measure one half.
        const double peak = logit(0.97);
        const double curvature = (peak - logit(0.75)) / (0.25 * 0.25);
        gt.eval = [peak, curvature](const Eigen::RowVectorXd& x) {
            const double d = x(0) - 0.35;
            return expit(peak - curvature * d * d);
        };
        gt.size_target = 0.5;
        gt.size_reference = 0.50;
    } else if (name == "nonsmooth-nonmonotone") {
        gt.tau = 0.38;
        // Oscillating decline whose superlevel set stays the interval
        // [0, 0.55].
        const std::vector<std::pair<double, double>> knots = {
            {0.00, 0.80}, {0.15, 0.62}, {0.25, 0.70}, {0.40, 0.50}, {0.50, 0.56},
            {0.55, 0.38}, {0.70, 0.15}, {0.80, 0.22}, {1.00, 0.05}};
        gt.eval = [knots](const Eigen::RowVectorXd& x) { return piecewise_linear(x(0), knots); };
        gt.size_target = 0.55;
        gt.size_reference = 0.55;
    } else {
        throw config_error("unknown scenario '" + name + "'");
    }
    return gt;
}

GroundTruth cate_scenario(const std::string& name) {
    GroundTruth gt;
    gt.kind = GroundTruth::Kind::cate;
    gt.name = name;
    // Layout: three binary biomarkers then three continuous ones.
    gt.generator = {{"b1", true},  {"b2", true},  {"b3", true},
                    {"c1", false}, {"c2", false}, {"c3", false}};
    constexpr int b1 = 0, b2 = 1, b3 = 2, c1 = 3, c2 = 4, c3 = 5;

    if (name == "gaussian-cdf") {
        const double beta0 = -0.11, beta1 = 1.53;
        gt.tau = 0.17;
        gt.eval = [=](const Eigen::RowVectorXd& x) {
            return beta0 + beta1 * normal_cdf(20.0 * (x(c1) - 0.5));
        };
        gt.prognostic = [=](const Eigen::RowVectorXd& x) {
            return 2.3 * (0.5 * (x(b1) == 1.0 ? 1.0 : 0.0) + x(c1));
        };
        gt.selection = {{"c1", c1, data::Direction::increasing}};
        gt.nuisance_columns = {b1, c1};
        gt.size_target = 0.5 - normal_quantile((gt.tau - beta0) / beta1) / 20.0;
        gt.size_reference = 0.52;
    } else if (name == "linear") {
        const double beta0 = -0.55, beta1 = 6.62;
        gt.tau = 1.65;
        gt.eval = [=](const Eigen::RowVectorXd& x) { return beta0 + beta1 * x(c2); };
        gt.prognostic = [=](const Eigen::RowVectorXd& x) {
            return 1.41 * (x(c2) - (x(b3) == 0.0 ? 1.0 : 0.0));
        };
        gt.selection = {{"c2", c2, data::Direction::increasing}};
        gt.nuisance_columns = {b3, c2};
        gt.size_target = 1.0 - (gt.tau - beta0) / beta1;
        gt.size_reference = 0.51;
    } else if (name == "and-condition") {
        const double beta0 = -0.10, beta1 = 5.07;
        gt.tau = 2.48;
        gt.eval = [=](const Eigen::RowVectorXd& x) {
            const double pred = (x(c2) > 0.25 && x(b1) == 0.0) ? 1.0 : 0.0;
            return beta0 + beta1 * pred;
        };
        gt.prognostic = [=](const Eigen::RowVectorXd& x) {
            return 1.38 * ((x(b1) == 0.0 ? 1.0 : 0.0) - 0.5 * x(c3));
        };
        gt.selection = {{"c2", c2, data::Direction::increasing},
                        {"b1", b1, data::Direction::decreasing}};
        gt.nuisance_columns = {b1, c2, c3};
        gt.size_target = 0.75 * 0.5;
        gt.size_reference = 0.46;
    } else if (name == "or-condition") {
        const double beta0 = -0.45, beta1 = 2.44;
        gt.tau = 0.78;
        gt.eval = [=](const Eigen::RowVectorXd& x) {
            const double pred = (x(c2) > 0.3 || x(b2) == 1.0) ? 1.0 : 0.0;
            return beta0 + beta1 * pred;
        };
        gt.prognostic = [=](const Eigen::RowVectorXd& x) { return 2.9 * (x(c1) - x(c2)); };
        gt.selection = {{"c2", c2, data::Direction::increasing},
                        {"b2", b2, data::Direction::increasing}};
        gt.nuisance_columns = {b2, c1, c2};
        gt.size_target = 1.0 - 0.3 * 0.5;
        gt.size_reference = 0.81;
    } else {
        throw config_error("unknown scenario '" + name + "'");
    }
    return gt;
}

} // namespace

GroundTruth scenario_library(const std::string& name) {
    for (const auto& reg :
         {"logistic", "logistic-truncated", "step", "logistic-quadratic", "nonsmooth-nonmonotone"}) {
        if (name == reg) return regression_scenario(name);
    }
    for (const auto& cate : {"gaussian-cdf", "linear", "and-condition", "or-condition"}) {
        if (name == cate) return cate_scenario(name);
    }
    throw config_error("unknown scenario '" + name + "'");
}

std::vector<std::string> scenario_names() {
    return {"logistic",     "logistic-truncated", "step",
            "logistic-quadratic", "nonsmooth-nonmonotone", "gaussian-cdf",
            "linear",       "and-condition",      "or-condition"};
}

Eigen::MatrixXd sample_covariates(const GroundTruth& gt, int n, Rng rng) {
    Eigen::MatrixXd X(n, gt.dim());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < gt.dim(); ++j) {
            X(i, j) = gt.generator[static_cast<std::size_t>(j)].binary
                          ? (rng.bernoulli(0.5) ? 1.0 : 0.0)
                          : rng.uniform();
        }
    }
    return X;
}

std::string to_string(ResponseModel model) {
    switch (model) {
        case ResponseModel::bernoulli: return "bernoulli";
        case ResponseModel::treatment_effect: return "treatment-effect";
        case ResponseModel::ite_reference: return "ite-reference";
    }
    return "bernoulli";
}

ResponseModel response_model_from_string(const std::string& s) {
    if (s == "bernoulli") return ResponseModel::bernoulli;
    if (s == "treatment-effect") return ResponseModel::treatment_effect;
    if (s == "ite-reference") return ResponseModel::ite_reference;
    throw config_error("unknown response model '" + s + "'");
}

Responses sample_responses(const GroundTruth& gt,
                           const Eigen::MatrixXd& X,
                           ResponseModel model,
                           Rng rng) {
    const Eigen::Index n = X.rows();
    Responses out;
    out.y.resize(n);

    switch (model) {
        case ResponseModel::bernoulli: {
            if (gt.kind != GroundTruth::Kind::regression) {
                throw config_error("bernoulli responses require a regression scenario");
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                const double eta = gt.eval(X.row(i));
                if (eta < 0.0 || eta > 1.0) {
                    throw config_error("scenario regression function leaves [0,1]");
                }
                out.y(i) = rng.bernoulli(eta) ? 1.0 : 0.0;
            }
            break;
        }
        case ResponseModel::treatment_effect: {
            if (gt.kind != GroundTruth::Kind::cate) {
                throw config_error("treatment-effect responses require a CATE scenario");
            }
            out.t = Eigen::VectorXi(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const int ti = rng.bernoulli(0.5) ? 1 : 0;
                (*out.t)(i) = ti;
                out.y(i) = gt.prognostic(X.row(i)) + ti * gt.eval(X.row(i)) + rng.normal();
            }
            break;
        }
        case ResponseModel::ite_reference: {
            if (gt.kind != GroundTruth::Kind::cate) {
                throw config_error("ite-reference responses require a CATE scenario");
            }
            const double sd = std::sqrt(2.0);
            for (Eigen::Index i = 0; i < n; ++i) {
                out.y(i) = gt.eval(X.row(i)) + sd * rng.normal();
            }
            break;
        }
    }
    return out;
}

std::string MethodOptions::label() const {
    return name;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    const std::size_t B = values.size();
    if (B == 0) return s;
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.estimate = sum / static_cast<double>(B);
    if (B > 1) {
        double ss = 0.0;
        for (const double v : values) ss += (v - s.estimate) * (v - s.estimate);
        const double var = ss / static_cast<double>(B - 1);
        s.se = std::sqrt(var / static_cast<double>(B));
    }
    return s;
}

} // namespace

MetricsReport estimate_metrics(const std::vector<std::vector<RegionFn>>& regions,
                               const std::vector<std::string>& method_names,
                               const GroundTruth& gt,
                               double tau,
                               int M,
                               std::uint64_t seed) {
    if (M < 1) throw config_error("estimate_metrics requires M >= 1");
    const std::size_t B = regions.size();
    if (B < 1) throw config_error("estimate_metrics requires B >= 1");
    const std::size_t n_methods = method_names.size();

    GroundTruth truth = gt;
    truth.tau = tau;

    const Rng master(seed);
    std::vector<std::vector<double>> type1(n_methods), fsr(n_methods), power(n_methods);
    std::vector<std::vector<ReplicationDigest>> digests(n_methods);

    for (std::size_t b = 0; b < B; ++b) {
        if (regions[b].size() != n_methods) {
            throw config_error("estimate_metrics: method count mismatch at replication " +
                               std::to_string(b));
        }
        const Eigen::MatrixXd probes =
            sample_covariates(truth, M, master.substream(kProbeStream, b));

        std::vector<long> n_sel(n_methods, 0), n_false(n_methods, 0), n_hit(n_methods, 0);
        long n_true = 0;
        for (int m = 0; m < M; ++m) {
            const Eigen::RowVectorXd x = probes.row(m);
            const bool in_s = truth.member(x);
            if (in_s) ++n_true;
            for (std::size_t j = 0; j < n_methods; ++j) {
                if (!regions[b][j](x)) continue;
                ++n_sel[j];
                if (in_s) {
                    ++n_hit[j];
                } else {
                    ++n_false[j];
                }
            }
        }
        for (std::size_t j = 0; j < n_methods; ++j) {
            ReplicationDigest d;
            d.type1 = n_false[j] > 0 ? 1 : 0;
            d.fsr = n_sel[j] > 0 ? static_cast<double>(n_false[j]) / n_sel[j] : 0.0;
            d.power = n_true > 0 ? static_cast<double>(n_hit[j]) / n_true : 0.0;
            d.selected_fraction = static_cast<double>(n_sel[j]) / M;
            if (d.fsr > static_cast<double>(d.type1)) {
                throw numeric_error("false selection rate exceeded the Type I indicator");
            }
            type1[j].push_back(d.type1);
            fsr[j].push_back(d.fsr);
            power[j].push_back(d.power);
            digests[j].push_back(d);
        }
    }

    MetricsReport report;
    report.tau = tau;
    report.size_target = gt.size_target;
    report.size_reference = gt.size_reference;
    for (std::size_t j = 0; j < n_methods; ++j) {
        MethodReport mr;
        mr.method = method_names[j];
        mr.type1 = summarize(type1[j]);
        mr.fsr = summarize(fsr[j]);
        mr.power = summarize(power[j]);
        mr.replications = digests[j];
        report.methods.push_back(std::move(mr));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Study driver
// ---------------------------------------------------------------------------

namespace {

struct SelectionProblem {
    data::Dataset ds;
    std::vector<int> source_indices; // generator-space column of each dataset column
    iss::ResponseTest kind = iss::ResponseTest::binary;
    glm::Link link = glm::Link::logit;
};

SelectionProblem build_selection_problem(const GroundTruth& gt,
                                         const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y_sel,
                                         ResponseModel model) {
    SelectionProblem prob;
    for (const auto& sel : gt.selection) {
        const auto& gen = gt.generator[static_cast<std::size_t>(sel.index)];
        prob.ds.columns.push_back(
            {sel.name, gen.binary ? data::ColumnKind::binary : data::ColumnKind::continuous,
             sel.direction});
        prob.source_indices.push_back(sel.index);
    }
    prob.ds.X.resize(X.rows(), static_cast<Eigen::Index>(prob.source_indices.size()));
    for (std::size_t j = 0; j < prob.source_indices.size(); ++j) {
        prob.ds.X.col(static_cast<Eigen::Index>(j)) = X.col(prob.source_indices[j]);
    }
    prob.ds.y = y_sel;
    prob.ds.negated.assign(prob.source_indices.size(), false);
    if (model == ResponseModel::bernoulli) {
        prob.ds.response_kind = data::ResponseKind::binary;
        prob.kind = iss::ResponseTest::binary;
        prob.link = glm::Link::logit;
    } else {
        prob.ds.response_kind = data::ResponseKind::continuous;
        prob.kind = iss::ResponseTest::quantile;
        prob.link = glm::Link::identity;
    }
    return prob;
}

} // namespace

MetricsReport run_study(const StudySpec& spec) {
    if (spec.n < 1 || spec.B < 1 || spec.M < 1) {
        throw config_error("study requires n, B, M >= 1");
    }
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw config_error("alpha must lie in (0,1)");
    if (spec.methods.empty()) throw config_error("study requires at least one method");

    GroundTruth gt = scenario_library(spec.scenario);
    const double tau = spec.tau_override.value_or(gt.tau);
    gt.tau = tau;

    ResponseModel model = gt.kind == GroundTruth::Kind::regression
                              ? ResponseModel::bernoulli
                              : ResponseModel::treatment_effect;
    if (spec.model_override) model = *spec.model_override;
    if (model == ResponseModel::bernoulli && gt.kind != GroundTruth::Kind::regression) {
        throw config_error("scenario '" + spec.scenario + "' is not a regression scenario");
    }
    if (model != ResponseModel::bernoulli && gt.kind != GroundTruth::Kind::cate) {
        throw config_error("scenario '" + spec.scenario + "' is not a CATE scenario");
    }
    for (const auto& m : spec.methods) {
        if (m.name != "iss" && m.name != "glm") {
            throw config_error("unknown method '" + m.name + "'");
        }
    }

    const Rng master(spec.seed);
    std::vector<std::vector<RegionFn>> regions(static_cast<std::size_t>(spec.B));
    std::vector<int> failures(spec.methods.size(), 0);

    for (int b = 0; b < spec.B; ++b) {
        const Eigen::MatrixXd X =
            sample_covariates(gt, spec.n, master.substream(kCovariateStream, b));
        const Responses resp =
            sample_responses(gt, X, model, master.substream(kResponseStream, b));

        Eigen::VectorXd y_sel = resp.y;
        if (model == ResponseModel::treatment_effect) {
            const std::uint64_t fold_seed =
                Rng(spec.seed).substream(kFoldStream, b).next_u64();
            const hte::FoldAssignment folds = hte::assign_folds(spec.n, spec.folds, fold_seed);
            Eigen::MatrixXd X_nuis(X.rows(),
                                   static_cast<Eigen::Index>(gt.nuisance_columns.size()));
            for (std::size_t j = 0; j < gt.nuisance_columns.size(); ++j) {
                X_nuis.col(static_cast<Eigen::Index>(j)) = X.col(gt.nuisance_columns[j]);
            }
            hte::CrossfitConfig cf;
            cf.propensity = hte::known_propensity(0.5);
            cf.outcome = hte::ridge_linear();
            y_sel = hte::crossfit(X_nuis, resp.y, *resp.t, folds, cf).y_tilde;
        }

        const SelectionProblem prob = build_selection_problem(gt, X, y_sel, model);
        regions[static_cast<std::size_t>(b)].reserve(spec.methods.size());

        for (std::size_t j = 0; j < spec.methods.size(); ++j) {
            const auto& method = spec.methods[j];
            RegionFn fn;
            try {
                if (method.name == "iss") {
                    iss::Options opts;
                    opts.tau = tau;
                    opts.alpha = spec.alpha;
                    opts.kind = prob.kind;
                    opts.scheme = method.scheme;
                    opts.scaling = method.scaling;
                    iss::UpperSetRegion region = iss::select_lower(prob.ds, opts);
                    const std::vector<int> src = prob.source_indices;
                    fn = [region = std::move(region), src](const Eigen::RowVectorXd& x) {
                        Eigen::VectorXd sel(static_cast<Eigen::Index>(src.size()));
                        for (std::size_t k = 0; k < src.size(); ++k) {
                            sel(static_cast<Eigen::Index>(k)) = x(src[k]);
                        }
                        return region.contains(sel);
                    };
                } else {
                    const std::uint64_t glm_seed =
                        Rng(spec.seed).substream(kMethodStream, static_cast<std::uint64_t>(b))
                            .substream(j)
                            .next_u64();
                    const glm::GlmFit fit = glm::fit_glm(prob.ds.X, prob.ds.y, prob.link);
                    const glm::EvaluationSet K = glm::EvaluationSet::from_rows(prob.ds.X);
                    glm::BandRegion region = glm::select(fit, K, tau, spec.alpha,
                                                         glm::Mode::lower, method.glm_sims,
                                                         glm_seed);
                    const std::vector<int> src = prob.source_indices;
                    fn = [region = std::move(region), src](const Eigen::RowVectorXd& x) {
                        Eigen::VectorXd sel(static_cast<Eigen::Index>(src.size()));
                        for (std::size_t k = 0; k < src.size(); ++k) {
                            sel(static_cast<Eigen::Index>(k)) = x(src[k]);
                        }
                        return region.contains(sel);
                    };
                }
            } catch (const numeric_error&) {
                // A diverged fit selects nothing; recorded per method.
                ++failures[j];
                fn = [](const Eigen::RowVectorXd&) { return false; };
            }
            regions[static_cast<std::size_t>(b)].push_back(std::move(fn));
        }
    }

    std::vector<std::string> names;
    names.reserve(spec.methods.size());
    for (const auto& m : spec.methods) names.push_back(m.label());

    MetricsReport report = estimate_metrics(regions, names, gt, tau, spec.M, spec.seed);
    report.spec = spec;
    report.model = model;
    for (std::size_t j = 0; j < report.methods.size(); ++j) {
        report.methods[j].failures = failures[j];
    }
    return report;
}

} // namespace subsel::sim
