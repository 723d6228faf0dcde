#ifndef SUBSEL_SIMEVAL_HPP
#define SUBSEL_SIMEVAL_HPP

#include "subsel/dataset.hpp"
#include "subsel/glm.hpp"
#include "subsel/iss.hpp"
#include "subsel/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subsel::sim {

/// One synthetic covariate: Uniform[0,1] when continuous, Bernoulli(0.5)
/// when binary.
struct ColumnGen {
    std::string name;
    bool binary = false;
};

struct SelectionColumn {
    std::string name;
    int index = 0; // into the generator's column layout
    data::Direction direction = data::Direction::increasing;
};

/// Named generative scenario: the regression function or CATE, its
/// threshold, the covariate generator, and the wiring the selection methods
/// use. size_target is the measure of S_tau under this generator;
/// size_reference is the externally reported value kept for context.
struct GroundTruth {
    enum class Kind { regression, cate };

    Kind kind = Kind::regression;
    std::string name;
    double tau = 0.0;
    std::vector<ColumnGen> generator;
    std::function<double(const Eigen::RowVectorXd&)> eval;
    std::function<double(const Eigen::RowVectorXd&)> prognostic;
    std::vector<SelectionColumn> selection;
    std::vector<int> nuisance_columns;
    double size_target = 0.0;
    double size_reference = 0.0;

    bool member(const Eigen::RowVectorXd& x) const { return eval(x) >= tau; }
    int dim() const { return static_cast<int>(generator.size()); }
};

GroundTruth scenario_library(const std::string& name);
std::vector<std::string> scenario_names();

Eigen::MatrixXd sample_covariates(const GroundTruth& gt, int n, Rng rng);

enum class ResponseModel { bernoulli, treatment_effect, ite_reference };

std::string to_string(ResponseModel model);
ResponseModel response_model_from_string(const std::string& s);

struct Responses {
    Eigen::VectorXd y;
    std::optional<Eigen::VectorXi> t;
};

Responses sample_responses(const GroundTruth& gt,
                           const Eigen::MatrixXd& X,
                           ResponseModel model,
                           Rng rng);

struct MethodOptions {
    std::string name; // "iss" or "glm"
    iss::Scheme scheme = iss::Scheme::frontier;
    iss::PreScaling scaling = iss::PreScaling::unit_variance;
    int glm_sims = 1000;

    std::string label() const;
};

struct StudySpec {
    std::string scenario;
    int n = 250;
    int B = 200;
    int M = 100000;
    double alpha = 0.1;
    std::optional<double> tau_override;
    std::optional<ResponseModel> model_override;
    std::uint64_t seed = 0;
    std::vector<MethodOptions> methods;
    int folds = 4;
};

struct MetricSummary {
    double estimate = 0.0;
    double se = 0.0;
};

struct ReplicationDigest {
    int type1 = 0;
    double fsr = 0.0;
    double power = 0.0;
    double selected_fraction = 0.0;
};

struct MethodReport {
    std::string method;
    MetricSummary type1;
    MetricSummary fsr;
    MetricSummary power;
    int failures = 0;
    std::vector<ReplicationDigest> replications;
};

struct MetricsReport {
    StudySpec spec;
    ResponseModel model = ResponseModel::bernoulli;
    double tau = 0.0;
    double size_target = 0.0;
    double size_reference = 0.0;
    std::vector<MethodReport> methods;
};

using RegionFn = std::function<bool(const Eigen::RowVectorXd&)>;

/// Evaluates Type I error rate, false selection rate and power over
/// per-replication probe samples (substreams of the given seed; one probe
/// set per replication, shared across methods). regions[b][m] is the
/// membership function of method m at replication b.
MetricsReport estimate_metrics(const std::vector<std::vector<RegionFn>>& regions,
                               const std::vector<std::string>& method_names,
                               const GroundTruth& gt,
                               double tau,
                               int M,
                               std::uint64_t seed);

/// Runs B independent replications (generate data, optionally build
/// pseudo-outcomes, run each method) and evaluates the metrics. Fully
/// deterministic given spec.seed.
MetricsReport run_study(const StudySpec& spec);

} // namespace subsel::sim

#endif
