#ifndef SUBSEL_HTE_HPP
#define SUBSEL_HTE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace subsel::hte {

/// Nuisance model interface: fit on training rows, predict at a point.
class NuisanceLearner {
public:
    virtual ~NuisanceLearner() = default;
    virtual void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) = 0;
    virtual double predict(const Eigen::VectorXd& x) const = 0;
    virtual std::string name() const = 0;
};

using LearnerFactory = std::function<std::unique_ptr<NuisanceLearner>()>;

/// Constant propensity for randomized trials with known allocation.
LearnerFactory known_propensity(double p);

/// Ridge-penalized linear regression (intercept unpenalized, fixed penalty).
LearnerFactory ridge_linear(double penalty = 1e-3);

/// Ridge-penalized logistic regression for binary outcomes.
LearnerFactory ridge_logistic(double penalty = 1e-3);

/// Wraps a fixed function; fit is a no-op. Used for oracle checks.
LearnerFactory fixed_function(std::function<double(const Eigen::VectorXd&)> f, std::string name);

struct FoldAssignment {
    int K = 0;
    std::vector<int> fold_of; // per row, in {0, ..., K-1}

    std::vector<int> fold_sizes() const;
};

/// Uniformly random near-equal split into K folds; deterministic given seed.
FoldAssignment assign_folds(int n, int K, std::uint64_t seed);

struct CrossfitConfig {
    LearnerFactory propensity;
    LearnerFactory outcome;         // control arm; treated arm too unless set below
    LearnerFactory outcome_treated; // optional per-arm override
    double clip_lo = 0.01;
    double clip_hi = 0.99;
};

struct PseudoOutcomeSet {
    Eigen::VectorXd y_tilde;
    std::string propensity_name;
    std::string outcome_name;
    int K = 0;
    double clip_lo = 0.0;
    double clip_hi = 1.0;
    FoldAssignment folds;
    std::vector<std::vector<int>> training_rows; // per fold, rows the learners saw
};

/// Cross-fitted doubly robust pseudo-outcomes: for each fold, nuisances are
/// trained on the other folds, the propensity is clipped into
/// [clip_lo, clip_hi], and
///   y~_i = m1(x_i) - m0(x_i)
///        + (t_i - pi(x_i)) / (pi(x_i) (1 - pi(x_i))) * (y_i - m_{t_i}(x_i)).
PseudoOutcomeSet crossfit(const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y,
                          const Eigen::VectorXi& t,
                          const FoldAssignment& folds,
                          const CrossfitConfig& config);

} // namespace subsel::hte

#endif
