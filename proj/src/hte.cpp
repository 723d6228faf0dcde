#include "subsel/hte.hpp"

#include "subsel/errors.hpp"
#include "subsel/rng.hpp"

#include <algorithm>
#include <cmath>

namespace subsel::hte {

namespace {

Eigen::MatrixXd design_with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd D(X.rows(), X.cols() + 1);
    D.col(0) = Eigen::VectorXd::Ones(X.rows());
    D.rightCols(X.cols()) = X;
    return D;
}

double expit(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

class RidgeLinear final : public NuisanceLearner {
public:
    explicit RidgeLinear(double penalty) : penalty_(penalty) {}

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override {
        const Eigen::MatrixXd D = design_with_intercept(X);
        const Eigen::Index p = D.cols();
        Eigen::MatrixXd A = D.transpose() * D;
        for (Eigen::Index j = 1; j < p; ++j) A(j, j) += penalty_;
        beta_ = A.ldlt().solve(D.transpose() * y);
        if (!beta_.allFinite()) throw numeric_error("ridge linear fit failed");
    }

    double predict(const Eigen::VectorXd& x) const override {
        return beta_(0) + beta_.tail(beta_.size() - 1).dot(x);
    }

    std::string name() const override { return "ridge-linear"; }

private:
    double penalty_;
    Eigen::VectorXd beta_;
};

class RidgeLogistic final : public NuisanceLearner {
public:
    explicit RidgeLogistic(double penalty) : penalty_(penalty) {}

    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) override {
        const Eigen::MatrixXd D = design_with_intercept(X);
        const Eigen::Index n = D.rows();
        const Eigen::Index p = D.cols();
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        for (int iter = 0; iter < 200; ++iter) {
            const Eigen::VectorXd eta = D * beta;
            Eigen::VectorXd mu(n), w(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                mu(i) = expit(eta(i));
                w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
            }
            Eigen::MatrixXd A = D.transpose() * w.asDiagonal() * D;
            Eigen::VectorXd grad = D.transpose() * (y - mu);
            for (Eigen::Index j = 1; j < p; ++j) {
                A(j, j) += penalty_;
                grad(j) -= penalty_ * beta(j);
            }
            const Eigen::VectorXd delta = A.ldlt().solve(grad);
            if (!delta.allFinite()) throw numeric_error("ridge logistic fit failed");
            beta += delta;
            if (delta.cwiseAbs().maxCoeff() < 1e-8) break;
        }
        beta_ = beta;
    }

    double predict(const Eigen::VectorXd& x) const override {
        return expit(beta_(0) + beta_.tail(beta_.size() - 1).dot(x));
    }

    std::string name() const override { return "ridge-logistic"; }

private:
    double penalty_;
    Eigen::VectorXd beta_;
};

class ConstantLearner final : public NuisanceLearner {
public:
    explicit ConstantLearner(double value, std::string name)
        : value_(value), name_(std::move(name)) {}

    void fit(const Eigen::MatrixXd&, const Eigen::VectorXd&) override {}
    double predict(const Eigen::VectorXd&) const override { return value_; }
    std::string name() const override { return name_; }

private:
    double value_;
    std::string name_;
};

class FixedFunctionLearner final : public NuisanceLearner {
public:
    FixedFunctionLearner(std::function<double(const Eigen::VectorXd&)> f, std::string name)
        : f_(std::move(f)), name_(std::move(name)) {}

    void fit(const Eigen::MatrixXd&, const Eigen::VectorXd&) override {}
    double predict(const Eigen::VectorXd& x) const override { return f_(x); }
    std::string name() const override { return name_; }

private:
    std::function<double(const Eigen::VectorXd&)> f_;
    std::string name_;
};

} // namespace

LearnerFactory known_propensity(double p) {
    if (!(p > 0.0 && p < 1.0)) throw config_error("known_propensity: p must lie in (0,1)");
    return [p]() -> std::unique_ptr<NuisanceLearner> {
        return std::make_unique<ConstantLearner>(p, "known(" + std::to_string(p) + ")");
    };
}

LearnerFactory ridge_linear(double penalty) {
    return [penalty]() -> std::unique_ptr<NuisanceLearner> {
        return std::make_unique<RidgeLinear>(penalty);
    };
}

LearnerFactory ridge_logistic(double penalty) {
    return [penalty]() -> std::unique_ptr<NuisanceLearner> {
        return std::make_unique<RidgeLogistic>(penalty);
    };
}

LearnerFactory fixed_function(std::function<double(const Eigen::VectorXd&)> f, std::string name) {
    return [f = std::move(f), name]() -> std::unique_ptr<NuisanceLearner> {
        return std::make_unique<FixedFunctionLearner>(f, name);
    };
}

std::vector<int> FoldAssignment::fold_sizes() const {
    std::vector<int> sizes(static_cast<std::size_t>(K), 0);
    for (const int k : fold_of) ++sizes[static_cast<std::size_t>(k)];
    return sizes;
}

FoldAssignment assign_folds(int n, int K, std::uint64_t seed) {
    if (K < 2) throw config_error("assign_folds: K must be at least 2");
    if (K > n) throw config_error("assign_folds: K must not exceed n");
    Rng rng(seed);
    const auto perm = rng.permutation(static_cast<std::size_t>(n));

    FoldAssignment folds;
    folds.K = K;
    folds.fold_of.assign(static_cast<std::size_t>(n), 0);
    // First n % K folds take the extra row.
    const int base = n / K;
    const int remainder = n % K;
    std::size_t pos = 0;
    for (int k = 0; k < K; ++k) {
        const int size = base + (k < remainder ? 1 : 0);
        for (int s = 0; s < size; ++s) folds.fold_of[perm[pos++]] = k;
    }
    return folds;
}

PseudoOutcomeSet crossfit(const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y,
                          const Eigen::VectorXi& t,
                          const FoldAssignment& folds,
                          const CrossfitConfig& config) {
    const Eigen::Index n = X.rows();
    if (y.size() != n || t.size() != n) throw data_error("crossfit: length mismatch");
    if (static_cast<Eigen::Index>(folds.fold_of.size()) != n) {
        throw config_error("crossfit: fold assignment does not match data");
    }
    if (!(config.clip_lo > 0.0 && config.clip_lo <= config.clip_hi && config.clip_hi < 1.0)) {
        throw config_error("crossfit: clip bounds must satisfy 0 < lo <= hi < 1");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (t(i) != 0 && t(i) != 1) throw data_error("crossfit: treatment must be 0 or 1");
    }

    PseudoOutcomeSet out;
    out.y_tilde.resize(n);
    out.K = folds.K;
    out.clip_lo = config.clip_lo;
    out.clip_hi = config.clip_hi;
    out.folds = folds;
    out.training_rows.resize(static_cast<std::size_t>(folds.K));

    for (int k = 0; k < folds.K; ++k) {
        std::vector<int> train, held;
        for (Eigen::Index i = 0; i < n; ++i) {
            (folds.fold_of[static_cast<std::size_t>(i)] == k ? held : train)
                .push_back(static_cast<int>(i));
        }
        if (held.empty()) throw config_error("crossfit: fold " + std::to_string(k) + " is empty");

        int treated = 0, control = 0;
        for (const int i : train) (t(i) == 1 ? treated : control)++;
        if (treated == 0 || control == 0) {
            throw fold_error("training complement of fold " + std::to_string(k) +
                             " lacks a treatment arm");
        }
        out.training_rows[static_cast<std::size_t>(k)] = train;

        Eigen::MatrixXd X_tr(train.size(), X.cols());
        Eigen::VectorXd t_tr(train.size());
        for (std::size_t r = 0; r < train.size(); ++r) {
            X_tr.row(static_cast<Eigen::Index>(r)) = X.row(train[r]);
            t_tr(static_cast<Eigen::Index>(r)) = t(train[r]);
        }
        Eigen::MatrixXd X0(control, X.cols()), X1(treated, X.cols());
        Eigen::VectorXd y0(control), y1(treated);
        Eigen::Index i0 = 0, i1 = 0;
        for (const int i : train) {
            if (t(i) == 1) {
                X1.row(i1) = X.row(i);
                y1(i1++) = y(i);
            } else {
                X0.row(i0) = X.row(i);
                y0(i0++) = y(i);
            }
        }

        auto prop = config.propensity();
        auto m0 = config.outcome();
        auto m1 = config.outcome_treated ? config.outcome_treated() : config.outcome();
        prop->fit(X_tr, t_tr);
        m0->fit(X0, y0);
        m1->fit(X1, y1);
        if (k == 0) {
            out.propensity_name = prop->name();
            out.outcome_name = m0->name();
        }

        for (const int i : held) {
            const Eigen::VectorXd x = X.row(i).transpose();
            const double pi = std::clamp(prop->predict(x), config.clip_lo, config.clip_hi);
            const double mu0 = m0->predict(x);
            const double mu1 = m1->predict(x);
            const double mu_t = t(i) == 1 ? mu1 : mu0;
            out.y_tilde(i) =
                mu1 - mu0 + (t(i) - pi) / (pi * (1.0 - pi)) * (y(i) - mu_t);
        }
    }
    if (!out.y_tilde.allFinite()) throw numeric_error("crossfit produced non-finite pseudo-outcomes");
    return out;
}

} // namespace subsel::hte
