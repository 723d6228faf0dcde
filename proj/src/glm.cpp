#include "subsel/glm.hpp"

#include "subsel/errors.hpp"
#include "subsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subsel::glm {

namespace {

constexpr double kSeparationBound = 30.0;
constexpr double kCoefTol = 1e-8;
constexpr int kMaxIrlsIter = 100;
constexpr int kMaxHalvings = 20;

double expit(double eta) {
    if (eta >= 0.0) {
        const double e = std::exp(-eta);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double bernoulli_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        // log p = -log(1+exp(-eta)), log(1-p) = -log(1+exp(eta))
        const double a = eta(i);
        ll += y(i) * a - (a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)));
    }
    return ll;
}

Eigen::MatrixXd design_with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd D(X.rows(), X.cols() + 1);
    D.col(0) = Eigen::VectorXd::Ones(X.rows());
    D.rightCols(X.cols()) = X;
    return D;
}

} // namespace

std::string to_string(Link link) {
    return link == Link::identity ? "identity" : "logit";
}

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::lower: return "lower";
        case Mode::upper: return "upper";
        case Mode::two_sided_lower: return "two-sided-lower";
        case Mode::two_sided_upper: return "two-sided-upper";
    }
    return "lower";
}

Link link_from_string(const std::string& s) {
    if (s == "identity") return Link::identity;
    if (s == "logit") return Link::logit;
    throw config_error("unknown link '" + s + "'");
}

Mode mode_from_string(const std::string& s) {
    if (s == "lower") return Mode::lower;
    if (s == "upper") return Mode::upper;
    if (s == "two-sided-lower") return Mode::two_sided_lower;
    if (s == "two-sided-upper") return Mode::two_sided_upper;
    throw config_error("unknown band mode '" + s + "'");
}

Eigen::VectorXd feature_map(const Eigen::VectorXd& x) {
    Eigen::VectorXd phi(x.size() + 1);
    phi(0) = 1.0;
    phi.tail(x.size()) = x;
    return phi;
}

double GlmFit::linear_predictor(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw config_error("point has wrong dimension");
    return beta_hat(0) + beta_hat.tail(dim()).dot(x);
}

double GlmFit::se(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd phi = feature_map(x);
    const double v = phi.dot(V_hat * phi);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

double link_transform(Link link, double tau) {
    if (link == Link::identity) return tau;
    if (!(tau > 0.0 && tau < 1.0)) throw config_error("tau must lie in (0,1) for the logit link");
    return std::log(tau / (1.0 - tau));
}

GlmFit fit_glm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Link link) {
    if (X.rows() != y.size()) throw data_error("fit_glm: row count mismatch");
    const Eigen::MatrixXd D = design_with_intercept(X);
    const Eigen::Index n = D.rows();
    const Eigen::Index p = D.cols();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) throw numeric_error("singular design matrix");

    GlmFit fit;
    fit.link = link;
    fit.n = static_cast<int>(n);

    if (link == Link::identity) {
        if (n - p < 1) throw numeric_error("no residual degrees of freedom");
        fit.beta_hat = qr.solve(y);
        const Eigen::VectorXd resid = y - D * fit.beta_hat;
        fit.residual_df = static_cast<int>(n - p);
        fit.sigma_hat = std::sqrt(resid.squaredNorm() / fit.residual_df);
        fit.xtx_inv = (D.transpose() * D).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
        fit.V_hat = fit.sigma_hat * fit.sigma_hat * fit.xtx_inv;
        return fit;
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) {
            throw data_error("logit link requires responses in {0,1}");
        }
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    double ll = bernoulli_loglik(eta, y);
    bool converged = false;
    Eigen::MatrixXd info(p, p);

    for (int iter = 0; iter < kMaxIrlsIter; ++iter) {
        Eigen::VectorXd mu(n), w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            mu(i) = expit(eta(i));
            w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
        }
        info = D.transpose() * w.asDiagonal() * D;
        const Eigen::VectorXd score = D.transpose() * (y - mu);
        const Eigen::VectorXd delta = info.ldlt().solve(score);
        if (!delta.allFinite()) throw separation_error("logistic fit diverged");

        double step = 1.0;
        Eigen::VectorXd beta_new;
        Eigen::VectorXd eta_new;
        double ll_new = -std::numeric_limits<double>::infinity();
        for (int halving = 0; halving <= kMaxHalvings; ++halving) {
            beta_new = beta + step * delta;
            eta_new = D * beta_new;
            ll_new = bernoulli_loglik(eta_new, y);
            if (ll_new >= ll - 1e-12) break;
            step *= 0.5;
        }
        const double max_change = (step * delta).cwiseAbs().maxCoeff();
        beta = beta_new;
        eta = eta_new;
        ll = ll_new;
        if (max_change < kCoefTol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw separation_error("logistic fit did not converge");
    if (eta.cwiseAbs().maxCoeff() > kSeparationBound) {
        throw separation_error("fitted probabilities are numerically 0 or 1 (separated data)");
    }

    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = expit(eta(i));
        w(i) = std::max(mu * (1.0 - mu), 1e-10);
    }
    info = D.transpose() * w.asDiagonal() * D;
    fit.beta_hat = beta;
    fit.xtx_inv = (D.transpose() * D).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    fit.V_hat = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    return fit;
}

EvaluationSet EvaluationSet::from_rows(const Eigen::MatrixXd& X) {
    EvaluationSet K;
    K.add_rows(X);
    return K;
}

void EvaluationSet::add_rows(const Eigen::MatrixXd& X) {
    points.reserve(points.size() + static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) points.push_back(X.row(i).transpose());
}

double critical_value(const GlmFit& fit,
                      const EvaluationSet& K,
                      double alpha,
                      int sided,
                      int n_sims,
                      std::uint64_t seed) {
    if (K.points.empty()) throw config_error("evaluation set must be nonempty");
    if (n_sims < 100) throw config_error("critical_value requires n_sims >= 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0,1)");
    if (sided != 1 && sided != 2) throw config_error("sided must be 1 or 2");

    const Eigen::Index p = fit.beta_hat.size();
    const Eigen::MatrixXd& cov = fit.link == Link::logit ? fit.V_hat : fit.xtx_inv;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw numeric_error("coefficient covariance is not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();

    // Simulation uses the covariance scale directly; for the identity link
    // this is the studentized form with the chi-squared denominator, so the
    // result is free of sigma.
    std::vector<Eigen::VectorXd> phis;
    std::vector<double> denoms;
    phis.reserve(K.points.size());
    denoms.reserve(K.points.size());
    for (const auto& x : K.points) {
        const Eigen::VectorXd phi = feature_map(x);
        const double v = phi.dot(cov * phi);
        if (!(v > 0.0)) throw numeric_error("degenerate variance at an evaluation point");
        phis.push_back(phi);
        denoms.push_back(std::sqrt(v));
    }

    const Rng master(seed);
    std::vector<double> stats(static_cast<std::size_t>(n_sims));
    for (int b = 0; b < n_sims; ++b) {
        Rng rng = master.substream(0x51, static_cast<std::uint64_t>(b));
        Eigen::VectorXd xi(p);
        for (Eigen::Index j = 0; j < p; ++j) xi(j) = rng.normal();
        const Eigen::VectorXd z = L * xi;
        double scale = 1.0;
        if (fit.link == Link::identity) {
            scale = std::sqrt(rng.chi_squared(fit.residual_df) / fit.residual_df);
        }
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < phis.size(); ++k) {
            double t = phis[k].dot(z) / (scale * denoms[k]);
            if (sided == 2) t = std::fabs(t);
            sup = std::max(sup, t);
        }
        stats[static_cast<std::size_t>(b)] = sup;
    }

    const std::size_t idx = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(n_sims)));
    const std::size_t pos = std::min(idx, static_cast<std::size_t>(n_sims)) - 1;
    std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(pos), stats.end());
    return std::max(stats[pos], 0.0);
}

bool BandRegion::contains(const Eigen::VectorXd& x) const {
    const double center = fit.linear_predictor(x);
    const double half_width = c * fit.se(x);
    const bool lower_mode = mode == Mode::lower || mode == Mode::two_sided_lower;
    const double edge = lower_mode ? center - half_width : center + half_width;
    return edge >= g_tau;
}

bool BandRegion::is_extrapolation(const Eigen::VectorXd& x) const {
    if (x.size() != box_lo.size()) throw config_error("point has wrong dimension");
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x(j) < box_lo(j) || x(j) > box_hi(j)) return true;
    }
    return false;
}

BandRegion select(const GlmFit& fit,
                  const EvaluationSet& K,
                  double tau,
                  double alpha,
                  Mode mode,
                  int n_sims,
                  std::uint64_t seed) {
    BandRegion region;
    region.fit = fit;
    region.mode = mode;
    region.g_tau = link_transform(fit.link, tau);
    const int sided = (mode == Mode::lower || mode == Mode::upper) ? 1 : 2;
    region.c = critical_value(fit, K, alpha, sided, n_sims, seed);

    if (K.points.empty()) throw config_error("evaluation set must be nonempty");
    region.K = K;
    region.box_lo = K.points.front();
    region.box_hi = K.points.front();
    for (const auto& x : K.points) {
        region.box_lo = region.box_lo.cwiseMin(x);
        region.box_hi = region.box_hi.cwiseMax(x);
    }
    return region;
}

} // namespace subsel::glm
