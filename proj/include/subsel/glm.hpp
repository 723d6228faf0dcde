#ifndef SUBSEL_GLM_HPP
#define SUBSEL_GLM_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace subsel::glm {

enum class Link { identity, logit };
enum class Mode { lower, upper, two_sided_lower, two_sided_upper };

std::string to_string(Link link);
std::string to_string(Mode mode);
Link link_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);

/// Fitted model over the feature map phi(x) = (1, x1, ..., xd).
struct GlmFit {
    Link link = Link::identity;
    Eigen::VectorXd beta_hat;  // intercept first
    Eigen::MatrixXd V_hat;     // covariance of beta_hat
    Eigen::MatrixXd xtx_inv;   // (X'X)^-1 of the design; identity-link simulations
    double sigma_hat = 0.0;    // identity link only
    int residual_df = 0;       // identity link only
    int n = 0;

    Eigen::Index dim() const { return beta_hat.size() - 1; }
    double linear_predictor(const Eigen::VectorXd& x) const;
    double se(const Eigen::VectorXd& x) const; // sqrt(phi' V_hat phi)
};

Eigen::VectorXd feature_map(const Eigen::VectorXd& x);

/// Fits by OLS (identity) or IRLS maximum likelihood (logit). IRLS starts at
/// zero, halves steps on likelihood decrease, and converges when the largest
/// coefficient change drops below 1e-8 within 100 iterations. Non-convergence
/// or any |linear predictor| > 30 at convergence raises separation_error.
GlmFit fit_glm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Link link);

/// Finite covariate region over which the band is made simultaneous.
struct EvaluationSet {
    std::vector<Eigen::VectorXd> points;

    static EvaluationSet from_rows(const Eigen::MatrixXd& X);
    void add_rows(const Eigen::MatrixXd& X);
};

/// Monte-Carlo (1-alpha)-quantile of the simulated supremum statistic over K.
/// sided is 1 or 2. Deterministic given the seed; the quantile is the order
/// statistic at index ceil((1-alpha) * n_sims).
double critical_value(const GlmFit& fit,
                      const EvaluationSet& K,
                      double alpha,
                      int sided,
                      int n_sims,
                      std::uint64_t seed);

/// Band-defined selected set. Lower modes require the lower band edge to
/// clear g(tau); upper modes use the upper edge. The membership formula
/// extends to all points; is_extrapolation flags points outside the bounding
/// box of K.
struct BandRegion {
    GlmFit fit;
    double c = 0.0;
    double g_tau = 0.0;
    Mode mode = Mode::lower;
    EvaluationSet K;
    Eigen::VectorXd box_lo, box_hi; // bounding box of K

    bool contains(const Eigen::VectorXd& x) const;
    bool is_extrapolation(const Eigen::VectorXd& x) const;
};

BandRegion select(const GlmFit& fit,
                  const EvaluationSet& K,
                  double tau,
                  double alpha,
                  Mode mode,
                  int n_sims,
                  std::uint64_t seed);

double link_transform(Link link, double tau); // g(tau)

} // namespace subsel::glm

#endif
