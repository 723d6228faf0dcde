#include "subsel/iss.hpp"

#include "subsel/errors.hpp"
#include "subsel/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace subsel::iss {

std::string to_string(Side side) {
    switch (side) {
        case Side::lower: return "lower";
        case Side::upper: return "upper";
        case Side::two_sided_lower: return "two-sided-lower";
        case Side::two_sided_upper: return "two-sided-upper";
    }
    return "lower";
}

Side side_from_string(const std::string& s) {
    if (s == "lower") return Side::lower;
    if (s == "upper") return Side::upper;
    if (s == "two-sided-lower") return Side::two_sided_lower;
    if (s == "two-sided-upper") return Side::two_sided_upper;
    throw config_error("unknown region side '" + s + "'");
}

// ---------------------------------------------------------------------------
// Test sequence and p-values
// ---------------------------------------------------------------------------

TestSequence build_sequence(const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y,
                            const Eigen::VectorXd& x0) {
    if (X.cols() != x0.size()) throw config_error("build_sequence: dimension mismatch");
    struct Item {
        double dist;
        Eigen::Index row;
    };
    std::vector<Item> items;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        bool dominated = true;
        double dist = 0.0;
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double gap = x0(j) - X(i, j);
            if (gap < 0.0) {
                dominated = false;
                break;
            }
            dist = std::max(dist, gap);
        }
        if (dominated) items.push_back({dist, i});
    }
    std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            if (X(a.row, j) != X(b.row, j)) return X(a.row, j) < X(b.row, j);
        }
        return a.row < b.row;
    });

    TestSequence seq;
    seq.x0 = x0;
    seq.ordered_responses.reserve(items.size());
    seq.distances.reserve(items.size());
    for (const auto& it : items) {
        seq.ordered_responses.push_back(y(it.row));
        seq.distances.push_back(it.dist);
    }
    return seq;
}

TestSequence build_sequence(const data::Dataset& ds, const Eigen::VectorXd& x0) {
    return build_sequence(ds.X, ds.y, x0);
}

double pvalue_binary(const TestSequence& seq, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw config_error("pvalue_binary: tau must lie in (0,1)");
    const double log_tau = std::log(tau);
    const double log_1m_tau = std::log1p(-tau);

    double p = 1.0;
    double successes = 0.0;
    for (std::size_t k1 = 0; k1 < seq.ordered_responses.size(); ++k1) {
        const double yk = seq.ordered_responses[k1];
        if (yk != 0.0 && yk != 1.0) {
            throw data_error("pvalue_binary: responses must be 0 or 1");
        }
        successes += yk;
        const double k = static_cast<double>(k1 + 1);
        const double log_num = successes * log_tau + (k - successes + 1.0) * log_1m_tau;
        const double log_den = log_incomplete_beta(1.0 - tau, k - successes + 1.0, successes + 1.0);
        const double log_ratio = log_num - log_den;
        if (log_ratio < 0.0) p = std::min(p, std::exp(log_ratio));
    }
    return p;
}

double pvalue_quantile(const TestSequence& seq, double tau) {
    TestSequence dich = seq;
    for (auto& v : dich.ordered_responses) v = (v > tau) ? 1.0 : 0.0;
    return pvalue_binary(dich, 0.5);
}

// ---------------------------------------------------------------------------
// Point mapper
// ---------------------------------------------------------------------------

Eigen::VectorXd PointMapper::map(const Eigen::VectorXd& raw) const {
    if (raw.size() != raw_dim) throw config_error("point has wrong dimension");
    Eigen::VectorXd z(adjusted_dim());
    for (std::size_t k = 0; k < plain.size(); ++k) {
        const auto& col = plain[k];
        z(static_cast<Eigen::Index>(k)) = col.sign * raw(col.source_index) / col.divisor;
    }
    if (antichain) {
        std::vector<double> key;
        key.reserve(antichain->source_indices.size());
        for (const int j : antichain->source_indices) key.push_back(raw(j));
        const double code = antichain->encoder.code_of(key);
        const Eigen::Index p = static_cast<Eigen::Index>(plain.size());
        z(p) = code / antichain->divisor;
        z(p + 1) = -code / antichain->divisor;
    }
    return z;
}

// ---------------------------------------------------------------------------
// Region membership
// ---------------------------------------------------------------------------

namespace {

bool dominates_all(const Eigen::VectorXd& g, const Eigen::VectorXd& z) {
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        if (g(j) > z(j)) return false;
    }
    return true;
}

} // namespace

bool UpperSetRegion::contains_adjusted(const Eigen::VectorXd& z) const {
    const bool lower_type = side == Side::lower || side == Side::two_sided_lower;
    if (lower_type) {
        for (const auto& g : generators) {
            if (dominates_all(g, z)) return true;
        }
        return false;
    }
    const Eigen::VectorXd neg = -z;
    for (const auto& g : generators) {
        if (dominates_all(g, neg)) return false;
    }
    return true;
}

bool UpperSetRegion::contains(const Eigen::VectorXd& raw) const {
    return contains_adjusted(mapper.map(raw));
}

// ---------------------------------------------------------------------------
// Selection core
// ---------------------------------------------------------------------------

namespace {

struct AdjustedProblem {
    Eigen::MatrixXd Z;     // n x m, direction-adjusted and rescaled
    Eigen::VectorXd y01;   // binary working responses
    double tau_eff = 0.5;  // working threshold for the binary test
    PointMapper mapper;
};

double column_sd(const Eigen::VectorXd& col) {
    const Eigen::Index n = col.size();
    if (n < 2) return 0.0;
    const double mean = col.mean();
    const double ss = (col.array() - mean).square().sum();
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double scaling_divisor(const Eigen::VectorXd& col, PreScaling scaling) {
    double div = 1.0;
    if (scaling == PreScaling::unit_variance) {
        div = column_sd(col);
    } else if (scaling == PreScaling::minmax) {
        div = col.size() > 0 ? col.maxCoeff() - col.minCoeff() : 0.0;
    }
    return div > 0.0 ? div : 1.0;
}

/// Assembles the working problem: drops pass-through columns, antichains the
/// flagged ones, flips decreasing columns and rescales. Responses are turned
/// binary (dichotomized for the quantile test) so the core only ever runs
/// the binary sequential test.
AdjustedProblem build_problem(const data::Dataset& ds, const Options& opts) {
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
        throw config_error("alpha must lie in (0,1)");
    }
    if (opts.kind == ResponseTest::binary && !(opts.tau > 0.0 && opts.tau < 1.0)) {
        throw config_error("tau must lie in (0,1) for binary responses");
    }
    for (const bool flipped : ds.negated) {
        if (flipped) {
            throw config_error("selection expects unadjusted data; directions are applied here");
        }
    }

    std::vector<int> plain_src;
    std::vector<std::string> antichain_src;
    for (std::size_t j = 0; j < ds.columns.size(); ++j) {
        const auto& spec = ds.columns[j];
        switch (spec.direction) {
            case data::Direction::none:
                continue; // pass-through, excluded from selection
            case data::Direction::antichain:
                antichain_src.push_back(spec.name);
                break;
            default:
                plain_src.push_back(static_cast<int>(j));
        }
    }
    if (plain_src.empty() && antichain_src.empty()) {
        throw config_error("no selectable columns (all directions are 'none')");
    }

    const Eigen::Index n = ds.n();
    const Eigen::Index m =
        static_cast<Eigen::Index>(plain_src.size()) + (antichain_src.empty() ? 0 : 2);

    AdjustedProblem prob;
    prob.Z.resize(n, m);
    prob.mapper.raw_dim = static_cast<int>(ds.dim());

    for (std::size_t k = 0; k < plain_src.size(); ++k) {
        const int j = plain_src[k];
        const auto& spec = ds.columns[static_cast<std::size_t>(j)];
        const double sign = spec.direction == data::Direction::decreasing ? -1.0 : 1.0;
        Eigen::VectorXd col = sign * ds.X.col(j);
        const double div = scaling_divisor(col, opts.scaling);
        prob.Z.col(static_cast<Eigen::Index>(k)) = col / div;
        prob.mapper.plain.push_back({spec.name, j, sign, div});
    }

    if (!antichain_src.empty()) {
        data::Dataset sub;
        sub.columns = ds.columns;
        sub.X = ds.X;
        sub.y = ds.y;
        sub.negated.assign(ds.columns.size(), false);
        data::Dataset aug = data::antichain_augment(sub, antichain_src);
        const Eigen::Index p = static_cast<Eigen::Index>(plain_src.size());
        Eigen::VectorXd codes = aug.X.col(aug.dim() - 2);
        const double div = scaling_divisor(codes, opts.scaling);
        prob.Z.col(p) = codes / div;
        prob.Z.col(p + 1) = -codes / div;

        PointMapper::AntichainPart part;
        part.sources = antichain_src;
        for (const auto& name : antichain_src) part.source_indices.push_back(ds.column_index(name));
        part.encoder = *aug.antichain;
        part.divisor = div;
        prob.mapper.antichain = std::move(part);
    }

    prob.y01.resize(n);
    if (opts.kind == ResponseTest::binary) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = ds.y(i);
            if (v != 0.0 && v != 1.0) {
                throw data_error("binary selection requires responses in {0,1}");
            }
            prob.y01(i) = v;
        }
        prob.tau_eff = opts.tau;
    } else {
        for (Eigen::Index i = 0; i < n; ++i) prob.y01(i) = ds.y(i) > opts.tau ? 1.0 : 0.0;
        prob.tau_eff = 0.5;
    }
    return prob;
}

/// Runs the multiplicity-controlled sequential test over the distinct
/// observed points and returns the minimal antichain of rejected points.
///
/// Frontier scheme: each round tests the maximal elements of the active set,
/// splitting alpha evenly among them; rejections propagate upward for free
/// and expose new maximal points, and the loop stops at the first round
/// without a rejection. With a single covariate this reduces to the
/// fixed-sequence walk from the largest observed value downward, each test
/// at full level alpha.
std::vector<Eigen::VectorXd> reject_minimal_antichain(const Eigen::MatrixXd& Z,
                                                      const Eigen::VectorXd& y01,
                                                      double tau_eff,
                                                      double alpha,
                                                      Scheme scheme) {
    const Eigen::Index n = Z.rows();
    const Eigen::Index m = Z.cols();

    // Distinct covariate vectors; duplicates share one hypothesis.
    std::vector<Eigen::Index> hyp_rows;
    {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            for (Eigen::Index j = 0; j < m; ++j) {
                if (Z(a, j) != Z(b, j)) return Z(a, j) < Z(b, j);
            }
            return false;
        });
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i == 0 || Z.row(order[i]) != Z.row(order[i - 1])) hyp_rows.push_back(order[i]);
        }
    }
    const std::size_t h = hyp_rows.size();

    auto leq = [&](std::size_t a, std::size_t b) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (Z(hyp_rows[a], j) > Z(hyp_rows[b], j)) return false;
        }
        return true;
    };

    std::vector<std::vector<int>> above(h), below(h);
    std::vector<int> dominator_count(h, 0);
    for (std::size_t a = 0; a < h; ++a) {
        for (std::size_t b = 0; b < h; ++b) {
            if (a == b) continue;
            if (leq(a, b)) {
                above[a].push_back(static_cast<int>(b));
                below[b].push_back(static_cast<int>(a));
                ++dominator_count[a];
            }
        }
    }

    std::vector<double> pcache(h, -1.0);
    auto pval = [&](std::size_t i) {
        if (pcache[i] < 0.0) {
            const TestSequence seq = build_sequence(Z, y01, Z.row(hyp_rows[i]).transpose());
            pcache[i] = pvalue_binary(seq, tau_eff);
        }
        return pcache[i];
    };

    std::vector<bool> rejected(h, false);

    auto reject_with_upward_closure = [&](std::size_t start) {
        std::vector<std::size_t> queue{start};
        while (!queue.empty()) {
            const std::size_t i = queue.back();
            queue.pop_back();
            if (rejected[i]) continue;
            rejected[i] = true;
            for (const int j : above[i]) {
                if (!rejected[static_cast<std::size_t>(j)]) queue.push_back(static_cast<std::size_t>(j));
            }
            for (const int k : below[i]) --dominator_count[static_cast<std::size_t>(k)];
        }
    };

    if (scheme == Scheme::frontier) {
        for (;;) {
            std::vector<std::size_t> frontier;
            for (std::size_t i = 0; i < h; ++i) {
                if (!rejected[i] && dominator_count[i] == 0) frontier.push_back(i);
            }
            if (frontier.empty()) break;
            const double level = alpha / static_cast<double>(frontier.size());
            std::vector<std::size_t> winners;
            for (const std::size_t i : frontier) {
                if (pval(i) <= level) winners.push_back(i);
            }
            if (winners.empty()) break;
            for (const std::size_t i : winners) reject_with_upward_closure(i);
        }
    } else {
        // Holm over all hypotheses, then upward closure.
        std::vector<std::size_t> order(h);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return pval(a) < pval(b); });
        for (std::size_t rank = 0; rank < h; ++rank) {
            const double level = alpha / static_cast<double>(h - rank);
            if (pval(order[rank]) > level) break;
            reject_with_upward_closure(order[rank]);
        }
    }

    std::vector<Eigen::VectorXd> generators;
    for (std::size_t i = 0; i < h; ++i) {
        if (!rejected[i]) continue;
        bool minimal = true;
        for (const int k : below[i]) {
            if (rejected[static_cast<std::size_t>(k)]) {
                minimal = false;
                break;
            }
        }
        if (minimal) generators.push_back(Z.row(hyp_rows[i]).transpose());
    }
    return generators;
}

} // namespace

UpperSetRegion select_lower(const data::Dataset& ds, const Options& opts) {
    AdjustedProblem prob = build_problem(ds, opts);
    UpperSetRegion region;
    region.side = Side::lower;
    region.tau = opts.tau;
    region.alpha = opts.alpha;
    region.mapper = prob.mapper;
    region.generators =
        reject_minimal_antichain(prob.Z, prob.y01, prob.tau_eff, opts.alpha, opts.scheme);
    return region;
}

UpperSetRegion select_upper(const data::Dataset& ds, const Options& opts) {
    AdjustedProblem prob = build_problem(ds, opts);

    // Duality: run the lower selection on negated covariates with flipped
    // responses; rejection there certifies eta <= tau, and the upper set is
    // the complement of the flipped selection.
    Eigen::MatrixXd Zneg = -prob.Z;
    Eigen::VectorXd yflip(prob.y01.size());
    double tau_flip;
    if (opts.kind == ResponseTest::binary) {
        yflip = Eigen::VectorXd::Ones(prob.y01.size()) - prob.y01;
        tau_flip = 1.0 - opts.tau;
    } else {
        for (Eigen::Index i = 0; i < ds.y.size(); ++i) yflip(i) = ds.y(i) < opts.tau ? 1.0 : 0.0;
        tau_flip = 0.5;
    }
    if (!(tau_flip > 0.0 && tau_flip < 1.0)) {
        throw config_error("tau must lie in (0,1) for binary responses");
    }

    UpperSetRegion region;
    region.side = Side::upper;
    region.tau = opts.tau;
    region.alpha = opts.alpha;
    region.mapper = prob.mapper;
    region.generators = reject_minimal_antichain(Zneg, yflip, tau_flip, opts.alpha, opts.scheme);
    return region;
}

std::pair<UpperSetRegion, UpperSetRegion> select_two_sided(const data::Dataset& ds,
                                                           const Options& opts) {
    Options half = opts;
    half.alpha = opts.alpha / 2.0;
    UpperSetRegion lo = select_lower(ds, half);
    lo.side = Side::two_sided_lower;
    lo.alpha = opts.alpha;
    UpperSetRegion hi = select_upper(ds, half);
    hi.side = Side::two_sided_upper;
    hi.alpha = opts.alpha;
    return {std::move(lo), std::move(hi)};
}

} // namespace subsel::iss
