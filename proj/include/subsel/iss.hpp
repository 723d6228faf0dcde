#ifndef SUBSEL_ISS_HPP
#define SUBSEL_ISS_HPP

#include "subsel/dataset.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace subsel::iss {

enum class ResponseTest { binary, quantile };
enum class Side { lower, upper, two_sided_lower, two_sided_upper };
enum class PreScaling { unit_variance, minmax, none };
enum class Scheme { frontier, holm };

std::string to_string(Side side);
Side side_from_string(const std::string& s);

/// Responses of the rows componentwise dominated by the query point, ordered
/// by nondecreasing sup-norm distance from it. Ties are broken by
/// lexicographic covariate order, then row index.
struct TestSequence {
    Eigen::VectorXd x0;
    std::vector<double> ordered_responses;
    std::vector<double> distances;

    int size() const { return static_cast<int>(ordered_responses.size()); }
};

TestSequence build_sequence(const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y,
                            const Eigen::VectorXd& x0);

/// Convenience overload for a direction-adjusted dataset.
TestSequence build_sequence(const data::Dataset& ds, const Eigen::VectorXd& x0);

/// Anytime-valid p-value for H0: eta(x0) < tau with Bernoulli responses.
/// Scans cumulative success counts along the sequence; an empty sequence
/// yields 1.
double pvalue_binary(const TestSequence& seq, double tau);

/// Quantile p-value for real responses: dichotomizes at tau (strict >) and
/// tests the conditional median via pvalue_binary at threshold 1/2.
double pvalue_quantile(const TestSequence& seq, double tau);

/// Maps a point from the dataset's column space into the direction-adjusted,
/// rescaled coordinates the selection algorithm works in.
struct PointMapper {
    struct PlainColumn {
        std::string source;
        int source_index = 0;
        double sign = 1.0;
        double divisor = 1.0;
    };
    struct AntichainPart {
        std::vector<std::string> sources;
        std::vector<int> source_indices;
        data::AntichainEncoder encoder;
        double divisor = 1.0;
    };

    std::vector<PlainColumn> plain;
    std::optional<AntichainPart> antichain;
    int raw_dim = 0;

    int adjusted_dim() const {
        return static_cast<int>(plain.size()) + (antichain ? 2 : 0);
    }
    Eigen::VectorXd map(const Eigen::VectorXd& raw) const;
};

/// Selected set represented by the minimal antichain of rejected points in
/// adjusted coordinates. Lower-type sides contain x iff some generator lies
/// componentwise below it; upper-type sides are the complement construction
/// on negated coordinates.
struct UpperSetRegion {
    Side side = Side::lower;
    double tau = 0.0;
    double alpha = 0.0;
    std::vector<Eigen::VectorXd> generators;
    PointMapper mapper;

    bool contains_adjusted(const Eigen::VectorXd& z) const;
    bool contains(const Eigen::VectorXd& raw) const;
};

struct Options {
    double tau = 0.0;
    double alpha = 0.1;
    ResponseTest kind = ResponseTest::binary;
    PreScaling scaling = PreScaling::unit_variance;
    Scheme scheme = Scheme::frontier;
};

UpperSetRegion select_lower(const data::Dataset& ds, const Options& opts);
UpperSetRegion select_upper(const data::Dataset& ds, const Options& opts);
std::pair<UpperSetRegion, UpperSetRegion> select_two_sided(const data::Dataset& ds,
                                                           const Options& opts);

} // namespace subsel::iss

#endif
