#ifndef SUBSEL_DATASET_HPP
#define SUBSEL_DATASET_HPP

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subsel::data {

enum class ColumnKind { continuous, binary, categorical };
enum class Direction { increasing, decreasing, antichain, none };

enum class ResponseKind { continuous, binary };

std::string to_string(ColumnKind kind);
std::string to_string(Direction dir);
ColumnKind column_kind_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    Direction direction = Direction::none;
};

/// Level dictionary for one categorical column, in first-appearance order.
struct LevelCoding {
    std::vector<std::string> levels;

    /// Index of an existing level, or -1.
    int code_of(const std::string& level) const;
    /// Index of the level, appending it if unseen.
    int code_or_add(const std::string& level);
};

/// Maps the values of a group of antichained columns to codes 1..L and the
/// auxiliary pair (code, -code). Unseen combinations map to the sentinel 0,
/// which is incomparable to every training code in the (xi1, xi2) plane.
struct AntichainEncoder {
    std::vector<std::string> source_columns;
    std::vector<std::vector<double>> combos; // combos[c] holds code c+1

    int code_of(const std::vector<double>& values) const;
    std::size_t level_count() const { return combos.size(); }
};

struct Dataset {
    std::vector<ColumnSpec> columns;
    Eigen::MatrixXd X; // n x d, one column per ColumnSpec
    Eigen::VectorXd y;
    std::optional<Eigen::VectorXi> t;
    ResponseKind response_kind = ResponseKind::continuous;

    std::map<std::string, LevelCoding> codings;   // categorical columns
    std::vector<bool> negated;                    // set by apply_directions
    std::optional<AntichainEncoder> antichain;    // set by antichain_augment

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index dim() const { return X.cols(); }
    int column_index(const std::string& name) const; // -1 when absent

    void validate() const;
};

/// Per-column record sufficient to map new points into the scaled space.
struct ScalingRecord {
    struct Entry {
        std::string name;
        bool affine = false; // continuous columns: v -> (v - lo) / (hi - lo)
        double lo = 0.0;
        double hi = 1.0;
        std::vector<std::string> levels; // categorical columns
    };
    std::vector<Entry> entries;

    const Entry* find(const std::string& name) const;
    double apply(const std::string& name, double value) const;
};

/// Reads a comma-separated file (UTF-8, header row, '.' decimal separator,
/// double-quoted fields allowed) and returns one row of cells per line.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

Dataset load_csv(const std::string& path,
                 const std::vector<ColumnSpec>& schema,
                 const std::string& response_name,
                 const std::optional<std::string>& treatment_name = std::nullopt,
                 ResponseKind response_kind = ResponseKind::continuous);

/// Loads covariate points (no response) under a schema, reusing the level
/// codings of a reference dataset so categorical codes stay consistent.
Eigen::MatrixXd load_points_csv(const std::string& path,
                                const std::vector<ColumnSpec>& schema,
                                std::map<std::string, LevelCoding>& codings);

std::pair<Dataset, ScalingRecord> minmax_scale(const Dataset& ds);

Dataset apply_directions(const Dataset& ds);

Dataset antichain_augment(const Dataset& ds, const std::vector<std::string>& cols);

} // namespace subsel::data

#endif
