#include "subsel/dataset.hpp"

#include "subsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace subsel::data {

std::string to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::continuous: return "continuous";
        case ColumnKind::binary: return "binary";
        case ColumnKind::categorical: return "categorical";
    }
    return "continuous";
}

std::string to_string(Direction dir) {
    switch (dir) {
        case Direction::increasing: return "increasing";
        case Direction::decreasing: return "decreasing";
        case Direction::antichain: return "antichain";
        case Direction::none: return "none";
    }
    return "none";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "binary") return ColumnKind::binary;
    if (s == "categorical") return ColumnKind::categorical;
    throw config_error("unknown column kind '" + s + "'");
}

Direction direction_from_string(const std::string& s) {
    if (s == "increasing") return Direction::increasing;
    if (s == "decreasing") return Direction::decreasing;
    if (s == "antichain") return Direction::antichain;
    if (s == "none") return Direction::none;
    throw config_error("unknown direction '" + s + "'");
}

int LevelCoding::code_of(const std::string& level) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == level) return static_cast<int>(i);
    }
    return -1;
}

int LevelCoding::code_or_add(const std::string& level) {
    const int existing = code_of(level);
    if (existing >= 0) return existing;
    levels.push_back(level);
    return static_cast<int>(levels.size()) - 1;
}

int AntichainEncoder::code_of(const std::vector<double>& values) const {
    for (std::size_t c = 0; c < combos.size(); ++c) {
        if (combos[c] == values) return static_cast<int>(c) + 1;
    }
    return 0;
}

int Dataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].name == name) return static_cast<int>(j);
    }
    return -1;
}

void Dataset::validate() const {
    if (X.rows() < 1 || X.cols() < 1) throw data_error("dataset must have n >= 1 and d >= 1");
    if (y.size() != X.rows()) throw data_error("response length does not match row count");
    if (t && t->size() != X.rows()) throw data_error("treatment length does not match row count");
    if (static_cast<Eigen::Index>(columns.size()) != X.cols()) {
        throw data_error("column spec count does not match matrix width");
    }
    if (!X.allFinite() || !y.allFinite()) throw data_error("dataset contains non-finite values");
}

const ScalingRecord::Entry* ScalingRecord::find(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

double ScalingRecord::apply(const std::string& name, double value) const {
    const Entry* e = find(name);
    if (e == nullptr || !e->affine) return value;
    return (value - e->lo) / (e->hi - e->lo);
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"' && cell.empty()) {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    if (quoted) {
        throw data_error("unterminated quote on line " + std::to_string(line_no));
    }
    cells.push_back(cell);
    return cells;
}

double parse_numeric_cell(const std::string& cell, std::size_t row, const std::string& col) {
    if (cell.empty()) {
        throw data_error("missing value at row " + std::to_string(row) + ", column '" + col + "'");
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw data_error("cannot parse '" + cell + "' at row " + std::to_string(row) +
                         ", column '" + col + "'");
    }
    if (pos != cell.size()) {
        throw data_error("cannot parse '" + cell + "' at row " + std::to_string(row) +
                         ", column '" + col + "'");
    }
    if (!std::isfinite(v)) {
        throw data_error("non-finite value at row " + std::to_string(row) + ", column '" + col + "'");
    }
    return v;
}

double parse_binary_cell(const std::string& cell, std::size_t row, const std::string& col) {
    const double v = parse_numeric_cell(cell, row, col);
    if (v != 0.0 && v != 1.0) {
        throw data_error("binary column '" + col + "' contains " + cell + " at row " +
                         std::to_string(row) + " (expected 0 or 1)");
    }
    return v;
}

} // namespace

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        rows.push_back(split_csv_line(line, line_no));
    }
    if (rows.empty()) throw data_error("file '" + path + "' is empty");
    return rows;
}

Dataset load_csv(const std::string& path,
                 const std::vector<ColumnSpec>& schema,
                 const std::string& response_name,
                 const std::optional<std::string>& treatment_name,
                 ResponseKind response_kind) {
    if (schema.empty()) throw config_error("schema must contain at least one covariate column");
    const auto rows = read_csv(path);
    const auto& header = rows.front();

    auto header_index = [&](const std::string& name) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return static_cast<int>(j);
        }
        throw data_error("column '" + name + "' not found in header of '" + path + "'");
    };

    std::vector<int> col_idx;
    col_idx.reserve(schema.size());
    for (const auto& spec : schema) col_idx.push_back(header_index(spec.name));
    const int resp_idx = header_index(response_name);
    int treat_idx = -1;
    if (treatment_name) treat_idx = header_index(*treatment_name);

    const std::size_t n = rows.size() - 1;
    if (n == 0) throw data_error("file '" + path + "' has no data rows");

    Dataset ds;
    ds.columns = schema;
    ds.response_kind = response_kind;
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(schema.size()));
    ds.y.resize(static_cast<Eigen::Index>(n));
    if (treatment_name) ds.t = Eigen::VectorXi(static_cast<Eigen::Index>(n));
    ds.negated.assign(schema.size(), false);
    for (const auto& spec : schema) {
        if (spec.kind == ColumnKind::categorical) ds.codings[spec.name] = LevelCoding{};
    }

    for (std::size_t r = 0; r < n; ++r) {
        const auto& cells = rows[r + 1];
        if (cells.size() != header.size()) {
            throw data_error("row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < schema.size(); ++j) {
            const auto& spec = schema[j];
            const std::string& cell = cells[static_cast<std::size_t>(col_idx[j])];
            double v = 0.0;
            switch (spec.kind) {
                case ColumnKind::continuous:
                    v = parse_numeric_cell(cell, r + 1, spec.name);
                    break;
                case ColumnKind::binary:
                    v = parse_binary_cell(cell, r + 1, spec.name);
                    break;
                case ColumnKind::categorical: {
                    if (cell.empty()) {
                        throw data_error("missing value at row " + std::to_string(r + 1) +
                                         ", column '" + spec.name + "'");
                    }
                    v = ds.codings[spec.name].code_or_add(cell);
                    break;
                }
            }
            ds.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = v;
        }
        const std::string& resp_cell = cells[static_cast<std::size_t>(resp_idx)];
        ds.y(static_cast<Eigen::Index>(r)) =
            response_kind == ResponseKind::binary
                ? parse_binary_cell(resp_cell, r + 1, response_name)
                : parse_numeric_cell(resp_cell, r + 1, response_name);
        if (treatment_name) {
            (*ds.t)(static_cast<Eigen::Index>(r)) = static_cast<int>(
                parse_binary_cell(cells[static_cast<std::size_t>(treat_idx)], r + 1, *treatment_name));
        }
    }
    ds.validate();
    return ds;
}

Eigen::MatrixXd load_points_csv(const std::string& path,
                                const std::vector<ColumnSpec>& schema,
                                std::map<std::string, LevelCoding>& codings) {
    const auto rows = read_csv(path);
    const auto& header = rows.front();
    std::vector<int> col_idx;
    for (const auto& spec : schema) {
        int idx = -1;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == spec.name) {
                idx = static_cast<int>(j);
                break;
            }
        }
        if (idx < 0) throw data_error("column '" + spec.name + "' not found in header of '" + path + "'");
        col_idx.push_back(idx);
    }
    const std::size_t n = rows.size() - 1;
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(schema.size()));
    for (std::size_t r = 0; r < n; ++r) {
        const auto& cells = rows[r + 1];
        for (std::size_t j = 0; j < schema.size(); ++j) {
            const auto& spec = schema[j];
            const std::string& cell = cells.at(static_cast<std::size_t>(col_idx[j]));
            double v = 0.0;
            if (spec.kind == ColumnKind::categorical) {
                v = codings[spec.name].code_or_add(cell);
            } else if (spec.kind == ColumnKind::binary) {
                v = parse_binary_cell(cell, r + 1, spec.name);
            } else {
                v = parse_numeric_cell(cell, r + 1, spec.name);
            }
            pts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

std::pair<Dataset, ScalingRecord> minmax_scale(const Dataset& ds) {
    Dataset out = ds;
    ScalingRecord record;
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
        const auto& spec = ds.columns[static_cast<std::size_t>(j)];
        ScalingRecord::Entry entry;
        entry.name = spec.name;
        if (spec.kind == ColumnKind::continuous) {
            const double lo = ds.X.col(j).minCoeff();
            const double hi = ds.X.col(j).maxCoeff();
            if (!(hi > lo)) {
                throw data_error("continuous column '" + spec.name + "' is constant");
            }
            out.X.col(j) = (ds.X.col(j).array() - lo) / (hi - lo);
            entry.affine = true;
            entry.lo = lo;
            entry.hi = hi;
        } else if (spec.kind == ColumnKind::categorical) {
            const auto it = ds.codings.find(spec.name);
            if (it != ds.codings.end()) entry.levels = it->second.levels;
        }
        record.entries.push_back(std::move(entry));
    }
    return {std::move(out), std::move(record)};
}

Dataset apply_directions(const Dataset& ds) {
    Dataset out = ds;
    if (out.negated.size() != static_cast<std::size_t>(ds.dim())) {
        out.negated.assign(static_cast<std::size_t>(ds.dim()), false);
    }
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
        const auto& spec = ds.columns[static_cast<std::size_t>(j)];
        switch (spec.direction) {
            case Direction::none:
                throw config_error("column '" + spec.name +
                                   "' has direction 'none' and cannot enter selection");
            case Direction::decreasing:
                out.X.col(j) = -ds.X.col(j);
                out.negated[static_cast<std::size_t>(j)] = !out.negated[static_cast<std::size_t>(j)];
                break;
            case Direction::increasing:
            case Direction::antichain:
                break;
        }
    }
    return out;
}

Dataset antichain_augment(const Dataset& ds, const std::vector<std::string>& cols) {
    if (cols.empty()) throw config_error("antichain_augment: no columns named");
    std::vector<int> src;
    for (const auto& name : cols) {
        const int j = ds.column_index(name);
        if (j < 0) throw config_error("antichain_augment: unknown column '" + name + "'");
        const auto& spec = ds.columns[static_cast<std::size_t>(j)];
        if (spec.kind == ColumnKind::continuous) {
            throw config_error("antichain_augment: column '" + name + "' is continuous");
        }
        if (spec.direction != Direction::antichain) {
            throw config_error("antichain_augment: column '" + name + "' lacks direction 'antichain'");
        }
        src.push_back(j);
    }

    AntichainEncoder enc;
    enc.source_columns = cols;
    std::vector<int> row_code(static_cast<std::size_t>(ds.n()));
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        std::vector<double> key;
        key.reserve(src.size());
        for (const int j : src) key.push_back(ds.X(i, j));
        int code = enc.code_of(key);
        if (code == 0) {
            enc.combos.push_back(key);
            code = static_cast<int>(enc.combos.size());
        }
        row_code[static_cast<std::size_t>(i)] = code;
    }

    // Keep non-antichained columns, then append the (code, -code) pair.
    Dataset out;
    out.y = ds.y;
    out.t = ds.t;
    out.response_kind = ds.response_kind;
    out.codings = ds.codings;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
        if (std::find(src.begin(), src.end(), static_cast<int>(j)) == src.end()) keep.push_back(j);
    }
    out.X.resize(ds.n(), static_cast<Eigen::Index>(keep.size()) + 2);
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.X.col(static_cast<Eigen::Index>(j)) = ds.X.col(keep[j]);
        out.columns.push_back(ds.columns[static_cast<std::size_t>(keep[j])]);
        out.negated.push_back(ds.negated.empty() ? false : ds.negated[static_cast<std::size_t>(keep[j])]);
    }
    const Eigen::Index p = static_cast<Eigen::Index>(keep.size());
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        out.X(i, p) = row_code[static_cast<std::size_t>(i)];
        out.X(i, p + 1) = -row_code[static_cast<std::size_t>(i)];
    }
    out.columns.push_back({"antichain_pos", ColumnKind::continuous, Direction::increasing});
    out.columns.push_back({"antichain_neg", ColumnKind::continuous, Direction::increasing});
    out.negated.push_back(false);
    out.negated.push_back(false);
    out.antichain = std::move(enc);
    return out;
}

} // namespace subsel::data
