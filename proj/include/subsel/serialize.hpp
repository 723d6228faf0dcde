#ifndef SUBSEL_SERIALIZE_HPP
#define SUBSEL_SERIALIZE_HPP

#include "subsel/dataset.hpp"
#include "subsel/glm.hpp"
#include "subsel/iss.hpp"
#include "subsel/simeval.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace subsel::io {

struct Schema {
    std::vector<data::ColumnSpec> columns;
    std::string response;
    std::optional<std::string> treatment;
    data::ResponseKind response_kind = data::ResponseKind::continuous;
};

Schema schema_from_json(const nlohmann::json& j);
Schema load_schema(const std::string& path);

nlohmann::json scaling_to_json(const data::ScalingRecord& record);
data::ScalingRecord scaling_from_json(const nlohmann::json& j);

nlohmann::json region_to_json(const iss::UpperSetRegion& region,
                              const std::vector<data::ColumnSpec>& columns,
                              const data::ScalingRecord& scaling,
                              std::uint64_t seed);
iss::UpperSetRegion iss_region_from_json(const nlohmann::json& j);

nlohmann::json region_to_json(const glm::BandRegion& region,
                              const std::vector<data::ColumnSpec>& columns,
                              const data::ScalingRecord& scaling,
                              std::uint64_t seed);
glm::BandRegion glm_region_from_json(const nlohmann::json& j);

sim::StudySpec study_from_json(const nlohmann::json& j);
sim::StudySpec load_study(const std::string& path);

nlohmann::json report_to_json(const sim::MetricsReport& report);
sim::MetricsReport report_from_json(const nlohmann::json& j);

void write_tidy_csv(const sim::MetricsReport& report, std::ostream& out);

nlohmann::json load_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

std::string format_double(double v); // 17 significant digits, round-trip exact

} // namespace subsel::io

#endif
