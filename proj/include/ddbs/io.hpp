#pragma once

#include "ddbs/harness.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ddbs {

using nlohmann::json;

void to_json(json& j, const SystemConfig& c);
void from_json(const json& j, SystemConfig& c);
void to_json(json& j, const DesignInputs& d);
void from_json(const json& j, DesignInputs& d);
void to_json(json& j, const PilotPlan& p);
void from_json(const json& j, PilotPlan& p);
void to_json(json& j, const TrainingEstimate& e);
void to_json(json& j, const ExperimentSpec& s);
void from_json(const json& j, ExperimentSpec& s);
void to_json(json& j, const SweepResult& r);

[[nodiscard]] json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

[[nodiscard]] std::string plan_summary(const PilotPlan& plan, const SystemConfig& cfg);

/// Rows are antennas, columns pilots; %.16e (17 significant digits).
[[nodiscard]] std::string delays_csv(const FixedTdNetwork& net);

[[nodiscard]] std::string pattern_csv(const std::vector<PatternRow>& rows);
[[nodiscard]] std::vector<PatternRow> parse_pattern_csv(const std::string& text);

[[nodiscard]] std::string sweep_csv(const SweepResult& r);
[[nodiscard]] json sweep_summary(const SweepResult& r);

}  // namespace ddbs
