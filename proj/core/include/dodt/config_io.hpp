#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dodt/pipeline.hpp"
#include "dodt/presets.hpp"

namespace dodt {

// JSON text <-> config structs. Parsing overlays onto the supplied base, so a
// file carrying only {"tracker": {"t_sim": 0.5}} leaves everything else at the
// base values. Unknown keys and type mismatches throw std::runtime_error.
std::string pipelineConfigToJson(const PipelineConfig& cfg);
PipelineConfig pipelineConfigFromJson(const std::string& text, PipelineConfig base = {});

// Scene scripts carry an optional "intrinsics" object; when omitted the
// default camera model applies. Round-trips exactly at double precision.
std::string sceneToJson(const ScenePreset& preset);
ScenePreset sceneFromJson(const std::string& text);

std::string evalResultToJson(const EvalResult& r);
std::string timingSummaryToJson(const TimingSummary& t);
std::string ablationToJson(const std::vector<AblationRow>& rows);

// Combined report as the run verb emits: timing plus eval when truth existed.
std::string runReportToJson(const std::optional<EvalResult>& eval, const TimingSummary& timing);

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& text);

}  // namespace dodt
