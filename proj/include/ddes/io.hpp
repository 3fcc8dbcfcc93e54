#pragma once
// File formats.
//
//   EmotionSet JSON   {"name": s, "emotions": [{"label": s, "valence": x, "arousal": y}, ...]}
//   DensityGrid JSON  {"height": H, "width": W, "data": [row-major reals]}
//   DensityGrid bin   "DDES" | u32 version=1 | u32 H | u32 W | H*W float32, all little-endian
//   Annotations       JSON Lines {"image_id": s, "emotion": s, "sentence_va": [v, a] | null}
//   Aggregation cfg   {"grid": {"height": H, "width": W},
//                      "bandwidth": "scott" | {"sigma": x} | {"cov": [[a, b], [b, c]]}}
//   CES record        {"id"?: s, "set"?: s, "probs": [...]}
//   DES record        {"id"?: s, "valence": x, "arousal": y}
//
// Every real written by this module is rounded to 9 significant digits and
// keys are emitted in a fixed order, so output is byte-reproducible.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ddes/aggregate.hpp"
#include "ddes/core.hpp"
#include "ddes/metrics.hpp"

namespace ddes::io {

using Json = nlohmann::ordered_json;

inline constexpr std::uint32_t kGridFormatVersion = 1;

/// Rounds to 9 significant digits; -0 becomes 0.
double round_sig9(double x);

/// Text form with 9 significant digits ("%.9g").
std::string format_number(double x);

/// Serializes like Json::dump but prints every float with format_number.
/// indent < 0 gives the compact single-line form.
std::string dump(const Json& j, int indent = -1);

// EmotionSet
EmotionSetPtr emotion_set_from_json(const Json& j);
Json to_json(const EmotionSet& set);
EmotionSetPtr read_emotion_set(const std::filesystem::path& path);

// DensityGrid
DensityGrid grid_from_json(const Json& j);
Json to_json(const DensityGrid& grid);
void write_grid_binary(std::ostream& out, const DensityGrid& grid);
/// Verifies magic, version, size and normalization. Errors: BadFormat,
/// NotNormalized, NegativeCell.
DensityGrid read_grid_binary(std::istream& in);
std::vector<char> grid_to_bytes(const DensityGrid& grid);
DensityGrid grid_from_bytes(const std::vector<char>& bytes);
/// Binary when the file starts with the magic bytes, JSON otherwise.
DensityGrid read_grid_file(const std::filesystem::path& path);
void write_grid_file(const std::filesystem::path& path, const DensityGrid& grid, bool binary);

// CES / DES records
CategoricalState categorical_from_json(const Json& j, const EmotionSetPtr& set);
Json to_json(const CategoricalState& state);
VAPoint point_from_json(const Json& j);
Json to_json(const VAPoint& point);

// Annotations
AnnotationRecord annotation_from_json(const Json& j);
/// Errors: BadFormat with the 1-based line number; blank lines are skipped.
std::vector<AnnotationRecord> read_annotations(std::istream& in);

struct ScottRule {};
using BandwidthChoice = std::variant<ScottRule, double, Cov2>;

struct AggregationConfig {
  GridGeometry grid = GridGeometry::square(kDefaultGridSize);
  BandwidthChoice bandwidth = ScottRule{};
};

AggregationConfig aggregation_config_from_json(const Json& j);
AggregationConfig read_aggregation_config(const std::filesystem::path& path);

Json to_json(const MetricReport& report);

/// Parses one JSON document from a file. Errors: FileNotFound, BadFormat.
Json read_json_file(const std::filesystem::path& path);

}  // namespace ddes::io
