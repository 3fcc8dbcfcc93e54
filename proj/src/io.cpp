#include "ddes/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace ddes::io {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'D', 'E', 'S'};

[[noreturn]] void bad_format(const std::string& detail) { throw Error(ErrorCode::BadFormat, detail); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad_format("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) bad_format(std::string("missing field '") + key + "'");
  return *it;
}

double real_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) bad_format(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::size_t size_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned()) bad_format(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) bad_format(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> real_array(const Json& v, const char* what) {
  if (!v.is_array()) bad_format(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) bad_format(std::string(what) + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json rounded_array(std::span<const double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(round_sig9(v));
  return arr;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) bad_format(std::string("truncated grid header (") + what + ")");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

double round_sig9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", round_sig9(x));
  return buf;
}

namespace {

void dump_to(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float:
      out += std::isfinite(j.get<double>()) ? format_number(j.get<double>()) : "null";
      return;
    case Json::value_t::array: {
      out += '[';
      if (j.empty()) {
        out += ']';
        return;
      }
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_to(out, v, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      out += '{';
      if (j.empty()) {
        out += '}';
        return;
      }
      bool first = true;
      for (const auto& [key, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_to(out, v, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_to(out, j, indent, 0);
  return out;
}

EmotionSetPtr emotion_set_from_json(const Json& j) {
  const std::string name = string_field(j, "name");
  const Json& list = field(j, "emotions");
  if (!list.is_array()) bad_format("'emotions' must be an array");
  std::vector<Emotion> emotions;
  emotions.reserve(list.size());
  for (const auto& e : list) {
    emotions.push_back({string_field(e, "label"), VAPoint(real_field(e, "valence"), real_field(e, "arousal"))});
  }
  return make_emotion_set(name, std::move(emotions));
}

Json to_json(const EmotionSet& set) {
  Json emotions = Json::array();
  for (const auto& e : set.emotions()) {
    emotions.push_back(Json{{"label", e.label},
                            {"valence", round_sig9(e.anchor.valence())},
                            {"arousal", round_sig9(e.anchor.arousal())}});
  }
  return Json{{"name", set.name()}, {"emotions", std::move(emotions)}};
}

EmotionSetPtr read_emotion_set(const std::filesystem::path& path) {
  return emotion_set_from_json(read_json_file(path));
}

DensityGrid grid_from_json(const Json& j) {
  const GridGeometry geometry(size_field(j, "height"), size_field(j, "width"));
  return DensityGrid::from_normalized(geometry, real_array(field(j, "data"), "'data'"));
}

Json to_json(const DensityGrid& grid) {
  return Json{{"height", grid.height()}, {"width", grid.width()}, {"data", rounded_array(grid.values())}};
}

void write_grid_binary(std::ostream& out, const DensityGrid& grid) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kGridFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(grid.height()));
  put_u32(out, static_cast<std::uint32_t>(grid.width()));
  for (double v : grid.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

DensityGrid read_grid_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) bad_format("not a DDES grid (bad magic)");
  const std::uint32_t version = get_u32(in, "version");
  if (version != kGridFormatVersion) bad_format("unsupported DDES grid version " + std::to_string(version));
  const std::uint32_t height = get_u32(in, "height");
  const std::uint32_t width = get_u32(in, "width");
  const GridGeometry geometry(height, width);
  std::vector<double> values(geometry.cells());
  for (double& v : values) v = std::bit_cast<float>(get_u32(in, "cells"));
  if (in.peek() != std::char_traits<char>::eof()) bad_format("trailing bytes after grid data");
  return DensityGrid::from_normalized(geometry, std::move(values));
}

std::vector<char> grid_to_bytes(const DensityGrid& grid) {
  std::ostringstream out(std::ios::binary);
  write_grid_binary(out, grid);
  const std::string s = out.str();
  return {s.begin(), s.end()};
}

DensityGrid grid_from_bytes(const std::vector<char>& bytes) {
  std::istringstream in(std::string(bytes.begin(), bytes.end()), std::ios::binary);
  return read_grid_binary(in);
}

DensityGrid read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open grid '" + path.string() + "'");
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 4 && head == kMagic;
  in.clear();
  in.seekg(0);
  if (binary) return read_grid_binary(in);
  try {
    return grid_from_json(Json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    bad_format("'" + path.string() + "' is neither a binary nor a JSON grid: " + e.what());
  }
}

void write_grid_file(const std::filesystem::path& path, const DensityGrid& grid, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path.string() + "'");
  if (binary) {
    write_grid_binary(out, grid);
  } else {
    out << dump(to_json(grid)) << '\n';
  }
}

CategoricalState categorical_from_json(const Json& j, const EmotionSetPtr& set) {
  return make_categorical(set, real_array(field(j, "probs"), "'probs'"));
}

Json to_json(const CategoricalState& state) {
  return Json{{"set", state.set()->name()}, {"probs", rounded_array(state.probs())}};
}

VAPoint point_from_json(const Json& j) { return VAPoint(real_field(j, "valence"), real_field(j, "arousal")); }

Json to_json(const VAPoint& point) {
  return Json{{"valence", round_sig9(point.valence())}, {"arousal", round_sig9(point.arousal())}};
}

AnnotationRecord annotation_from_json(const Json& j) {
  AnnotationRecord rec{string_field(j, "image_id"), string_field(j, "emotion"), std::nullopt};
  if (rec.image_id.empty()) bad_format("empty image_id");
  const auto it = j.find("sentence_va");
  if (it != j.end() && !it->is_null()) {
    const auto va = real_array(*it, "'sentence_va'");
    if (va.size() != 2) bad_format("'sentence_va' must be [valence, arousal]");
    rec.sentence_va = VAPoint(va[0], va[1]);
  }
  return rec;
}

std::vector<AnnotationRecord> read_annotations(std::istream& in) {
  std::vector<AnnotationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(annotation_from_json(Json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      bad_format("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

AggregationConfig aggregation_config_from_json(const Json& j) {
  AggregationConfig cfg;
  if (!j.is_object()) bad_format("aggregation config must be an object");
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    cfg.grid = GridGeometry(size_field(g, "height"), size_field(g, "width"));
  }
  if (j.contains("bandwidth")) {
    const Json& b = j.at("bandwidth");
    if (b.is_string()) {
      if (b.get<std::string>() != "scott") bad_format("unknown bandwidth rule '" + b.get<std::string>() + "'");
      cfg.bandwidth = ScottRule{};
    } else if (b.is_object() && b.contains("sigma")) {
      const double sigma = real_field(b, "sigma");
      static_cast<void>(Bandwidth::isotropic(sigma));
      cfg.bandwidth = sigma;
    } else if (b.is_object() && b.contains("cov")) {
      const Json& m = b.at("cov");
      if (!m.is_array() || m.size() != 2) bad_format("'cov' must be a 2x2 array");
      const auto r0 = real_array(m[0], "'cov' row");
      const auto r1 = real_array(m[1], "'cov' row");
      if (r0.size() != 2 || r1.size() != 2) bad_format("'cov' must be a 2x2 array");
      if (r0[1] != r1[0]) bad_format("'cov' must be symmetric");
      const Cov2 cov{r0[0], r0[1], r1[1]};
      static_cast<void>(Bandwidth{cov});
      cfg.bandwidth = cov;
    } else {
      bad_format("'bandwidth' must be \"scott\", {\"sigma\": x} or {\"cov\": [[a,b],[b,c]]}");
    }
  }
  return cfg;
}

AggregationConfig read_aggregation_config(const std::filesystem::path& path) {
  return aggregation_config_from_json(read_json_file(path));
}

Json to_json(const MetricReport& report) {
  return Json{{"name", report.name},
              {"value", round_sig9(report.value)},
              {"n", report.sample_count},
              {"skipped", report.skipped}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad_format("'" + path.string() + "': " + e.what());
  }
}

}  // namespace ddes::io
