#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "ddes/aggregate.hpp"
#include "ddes/analysis.hpp"
#include "ddes/convert.hpp"
#include "ddes/io.hpp"
#include "ddes/lexicon.hpp"
#include "ddes/metrics.hpp"

namespace ddes::cli {

namespace fs = std::filesystem;
using io::Json;

std::size_t worker_count() {
  if (const char* env = std::getenv("DDES_KIT_THREADS")) {
    std::size_t n = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) return n;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace {

/// Problems with flags or side inputs; mapped to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { Ces, Des, Ddes };

const std::map<std::string, Kind> kKindNames{{"ces", Kind::Ces}, {"des", Kind::Des}, {"ddes", Kind::Ddes}};

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::Ces: return "ces";
    case Kind::Des: return "des";
    case Kind::Ddes: return "ddes";
  }
  return "?";
}

using Representation = std::variant<CategoricalState, VAPoint, DensityGrid>;

struct Record {
  std::size_t line = 0;
  std::optional<Json> id;
  Representation value;
};

// Runs body(i) for i in [0, n) on up to worker_count() threads. body must
// not throw; callers store per-index results so output order is fixed.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
}

template <typename F>
auto side_input(const std::string& what, F&& load) -> decltype(load()) {
  try {
    return load();
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

EmotionSetPtr load_set(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " is required here");
  return side_input(std::string(flag) + " " + path, [&] { return io::read_emotion_set(path); });
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback, bool binary = false) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
    if (!file_) throw ConfigError("cannot write '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

bool starts_with_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char head[4] = {};
  in.read(head, 4);
  return in.gcount() == 4 && std::string_view(head, 4) == "DDES";
}

struct TextLine {
  std::size_t number;
  std::string text;
};

std::vector<TextLine> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<TextLine> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back({number, std::move(text)});
  }
  return lines;
}

Representation parse_representation(const Json& j, Kind kind, const EmotionSetPtr& set) {
  switch (kind) {
    case Kind::Ces: return io::categorical_from_json(j, set);
    case Kind::Des: return io::point_from_json(j);
    case Kind::Ddes: return io::grid_from_json(j);
  }
  throw ConfigError("unknown representation");
}

Json representation_to_json(const Representation& r) {
  return std::visit([](const auto& v) { return io::to_json(v); }, r);
}

struct ParsedInput {
  std::vector<Record> records;
  std::optional<std::string> first_error;
  std::size_t first_error_line = SIZE_MAX;
  std::size_t failures = 0;

  void fail(std::size_t line, std::string message) {
    ++failures;
    if (line < first_error_line) {
      first_error_line = line;
      first_error = std::move(message);
    }
  }
};

// Reads a JSON Lines file of one representation kind. A DDES input may also
// be a single binary grid file.
ParsedInput read_records(const std::string& path, Kind kind, const EmotionSetPtr& set) {
  ParsedInput parsed;
  if (kind == Kind::Ddes && starts_with_magic(path)) {
    try {
      parsed.records.push_back({1, std::nullopt, io::read_grid_file(path)});
    } catch (const std::exception& e) {
      parsed.fail(1, path + ": " + e.what());
    }
    return parsed;
  }
  for (auto& line : read_lines(path)) {
    try {
      const Json j = Json::parse(line.text);
      std::optional<Json> id;
      if (j.is_object() && j.contains("id")) id = j.at("id");
      parsed.records.push_back({line.number, std::move(id), parse_representation(j, kind, set)});
    } catch (const std::exception& e) {
      parsed.fail(line.number, path + ":" + std::to_string(line.number) + ": " + e.what());
    }
  }
  return parsed;
}

struct ConvertTargets {
  EmotionSetPtr set;
  std::optional<GridGeometry> geometry;
  ConversionParams params;
};

Representation convert_representation(const Representation& from, Kind to, const ConvertTargets& t) {
  const auto need_set = [&] {
    if (!t.set) throw ConfigError("conversion to ces needs a target emotion set");
    return t.set;
  };
  const auto need_geometry = [&] {
    if (!t.geometry) throw ConfigError("conversion to ddes needs a grid geometry");
    return *t.geometry;
  };
  if (const auto* ces = std::get_if<CategoricalState>(&from)) {
    switch (to) {
      case Kind::Ces: return ces_to_ces(*ces, need_set(), t.params);
      case Kind::Des: return ces_to_des(*ces);
      case Kind::Ddes: return ces_to_ddes(*ces, need_geometry(), t.params);
    }
  }
  if (const auto* des = std::get_if<VAPoint>(&from)) {
    switch (to) {
      case Kind::Ces: return des_to_ces(*des, need_set(), t.params);
      case Kind::Des: return *des;
      case Kind::Ddes: return des_to_ddes(*des, need_geometry(), t.params);
    }
  }
  const auto& grid = std::get<DensityGrid>(from);
  switch (to) {
    case Kind::Ces: return ddes_to_ces(grid, need_set());
    case Kind::Des: return ddes_to_des(grid, t.params);
    case Kind::Ddes:
      if (t.geometry && !(*t.geometry == grid.geometry())) {
        throw Error(ErrorCode::ShapeMismatch, "grid resampling between geometries is not supported");
      }
      return grid;
  }
  throw ConfigError("unknown representation");
}

struct ParamFlags {
  double epsilon_dist = ConversionParams{}.epsilon_dist;
  double k = ConversionParams{}.sharpness_k;
  std::string sigma = "auto";
  double tau = ConversionParams{}.temperature_tau;
  double epsilon_temp = ConversionParams{}.epsilon_temp;
  std::size_t height = kDefaultGridSize;
  std::size_t width = kDefaultGridSize;

  void attach(CLI::App& app) {
    app.add_option("--eps-dist", epsilon_dist, "Distance stability constant for ces->ces")->capture_default_str();
    app.add_option("--k", k, "Sharpness of des->ces")->capture_default_str();
    app.add_option("--sigma", sigma, "Kernel width for ->ddes, or 'auto' for Scott's rule")->capture_default_str();
    app.add_option("--tau", tau, "Sharpening temperature for ddes->des")->capture_default_str();
    app.add_option("--eps-temp", epsilon_temp, "Sharpening stability constant")->capture_default_str();
    app.add_option("--height", height, "Grid rows for ->ddes")->capture_default_str();
    app.add_option("--width", width, "Grid columns for ->ddes")->capture_default_str();
  }

  ConversionParams params() const {
    ConversionParams p;
    p.epsilon_dist = epsilon_dist;
    p.sharpness_k = k;
    p.temperature_tau = tau;
    p.epsilon_temp = epsilon_temp;
    if (sigma != "auto") {
      double s = 0.0;
      const auto [ptr, ec] = std::from_chars(sigma.data(), sigma.data() + sigma.size(), s);
      if (ec != std::errc() || ptr != sigma.data() + sigma.size()) {
        throw ConfigError("--sigma must be a number or 'auto', got '" + sigma + "'");
      }
      p.sigma = s;
    }
    side_input("conversion parameters", [&] {
      p.validate();
      return 0;
    });
    return p;
  }

  GridGeometry geometry() const {
    return side_input("grid geometry", [&] { return GridGeometry(height, width); });
  }
};

Json with_id(const std::optional<Json>& id, Json body) {
  if (!id) return body;
  Json out = Json::object();
  out["id"] = *id;
  for (auto& [key, value] : body.items()) out[key] = value;
  return out;
}

// ---------------------------------------------------------------- convert

struct ConvertFlags {
  std::string from, to, input, output, set, source_set;
  bool binary = false;
  ParamFlags params;
};

int convert_command(const ConvertFlags& f, std::ostream& out, std::ostream& err) {
  const Kind from = kKindNames.at(f.from);
  const Kind to = kKindNames.at(f.to);
  ConvertTargets targets;
  targets.params = f.params.params();
  if (to == Kind::Ces) targets.set = load_set(f.set, "--set");
  if (to == Kind::Ddes) targets.geometry = f.params.geometry();
  const EmotionSetPtr source = from == Kind::Ces ? load_set(f.source_set, "--source-set") : nullptr;
  if (f.binary && to != Kind::Ddes) throw ConfigError("--binary requires --to ddes");
  if (f.binary && f.output.empty()) throw ConfigError("--binary requires --output");

  ParsedInput input = read_records(f.input, from, source);

  std::vector<std::optional<Representation>> results(input.records.size());
  std::vector<std::string> errors(input.records.size());
  parallel_for(input.records.size(), [&](std::size_t n) {
    try {
      results[n] = convert_representation(input.records[n].value, to, targets);
    } catch (const std::exception& e) {
      errors[n] = e.what();
    }
  });

  for (std::size_t n = 0; n < results.size(); ++n) {
    if (!results[n]) input.fail(input.records[n].line, f.input + ":" + std::to_string(input.records[n].line) + ": " + errors[n]);
  }
  const std::size_t failures = input.failures;

  if (f.binary) {
    if (failures == 0 && results.size() != 1) throw ConfigError("--binary needs exactly one input record");
    if (failures == 0) {
      Output sink(f.output, out, true);
      io::write_grid_binary(sink.stream(), std::get<DensityGrid>(*results.front()));
    }
  } else {
    Output sink(f.output, out);
    for (std::size_t n = 0; n < results.size(); ++n) {
      if (results[n]) sink.stream() << io::dump(with_id(input.records[n].id, representation_to_json(*results[n]))) << '\n';
    }
  }
  if (failures > 0) {
    err << "convert: " << failures << " record(s) failed; first: " << *input.first_error << '\n';
    return kExitData;
  }
  return kExitOk;
}

// -------------------------------------------------------------- aggregate

struct AggregateFlags {
  std::string annotations, config, lexicon, set, out_dir;
  bool binary = false;
};

std::string file_stem_for(const std::string& image_id) {
  std::string stem = image_id;
  for (char& c : stem) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!keep) c = '_';
  }
  if (stem == "." || stem == "..") stem = "_" + stem;
  return stem;
}

Json cov_json(const Cov2& c) {
  return Json::array({Json::array({io::round_sig9(c.vv), io::round_sig9(c.va)}),
                      Json::array({io::round_sig9(c.va), io::round_sig9(c.aa)})});
}

int aggregate_command(const AggregateFlags& f, std::ostream& out, std::ostream& err) {
  const io::AggregationConfig cfg =
      f.config.empty() ? io::AggregationConfig{}
                       : side_input("--config " + f.config, [&] { return io::read_aggregation_config(f.config); });
  if (f.lexicon.empty() == f.set.empty()) throw ConfigError("exactly one of --lexicon or --set is required");
  std::optional<Lexicon> lexicon;
  EmotionSetPtr set;
  if (!f.lexicon.empty()) {
    lexicon = side_input("--lexicon " + f.lexicon, [&] { return load_lexicon(f.lexicon); });
  } else {
    set = load_set(f.set, "--set");
  }
  side_input("--out-dir " + f.out_dir, [&] { return fs::create_directories(f.out_dir); });

  const auto resolves = [&](const std::string& label) {
    return lexicon ? lexicon->find(label).has_value() : set->index_of(normalize_word(label)).has_value();
  };

  std::vector<std::string> order;
  std::map<std::string, std::vector<AnnotationRecord>> by_image;
  std::size_t total = 0;
  for (const auto& line : read_lines(f.annotations)) {
    AnnotationRecord rec;
    try {
      rec = io::annotation_from_json(Json::parse(line.text));
    } catch (const std::exception& e) {
      err << "aggregate: " << f.annotations << ":" << line.number << ": " << e.what() << '\n';
      return kExitData;
    }
    if (!resolves(rec.emotion_label)) {
      err << "aggregate: " << f.annotations << ":" << line.number << ": "
          << Error(ErrorCode::UnresolvableLabel, "unknown emotion '" + rec.emotion_label + "'").what() << '\n';
      return kExitData;
    }
    auto [it, fresh] = by_image.try_emplace(rec.image_id);
    if (fresh) order.push_back(rec.image_id);
    it->second.push_back(std::move(rec));
    ++total;
  }
  if (total == 0) {
    err << "aggregate: " << Error(ErrorCode::EmptyInput, "no annotation records in " + f.annotations).what() << '\n';
    return kExitData;
  }

  struct ImageResult {
    std::optional<Json> summary;
    std::string error;
  };
  std::vector<ImageResult> results(order.size());
  parallel_for(order.size(), [&](std::size_t n) {
    try {
      const auto& records = by_image.at(order[n]);
      const auto cloud = lexicon ? annotations_to_points(records, *lexicon) : annotations_to_points(records, *set);
      const Bandwidth bw = std::visit(
          [&](const auto& choice) -> Bandwidth {
            using T = std::decay_t<decltype(choice)>;
            if constexpr (std::is_same_v<T, io::ScottRule>) {
              return scott_bandwidth(cloud);
            } else if constexpr (std::is_same_v<T, double>) {
              return Bandwidth::isotropic(choice);
            } else {
              return Bandwidth(choice);
            }
          },
          cfg.bandwidth);
      const DensityGrid grid = kde_to_grid(cloud, cfg.grid, bw);
      const fs::path file = fs::path(f.out_dir) / (file_stem_for(order[n]) + (f.binary ? ".ddes" : ".json"));
      io::write_grid_file(file, grid, f.binary);
      results[n].summary = Json{{"image_id", order[n]},
                                {"annotations", records.size()},
                                {"points", cloud.size()},
                                {"bandwidth", cov_json(bw.cov())},
                                {"file", file.filename().string()}};
    } catch (const std::exception& e) {
      results[n].error = e.what();
    }
  });

  std::size_t failures = 0;
  for (std::size_t n = 0; n < results.size(); ++n) {
    if (results[n].summary) {
      out << io::dump(*results[n].summary) << '\n';
    } else {
      ++failures;
      err << "aggregate: image '" << order[n] << "': " << results[n].error << '\n';
    }
  }
  out << io::dump(Json{{"images", order.size() - failures}, {"annotations", total}, {"failed", failures}}) << '\n';
  return failures == 0 ? kExitOk : kExitData;
}

// ------------------------------------------------------------------- eval

struct EvalFlags {
  std::string pred, gt, pred_kind, gt_kind, set, pred_set, output;
  std::vector<std::string> metrics;
  ParamFlags params;
};

enum class Metric { Accuracy, F1, Kendall, Kl, PearsonV, PearsonA, Rmse, Mse };

const std::map<std::string, Metric> kMetricNames{
    {"accuracy", Metric::Accuracy}, {"top1", Metric::Accuracy},     {"f1", Metric::F1},
    {"macro_f1", Metric::F1},       {"kendall", Metric::Kendall},   {"kendall_tau_b", Metric::Kendall},
    {"kl", Metric::Kl},             {"pearson_v", Metric::PearsonV}, {"pearson_a", Metric::PearsonA},
    {"rmse", Metric::Rmse},         {"mse", Metric::Mse}};

std::string report_name(Metric m) {
  switch (m) {
    case Metric::Accuracy: return "top1_accuracy";
    case Metric::F1: return "macro_f1";
    case Metric::Kendall: return "kendall_tau_b";
    case Metric::Kl: return "kl";
    case Metric::PearsonV: return "pearson_v";
    case Metric::PearsonA: return "pearson_a";
    case Metric::Rmse: return "rmse";
    case Metric::Mse: return "mse";
  }
  return "?";
}

template <typename T>
std::vector<T> unpack(const std::vector<Representation>& reps) {
  std::vector<T> out;
  out.reserve(reps.size());
  for (const auto& r : reps) out.push_back(std::get<T>(r));
  return out;
}

MetricReport compute_metric(Metric m, Kind kind, const std::vector<Representation>& preds,
                            const std::vector<Representation>& gts) {
  const auto require = [&](std::initializer_list<Kind> allowed) {
    if (std::find(allowed.begin(), allowed.end(), kind) == allowed.end()) {
      throw Error(ErrorCode::InvalidParams, "metric needs ground truth of another kind than " +
                                                std::string(kind_name(kind)));
    }
  };
  MetricReport report{report_name(m), 0.0, preds.size(), 0};
  switch (m) {
    case Metric::Accuracy:
      require({Kind::Ces});
      report.value = top1_accuracy(unpack<CategoricalState>(preds), unpack<CategoricalState>(gts));
      break;
    case Metric::F1:
      require({Kind::Ces});
      report.value = macro_f1(unpack<CategoricalState>(preds), unpack<CategoricalState>(gts));
      break;
    case Metric::Kendall: {
      require({Kind::Ces});
      const auto tau = mean_kendall_tau(unpack<CategoricalState>(preds), unpack<CategoricalState>(gts));
      report.value = tau.mean;
      report.sample_count = tau.used;
      report.skipped = tau.skipped;
      break;
    }
    case Metric::Kl: {
      require({Kind::Ces, Kind::Ddes});
      double total = 0.0;
      for (std::size_t n = 0; n < preds.size(); ++n) {
        total += kind == Kind::Ces
                     ? kl_divergence(std::get<CategoricalState>(gts[n]), std::get<CategoricalState>(preds[n]))
                     : kl_divergence(std::get<DensityGrid>(gts[n]), std::get<DensityGrid>(preds[n]));
      }
      report.value = total / static_cast<double>(preds.size());
      break;
    }
    case Metric::PearsonV:
    case Metric::PearsonA: {
      require({Kind::Des});
      std::vector<double> xs, ys;
      for (std::size_t n = 0; n < preds.size(); ++n) {
        const auto& p = std::get<VAPoint>(preds[n]);
        const auto& g = std::get<VAPoint>(gts[n]);
        xs.push_back(m == Metric::PearsonV ? p.valence() : p.arousal());
        ys.push_back(m == Metric::PearsonV ? g.valence() : g.arousal());
      }
      report.value = pearson_r(xs, ys);
      break;
    }
    case Metric::Rmse:
      require({Kind::Des});
      report.value = rmse(unpack<VAPoint>(preds), unpack<VAPoint>(gts));
      break;
    case Metric::Mse: {
      require({Kind::Des});
      double total = 0.0;
      for (std::size_t n = 0; n < preds.size(); ++n) {
        total += mse_loss(std::get<VAPoint>(preds[n]), std::get<VAPoint>(gts[n]));
      }
      report.value = total / static_cast<double>(preds.size());
      break;
    }
  }
  return report;
}

int eval_command(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  const Kind pred_kind = kKindNames.at(f.pred_kind);
  const Kind gt_kind = kKindNames.at(f.gt_kind);
  std::vector<Metric> metrics;
  for (const auto& name : f.metrics) {
    const auto it = kMetricNames.find(name);
    if (it == kMetricNames.end()) throw ConfigError("unknown metric '" + name + "'");
    metrics.push_back(it->second);
  }
  ConvertTargets targets;
  targets.params = f.params.params();
  const EmotionSetPtr gt_set = gt_kind == Kind::Ces ? load_set(f.set, "--set") : nullptr;
  const EmotionSetPtr pred_set =
      pred_kind == Kind::Ces ? load_set(f.pred_set.empty() ? f.set : f.pred_set, "--pred-set") : nullptr;
  targets.set = gt_set;

  const ParsedInput preds = read_records(f.pred, pred_kind, pred_set);
  const ParsedInput gts = read_records(f.gt, gt_kind, gt_set);
  Output sink(f.output, out);
  const auto fail_all = [&](const std::string& reason) {
    for (auto m : metrics) err << "eval: " << report_name(m) << ": " << reason << '\n';
    sink.stream() << io::dump(Json::array()) << '\n';
    return kExitData;
  };
  if (preds.first_error) return fail_all(*preds.first_error);
  if (gts.first_error) return fail_all(*gts.first_error);
  if (preds.records.size() != gts.records.size()) {
    return fail_all(Error(ErrorCode::LengthMismatch, std::to_string(preds.records.size()) + " predictions vs " +
                                                         std::to_string(gts.records.size()) + " ground truths")
                        .what());
  }

  // Predictions are converted into the ground-truth representation unless
  // they already share it.
  std::vector<std::optional<Representation>> converted(preds.records.size());
  std::vector<std::string> errors(preds.records.size());
  parallel_for(preds.records.size(), [&](std::size_t n) {
    try {
      const Representation& pred = preds.records[n].value;
      if (pred_kind == gt_kind && (gt_kind != Kind::Ces || pred_set->same_emotions(*gt_set))) {
        converted[n] = pred;
        return;
      }
      ConvertTargets local = targets;
      if (gt_kind == Kind::Ddes) local.geometry = std::get<DensityGrid>(gts.records[n].value).geometry();
      converted[n] = convert_representation(pred, gt_kind, local);
    } catch (const std::exception& e) {
      errors[n] = e.what();
    }
  });
  for (std::size_t n = 0; n < converted.size(); ++n) {
    if (!converted[n]) return fail_all(f.pred + ":" + std::to_string(preds.records[n].line) + ": " + errors[n]);
  }
  std::vector<Representation> pred_values, gt_values;
  for (std::size_t n = 0; n < converted.size(); ++n) {
    pred_values.push_back(std::move(*converted[n]));
    gt_values.push_back(gts.records[n].value);
  }

  Json reports = Json::array();
  bool failed = false;
  for (auto m : metrics) {
    try {
      reports.push_back(io::to_json(compute_metric(m, gt_kind, pred_values, gt_values)));
    } catch (const std::exception& e) {
      failed = true;
      err << "eval: " << report_name(m) << ": " << e.what() << '\n';
    }
  }
  sink.stream() << io::dump(reports) << '\n';
  return failed ? kExitData : kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeFlags {
  std::vector<std::string> inputs;
  std::string wheel, output;
  bool quadrants = false, hemispheres = false;
  std::size_t top_k = 0;
};

std::vector<DensityGrid> read_grids(const std::string& path) {
  if (starts_with_magic(path)) return {io::read_grid_file(path)};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::vector<DensityGrid> grids;
  try {
    grids.push_back(io::grid_from_json(Json::parse(text)));
    return grids;
  } catch (const nlohmann::json::parse_error&) {
    // Not a single document; fall through to JSON Lines.
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      grids.push_back(io::grid_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::BadFormat, path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return grids;
}

Json pair_json(const std::array<double, 2>& h) {
  return Json::array({io::round_sig9(h[0]), io::round_sig9(h[1])});
}

int analyze_command(AnalyzeFlags f, std::ostream& out, std::ostream& err) {
  const EmotionSetPtr wheel = f.wheel.empty() ? nullptr : load_set(f.wheel, "--wheel");
  if (f.top_k > 0 && !wheel) throw ConfigError("--top-k requires --wheel");
  if (wheel && f.top_k == 0) f.top_k = wheel->size();
  if (wheel && f.top_k > wheel->size()) {
    throw ConfigError("--top-k " + std::to_string(f.top_k) + " exceeds wheel size " + std::to_string(wheel->size()));
  }
  if (!f.quadrants && !f.hemispheres && !wheel) f.quadrants = f.hemispheres = true;

  Output sink(f.output, out);
  for (const auto& path : f.inputs) {
    std::vector<DensityGrid> grids;
    try {
      grids = read_grids(path);
    } catch (const std::exception& e) {
      err << "analyze: " << path << ": " << e.what() << '\n';
      return kExitData;
    }
    for (const auto& grid : grids) {
      Json result = Json::object();
      try {
        if (f.quadrants) {
          Json q = Json::array();
          for (double m : quadrant_mass(grid)) q.push_back(io::round_sig9(m));
          result["quadrants"] = std::move(q);
        }
        if (f.hemispheres) {
          result["hemispheres"] = Json{{"valence", pair_json(hemisphere_mass(grid, Axis::Valence))},
                                       {"arousal", pair_json(hemisphere_mass(grid, Axis::Arousal))}};
        }
        if (wheel) {
          Json ranked = Json::array();
          for (const auto& r : top_k(project_to_wheel(grid, wheel), f.top_k)) {
            ranked.push_back(Json::array({r.label, io::round_sig9(r.probability)}));
          }
          result["top_k"] = std::move(ranked);
        }
      } catch (const std::exception& e) {
        err << "analyze: " << path << ": " << e.what() << '\n';
        return kExitData;
      }
      sink.stream() << io::dump(result) << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- lexicon

struct LexiconFlags {
  std::string lexicon, name = "custom", output;
  std::vector<std::string> words;
};

int lexicon_lookup(const LexiconFlags& f, std::ostream& out, std::ostream& err) {
  const Lexicon lex = side_input("--lexicon " + f.lexicon, [&] { return load_lexicon(f.lexicon); });
  std::vector<std::string> missing;
  for (const auto& w : f.words) {
    if (!lex.find(w)) {
      missing.push_back(normalize_word(w));
      continue;
    }
    const VAPoint p = lookup_va(lex, w);
    out << io::format_number(p.valence()) << ' ' << io::format_number(p.arousal()) << '\n';
  }
  if (!missing.empty()) {
    err << "lexicon: WordNotFound:";
    for (const auto& w : missing) err << ' ' << w;
    err << '\n';
    return kExitData;
  }
  return kExitOk;
}

int lexicon_build_set(const LexiconFlags& f, std::ostream& out, std::ostream& err) {
  const Lexicon lex = side_input("--lexicon " + f.lexicon, [&] { return load_lexicon(f.lexicon); });
  std::vector<Emotion> emotions;
  std::vector<std::string> missing;
  for (const auto& w : f.words) {
    if (!lex.find(w)) {
      missing.push_back(normalize_word(w));
    } else {
      emotions.push_back({normalize_word(w), lookup_va(lex, w)});
    }
  }
  if (!missing.empty()) {
    err << "lexicon: WordNotFound:";
    for (const auto& w : missing) err << ' ' << w;
    err << '\n';
    return kExitData;
  }
  EmotionSetPtr set;
  try {
    set = make_emotion_set(f.name, std::move(emotions));
  } catch (const std::exception& e) {
    err << "lexicon: " << e.what() << '\n';
    return kExitData;
  }
  Output sink(f.output, out);
  sink.stream() << io::dump(io::to_json(*set), 2) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emotion representation toolkit: CES / DES / DDES conversion, aggregation, evaluation"};
  app.name("ddes-kit");
  app.require_subcommand(1);

  const auto kinds = CLI::IsMember({"ces", "des", "ddes"});

  ConvertFlags convert;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between representations (JSON Lines in/out)");
  convert_cmd->add_option("--from", convert.from, "Input representation")->required()->check(kinds);
  convert_cmd->add_option("--to", convert.to, "Output representation")->required()->check(kinds);
  convert_cmd->add_option("--input", convert.input, "Input JSON Lines (or a binary grid for --from ddes)")
      ->required()
      ->check(CLI::ExistingFile);
  convert_cmd->add_option("--output", convert.output, "Output file (default stdout)");
  convert_cmd->add_option("--set", convert.set, "Target emotion set for --to ces");
  convert_cmd->add_option("--source-set", convert.source_set, "Emotion set of --from ces input");
  convert_cmd->add_flag("--binary", convert.binary, "Write a single binary DDES grid");
  convert.params.attach(*convert_cmd);

  ConvertFlags resample;
  resample.from = resample.to = "ces";
  auto* resample_cmd = app.add_subcommand("resample", "Resample CES records onto another emotion set");
  resample_cmd->add_option("--input", resample.input, "Input CES JSON Lines")->required()->check(CLI::ExistingFile);
  resample_cmd->add_option("--output", resample.output, "Output file (default stdout)");
  resample_cmd->add_option("--source-set", resample.source_set, "Emotion set of the input")->required();
  resample_cmd->add_option("--set", resample.set, "Target emotion set")->required();
  resample.params.attach(*resample_cmd);

  AggregateFlags aggregate;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Build one DDES grid per image from annotations");
  aggregate_cmd->add_option("--annotations", aggregate.annotations, "Annotations JSON Lines")
      ->required()
      ->check(CLI::ExistingFile);
  aggregate_cmd->add_option("--config", aggregate.config, "Aggregation config JSON")->check(CLI::ExistingFile);
  aggregate_cmd->add_option("--lexicon", aggregate.lexicon, "VAD lexicon TSV for label anchors");
  aggregate_cmd->add_option("--set", aggregate.set, "Emotion set JSON for label anchors");
  aggregate_cmd->add_option("--out-dir", aggregate.out_dir, "Directory for grid files")->required();
  aggregate_cmd->add_flag("--binary", aggregate.binary, "Write binary grids instead of JSON");

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("--pred", eval.pred, "Prediction JSON Lines")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth JSON Lines")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred-kind", eval.pred_kind, "Prediction representation")->required()->check(kinds);
  eval_cmd->add_option("--gt-kind", eval.gt_kind, "Ground-truth representation")->required()->check(kinds);
  eval_cmd->add_option("--metrics", eval.metrics, "Comma-separated metric names")->required()->delimiter(',');
  eval_cmd->add_option("--set", eval.set, "Emotion set of ces ground truth");
  eval_cmd->add_option("--pred-set", eval.pred_set, "Emotion set of ces predictions (default --set)");
  eval_cmd->add_option("--output", eval.output, "Report file (default stdout)");
  eval.params.attach(*eval_cmd);

  AnalyzeFlags analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Quadrant/hemisphere mass and wheel projection of grids");
  analyze_cmd->add_option("--input", analyze.inputs, "Grid files (binary, JSON or JSON Lines)")->required();
  analyze_cmd->add_flag("--quadrants", analyze.quadrants, "Emit mass per quadrant");
  analyze_cmd->add_flag("--hemispheres", analyze.hemispheres, "Emit mass per hemisphere");
  analyze_cmd->add_option("--wheel", analyze.wheel, "Emotion set to project onto");
  analyze_cmd->add_option("--top-k", analyze.top_k, "Number of ranked wheel emotions");
  analyze_cmd->add_option("--output", analyze.output, "Output file (default stdout)");

  LexiconFlags lookup, build;
  auto* lexicon_cmd = app.add_subcommand("lexicon", "Query a VAD lexicon");
  lexicon_cmd->require_subcommand(1);
  auto* lookup_cmd = lexicon_cmd->add_subcommand("lookup", "Print scaled valence and arousal per word");
  lookup_cmd->add_option("--lexicon", lookup.lexicon, "Lexicon TSV")->required();
  lookup_cmd->add_option("words", lookup.words, "Words to look up")->required();
  auto* build_cmd = lexicon_cmd->add_subcommand("build-set", "Write an emotion set from looked-up words");
  build_cmd->add_option("--lexicon", build.lexicon, "Lexicon TSV")->required();
  build_cmd->add_option("--name", build.name, "Set name")->capture_default_str();
  build_cmd->add_option("--output", build.output, "Output file (default stdout)");
  build_cmd->add_option("words", build.words, "Emotion words")->required();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("ddes-kit");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (convert_cmd->parsed()) return convert_command(convert, out, err);
    if (resample_cmd->parsed()) return convert_command(resample, out, err);
    if (aggregate_cmd->parsed()) return aggregate_command(aggregate, out, err);
    if (eval_cmd->parsed()) return eval_command(eval, out, err);
    if (analyze_cmd->parsed()) return analyze_command(analyze, out, err);
    if (lookup_cmd->parsed()) return lexicon_lookup(lookup, out, err);
    if (build_cmd->parsed()) return lexicon_build_set(build, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace ddes::cli
