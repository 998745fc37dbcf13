#pragma once

// JSON request/response bodies shared by the HTTP service and the offline
// `recognize` command.
//
//   request  {"strokes": [[[x, y], ...], ...], "k": 10}
//   response {"candidates": [{"label", "class_id", "probability"}, ...],
//             "timings": {"preprocess_ms", "forward_ms"}}

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssdcnn/checkpoint.hpp"
#include "ssdcnn/error.hpp"
#include "ssdcnn/features.hpp"
#include "ssdcnn/ink.hpp"
#include "ssdcnn/model.hpp"

namespace ssdcnn {

inline constexpr int kDefaultTopK = 10;

/// A request that cannot be served. `status` is 400 for malformed bodies
/// and 422 for well-formed but empty ink.
struct RequestError {
  int status = 400;
  std::string field;
  std::string message;

  nlohmann::json to_json() const { return {{"error", message}, {"field", field}}; }
};

struct RecognizeRequest {
  InkCharacter ink;
  int k = kDefaultTopK;
};

/// Parses and validates a request body. Returns the error instead of
/// throwing so the service can map it to a status code.
inline std::optional<RequestError> parse_request(const std::string& body, RecognizeRequest& out) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    return RequestError{400, "", std::string("body is not valid JSON: ") + e.what()};
  }
  if (!j.is_object()) return RequestError{400, "", "body must be a JSON object"};
  out = RecognizeRequest{};
  if (j.contains("k")) {
    const auto& k = j["k"];
    if (!k.is_number_integer()) return RequestError{400, "k", "k must be an integer"};
    const auto v = k.get<long long>();
    if (v < 1) return RequestError{400, "k", "k must be at least 1"};
    out.k = static_cast<int>(std::min<long long>(v, 1 << 20));
  }
  if (!j.contains("strokes")) return RequestError{400, "strokes", "missing field"};
  const auto& strokes = j["strokes"];
  if (!strokes.is_array()) return RequestError{400, "strokes", "must be an array of strokes"};
  for (std::size_t s = 0; s < strokes.size(); ++s) {
    const std::string sf = "strokes[" + std::to_string(s) + "]";
    const auto& stroke = strokes[s];
    if (!stroke.is_array()) return RequestError{400, sf, "stroke must be an array of [x, y] points"};
    Stroke st;
    for (std::size_t p = 0; p < stroke.size(); ++p) {
      const std::string pf = sf + "[" + std::to_string(p) + "]";
      const auto& pt = stroke[p];
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        return RequestError{400, pf, "point must be [x, y] with numeric coordinates"};
      }
      const double x = pt[0].get<double>();
      const double y = pt[1].get<double>();
      if (!std::isfinite(x) || !std::isfinite(y)) return RequestError{400, pf, "coordinates must be finite"};
      st.points.push_back(Point{x, y});
    }
    if (st.points.empty()) return RequestError{422, sf, "stroke has no points"};
    out.ink.strokes.push_back(std::move(st));
  }
  if (out.ink.strokes.empty()) return RequestError{422, "strokes", "ink has no strokes"};
  return std::nullopt;
}

struct Recognition {
  Prediction candidates;  // truncated to min(k, classes)
  double preprocess_ms = 0.0;
  double forward_ms = 0.0;
};

/// Read-only recognizer over a loaded checkpoint; safe to share between
/// threads.
class Recognizer {
 public:
  explicit Recognizer(Checkpoint ck, std::string hash = {}) : ck_(std::move(ck)), hash_(std::move(hash)) {}

  const Checkpoint& checkpoint() const { return ck_; }
  const std::string& hash() const { return hash_; }

  Recognition recognize(const InkCharacter& ink, int k) const {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const SampleFeatures x = featurize(ink, ck_.model.kind, ck_.features);
    const auto t1 = clock::now();
    Prediction p = forward_variant(ck_.model, x);
    const auto t2 = clock::now();
    p.resize(std::min<std::size_t>(p.size(), static_cast<std::size_t>(std::max(k, 1))));
    return Recognition{std::move(p), std::chrono::duration<double, std::milli>(t1 - t0).count(),
                       std::chrono::duration<double, std::milli>(t2 - t1).count()};
  }

  std::string label(int class_id) const {
    if (class_id >= 0 && class_id < ck_.alphabet.size()) return ck_.alphabet.at(class_id);
    return "#" + std::to_string(class_id);
  }

  nlohmann::json to_json(const Recognition& r) const {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : r.candidates) {
      cands.push_back({{"label", label(c.class_id)}, {"class_id", c.class_id}, {"probability", c.probability}});
    }
    return {{"candidates", std::move(cands)},
            {"timings", {{"preprocess_ms", r.preprocess_ms}, {"forward_ms", r.forward_ms}}}};
  }

  nlohmann::json model_json() const {
    return {{"variant", std::string(to_string(ck_.model.kind))},
            {"class_count", ck_.model.classes},
            {"alphabet_size", ck_.alphabet.size()},
            {"architecture", ck_.model.architecture()},
            {"checkpoint_hash", hash_}};
  }

  /// The stroke-map stack and eight-directional vector of an ink, whatever
  /// the model variant consumes.
  nlohmann::json featuremaps_json(const InkCharacter& ink) const {
    const FeatureNeeds needs{true, false, true};
    const SampleFeatures f = featurize(ink, needs, ck_.features);
    const int depth = f.maps_shape[0];
    const std::size_t plane = f.maps.size() / static_cast<std::size_t>(depth);
    nlohmann::json maps = nlohmann::json::array();
    int populated = 0;
    for (int d = 0; d < depth; ++d) {
      std::vector<int> cells(plane);
      bool any = false;
      for (std::size_t i = 0; i < plane; ++i) {
        cells[i] = f.maps[static_cast<std::size_t>(d) * plane + i] != 0.0f ? 1 : 0;
        any = any || cells[i] != 0;
      }
      populated += any ? 1 : 0;
      maps.push_back(std::move(cells));
    }
    return {{"depth", depth},
            {"size", f.maps_shape[1]},
            {"populated", populated},
            {"maps", std::move(maps)},
            {"directions", kDirections},
            {"dir", f.dir}};
  }

 private:
  Checkpoint ck_;
  std::string hash_;
};

}  // namespace ssdcnn
