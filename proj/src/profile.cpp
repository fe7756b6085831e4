#include "starscat/profile.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace starscat {

namespace {

constexpr double kEdgeLengthTol = 1e-12;
constexpr double kZeroMeanTolExact = 1e-10;
constexpr double kZeroMeanTolSampled = 1e-8;

std::string place(int edge_index, int segment_index) {
  std::ostringstream os;
  os << "edge " << edge_index + 1 << ", segment " << segment_index + 1;
  return os.str();
}

}  // namespace

double Segment::value_at(double s) const {
  if (is_constant()) return const_value;
  if (s <= samples.front()[0]) return samples.front()[1];
  if (s >= samples.back()[0]) return samples.back()[1];
  // linear interpolation between the bracketing nodes
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (s <= samples[i][0]) {
      const double s0 = samples[i - 1][0], s1 = samples[i][0];
      const double v0 = samples[i - 1][1], v1 = samples[i][1];
      const double t = (s - s0) / (s1 - s0);
      return v0 + t * (v1 - v0);
    }
  }
  return samples.back()[1];
}

double Segment::integral() const {
  if (is_constant()) return const_value * length;
  double sum = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    sum += 0.5 * (samples[i][1] + samples[i - 1][1]) * (samples[i][0] - samples[i - 1][0]);
  }
  return sum;
}

void Segment::validate(int edge_index, int segment_index) const {
  if (!(length > 0.0))
    throw InvalidProfile(place(edge_index, segment_index) + ": length must be > 0");
  if (is_constant()) return;
  if (samples.size() < 2)
    throw InvalidProfile(place(edge_index, segment_index) +
                         ": sampled table needs at least 2 nodes");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i][0] > samples[i - 1][0]))
      throw InvalidProfile(place(edge_index, segment_index) +
                           ": sample abscissae must be strictly increasing");
  }
  if (std::abs(samples.front()[0]) > kEdgeLengthTol ||
      std::abs(samples.back()[0] - length) > kEdgeLengthTol)
    throw InvalidProfile(place(edge_index, segment_index) +
                         ": sampled table must span the segment from 0 to its length");
}

double EdgePotential::total_length() const {
  double len = 0.0;
  for (const auto& seg : segments) len += seg.length;
  return len;
}

double EdgePotential::value_at(double s) const {
  double start = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double end = start + segments[i].length;
    if (s <= end || i + 1 == segments.size()) return segments[i].value_at(s - start);
    start = end;
  }
  return 0.0;
}

double EdgePotential::integral() const {
  double sum = 0.0;
  for (const auto& seg : segments) sum += seg.integral();
  return sum;
}

void EdgePotential::validate(int edge_index) const {
  if (segments.empty())
    throw InvalidProfile("edge " + std::to_string(edge_index + 1) + ": needs at least one segment");
  for (std::size_t i = 0; i < segments.size(); ++i)
    segments[i].validate(edge_index, static_cast<int>(i));
  const double len = total_length();
  if (std::abs(len - 1.0) > kEdgeLengthTol) {
    std::ostringstream os;
    os << "edge " << edge_index + 1 << ": segment lengths sum to " << len
       << ", expected 1";
    throw InvalidProfile(os.str());
  }
}

bool PotentialProfile::has_sampled_segments() const {
  for (const auto& edge : edges)
    for (const auto& seg : edge.segments)
      if (!seg.is_constant()) return true;
  return false;
}

void PotentialProfile::validate() const {
  for (int j = 0; j < 3; ++j) edges[j].validate(j);
  if (zero_mean_enforced) {
    const double mean = integrate_potential(*this);
    const double tol = has_sampled_segments() ? kZeroMeanTolSampled : kZeroMeanTolExact;
    if (std::abs(mean) > tol) {
      std::ostringstream os;
      os << "profile integrates to " << mean << ", zero mean required (tolerance " << tol
         << ")";
      throw NonZeroMean(os.str());
    }
  }
}

double integrate_potential(const PotentialProfile& profile) {
  double sum = 0.0;
  for (const auto& edge : profile.edges) sum += edge.integral();
  return sum;
}

namespace {

using nlohmann::json;

Segment segment_from_json(const json& j) {
  if (!j.is_object()) throw MalformedConfig("segment must be an object");
  if (!j.contains("length") || !j.at("length").is_number())
    throw MalformedConfig("segment needs a numeric \"length\"");
  Segment seg;
  seg.length = j.at("length").get<double>();
  const bool has_const = j.contains("const");
  const bool has_samples = j.contains("samples");
  if (has_const == has_samples)
    throw MalformedConfig("segment needs exactly one of \"const\" or \"samples\"");
  if (has_const) {
    if (!j.at("const").is_number()) throw MalformedConfig("segment \"const\" must be numeric");
    seg.const_value = j.at("const").get<double>();
  } else {
    const auto& arr = j.at("samples");
    if (!arr.is_array()) throw MalformedConfig("segment \"samples\" must be an array");
    for (const auto& node : arr) {
      if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number())
        throw MalformedConfig("each sample must be a [s, value] pair");
      seg.samples.push_back({node[0].get<double>(), node[1].get<double>()});
    }
  }
  return seg;
}

}  // namespace

PotentialProfile parse_profile(const std::string& config_text) {
  json root;
  try {
    root = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw MalformedConfig(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw MalformedConfig("config root must be an object");
  if (!root.contains("edges") || !root.at("edges").is_array())
    throw MalformedConfig("config needs an \"edges\" array");
  const auto& edges = root.at("edges");
  if (edges.size() != 3)
    throw InvalidProfile("profile must have exactly 3 edges, got " +
                         std::to_string(edges.size()));

  PotentialProfile profile;
  for (int j = 0; j < 3; ++j) {
    const auto& e = edges[j];
    if (!e.is_object() || !e.contains("segments") || !e.at("segments").is_array())
      throw MalformedConfig("edge " + std::to_string(j + 1) + " needs a \"segments\" array");
    for (const auto& s : e.at("segments"))
      profile.edges[j].segments.push_back(segment_from_json(s));
  }
  if (root.contains("zero_mean")) {
    if (!root.at("zero_mean").is_boolean())
      throw MalformedConfig("\"zero_mean\" must be a boolean");
    profile.zero_mean_enforced = root.at("zero_mean").get<bool>();
  }
  profile.validate();
  return profile;
}

std::string serialize_profile(const PotentialProfile& profile) {
  json root;
  root["edges"] = json::array();
  for (const auto& edge : profile.edges) {
    json e;
    e["segments"] = json::array();
    for (const auto& seg : edge.segments) {
      json s;
      s["length"] = seg.length;
      if (seg.is_constant()) {
        s["const"] = seg.const_value;
      } else {
        json table = json::array();
        for (const auto& node : seg.samples) table.push_back({node[0], node[1]});
        s["samples"] = table;
      }
      e["segments"].push_back(std::move(s));
    }
    root["edges"].push_back(std::move(e));
  }
  root["zero_mean"] = profile.zero_mean_enforced;
  return root.dump(2) + "\n";
}

PotentialProfile builtin_profile(const std::string& name) {
  const EdgePotential rect{{Segment{0.5, 7.0, {}}, Segment{0.5, -7.0, {}}}};
  const EdgePotential flat{{Segment{1.0, 0.0, {}}}};

  PotentialProfile profile;
  if (name == "paper-rect") {
    profile.edges = {rect, flat, flat};
  } else if (name == "symmetric-rect") {
    profile.edges = {rect, rect, rect};
  } else {
    throw UnknownProfile("unknown builtin profile \"" + name +
                         "\" (available: paper-rect, symmetric-rect)");
  }
  profile.name = name;
  profile.validate();
  return profile;
}

}  // namespace starscat
