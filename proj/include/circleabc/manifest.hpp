#ifndef CIRCLEABC_MANIFEST_HPP
#define CIRCLEABC_MANIFEST_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace abc {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRunSchema = "circleabc-run/1";

// Record of a single tool invocation: enough to replay it bit-for-bit.
// The argv vector is stored without the --out-dir pair so a replay can
// redirect outputs and compare them byte-wise against the originals.
struct RunManifest {
  std::string schema = kRunSchema;
  std::string tool_version = kToolVersion;
  std::string command;
  std::vector<std::string> argv;     // normalized args, out-dir stripped
  nlohmann::json parameters;         // resolved flag values, for readers
  std::string schedule_ref;          // input schedule file or "synthesized"
  std::vector<std::string> outputs;  // files written, relative to out-dir
  unsigned precision_bits = 0;
  unsigned seed = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = schema;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["argv"] = argv;
    j["parameters"] = parameters;
    j["schedule_ref"] = schedule_ref;
    j["outputs"] = outputs;
    j["precision_bits"] = precision_bits;
    j["seed"] = seed;
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.schema = j.at("schema").get<std::string>();
    if (m.schema != kRunSchema)
      throw std::invalid_argument("RunManifest: unknown schema " + m.schema);
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.parameters = j.at("parameters");
    m.schedule_ref = j.at("schedule_ref").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.precision_bits = j.at("precision_bits").get<unsigned>();
    m.seed = j.at("seed").get<unsigned>();
    return m;
  }

  static RunManifest load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open manifest: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

// Deterministic file emission: sorted-key JSON, two-space indent, trailing
// newline, binary stream (no locale or newline translation).
inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

inline std::string json_text(const nlohmann::json& j) {
  return j.dump(2) + "\n";
}

}  // namespace abc

#endif  // CIRCLEABC_MANIFEST_HPP
