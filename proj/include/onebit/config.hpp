#pragma once

#include "onebit/sim.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace onebit {

/// Reads a SimConfig from a JSON object. Keys mirror the struct fields, with
/// "modulation" also accepted as "mod"; any other key is an error.
inline SimConfig config_from_json(const nlohmann::json& j, SimConfig cfg = {}) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  static const std::set<std::string> known{"nt",  "k",    "modulation", "mod",      "snr_db",  "trials", "precoders",
                                           "seed", "eps0", "out",        "k_values", "threads", "timing"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }
  try {
    if (j.contains("nt")) cfg.nt = j.at("nt").get<int>();
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("modulation")) cfg.modulation = j.at("modulation").get<std::string>();
    if (j.contains("mod")) cfg.modulation = j.at("mod").get<std::string>();
    if (j.contains("snr_db")) {
      const auto& v = j.at("snr_db");
      cfg.snr_db = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
    }
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("precoders")) cfg.precoders = j.at("precoders").get<std::vector<std::string>>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("eps0")) cfg.eps0 = j.at("eps0").get<double>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("k_values")) cfg.k_values = j.at("k_values").get<std::vector<int>>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("timing")) cfg.timing = j.at("timing").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  return config_from_json(j);
}

}  // namespace onebit
