// Copyright 2026 The ruinlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ruinlab/distribution.hpp"
#include "ruinlab/error.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/paths.hpp"

namespace ruinlab {

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::uint64_t replicates = 100000;
  std::optional<int> block_size_override;
  std::vector<double> u_grid{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  RuinHorizon horizon;
  double weight_tol = 1e-12;
  std::size_t max_terms = 100000;
  double hill_fraction = 0.01;
  double sigma_grid_step = 1e-3;
  std::int64_t block_floor = 8;
};

struct ExperimentConfig {
  std::string name;
  Model model;
  RunConfig run;
};

/// All problems found in a config file, each prefixed with its key path.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : ValidationError(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s = "invalid config:";
    for (const auto& x : e) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> errors_;
};

namespace detail {

using nlohmann::json;

class ConfigReader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
      error(path, "expected an object");
      return false;
    }
    for (const auto& [key, _] : j.items()) {
      if (!allowed.count(key)) error(join(path, key), "unknown key");
    }
    return true;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  std::optional<double> number(const json& j, const std::string& path, const std::string& key,
                               bool required = true) {
    if (!j.contains(key)) {
      if (required) error(join(path, key), "missing");
      return std::nullopt;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
      error(join(path, key), "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::uint64_t> count(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      error(join(path, key), "expected a non-negative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<Distribution> distribution(const json& j, const std::string& path) {
    if (!j.is_object()) {
      error(path, "expected a distribution object");
      return std::nullopt;
    }
    if (!j.contains("kind") || !j.at("kind").is_string()) {
      error(join(path, "kind"), "missing or not a string");
      return std::nullopt;
    }
    const std::string kind = j.at("kind").get<std::string>();
    const std::size_t before = errors.size();
    try {
      if (kind == "exponential") {
        object(j, path, {"kind", "rate"});
        auto rate = number(j, path, "rate");
        if (errors.size() == before) return Distribution::exponential(*rate);
      } else if (kind == "gamma") {
        object(j, path, {"kind", "shape", "rate"});
        auto shape = number(j, path, "shape");
        auto rate = number(j, path, "rate");
        if (errors.size() == before) return Distribution::gamma(*shape, *rate);
      } else if (kind == "uniform") {
        object(j, path, {"kind", "lo", "hi"});
        auto lo = number(j, path, "lo");
        auto hi = number(j, path, "hi");
        if (errors.size() == before) return Distribution::uniform(*lo, *hi);
      } else if (kind == "deterministic") {
        object(j, path, {"kind", "value"});
        auto v = number(j, path, "value");
        if (errors.size() == before) return Distribution::deterministic(*v);
      } else if (kind == "two_point") {
        object(j, path, {"kind", "x1", "p1", "x2"});
        auto x1 = number(j, path, "x1");
        auto p1 = number(j, path, "p1");
        auto x2 = number(j, path, "x2");
        if (errors.size() == before) return Distribution::two_point(*x1, *p1, *x2);
      } else if (kind == "shifted") {
        object(j, path, {"kind", "base", "offset"});
        auto off = number(j, path, "offset");
        std::optional<Distribution> base;
        if (j.contains("base")) base = distribution(j.at("base"), join(path, "base"));
        else error(join(path, "base"), "missing");
        if (errors.size() == before) return Distribution::shifted(*base, *off);
      } else if (kind == "negated") {
        object(j, path, {"kind", "base"});
        std::optional<Distribution> base;
        if (j.contains("base")) base = distribution(j.at("base"), join(path, "base"));
        else error(join(path, "base"), "missing");
        if (errors.size() == before) return Distribution::negated(*base);
      } else {
        error(join(path, "kind"), "unknown distribution kind '" + kind + "'");
      }
    } catch (const ValidationError& e) {
      error(path, e.what());
    }
    return std::nullopt;
  }
};

}  // namespace detail

/// Parses and validates a config document. Every problem is collected before
/// throwing ConfigError, and unknown keys are rejected.
inline ExperimentConfig parse_config_json(const nlohmann::json& doc) {
  detail::ConfigReader rd;
  if (!rd.object(doc, "", {"schema", "name", "price", "business", "run"})) throw ConfigError(rd.errors);
  if (doc.contains("schema") && doc.at("schema") != 1) rd.error("schema", "only schema 1 is supported");
  std::string name;
  if (doc.contains("name")) {
    if (doc.at("name").is_string()) name = doc.at("name").get<std::string>();
    else rd.error("name", "expected a string");
  }

  std::optional<PriceModel> price;
  if (!doc.contains("price")) {
    rd.error("price", "missing");
  } else if (const auto& p = doc.at("price"); rd.object(p, "price", {"a", "sigma2", "jumps", "infinite_activity"})) {
    const std::size_t before = rd.errors.size();
    auto a = rd.number(p, "price", "a");
    auto sigma2 = rd.number(p, "price", "sigma2", false);
    double intensity = 0;
    std::optional<Distribution> law;
    if (p.contains("jumps")) {
      const auto& jm = p.at("jumps");
      if (rd.object(jm, "price.jumps", {"intensity", "law"})) {
        if (auto v = rd.number(jm, "price.jumps", "intensity")) intensity = *v;
        if (jm.contains("law")) law = rd.distribution(jm.at("law"), "price.jumps.law");
      }
    }
    bool infinite = false;
    if (p.contains("infinite_activity")) {
      if (p.at("infinite_activity").is_boolean()) infinite = p.at("infinite_activity").get<bool>();
      else rd.error("price.infinite_activity", "expected a boolean");
    }
    if (rd.errors.size() == before) {
      try {
        price.emplace(*a, sigma2.value_or(0.0), JumpMeasure(intensity, law), infinite);
      } catch (const ValidationError& e) {
        rd.error("price", e.what());
      }
    }
  }

  std::optional<BusinessModel> business;
  if (!doc.contains("business")) {
    rd.error("business", "missing");
  } else if (const auto& b = doc.at("business"); rd.object(b, "business", {"c", "claims", "interarrival"})) {
    const std::size_t before = rd.errors.size();
    auto c = rd.number(b, "business", "c");
    std::optional<Distribution> claims, inter;
    if (b.contains("claims")) claims = rd.distribution(b.at("claims"), "business.claims");
    else rd.error("business.claims", "missing");
    if (b.contains("interarrival")) inter = rd.distribution(b.at("interarrival"), "business.interarrival");
    else rd.error("business.interarrival", "missing");
    if (rd.errors.size() == before) {
      try {
        business.emplace(*c, *claims, *inter);
      } catch (const ValidationError& e) {
        rd.error("business", e.what());
      }
    }
  }

  RunConfig run;
  if (doc.contains("run")) {
    const auto& r = doc.at("run");
    if (rd.object(r, "run", {"seed", "replicates", "block_size_override", "u_grid", "horizon", "weight_tol",
                             "max_terms", "hill_fraction", "sigma_grid_step", "block_floor"})) {
      if (auto v = rd.count(r, "run", "seed")) run.seed = *v;
      if (auto v = rd.count(r, "run", "replicates")) {
        if (*v < 1) rd.error("run.replicates", "must be >= 1");
        run.replicates = *v;
      }
      if (r.contains("block_size_override") && !r.at("block_size_override").is_null()) {
        auto v = rd.count(r, "run", "block_size_override");
        if (v && *v >= 1) run.block_size_override = static_cast<int>(*v);
        else if (v) rd.error("run.block_size_override", "must be >= 1");
      }
      if (r.contains("u_grid")) {
        const auto& g = r.at("u_grid");
        if (!g.is_array() || g.empty()) {
          rd.error("run.u_grid", "expected a non-empty array of numbers");
        } else {
          run.u_grid.clear();
          for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g[i].is_number()) {
              rd.error("run.u_grid[" + std::to_string(i) + "]", "expected a number");
              continue;
            }
            run.u_grid.push_back(g[i].get<double>());
          }
          for (std::size_t i = 0; i < run.u_grid.size(); ++i) {
            if (!(run.u_grid[i] > 0)) rd.error("run.u_grid", "values must be > 0");
            if (i > 0 && !(run.u_grid[i] > run.u_grid[i - 1])) rd.error("run.u_grid", "must be strictly increasing");
          }
        }
      }
      if (r.contains("horizon")) {
        const auto& h = r.at("horizon");
        if (rd.object(h, "run.horizon", {"n_max", "barrier_K"})) {
          if (auto v = rd.count(h, "run.horizon", "n_max")) {
            if (*v < 1) rd.error("run.horizon.n_max", "must be >= 1");
            run.horizon.n_max = *v;
          }
          if (auto v = rd.number(h, "run.horizon", "barrier_K", false)) {
            if (!(*v > 1)) rd.error("run.horizon.barrier_K", "must be > 1");
            run.horizon.barrier_k = *v;
          }
        }
      }
      if (auto v = rd.number(r, "run", "weight_tol", false)) {
        if (!(*v > 0 && *v < 1)) rd.error("run.weight_tol", "must lie in (0, 1)");
        run.weight_tol = *v;
      }
      if (auto v = rd.count(r, "run", "max_terms")) {
        if (*v < 1) rd.error("run.max_terms", "must be >= 1");
        run.max_terms = *v;
      }
      if (auto v = rd.number(r, "run", "hill_fraction", false)) {
        if (!(*v > 0 && *v < 0.5)) rd.error("run.hill_fraction", "must lie in (0, 0.5)");
        run.hill_fraction = *v;
      }
      if (auto v = rd.number(r, "run", "sigma_grid_step", false)) {
        if (!(*v > 0)) rd.error("run.sigma_grid_step", "must be > 0");
        run.sigma_grid_step = *v;
      }
      if (auto v = rd.count(r, "run", "block_floor")) {
        if (*v < 1) rd.error("run.block_floor", "must be >= 1");
        run.block_floor = static_cast<std::int64_t>(*v);
      }
    }
  }

  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  return ExperimentConfig{name, Model{*price, *business}, run};
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  return parse_config_json(doc);
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline PathOptions path_options(const RunConfig& r) { return PathOptions{r.sigma_grid_step}; }

}  // namespace ruinlab
