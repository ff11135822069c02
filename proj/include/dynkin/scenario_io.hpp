#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynkin/scenario.hpp"

namespace dynkin {

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(path + "/" + key, "missing field");
  return *it;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "expected a number");
  return v.get<double>();
}

inline std::vector<double> payoff_vector(const json& v, const StateSpace& states,
                                         const std::string& path) {
  std::vector<double> out(states.size(), 0.0);
  if (v.is_array()) {
    if (v.size() != states.size())
      throw ScenarioError(path, "expected " + std::to_string(states.size()) + " entries");
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = as_number(v[i], path + "/" + std::to_string(i));
  } else if (v.is_object()) {
    // Omitted states default to 0.
    for (const auto& [label, val] : v.items()) {
      auto idx = states.find(label);
      if (!idx) throw ScenarioError(path + "/" + label, "unknown state label '" + label + "'");
      out[*idx] = as_number(val, path + "/" + label);
    }
  } else {
    throw ScenarioError(path, "expected an array or a state->number map");
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] < 0.0)
      throw ScenarioError(path + "/" + states.label(i),
                          "negative payoff at state '" + states.label(i) + "'");
  return out;
}

inline DiscountFunction discount_from_json(const json& v, const std::string& path) {
  const auto& fam = require(v, "family", path);
  if (!fam.is_string()) throw ScenarioError(path + "/family", "expected a string");
  const auto name = fam.get<std::string>();
  try {
    if (name == "exponential")
      return DiscountFunction::exponential(as_number(require(v, "beta", path), path + "/beta"));
    if (name == "hyperbolic")
      return DiscountFunction::hyperbolic(as_number(require(v, "beta", path), path + "/beta"));
    if (name == "generalized-hyperbolic")
      return DiscountFunction::generalized_hyperbolic(
          as_number(require(v, "beta", path), path + "/beta"),
          as_number(require(v, "k", path), path + "/k"));
    if (name == "table") {
      const auto& vals = require(v, "values", path);
      if (!vals.is_array()) throw ScenarioError(path + "/values", "expected an array");
      std::vector<double> tab;
      for (std::size_t i = 0; i < vals.size(); ++i)
        tab.push_back(as_number(vals[i], path + "/values/" + std::to_string(i)));
      return DiscountFunction::table(std::move(tab));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(path, e.what());
  }
  throw ScenarioError(path + "/family", "unknown discount family '" + name + "'");
}

inline json discount_to_json(const DiscountFunction& d) {
  json out;
  out["family"] = to_string(d.family());
  switch (d.family()) {
    case DiscountFamily::exponential:
    case DiscountFamily::hyperbolic: out["beta"] = d.beta(); break;
    case DiscountFamily::generalized_hyperbolic:
      out["beta"] = d.beta();
      out["k"] = d.k();
      break;
    case DiscountFamily::table: out["values"] = d.values(); break;
  }
  return out;
}

inline StoppingPolicy policy_from_labels(const json& v, const StateSpace& states,
                                         const std::string& path) {
  if (!v.is_array()) throw ScenarioError(path, "expected an array of state labels");
  StoppingPolicy p(states.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto sub = path + "/" + std::to_string(i);
    if (!v[i].is_string()) throw ScenarioError(sub, "expected a state label");
    auto idx = states.find(v[i].get<std::string>());
    if (!idx) throw ScenarioError(sub, "unknown state label '" + v[i].get<std::string>() + "'");
    p.insert(*idx);
  }
  return p;
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& doc) {
  using detail::as_number;
  using detail::require;
  if (!doc.is_object()) throw ScenarioError("", "document root must be an object");

  const auto& jstates = require(doc, "states", "");
  if (!jstates.is_array()) throw ScenarioError("/states", "expected an array");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < jstates.size(); ++i) {
    if (!jstates[i].is_string())
      throw ScenarioError("/states/" + std::to_string(i), "expected a string");
    labels.push_back(jstates[i].get<std::string>());
  }
  StateSpace states(std::move(labels));

  const auto& jtrans = require(doc, "transitions", "");
  if (!jtrans.is_array()) throw ScenarioError("/transitions", "expected an array");
  if (jtrans.size() != states.size())
    throw ScenarioError("/transitions", "expected " + std::to_string(states.size()) + " rows");
  std::vector<std::vector<double>> rows(jtrans.size());
  for (std::size_t i = 0; i < jtrans.size(); ++i) {
    const auto path = "/transitions/" + std::to_string(i);
    if (!jtrans[i].is_array()) throw ScenarioError(path, "expected an array");
    for (std::size_t j = 0; j < jtrans[i].size(); ++j)
      rows[i].push_back(as_number(jtrans[i][j], path + "/" + std::to_string(j)));
  }
  auto kernel = TransitionKernel::from_dense(rows);

  const auto& jplayers = require(doc, "players", "");
  if (!jplayers.is_array() || jplayers.size() != 2)
    throw ScenarioError("/players", "expected exactly two players");
  std::array<PlayerSpec, 2> players;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto base = "/players/" + std::to_string(i);
    const auto& jp = jplayers[i];
    players[i].f = detail::payoff_vector(require(jp, "f", base), states, base + "/f");
    players[i].g = detail::payoff_vector(require(jp, "g", base), states, base + "/g");
    players[i].h = detail::payoff_vector(require(jp, "h", base), states, base + "/h");
    players[i].discount = detail::discount_from_json(require(jp, "discount", base), base + "/discount");
  }

  NumericsConfig num;
  if (auto it = doc.find("numerics"); it != doc.end()) {
    const auto& jn = *it;
    if (!jn.is_object()) throw ScenarioError("/numerics", "expected an object");
    auto integer = [&](const char* key, auto& dst) {
      if (auto f = jn.find(key); f != jn.end()) {
        if (!f->is_number_integer() || f->get<long long>() < 0)
          throw ScenarioError(std::string("/numerics/") + key, "expected a nonnegative integer");
        dst = static_cast<std::remove_reference_t<decltype(dst)>>(f->get<long long>());
      }
    };
    auto real = [&](const char* key, double& dst) {
      if (auto f = jn.find(key); f != jn.end()) dst = as_number(*f, std::string("/numerics/") + key);
    };
    integer("horizon", num.horizon);
    real("comparison_margin", num.comparison_margin);
    real("tail_tolerance", num.tail_tolerance);
    integer("mc_paths", num.mc_paths);
    if (auto f = jn.find("mc_seed"); f != jn.end()) {
      if (!f->is_number_unsigned()) throw ScenarioError("/numerics/mc_seed", "expected a nonnegative integer");
      num.mc_seed = f->get<std::uint64_t>();
    }
  }

  std::vector<StoppingPolicy> groups;
  if (auto it = doc.find("boundary_groups"); it != doc.end()) {
    if (!it->is_array()) throw ScenarioError("/boundary_groups", "expected an array");
    for (std::size_t g = 0; g < it->size(); ++g)
      groups.push_back(detail::policy_from_labels((*it)[g], states,
                                                  "/boundary_groups/" + std::to_string(g)));
  }

  return Scenario(std::move(states), std::move(kernel), std::move(players), num, std::move(groups));
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json doc;
  doc["states"] = s.states().labels();
  doc["transitions"] = s.kernel().dense();
  doc["players"] = nlohmann::json::array();
  for (const auto& p : s.players()) {
    nlohmann::json jp;
    jp["f"] = p.f;
    jp["g"] = p.g;
    jp["h"] = p.h;
    jp["discount"] = detail::discount_to_json(p.discount);
    doc["players"].push_back(jp);
  }
  const auto& n = s.numerics();
  doc["numerics"] = {{"horizon", n.horizon},
                     {"comparison_margin", n.comparison_margin},
                     {"tail_tolerance", n.tail_tolerance},
                     {"mc_paths", n.mc_paths},
                     {"mc_seed", n.mc_seed}};
  if (!s.boundary_groups().empty()) {
    auto groups = nlohmann::json::array();
    for (const auto& g : s.boundary_groups()) {
      auto labels = nlohmann::json::array();
      for (auto i : g.indices()) labels.push_back(s.states().label(i));
      groups.push_back(labels);
    }
    doc["boundary_groups"] = groups;
  }
  return doc;
}

inline Scenario load_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

inline std::string dump_scenario(const Scenario& s) { return scenario_to_json(s).dump(2); }

}  // namespace dynkin
