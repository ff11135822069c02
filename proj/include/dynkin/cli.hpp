#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynkin/dynkin.hpp"

namespace dynkin::cli {

enum Exit : int { ok = 0, mismatch = 1, input_error = 2 };

/// Policy from comma-separated labels; "" and "∅" are empty, "ALL" is full.
inline StoppingPolicy parse_policy(const Scenario& s, const std::string& text) {
  if (text.empty() || text == "∅") return s.empty_policy();
  if (text == "ALL") return s.full_policy();
  StoppingPolicy p(s.size());
  std::stringstream in(text);
  std::string label;
  while (std::getline(in, label, ',')) {
    if (label.empty()) continue;
    auto idx = s.states().find(label);
    if (!idx) throw ScenarioError("", "unknown state label '" + label + "'");
    p.insert(*idx);
  }
  return p;
}

/// "sharp-verified" -> "sharp", others unchanged.
inline std::string coarse(Verdict v) { return is_sharp(v) ? "sharp" : to_string(v); }

inline bool matches(const std::string& expect, const std::string& exact, const std::string& coarse_name) {
  return expect == exact || expect == coarse_name;
}

struct Options {
  std::string scenario_path;
  std::optional<int> horizon;
  std::optional<double> margin;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  std::string format = "table";
  std::string expect;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Equilibria of nonzero-sum Dynkin games under non-exponential discounting", "dynkin_eq"};
    app.require_subcommand(1, 1);
    Options o;
    auto common = [&](CLI::App* sub, bool needs_scenario) {
      auto* opt = sub->add_option("--scenario", o.scenario_path, "scenario JSON file");
      if (needs_scenario) opt->required();
      sub->add_option("--horizon", o.horizon, "override numerics.horizon")->check(CLI::PositiveNumber);
      sub->add_option("--margin", o.margin, "override numerics.comparison_margin")->check(CLI::NonNegativeNumber);
      sub->add_option("--format", o.format, "table or json")->check(CLI::IsMember({"table", "json"}));
      sub->add_option("--expect", o.expect, "expected verdict; exit 1 on mismatch");
    };

    auto* check = app.add_subcommand("check", "validation, decreasing impatience and supermartingale reports");
    common(check, true);
    std::string mode = "basic";
    check->add_option("--mode", mode, "basic or war-of-attrition")
        ->check(CLI::IsMember({"basic", "war-of-attrition"}));

    int player = 1;
    std::string other_text, s_text, t_text, start_text, x_text, start_mode = "hitting";
    int first_mover = 2;
    bool exhaustive = false;

    auto* gamma_cmd = app.add_subcommand("gamma", "least fixed point of phi against a fixed opponent policy");
    common(gamma_cmd, true);
    gamma_cmd->add_option("--player", player)->check(CLI::IsMember({1, 2}))->required();
    gamma_cmd->add_option("--other", other_text, "opponent policy labels");

    auto* solve = app.add_subcommand("solve", "alternating best-response procedure");
    common(solve, true);
    solve->add_option("--start", start_text, "start policy of the player who does not move first");
    solve->add_option("--first-mover", first_mover)->check(CLI::IsMember({1, 2}));
    solve->add_flag("--exhaustive", exhaustive, "exhaustive sharpness check");

    auto* verify_cmd = app.add_subcommand("verify", "classify a policy pair");
    common(verify_cmd, true);
    verify_cmd->add_option("--S", s_text, "player 1 policy");
    verify_cmd->add_option("--T", t_text, "player 2 policy");
    verify_cmd->add_flag("--exhaustive", exhaustive, "exhaustive sharpness check");

    auto* enumerate = app.add_subcommand("enumerate", "all intra-personal equilibria against a fixed policy");
    common(enumerate, true);
    enumerate->add_option("--player", player)->check(CLI::IsMember({1, 2}))->required();
    enumerate->add_option("--other", other_text, "opponent policy labels");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo versus backward induction");
    common(simulate, true);
    simulate->add_option("--player", player)->check(CLI::IsMember({1, 2}));
    simulate->add_option("--S", s_text, "player 1 policy");
    simulate->add_option("--T", t_text, "player 2 policy");
    simulate->add_option("--x", x_text, "start state label (default: all states)");
    simulate->add_option("--start-mode", start_mode)->check(CLI::IsMember({"entrance", "hitting"}));
    simulate->add_option("--paths", o.paths)->check(CLI::PositiveNumber);
    simulate->add_option("--seed", o.seed);

    NegotiationParams np;
    std::string params_path;
    auto* negotiate = app.add_subcommand("negotiate", "two-firm negotiation on a binomial cost lattice");
    negotiate->add_option("--params", params_path, "JSON parameter block");
    negotiate->add_option("--R", np.R);
    negotiate->add_option("--N", np.N);
    negotiate->add_option("--u", np.u);
    negotiate->add_option("--p", np.p);
    negotiate->add_option("--beta1", np.beta1);
    negotiate->add_option("--beta2", np.beta2);
    negotiate->add_option("--m", np.m);
    negotiate->add_option("--first-mover", first_mover)->check(CLI::IsMember({1, 2}));
    negotiate->add_option("--horizon", o.horizon)->check(CLI::PositiveNumber);
    negotiate->add_option("--margin", o.margin)->check(CLI::NonNegativeNumber);
    negotiate->add_option("--format", o.format)->check(CLI::IsMember({"table", "json"}));
    negotiate->add_option("--expect", o.expect, "expected case label or verdict");

    std::string fixture_name;
    bool emit = false, assert_ = false;
    auto* gallery = app.add_subcommand("gallery", "built-in fixtures");
    gallery->add_option("name", fixture_name)->required()->check(CLI::IsMember(gallery_names()));
    auto* emit_flag = gallery->add_flag("--emit", emit, "print the scenario JSON");
    auto* assert_flag = gallery->add_flag("--assert", assert_, "run the fixture's assertions");
    emit_flag->excludes(assert_flag);
    gallery->add_option("--format", o.format)->check(CLI::IsMember({"table", "json"}));

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
      app.parse(rev);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return ok;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return ok;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return input_error;
    }
    json_ = o.format == "json";

    try {
      if (*check) return do_check(load(o), mode, o);
      if (*gamma_cmd) return do_gamma(load(o), player_from_number(player), other_text);
      if (*solve) return do_solve(load(o), start_text, player_from_number(first_mover), exhaustive, o);
      if (*verify_cmd) return do_verify(load(o), s_text, t_text, exhaustive, o);
      if (*enumerate) return do_enumerate(load(o), player_from_number(player), other_text);
      if (*simulate) return do_simulate(load(o), player_from_number(player), s_text, t_text, x_text,
                                        start_mode == "entrance" ? StartMode::entrance : StartMode::hitting, o);
      if (*negotiate) {
        if (!params_path.empty()) np = load_params(params_path, np, first_mover);
        if (negotiate->count("--first-mover")) np.first_mover = player_from_number(first_mover);
        if (o.horizon) np.numerics.horizon = *o.horizon;
        if (o.margin) np.numerics.comparison_margin = *o.margin;
        return do_negotiate(np, o);
      }
      if (*gallery) return do_gallery(fixture_name, emit, assert_);
    } catch (const SizeGuard& e) {
      err_ << "error: " << e.what() << "\n";
      return input_error;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return input_error;
    } catch (const nlohmann::json::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return input_error;
    }
    return input_error;
  }

 private:
  using json = nlohmann::json;

  Scenario load(const Options& o) {
    auto s = load_scenario_file(o.scenario_path);
    auto n = s.numerics();
    if (o.horizon) n.horizon = *o.horizon;
    if (o.margin) n.comparison_margin = *o.margin;
    if (o.paths) n.mc_paths = *o.paths;
    if (o.seed) n.mc_seed = *o.seed;
    return s.with_numerics(n);
  }

  static NegotiationParams load_params(const std::string& path, NegotiationParams np, int& first_mover) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("", "cannot open parameter file '" + path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ScenarioError("", std::string("malformed JSON: ") + e.what());
    }
    auto num = [&](const char* key, double& dst) {
      if (j.contains(key)) dst = j.at(key).get<double>();
    };
    num("R", np.R);
    num("N", np.N);
    num("u", np.u);
    num("p", np.p);
    num("beta1", np.beta1);
    num("beta2", np.beta2);
    if (j.contains("m")) np.m = j.at("m").get<int>();
    if (j.contains("first_mover")) {
      first_mover = j.at("first_mover").get<int>();
      np.first_mover = player_from_number(first_mover);
    }
    if (j.contains("horizon")) np.numerics.horizon = j.at("horizon").get<int>();
    return np;
  }

  json policy_json(const Scenario& s, const StoppingPolicy& p) {
    json labels = json::array();
    for (auto i : p.indices()) labels.push_back(s.states().label(i));
    return labels;
  }

  void record(const json& j) { out_ << j.dump() << "\n"; }

  int expectation(const Options& o, const std::string& exact, const std::string& coarse_name) {
    if (o.expect.empty()) return ok;
    if (matches(o.expect, exact, coarse_name)) return ok;
    err_ << "expected " << o.expect << ", got " << exact << "\n";
    return mismatch;
  }

  int do_check(const Scenario& s, const std::string& mode, const Options& o) {
    const auto rep = validate(s, mode == "war-of-attrition" ? ValidationMode::war_of_attrition
                                                             : ValidationMode::basic);
    for (const auto& c : rep.checks) {
      if (json_) {
        record({{"check", c.name}, {"passed", c.passed}, {"advisory", c.advisory}, {"detail", c.detail}});
      } else {
        out_ << std::left << std::setw(40) << c.name << (c.passed ? "pass" : (c.advisory ? "warn" : "FAIL"))
             << "  " << c.detail << "\n";
      }
    }
    for (Player i : {Player::one, Player::two}) {
      const auto sm = check_supermartingale(s, i);
      std::string failing;
      for (const auto& f : sm.failures) {
        if (!failing.empty()) failing += ",";
        failing += s.states().label(f.state);
      }
      const double tb = tail_bound(s, i, s.numerics().horizon);
      if (json_) {
        record({{"check", "player" + std::to_string(number_of(i)) + ":supermartingale"},
                {"passed", sm.passed()},
                {"grid_pass", sm.grid_pass},
                {"analytic_pass", sm.analytic_pass},
                {"sup_ratio", sm.sup_ratio},
                {"sup_attained", sm.sup_attained},
                {"failing_states", failing},
                {"tail_bound", tb}});
      } else {
        std::ostringstream d;
        d << "sup ratio " << sm.sup_ratio << (sm.sup_attained ? "" : " (limit)");
        if (!failing.empty()) d << "; fails at " << failing;
        out_ << std::left << std::setw(40) << ("player" + std::to_string(number_of(i)) + ":supermartingale")
             << (sm.passed() ? "pass" : "fail") << "  " << d.str() << "\n";
        out_ << std::left << std::setw(40) << ("player" + std::to_string(number_of(i)) + ":tail-bound")
             << tb << "\n";
      }
    }
    const std::string verdict = rep.ok() ? "valid" : "invalid";
    if (!json_) out_ << "validation " << verdict << "\n";
    else record({{"validation", verdict}});
    if (!o.expect.empty()) return expectation(o, verdict, verdict);
    return rep.ok() ? ok : mismatch;
  }

  int do_gamma(const Scenario& s, Player i, const std::string& other_text) {
    const auto other_policy = parse_policy(s, other_text);
    const auto tr = gamma(s, i, other_policy);
    for (std::size_t n = 0; n < tr.steps.size(); ++n) {
      if (json_)
        record({{"n", n + 1}, {"player", number_of(i)}, {"policy_bitmask", tr.steps[n].hex()},
                {"policy_labels", policy_json(s, tr.steps[n])}});
      else
        out_ << "S^" << n + 1 << " = " << format_policy(s, tr.steps[n]) << "\n";
    }
    if (json_)
      record({{"fixed_point", policy_json(s, tr.fixed_point)}, {"policy_bitmask", tr.fixed_point.hex()},
              {"iterations", tr.iterations}});
    else
      out_ << "fixed_point " << format_policy(s, tr.fixed_point) << " iterations=" << tr.iterations << "\n";
    return ok;
  }

  std::string classification_text(const Scenario& s, const Classification& c) {
    std::string t = "verdict=" + coarse(c.verdict);
    if (is_sharp(c.verdict)) t += std::string(" certificate=") + (c.verdict == Verdict::sharp_verified ? "exhaustive" : "sufficient");
    if (c.verdict == Verdict::soft_not_sharp || c.verdict == Verdict::not_equilibrium) {
      if (c.witness)
        t += " witness=player" + std::to_string(number_of(c.witness->player)) + "@" +
             s.states().label(c.witness->state);
      if (c.witness && c.witness->rival) {
        std::ostringstream g;
        g << c.witness->gap;
        t += " rival=" + format_policy(s, *c.witness->rival) + " gap=" + g.str();
      }
    }
    if (c.boundary_flag) t += " boundary=flagged";
    return t;
  }

  json classification_json(const Scenario& s, const Classification& c) {
    json j{{"verdict", to_string(c.verdict)}, {"coarse", coarse(c.verdict)}, {"sufficient", c.sufficient},
           {"exhaustive", c.exhaustive}, {"boundary_flag", c.boundary_flag}};
    if (c.witness) {
      j["witness"] = {{"player", number_of(c.witness->player)}, {"state", s.states().label(c.witness->state)},
                      {"gap", c.witness->gap}};
      if (c.witness->rival) j["witness"]["rival"] = policy_json(s, *c.witness->rival);
    }
    return j;
  }

  int do_solve(const Scenario& s, const std::string& start_text, Player first, bool exhaustive,
               const Options& o) {
    AlternateOptions opt;
    opt.first_mover = first;
    opt.exhaustive = exhaustive;
    const auto out = alternate(s, parse_policy(s, start_text), opt);
    for (std::size_t k = 0; k < out.nodes.size(); ++k) {
      const Player owner = out.owner(k);
      if (json_)
        record({{"n", k}, {"player", number_of(owner)}, {"policy_bitmask", out.nodes[k].hex()},
                {"policy_labels", policy_json(s, out.nodes[k])}});
      else
        out_ << "n=" << k << " player" << number_of(owner) << " " << (owner == Player::one ? "S" : "T")
             << " = " << format_policy(s, out.nodes[k]) << "\n";
    }
    if (out.terminal == AlternatingOutcome::Terminal::cycle) {
      std::string loop;
      for (std::size_t k = out.cycle_start; k < out.nodes.size(); ++k)
        loop += format_policy(s, out.nodes[k]) + " -> ";
      loop += format_policy(s, out.nodes[out.cycle_start]);
      if (json_) record({{"terminal", "cycle"}, {"cycle_start", out.cycle_start}, {"verdict", "cycle"}});
      else out_ << "cycle " << loop << " verdict=cycle\n";
      return expectation(o, "cycle", "cycle");
    }
    const auto& c = *out.classification;
    if (json_) {
      auto j = classification_json(s, c);
      j["terminal"] = "fixed_point";
      j["S"] = policy_json(s, out.S_inf);
      j["T"] = policy_json(s, out.T_inf);
      record(j);
    } else {
      out_ << "fixed_point S=" << format_policy(s, out.S_inf) << " T=" << format_policy(s, out.T_inf) << " "
           << classification_text(s, c) << "\n";
    }
    return expectation(o, to_string(c.verdict), coarse(c.verdict));
  }

  int do_verify(const Scenario& s, const std::string& s_text, const std::string& t_text, bool exhaustive,
                const Options& o) {
    const auto c = verify(s, parse_policy(s, s_text), parse_policy(s, t_text), exhaustive);
    if (json_) record(classification_json(s, c));
    else out_ << classification_text(s, c) << "\n";
    return expectation(o, to_string(c.verdict), coarse(c.verdict));
  }

  int do_enumerate(const Scenario& s, Player i, const std::string& other_text) {
    const auto all = enumerate_intra(s, i, parse_policy(s, other_text));
    for (std::size_t k = 0; k < all.size(); ++k) {
      if (json_)
        record({{"n", k}, {"player", number_of(i)}, {"policy_bitmask", all[k].hex()},
                {"policy_labels", policy_json(s, all[k])}});
      else
        out_ << format_policy(s, all[k]) << "\n";
    }
    if (!json_) out_ << "count " << all.size() << "\n";
    else record({{"count", all.size()}});
    return ok;
  }

  int do_simulate(const Scenario& s, Player i, const std::string& s_text, const std::string& t_text,
                  const std::string& x_text, StartMode mode, const Options& o) {
    const auto S = parse_policy(s, s_text), T = parse_policy(s, t_text);
    const auto& own = i == Player::one ? S : T;
    const auto& other_policy = i == Player::one ? T : S;
    const auto dp = joint_table(s, i, own, other_policy, mode);
    std::vector<std::size_t> xs;
    if (x_text.empty()) {
      for (std::size_t x = 0; x < s.size(); ++x) xs.push_back(x);
    } else {
      auto idx = s.states().find(x_text);
      if (!idx) throw ScenarioError("", "unknown state label '" + x_text + "'");
      xs.push_back(*idx);
    }
    const auto paths = s.numerics().mc_paths;
    const auto seed = s.numerics().mc_seed;
    std::size_t agree = 0;
    if (!json_) out_ << "seed=" << seed << " paths=" << paths << "\n";
    for (auto x : xs) {
      const auto mc = mc_estimate(s, i, own, other_policy, x, mode, paths, seed);
      const bool within = std::abs(mc.mean - dp[x]) <= 3.0 * mc.stderr_ + dp.tail_bound +
                          1e-12 * std::max(1.0, std::abs(dp[x]));
      agree += within;
      if (json_) {
        record({{"state", s.states().label(x)}, {"dp", dp[x]}, {"mc_mean", mc.mean}, {"mc_stderr", mc.stderr_},
                {"within_3se", within}, {"seed", seed}, {"paths", paths}});
      } else {
        out_ << std::left << std::setw(12) << s.states().label(x) << " dp=" << std::setprecision(10) << dp[x]
             << " mc=" << mc.mean << " se=" << mc.stderr_ << (within ? " ok" : " OUTSIDE") << "\n";
      }
    }
    const std::string verdict = agree == xs.size() ? "agree" : "disagree";
    if (json_) record({{"summary", verdict}, {"agree", agree}, {"total", xs.size()}});
    else out_ << "agreement " << agree << "/" << xs.size() << "\n";
    return expectation(o, verdict, verdict);
  }

  int do_negotiate(const NegotiationParams& np, const Options& o) {
    const auto r = solve_negotiation(np);
    const auto s = build_negotiation(np);
    const auto& out = r.outcome;
    if (json_) {
      for (std::size_t k = 0; k < out.nodes.size(); ++k)
        record({{"n", k}, {"player", number_of(out.owner(k))}, {"policy_bitmask", out.nodes[k].hex()},
                {"policy_labels", policy_json(s, out.nodes[k])}});
      json j{{"alpha1", {r.alpha1[0].value, r.alpha1[1].value}},
             {"alpha1_tail", {r.alpha1[0].tail, r.alpha1[1].tail}},
             {"threshold", {r.threshold[0], r.threshold[1]}},
             {"y_star", {r.y_star[0].value, r.y_star[1].value}},
             {"y_star_label", {lattice_label(r.y_star[0].exponent), lattice_label(r.y_star[1].exponent)}},
             {"beta_bar", r.beta_bar},
             {"beta_underbar", r.beta_underbar},
             {"case", r.case_label},
             {"finite_lattice_proxy", r.finite_lattice_proxy},
             {"findings", r.findings},
             {"terminal", out.terminal == AlternatingOutcome::Terminal::cycle ? "cycle" : "fixed_point"}};
      if (out.classification) j["classification"] = classification_json(s, *out.classification);
      j["S"] = policy_json(s, out.S_inf);
      j["T"] = policy_json(s, out.T_inf);
      record(j);
    } else {
      out_ << std::setprecision(12);
      for (int k = 0; k < 2; ++k)
        out_ << "firm" << k + 1 << ": alpha1=" << r.alpha1[k].value << " (tail<" << r.alpha1[k].tail
             << ") threshold=" << r.threshold[k] << " y*=" << r.y_star[k].value << " ("
             << lattice_label(r.y_star[k].exponent) << ")\n";
      out_ << "beta_bar=" << r.beta_bar << " beta_underbar=" << r.beta_underbar << "\n";
      for (std::size_t k = 0; k < out.nodes.size(); ++k)
        out_ << "n=" << k << " " << (out.owner(k) == Player::one ? "S" : "T") << " = "
             << format_policy(s, out.nodes[k]) << "\n";
      out_ << "case=" << r.case_label << (r.finite_lattice_proxy ? " (finite-lattice proxy)" : "") << "\n";
      if (out.classification)
        out_ << "fixed_point S=" << format_policy(s, out.S_inf) << " T=" << format_policy(s, out.T_inf) << " "
             << classification_text(s, *out.classification) << "\n";
      for (const auto& f : r.findings) out_ << "finding: " << f << "\n";
    }
    if (o.expect.empty()) return ok;
    if (o.expect == r.case_label) return ok;
    if (out.classification)
      return expectation(o, to_string(out.classification->verdict), coarse(out.classification->verdict));
    return expectation(o, "cycle", "cycle");
  }

  int do_gallery(const std::string& name, bool emit, bool assert_) {
    const auto f = gallery_fixture(name);
    if (emit || !assert_) {
      out_ << dump_scenario(f.scenario) << "\n";
      return ok;
    }
    const auto results = run_assertions(f);
    std::size_t passed = 0;
    for (const auto& r : results) {
      passed += r.passed;
      if (json_) record({{"assertion", r.name}, {"passed", r.passed}, {"detail", r.detail}});
      else out_ << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
    }
    if (!json_) out_ << passed << "/" << results.size() << " assertions passed\n";
    else record({{"passed", passed}, {"total", results.size()}});
    return passed == results.size() ? ok : mismatch;
  }

  std::ostream& out_;
  std::ostream& err_;
  bool json_ = false;
};

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  return Runner(out, err).run(args);
}

}  // namespace dynkin::cli
