#include "rpn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <ostream>
#include <random>

#include "rpn/generators.hpp"
#include "rpn/maude.hpp"
#include "rpn/pnml.hpp"

namespace rpn {

namespace {

using json = nlohmann::ordered_json;

struct Inputs {
  std::vector<std::string> files;
  std::size_t max_states = 1'000'000;
  std::size_t max_depth = 0;
  bool strict_capacity = false;
  bool semantic_identity = false;
  unsigned workers = 1;
  IdValue step_size = 10;
  std::string format = "text";

  ExploreOptions explore_options() const {
    ExploreOptions o;
    o.max_states = max_states;
    if (max_depth) o.max_depth = max_depth;
    o.semantics.strict_capacity = strict_capacity;
    o.identity = semantic_identity ? StateIdentity::semantic : StateIdentity::term;
    o.workers = workers;
    return o;
  }

  Configuration load() const {
    PetriNet net = parse_net_file(files.at(0));
    std::vector<Rule> rules;
    for (std::size_t i = 1; i < files.size(); ++i) rules.push_back(parse_rule_file(files[i]));
    return Configuration::initial(std::move(net), std::move(rules), step_size);
  }
};

void add_model_options(CLI::App& cmd, Inputs& in) {
  cmd.add_option("files", in.files, "net file followed by rule files")->required()->check(CLI::ExistingFile);
  cmd.add_option("--step-size", in.step_size, "ids drawn per pool refill")->check(CLI::PositiveNumber);
}

void add_explore_options(CLI::App& cmd, Inputs& in) {
  cmd.add_option("--max-states", in.max_states, "state limit")->check(CLI::PositiveNumber);
  cmd.add_option("--max-depth", in.max_depth, "depth limit (unlimited when omitted)")->check(CLI::PositiveNumber);
  cmd.add_flag("--strict-capacity", in.strict_capacity, "check capacity on marking plus post-set");
  cmd.add_flag("--semantic-state-identity", in.semantic_identity, "identify states up to id renaming");
  cmd.add_option("--workers", in.workers, "threads per exploration layer")->check(CLI::PositiveNumber);
}

void add_format_option(CLI::App& cmd, Inputs& in) {
  cmd.add_option("--format", in.format, "text or json")->check(CLI::IsMember({"text", "json"}));
}

json step_json(const LassoStep& s) {
  return {{"marking", marking_summary(s.config.net)},
          {"action", s.action.to_string()},
          {"state", key_digest(canonical_key(s.config))}};
}

void print_lasso_text(std::ostream& out, const Lasso& l) {
  auto print = [&](const char* title, const std::vector<LassoStep>& steps) {
    out << title << "\n";
    for (const auto& s : steps) out << "  " << marking_summary(s.config.net) << "  --" << s.action.to_string() << "-->\n";
  };
  print("prefix:", l.prefix);
  print("cycle:", l.cycle);
}

int cmd_check(const Inputs& in, const std::string& formula_text, std::ostream& out) {
  const Configuration initial = in.load();
  const FormulaPtr formula = parse_formula(formula_text);
  const Verdict v = model_check(initial, *formula, in.explore_options());
  if (in.format == "json") {
    json j{{"command", "check"},
           {"formula", to_string(*formula)},
           {"verdict", v.holds ? "holds" : "counterexample"},
           {"states", v.states},
           {"edges", v.edges}};
    if (v.counterexample) {
      json prefix = json::array(), cycle = json::array();
      for (const auto& s : v.counterexample->prefix) prefix.push_back(step_json(s));
      for (const auto& s : v.counterexample->cycle) cycle.push_back(step_json(s));
      j["counterexample"] = {{"prefix", prefix}, {"cycle", cycle}, {"deadlock", v.counterexample->deadlock_tail}};
    }
    out << j.dump(2) << "\n";
  } else {
    out << "formula: " << to_string(*formula) << "\n"
        << "states: " << v.states << "\nedges: " << v.edges << "\n"
        << "verdict: " << (v.holds ? "holds" : "counterexample") << "\n";
    if (v.counterexample) print_lasso_text(out, *v.counterexample);
    out << render_counterexample(v);
  }
  return v.holds ? exit_code::holds : exit_code::counterexample;
}

int cmd_simulate(const Inputs& in, std::size_t steps, std::uint64_t seed, std::ostream& out) {
  Configuration current = in.load();
  Semantics sem;
  sem.strict_capacity = in.strict_capacity;
  std::mt19937_64 rng(seed);
  json trace = json::array();
  auto record = [&](std::size_t i, const std::string& action) {
    if (in.format == "json") {
      trace.push_back({{"step", i}, {"action", action}, {"marking", marking_summary(current.net)}});
    } else {
      out << "step " << i << " " << (action.empty() ? "init" : action) << " marking " << marking_summary(current.net)
          << "\n";
    }
  };
  record(0, "");
  std::string note;
  for (std::size_t i = 1; i <= steps; ++i) {
    std::vector<Successor> next = successors(current, sem);
    if (next.empty()) {
      note = "deadlock after " + std::to_string(i - 1) + " steps";
      break;
    }
    Successor& chosen = next[rng() % next.size()];
    current = std::move(chosen.config);
    record(i, chosen.action.to_string());
  }
  if (in.format == "json") {
    json j{{"command", "simulate"}, {"seed", seed}, {"trace", trace}};
    if (!note.empty()) j["note"] = note;
    out << j.dump(2) << "\n";
  } else if (!note.empty()) {
    out << note << "\n";
  }
  return 0;
}

int cmd_emit(const Inputs& in, const std::string& dir, std::ostream& out) {
  write_maude_files(in.load(), dir);
  out << "wrote rpn.maude rules.maude prop.maude net.maude to " << dir << "\n";
  return 0;
}

int cmd_stats(const Inputs& in, const std::string& dump, std::ostream& out) {
  const Configuration initial = in.load();
  const auto start = std::chrono::steady_clock::now();
  const StateGraph g = explore(initial, in.explore_options());
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!dump.empty()) {
    std::ofstream f(dump);
    if (!f) throw Error("cannot write " + dump);
    if (dump.ends_with(".dot")) {
      write_dot(f, g);
    } else {
      write_text(f, g);
    }
  }
  if (in.format == "json") {
    json j{{"command", "stats"},        {"states", g.size()},    {"edges", g.edge_count()},
           {"deadlocks", g.deadlock_count()}, {"truncated", g.truncated}, {"wall_ms", ms}};
    out << j.dump(2) << "\n";
  } else {
    out << "states: " << g.size() << "\nedges: " << g.edge_count() << "\ndeadlocks: " << g.deadlock_count()
        << "\ntruncated: " << (g.truncated ? "yes" : "no") << "\nwall time: " << ms << " ms\n";
  }
  return g.truncated ? exit_code::limit_exceeded : 0;
}

int cmd_circle(std::size_t n, const std::string& label, const std::string& path, std::ostream& out) {
  const PetriNet net = circle_net(n, label);
  if (path.empty() || path == "-") {
    write_pnml(out, net, "circle" + std::to_string(n));
    return 0;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  write_pnml(f, net, "circle" + std::to_string(n));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model checker for reconfigurable Petri nets", "rpnmc"};
  app.require_subcommand(1);

  Inputs in;
  std::string formula;
  auto* check = app.add_subcommand("check", "check an LTL formula");
  add_model_options(*check, in);
  add_explore_options(*check, in);
  add_format_option(*check, in);
  check->add_option("--ltl", formula, "formula, e.g. \"[]<> enabled\"")->required();

  std::size_t steps = 10;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "random walk over successors");
  add_model_options(*simulate, in);
  add_format_option(*simulate, in);
  simulate->add_option("--steps", steps, "number of steps");
  simulate->add_option("--seed", seed, "random seed");
  simulate->add_flag("--strict-capacity", in.strict_capacity, "check capacity on marking plus post-set");

  std::string out_dir;
  auto* emit = app.add_subcommand("emit", "write Maude modules");
  add_model_options(*emit, in);
  emit->add_option("--out-dir", out_dir, "target directory")->required();

  std::string dump;
  auto* stats = app.add_subcommand("stats", "state-space statistics");
  add_model_options(*stats, in);
  add_explore_options(*stats, in);
  add_format_option(*stats, in);
  stats->add_option("--dump", dump, "write the state graph (.dot for Graphviz, text otherwise)");

  std::size_t size = 10;
  std::string label = "P";
  std::string circle_out;
  auto* circle = app.add_subcommand("circle", "generate a ring net as PNML");
  circle->add_option("size", size, "places (and transitions) in the ring")->required()->check(CLI::PositiveNumber);
  circle->add_option("--label", label, "place label");
  circle->add_option("--out", circle_out, "output file (stdout when omitted)");

  std::vector<const char*> argv{"rpnmc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code::usage;
  }

  try {
    if (*check) return cmd_check(in, formula, out);
    if (*simulate) return cmd_simulate(in, steps, seed, out);
    if (*emit) return cmd_emit(in, out_dir, out);
    if (*stats) return cmd_stats(in, dump, out);
    if (*circle) return cmd_circle(size, label, circle_out, out);
  } catch (const StateSpaceExceeded& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::limit_exceeded;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  }
  return exit_code::usage;
}

}  // namespace rpn
