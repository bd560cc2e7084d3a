// smartml — parse, check, run, and monitor SmartML contract models.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smartml/fuzzer.hpp"
#include "smartml/interp.hpp"
#include "smartml/literals.hpp"
#include "smartml/monitor.hpp"
#include "smartml/parser.hpp"
#include "smartml/printer.hpp"
#include "smartml/resolver.hpp"
#include "smartml/typecheck.hpp"

namespace {

using namespace smartml;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;
constexpr int kExitAborted = 3;
constexpr int kExitStuck = 4;
constexpr int kExitFuel = 5;

bool useColor() {
  const char* c = std::getenv("SMARTML_COLOR");
  if (c && std::string(c) == "0") return false;
  return isatty(fileno(stdout));
}

std::string paint(const std::string& text, const char* code) {
  if (!useColor()) return text;
  return std::string("\033[") + code + "m" + text + "\033[0m";
}

struct Loaded {
  Program program;
  std::string firstStem;
};

Loaded loadFiles(const std::vector<std::string>& paths) {
  Loaded out;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    Program p = parse(ss.str());
    for (auto& a : p.adts) out.program.adts.push_back(std::move(a));
    for (auto& c : p.contracts) out.program.contracts.push_back(std::move(c));
    if (out.firstStem.empty()) {
      std::string stem = path;
      if (auto slash = stem.find_last_of('/'); slash != std::string::npos)
        stem = stem.substr(slash + 1);
      if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
      out.firstStem = stem;
    }
  }
  return out;
}

// --entry accepts C.m or C(ctorArg, ...).m
struct Entry {
  std::string contract;
  std::vector<std::string> ctorArgs;
  std::string method;
};

Entry parseEntry(const std::string& spec) {
  Entry e;
  auto open = spec.find('(');
  if (open == std::string::npos) {
    auto dot = spec.find('.');
    if (dot == std::string::npos)
      throw std::invalid_argument("--entry must look like C.m or C(args).m");
    e.contract = spec.substr(0, dot);
    e.method = spec.substr(dot + 1);
    return e;
  }
  e.contract = spec.substr(0, open);
  int depth = 1;
  size_t i = open + 1;
  std::string cur;
  for (; i < spec.size() && depth > 0; ++i) {
    char c = spec[i];
    if (c == '(') ++depth;
    if (c == ')') {
      --depth;
      if (depth == 0) break;
    }
    if (c == ',' && depth == 1) {
      e.ctorArgs.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) e.ctorArgs.push_back(cur);
  if (i + 1 >= spec.size() || spec[i + 1] != '.')
    throw std::invalid_argument("--entry must look like C(args).m");
  e.method = spec.substr(i + 2);
  return e;
}

std::vector<ValuePtr> literalArgs(const ResolvedProgram& rp, const std::vector<std::string>& texts,
                                  const std::vector<Param>& params, const std::string& what) {
  if (texts.size() != params.size())
    throw std::invalid_argument(what + " expects " + std::to_string(params.size()) +
                                " argument(s), got " + std::to_string(texts.size()));
  std::vector<ValuePtr> out;
  for (size_t i = 0; i < texts.size(); ++i)
    out.push_back(parseValueLiteral(rp, texts[i], params[i].type));
  return out;
}

int cmdParse(const std::vector<std::string>& files, const std::string& format) {
  Loaded in = loadFiles(files);
  ResolvedProgram rp = resolve(in.program);
  if (format == "json") {
    json decls = json::object();
    json adts = json::array();
    for (const auto& a : rp.ast.adts) adts.push_back(a.name);
    json contracts = json::array();
    for (const auto& c : rp.ast.contracts) {
      json methods = json::array();
      for (const auto& m : rp.contract(c.name).methodOrder) methods.push_back(m);
      contracts.push_back(json{{"name", c.name},
                               {"parent", c.parent ? json(*c.parent) : json()},
                               {"methods", methods}});
    }
    decls["adts"] = adts;
    decls["contracts"] = contracts;
    decls["pretty"] = prettyPrint(in.program);
    std::cout << decls.dump(2) << "\n";
  } else {
    std::cout << prettyPrint(in.program);
  }
  return kExitOk;
}

int cmdCheck(const std::vector<std::string>& files, const std::string& format, bool explain) {
  Loaded in = loadFiles(files);
  ResolvedProgram rp = resolve(in.program);
  CheckReport report = checkProgram(rp);
  if (format == "json") {
    std::cout << report.toJson(explain).dump(2) << "\n";
  } else {
    for (const auto& c : report.contracts) {
      std::cout << c.contract << ": "
                << (c.ok ? paint("ok", "32") : paint("rejected", "31")) << "\n";
      for (const auto& f : c.failures) {
        std::cout << "  " << f.pos.str() << " [" << f.rule << "] " << f.message << "\n";
        if (!f.callPath.empty()) {
          std::cout << "    via";
          for (const auto& p : f.callPath) std::cout << " -> " << p;
          std::cout << "\n";
        }
      }
    }
    if (explain) {
      std::cout << "derivation:\n";
      for (const auto& line : report.derivation) std::cout << "  " << line << "\n";
    }
  }
  return report.ok ? kExitOk : kExitDiagnostics;
}

int refuseUnchecked(const ResolvedProgram& rp, bool unsafe) {
  if (unsafe) return kExitOk;
  CheckReport report = checkProgram(rp);
  if (report.ok) return kExitOk;
  std::cerr << "program fails the reentrancy check; rerun with --unsafe to execute anyway\n";
  return kExitDiagnostics;
}

int cmdRun(const std::vector<std::string>& files, const std::string& entrySpec,
           const std::vector<std::string>& args, long fuel, bool unsafe,
           const std::string& format) {
  Loaded in = loadFiles(files);
  ResolvedProgram rp = resolve(in.program);
  if (int rc = refuseUnchecked(rp, unsafe); rc != kExitOk) return rc;

  Entry entry = parseEntry(entrySpec);
  if (!rp.isContract(entry.contract)) {
    std::cerr << "unknown contract '" << entry.contract << "'\n";
    return kExitDiagnostics;
  }
  const ContractInfo& info = rp.contract(entry.contract);
  auto mit = info.methods.find(entry.method);
  if (mit == info.methods.end()) {
    std::cerr << entry.contract << " has no method '" << entry.method << "'\n";
    return kExitDiagnostics;
  }

  Interp interp(rp);
  std::vector<ValuePtr> ctorArgs =
      literalArgs(rp, entry.ctorArgs, info.decl->ctor.params, "constructor of " + entry.contract);
  auto [pm, id] = interp.execConstructor({}, entry.contract, std::move(ctorArgs), "@env");
  std::vector<ValuePtr> callArgs =
      literalArgs(rp, args, mit->second.decl->params, "method " + entry.method);
  Configuration cfg = interp.initial(pm, id, entry.method, std::move(callArgs), "@env", 0);
  RunResult r = interp.run(std::move(cfg), fuel);

  std::string tracePath = in.firstStem + ".trace.jsonl";
  std::ofstream traceOut(tracePath);
  traceOut << traceToJsonLines(r.trace);
  traceOut.close();

  if (format == "json") {
    json out{{"status",
              r.status == RunStatus::Terminated  ? "terminated"
              : r.status == RunStatus::Aborted   ? "aborted"
              : r.status == RunStatus::Stuck     ? "stuck"
                                                 : "fuel-exhausted"},
             {"steps", r.steps},
             {"trace", tracePath}};
    if (r.value) out["value"] = valueToJson(r.value);
    if (r.error) out["error"] = valueToJson(r.error);
    if (!r.stuckReason.empty()) out["reason"] = r.stuckReason;
    std::cout << out.dump(2) << "\n";
  } else {
    switch (r.status) {
      case RunStatus::Terminated:
        std::cout << (r.value ? valueToString(r.value) : "unit") << "\n";
        break;
      case RunStatus::Aborted:
        std::cout << "aborted: " << valueToString(r.error) << "\n";
        break;
      case RunStatus::Stuck:
        std::cout << "stuck: " << r.stuckReason << "\n";
        break;
      case RunStatus::FuelExhausted:
        std::cout << "fuel exhausted after " << r.steps << " steps\n";
        break;
    }
    std::cout << "trace: " << tracePath << " (" << r.trace.size() << " events)\n";
  }
  switch (r.status) {
    case RunStatus::Terminated: return kExitOk;
    case RunStatus::Aborted: return kExitAborted;
    case RunStatus::Stuck: return kExitStuck;
    case RunStatus::FuelExhausted: return kExitFuel;
  }
  return kExitOk;
}

int cmdMonitor(const std::vector<std::string>& files, const std::string& entrySpec,
               const std::vector<std::string>& args, bool fuzz, uint64_t seed, int budget,
               long fuel, bool unsafe, const std::string& format, bool explain) {
  Loaded in = loadFiles(files);
  ResolvedProgram rp = resolve(in.program);
  if (int rc = refuseUnchecked(rp, unsafe); rc != kExitOk) return rc;

  TraceClassifier classifier(rp);
  struct Row {
    std::string entry;
    RunStatus status;
    SafetyVerdict verdict;
    Trace trace;
  };
  std::vector<Row> rows;

  if (fuzz) {
    FuzzOptions opts;
    opts.fuel = fuel;
    Fuzzer fuzzer(rp, seed, opts);
    for (auto& t : fuzzer.traces(budget))
      rows.push_back({t.entryContract + "." + t.entryMethod, t.status,
                      classifier.classify(t.trace), std::move(t.trace)});
  } else {
    Entry entry = parseEntry(entrySpec);
    const ContractInfo& info = rp.contract(entry.contract);
    auto mit = info.methods.find(entry.method);
    if (mit == info.methods.end()) {
      std::cerr << entry.contract << " has no method '" << entry.method << "'\n";
      return kExitDiagnostics;
    }
    Interp interp(rp);
    auto [pm, id] = interp.execConstructor(
        {}, entry.contract,
        literalArgs(rp, entry.ctorArgs, info.decl->ctor.params, "constructor"), "@env");
    Configuration cfg = interp.initial(
        pm, id, entry.method, literalArgs(rp, args, mit->second.decl->params, "method"), "@env", 0);
    RunResult r = interp.run(std::move(cfg), fuel);
    rows.push_back({entry.contract + "." + entry.method, r.status, classifier.classify(r.trace),
                    std::move(r.trace)});
  }

  bool anyUnsafe = false;
  json jrows = json::array();
  for (const auto& row : rows) {
    anyUnsafe = anyUnsafe || row.verdict.level == SafetyLevel::Unsafe;
    if (format == "json") {
      jrows.push_back(json{{"entry", row.entry},
                           {"status", static_cast<int>(row.status)},
                           {"verdict", row.verdict.toJson()}});
    } else {
      const char* color = row.verdict.level == SafetyLevel::Unsafe ? "31" : "32";
      std::cout << row.entry << ": " << paint(safetyLevelName(row.verdict.level), color) << "\n";
      if (explain && !row.verdict.witnesses.empty())
        std::cout << explainVerdict(row.verdict, row.trace);
    }
  }
  if (format == "json")
    std::cout << json{{"unsafe", anyUnsafe}, {"traces", jrows}}.dump(2) << "\n";
  else
    std::cout << (anyUnsafe ? "result: unsafe traces found" : "result: no unsafe trace") << "\n";
  return anyUnsafe ? kExitDiagnostics : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SmartML modeling-language toolchain"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string entrySpec;
  std::vector<std::string> args;
  std::string format = "text";
  long fuel = 100000;
  uint64_t seed = 0;
  int budget = 20;
  bool explain = false;
  bool unsafe = false;
  bool fuzz = false;

  auto addCommon = [&](CLI::App* cmd, bool needsEntry) {
    cmd->add_option("files", files, "input .sml files")->required()->expected(-1);
    cmd->add_option("--format", format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    if (needsEntry) {
      cmd->add_option("--entry", entrySpec, "entry point: C.m or C(ctorArgs).m");
      cmd->add_option("--arg", args, "method argument (repeatable)");
      cmd->add_option("--fuel", fuel, "step budget");
      cmd->add_flag("--unsafe", unsafe, "execute even if the reentrancy check rejects");
    }
  };

  CLI::App* parseCmd = app.add_subcommand("parse", "parse and pretty-print");
  addCommon(parseCmd, false);

  CLI::App* checkCmd = app.add_subcommand("check", "reentrancy-safety type check");
  addCommon(checkCmd, false);
  checkCmd->add_flag("--explain", explain, "print the derivation trace");

  CLI::App* runCmd = app.add_subcommand("run", "execute an entry method");
  addCommon(runCmd, true);

  CLI::App* monitorCmd = app.add_subcommand("monitor", "classify traces against Defs 4-7");
  addCommon(monitorCmd, true);
  monitorCmd->add_flag("--fuzz", fuzz, "generate traces for every entry point");
  monitorCmd->add_option("--seed", seed, "fuzzing seed");
  monitorCmd->add_option("--budget", budget, "number of fuzzed traces");
  monitorCmd->add_flag("--explain", explain, "render witnesses");

  CLI11_PARSE(app, argc, argv);

  try {
    if (parseCmd->parsed()) return cmdParse(files, format);
    if (checkCmd->parsed()) return cmdCheck(files, format, explain);
    if (runCmd->parsed()) {
      if (entrySpec.empty()) {
        std::cerr << "run requires --entry\n";
        return kExitDiagnostics;
      }
      return cmdRun(files, entrySpec, args, fuel, unsafe, format);
    }
    if (monitorCmd->parsed()) {
      if (!fuzz && entrySpec.empty()) {
        std::cerr << "monitor requires --entry or --fuzz\n";
        return kExitDiagnostics;
      }
      return cmdMonitor(files, entrySpec, args, fuzz, seed, budget, fuel, unsafe, format, explain);
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitDiagnostics;
  } catch (const NameError& e) {
    std::cerr << "name error: " << e.what() << "\n";
    return kExitDiagnostics;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiagnostics;
  }
  return kExitOk;
}
