#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smartml/json.hpp"
#include "smartml/resolver.hpp"
#include "smartml/runtime.hpp"

namespace smartml {

// A reentrance witness: stack indices i < k < j (0 = innermost activation)
// with the i-th and j-th frames running the same method of the same instance
// and a different contract in between.
struct ReentranceWitness {
  int i = 0;
  int k = 0;
  int j = 0;
  std::string contract;        // instance id of c_i = c_j
  std::string method;          // m_i = m_j
  std::string interContract;   // instance id of c_k
  // Trace positions (set by the trace-based detector).
  size_t enterPosI = 0;        // where frame i was entered (witness becomes live)
  size_t extentBegin = 0;      // frame k's entry
  size_t extentEnd = 0;        // frame j's return (or trace end)

  json toJson() const {
    return json{{"i", i},
                {"k", k},
                {"j", j},
                {"contract", contract},
                {"method", method},
                {"intermediate", interContract},
                {"extentBegin", extentBegin},
                {"extentEnd", extentEnd}};
  }
};

enum class SafetyLevel { StrictSafe, NonModifyingSafe, ModifyingSafe, Unsafe };

inline const char* safetyLevelName(SafetyLevel l) {
  switch (l) {
    case SafetyLevel::StrictSafe: return "strict-safe";
    case SafetyLevel::NonModifyingSafe: return "non-modifying-safe";
    case SafetyLevel::ModifyingSafe: return "modifying-safe";
    case SafetyLevel::Unsafe: return "unsafe";
  }
  return "?";
}

struct OffendingWrite {
  size_t pos = 0;
  std::string instance;
  std::string field;
  bool irrelevant = false;

  json toJson() const {
    return json{{"pos", pos}, {"instance", instance}, {"field", field}, {"irrelevant", irrelevant}};
  }
};

struct SafetyVerdict {
  SafetyLevel level = SafetyLevel::StrictSafe;
  std::vector<ReentranceWitness> witnesses;
  std::vector<OffendingWrite> offendingWrites;  // relevant writes inside extents

  json toJson() const {
    json ws = json::array();
    for (const auto& w : witnesses) ws.push_back(w.toJson());
    json ow = json::array();
    for (const auto& o : offendingWrites) ow.push_back(o.toJson());
    return json{{"level", safetyLevelName(level)}, {"witnesses", ws}, {"offendingWrites", ow}};
  }
};

// --- detection over a call chain ---------------------------------------------

struct ChainFrame {
  std::string instance;
  std::string method;
  size_t enterPos = 0;  // trace position of the CallEnter
};

// Enumerates every (i, k, j) triple of the Def.-4 matrix over a chain given
// newest-first (index 0 = active frame).
inline std::vector<ReentranceWitness> detectOnChain(const std::vector<ChainFrame>& chain) {
  std::vector<ReentranceWitness> out;
  const int n = static_cast<int>(chain.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (chain[i].instance != chain[j].instance || chain[i].method != chain[j].method) continue;
      for (int k = i + 1; k < j; ++k) {
        if (chain[k].instance == chain[i].instance) continue;
        ReentranceWitness w;
        w.i = i;
        w.k = k;
        w.j = j;
        w.contract = chain[i].instance;
        w.method = chain[i].method;
        w.interContract = chain[k].instance;
        w.enterPosI = chain[i].enterPos;
        w.extentBegin = chain[k].enterPos;
        out.push_back(w);
      }
    }
  }
  return out;
}

// Configuration form of Def. 4: active frame plus call stack.
inline std::vector<ReentranceWitness> detectReentrance(const Configuration& cfg) {
  std::vector<ChainFrame> chain;
  chain.push_back({cfg.active, cfg.method, 0});
  for (const auto& f : cfg.stack) chain.push_back({f.contract, f.method, 0});
  return detectOnChain(chain);
}

// --- trace classification -----------------------------------------------------

// Classifier per Defs 5-7: a trace is strict-safe with no witness; with
// witnesses, field writes on the reentered instance inside each witness's
// extent (frame k's entry up to frame j's return) decide the level, with
// irrelevant fields forgiven at the modifying-safe level.
class TraceClassifier {
public:
  explicit TraceClassifier(const ResolvedProgram& rp) : rp_(rp) {}

  SafetyVerdict classify(const Trace& trace) const {
    struct OpenFrame {
      ChainFrame frame;
      std::vector<size_t> liveWitnesses;  // witnesses whose j-frame this is
    };
    std::vector<OpenFrame> stack;  // back = innermost
    std::vector<ReentranceWitness> witnesses;
    std::map<size_t, size_t> extentEnds;  // witness index -> end position

    for (size_t pos = 0; pos < trace.size(); ++pos) {
      const TraceEvent& e = trace[pos];
      if (e.kind == TraceEvent::Kind::CallEnter) {
        stack.push_back({{e.callee, e.method, pos}, {}});
        // New triples always have the fresh frame as their i-frame.
        std::vector<ChainFrame> chain;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) chain.push_back(it->frame);
        for (ReentranceWitness w : detectOnChain(chain)) {
          if (w.i != 0) continue;  // older triples were recorded when they arose
          size_t jDepth = stack.size() - 1 - static_cast<size_t>(w.j);
          witnesses.push_back(w);
          stack[jDepth].liveWitnesses.push_back(witnesses.size() - 1);
        }
      } else if (e.kind == TraceEvent::Kind::CallReturn) {
        if (!stack.empty()) {
          for (size_t wi : stack.back().liveWitnesses) extentEnds[wi] = pos;
          stack.pop_back();
        }
      }
    }
    // Unreturned j-frames extend to the end of the trace.
    for (size_t wi = 0; wi < witnesses.size(); ++wi)
      witnesses[wi].extentEnd = extentEnds.count(wi) ? extentEnds[wi] : trace.size();

    SafetyVerdict verdict;
    if (witnesses.empty()) {
      verdict.level = SafetyLevel::StrictSafe;
      return verdict;
    }
    verdict.witnesses = witnesses;
    bool anyWrite = false;
    bool anyRelevant = false;
    for (const auto& w : witnesses) {
      for (size_t pos = w.extentBegin; pos < w.extentEnd && pos < trace.size(); ++pos) {
        const TraceEvent& e = trace[pos];
        if (e.kind != TraceEvent::Kind::FieldWrite) continue;
        if (e.callee != w.contract) continue;  // only fields of the reentered instance
        anyWrite = true;
        bool irr = fieldIrrelevant(e.callee, e.field);
        if (!irr) {
          anyRelevant = true;
          verdict.offendingWrites.push_back({pos, e.callee, e.field, false});
        }
      }
    }
    verdict.level = anyRelevant  ? SafetyLevel::Unsafe
                    : anyWrite   ? SafetyLevel::ModifyingSafe
                                 : SafetyLevel::NonModifyingSafe;
    return verdict;
  }

private:
  bool fieldIrrelevant(const std::string& instanceId, const std::string& field) const {
    // instance ids are "<Type>#<n>"
    auto cut = instanceId.find('#');
    if (cut == std::string::npos) return false;
    std::string type = instanceId.substr(0, cut);
    if (!rp_.isContract(type)) return false;
    const FieldDecl* f = rp_.contract(type).findField(field);
    return f && f->irrelevant;
  }

  const ResolvedProgram& rp_;
};

// Plain-text rendering of witnesses for `--explain`.
inline std::string explainVerdict(const SafetyVerdict& v, const Trace& trace) {
  std::string out = std::string("verdict: ") + safetyLevelName(v.level) + "\n";
  int n = 0;
  for (const auto& w : v.witnesses) {
    out += "witness " + std::to_string(++n) + ": " + w.contract + "." + w.method +
           " re-entered through " + w.interContract + "\n";
    out += "  outer call at trace[" + std::to_string(w.extentBegin) + "]";
    out += ", reentrant extent ends at trace[" + std::to_string(w.extentEnd) + "]\n";
  }
  for (const auto& ow : v.offendingWrites) {
    const TraceEvent& e = trace[ow.pos];
    out += "  relevant write inside extent: " + e.callee + "." + e.field + " at trace[" +
           std::to_string(ow.pos) + "]\n";
  }
  return out;
}

}  // namespace smartml
