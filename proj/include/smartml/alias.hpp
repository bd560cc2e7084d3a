#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "smartml/resolver.hpp"

namespace smartml {

// Symbolic contract identities. Besides fresh named identities (one per
// Cnt-Ok check) there is one summary identity per contract type standing for
// "every identity of this type"; a set containing only the summary is the
// Top alias set of that type.
using IdentId = int;

class IdentityTable {
public:
  IdentId fresh(const std::string& type) {
    ids_.push_back({type, false, "ι" + std::to_string(++freshCount_) + ":" + type});
    return static_cast<IdentId>(ids_.size()) - 1;
  }

  IdentId top(const std::string& type) {
    auto it = tops_.find(type);
    if (it != tops_.end()) return it->second;
    ids_.push_back({type, true, "⊤:" + type});
    IdentId id = static_cast<IdentId>(ids_.size()) - 1;
    tops_.emplace(type, id);
    return id;
  }

  const std::string& typeOf(IdentId id) const { return ids_[id].type; }
  bool isSummary(IdentId id) const { return ids_[id].summary; }
  const std::string& nameOf(IdentId id) const { return ids_[id].name; }

private:
  struct Entry {
    std::string type;
    bool summary;
    std::string name;
  };
  std::vector<Entry> ids_;
  std::map<std::string, IdentId> tops_;
  int freshCount_ = 0;
};

using AliasSet = std::set<IdentId>;

// Two identities may denote the same instance when either is a summary of a
// subtyping-related contract type, or they are literally equal.
inline bool identitiesAlias(const ResolvedProgram& rp, const IdentityTable& ids, IdentId a,
                            IdentId b) {
  if (a == b) return true;
  if (!ids.isSummary(a) && !ids.isSummary(b)) return false;
  const std::string& ta = ids.typeOf(a);
  const std::string& tb = ids.typeOf(b);
  return rp.isSubcontract(ta, tb) || rp.isSubcontract(tb, ta);
}

inline bool aliasSetsIntersect(const ResolvedProgram& rp, const IdentityTable& ids,
                               const AliasSet& a, const AliasSet& b) {
  for (IdentId x : a)
    for (IdentId y : b)
      if (identitiesAlias(rp, ids, x, y)) return true;
  return false;
}

inline AliasSet aliasUnion(const AliasSet& a, const AliasSet& b) {
  AliasSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline std::string aliasSetStr(const IdentityTable& ids, const AliasSet& s) {
  std::string out = "{";
  bool first = true;
  for (IdentId id : s) {
    if (!first) out += ", ";
    out += ids.nameOf(id);
    first = false;
  }
  return out + "}";
}

// --- memory locations -------------------------------------------------------

// (identity, field) pair; variables are keyed by name.
struct LocKey {
  IdentId ident;
  std::string field;

  bool operator<(const LocKey& o) const {
    return ident < o.ident || (ident == o.ident && field < o.field);
  }
  bool operator==(const LocKey& o) const { return ident == o.ident && field == o.field; }
};

// Multiset of contract locations with syntactic-access multiplicities.
class LocMultiset {
public:
  void add(const LocKey& k, int n = 1) {
    if (n <= 0) return;
    counts_[k] += n;
  }

  void addAll(const LocMultiset& o) {
    for (const auto& [k, n] : o.counts_) add(k, n);
  }

  // Floor-zero subtraction: remove one occurrence per syntactic access.
  void subtract(const LocMultiset& o) {
    for (const auto& [k, n] : o.counts_) {
      auto it = counts_.find(k);
      if (it == counts_.end()) continue;
      it->second -= n;
      if (it->second <= 0) counts_.erase(it);
    }
  }

  bool empty() const { return counts_.empty(); }
  int count(const LocKey& k) const {
    auto it = counts_.find(k);
    return it == counts_.end() ? 0 : it->second;
  }
  const std::map<LocKey, int>& entries() const { return counts_; }

  // Pointwise minimum (loop join).
  static LocMultiset pointwiseMin(const LocMultiset& a, const LocMultiset& b) {
    LocMultiset out;
    for (const auto& [k, n] : a.counts_) {
      int m = b.count(k);
      if (m > 0) out.add(k, std::min(n, m));
    }
    return out;
  }

  bool operator==(const LocMultiset& o) const { return counts_ == o.counts_; }

  std::set<LocKey> keys() const {
    std::set<LocKey> out;
    for (const auto& [k, n] : counts_) out.insert(k);
    return out;
  }

private:
  std::map<LocKey, int> counts_;
};

// Does every location in the multiset name an irrelevant field of its
// identity's contract type?
inline bool allIrrelevant(const ResolvedProgram& rp, const IdentityTable& ids,
                          const LocMultiset& locs) {
  for (const auto& [k, n] : locs.entries()) {
    const ContractInfo& info = rp.contract(ids.typeOf(k.ident));
    const FieldDecl* f = info.findField(k.field);
    if (!f || !f->irrelevant) return false;
  }
  return true;
}

inline bool allIrrelevant(const ResolvedProgram& rp, const IdentityTable& ids,
                          const std::set<LocKey>& locs) {
  for (const auto& k : locs) {
    const ContractInfo& info = rp.contract(ids.typeOf(k.ident));
    const FieldDecl* f = info.findField(k.field);
    if (!f || !f->irrelevant) return false;
  }
  return true;
}

}  // namespace smartml
