#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "minaret/rational.hpp"

namespace minaret {

struct FaraidError : std::runtime_error {
  explicit FaraidError(const std::string& what) : std::runtime_error(what) {}
};

enum class HeirKind {
  husband,
  wife,
  son,
  daughter,
  father,
  mother,
  paternal_grandfather,
  grandmother,
  sons_son,
  sons_daughter,
  full_brother,
  full_sister,
  paternal_brother,
  paternal_sister,
  uterine_sibling,
};

const std::vector<HeirKind>& all_heir_kinds();
std::string to_string(HeirKind kind);
std::optional<HeirKind> parse_heir_kind(const std::string& s);

/// Synthetic recipient for surplus that escheats to the public treasury
/// (bayt al-mal) so every outcome sums to exactly 1.
constexpr const char* kTreasuryRecipient = "treasury_residual";

struct Estate {
  std::map<HeirKind, int> heirs;   // kind -> count, counts >= 1
  long long net_estate_cents = 0;  // post debts/bequests
};

enum class MadhhabPolicy { hanafi, jumhur };
std::string to_string(MadhhabPolicy p);
std::optional<MadhhabPolicy> parse_policy(const std::string& s);

enum class RuleFlag { awl, radd, hajb, asaba, treasury_residual };
std::string to_string(RuleFlag f);

struct HeirShare {
  Rational fraction;        // group share, exact
  int count = 1;            // heads in the group
  long long amount_cents = 0;
};

struct DistributionOutcome {
  MadhhabPolicy policy = MadhhabPolicy::jumhur;
  std::map<std::string, HeirShare> shares;  // heir kind name (or treasury) -> share
  std::set<RuleFlag> applied;
  std::vector<std::string> explanation;

  Rational total() const {
    Rational t;
    for (const auto& [k, s] : shares) t += s.fraction;
    return t;
  }
};

struct BlockedHeir {
  HeirKind kind;
  std::string reason;
};

/// Structural validation: spouse exclusivity, wife count <= 4, singleton
/// caps on husband/father/mother/grandfather, non-empty heirs.
std::map<HeirKind, int> validate_heirs(const Estate& estate);

/// Impediment (hajb) pass: returns the eligible multiset and the blocked
/// heirs with reasons. `policy` decides the grandfather/siblings rule.
std::pair<std::map<HeirKind, int>, std::vector<BlockedHeir>> apply_hajb(
    const std::map<HeirKind, int>& heirs, MadhhabPolicy policy);

/// Fixed Quranic shares for the post-hajb set. Heirs taking residue instead
/// (asaba, including sisters made residuary by female descendants) get no
/// entry here.
std::map<HeirKind, Rational> assign_fard(const std::map<HeirKind, int>& eligible,
                                         MadhhabPolicy policy);

/// Residue allocation down the agnatic chain with 2:1 male:female sharing.
/// Returns per-kind residue shares; an empty map means no residuary exists.
std::map<HeirKind, Rational> assign_asaba(const std::map<HeirKind, int>& eligible,
                                          const Rational& remainder,
                                          MadhhabPolicy policy);

struct ReconcileResult {
  std::map<HeirKind, Rational> shares;
  Rational treasury;  // nonzero only when surplus escheats
  std::set<RuleFlag> applied;
};

/// 'awl (proportional reduction) when fard shares exceed 1; radd (return of
/// surplus) when they fall short with no residuary. Spouses are excluded
/// from radd under hanafi; under classical jumhur the surplus escheats.
ReconcileResult reconcile(const std::map<HeirKind, Rational>& fard,
                          const std::map<HeirKind, Rational>& asaba,
                          const std::map<HeirKind, int>& eligible,
                          MadhhabPolicy policy);

/// Full pipeline. Returns one outcome when policy is pinned or the case is
/// undisputed; a known disputed case with no pinned policy returns parallel
/// hanafi and jumhur outcomes, each summing to exactly 1.
std::vector<DistributionOutcome> distribute(const Estate& estate,
                                            std::optional<MadhhabPolicy> policy = std::nullopt);

}  // namespace minaret
