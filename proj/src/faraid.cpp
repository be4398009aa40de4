#include "minaret/faraid.hpp"

#include <algorithm>
#include <array>

#include "minaret/zakat.hpp"  // div_round_half_even

namespace minaret {
namespace {

constexpr std::array<const char*, 15> kHeirNames = {
    "husband", "wife", "son", "daughter", "father", "mother",
    "paternal_grandfather", "grandmother", "sons_son", "sons_daughter",
    "full_brother", "full_sister", "paternal_brother", "paternal_sister",
    "uterine_sibling",
};

int count_of(const std::map<HeirKind, int>& h, HeirKind k) {
  auto it = h.find(k);
  return it == h.end() ? 0 : it->second;
}

struct Presence {
  bool male_desc, female_desc, any_desc, father, grandfather, mother, spouse;
  int sibling_heads;  // all classes, pre-hajb, for the mother's 1/6 rule
};

Presence presence(const std::map<HeirKind, int>& h) {
  Presence p{};
  p.male_desc = count_of(h, HeirKind::son) || count_of(h, HeirKind::sons_son);
  p.female_desc = count_of(h, HeirKind::daughter) || count_of(h, HeirKind::sons_daughter);
  p.any_desc = p.male_desc || p.female_desc;
  p.father = count_of(h, HeirKind::father);
  p.grandfather = count_of(h, HeirKind::paternal_grandfather);
  p.mother = count_of(h, HeirKind::mother);
  p.spouse = count_of(h, HeirKind::husband) || count_of(h, HeirKind::wife);
  p.sibling_heads = count_of(h, HeirKind::full_brother) + count_of(h, HeirKind::full_sister) +
                    count_of(h, HeirKind::paternal_brother) +
                    count_of(h, HeirKind::paternal_sister) +
                    count_of(h, HeirKind::uterine_sibling);
  return p;
}

}  // namespace

const std::vector<HeirKind>& all_heir_kinds() {
  static const std::vector<HeirKind> v = [] {
    std::vector<HeirKind> out;
    for (std::size_t i = 0; i < kHeirNames.size(); ++i)
      out.push_back(static_cast<HeirKind>(i));
    return out;
  }();
  return v;
}

std::string to_string(HeirKind kind) { return kHeirNames[static_cast<std::size_t>(kind)]; }

std::optional<HeirKind> parse_heir_kind(const std::string& s) {
  for (std::size_t i = 0; i < kHeirNames.size(); ++i)
    if (s == kHeirNames[i]) return static_cast<HeirKind>(i);
  return std::nullopt;
}

std::string to_string(MadhhabPolicy p) {
  return p == MadhhabPolicy::hanafi ? "hanafi" : "jumhur";
}

std::optional<MadhhabPolicy> parse_policy(const std::string& s) {
  if (s == "hanafi") return MadhhabPolicy::hanafi;
  if (s == "jumhur") return MadhhabPolicy::jumhur;
  return std::nullopt;
}

std::string to_string(RuleFlag f) {
  switch (f) {
    case RuleFlag::awl: return "awl";
    case RuleFlag::radd: return "radd";
    case RuleFlag::hajb: return "hajb";
    case RuleFlag::asaba: return "asaba";
    case RuleFlag::treasury_residual: return "treasury_residual";
  }
  return "";
}

std::map<HeirKind, int> validate_heirs(const Estate& estate) {
  if (estate.heirs.empty()) throw FaraidError("no heirs given");
  std::map<HeirKind, int> out;
  for (const auto& [kind, count] : estate.heirs) {
    if (count < 1) throw FaraidError("heir count must be at least 1 for " + to_string(kind));
    out[kind] += count;  // merge duplicates
  }
  if (count_of(out, HeirKind::husband) && count_of(out, HeirKind::wife))
    throw FaraidError("husband and wife cannot both inherit from one estate");
  if (count_of(out, HeirKind::husband) > 1) throw FaraidError("at most one husband");
  if (count_of(out, HeirKind::wife) > 4) throw FaraidError("at most four wives");
  for (HeirKind k : {HeirKind::father, HeirKind::mother, HeirKind::paternal_grandfather})
    if (count_of(out, k) > 1) throw FaraidError("at most one " + to_string(k));
  if (estate.net_estate_cents < 0) throw FaraidError("net estate must be non-negative");
  return out;
}

std::pair<std::map<HeirKind, int>, std::vector<BlockedHeir>> apply_hajb(
    const std::map<HeirKind, int>& heirs, MadhhabPolicy policy) {
  auto p = presence(heirs);
  std::map<HeirKind, int> eligible = heirs;
  std::vector<BlockedHeir> blocked;

  auto block = [&](HeirKind k, const std::string& reason) {
    if (eligible.erase(k)) blocked.push_back({k, reason});
  };

  bool son = count_of(heirs, HeirKind::son) > 0;
  bool sons_son = count_of(heirs, HeirKind::sons_son) > 0;
  int daughters = count_of(heirs, HeirKind::daughter);

  if (son) {
    block(HeirKind::sons_son, "blocked by son");
    block(HeirKind::sons_daughter, "blocked by son");
  } else if (daughters >= 2 && !sons_son) {
    block(HeirKind::sons_daughter, "two or more daughters exhaust the 2/3 share");
  }

  if (p.male_desc)
    for (HeirKind k : {HeirKind::full_brother, HeirKind::full_sister,
                       HeirKind::paternal_brother, HeirKind::paternal_sister,
                       HeirKind::uterine_sibling})
      block(k, "blocked by a male descendant");

  if (p.father) {
    block(HeirKind::paternal_grandfather, "blocked by father");
    for (HeirKind k : {HeirKind::full_brother, HeirKind::full_sister,
                       HeirKind::paternal_brother, HeirKind::paternal_sister,
                       HeirKind::uterine_sibling})
      block(k, "blocked by father");
  }

  if (p.any_desc || p.grandfather)
    block(HeirKind::uterine_sibling,
          p.any_desc ? "blocked by a descendant" : "blocked by grandfather");

  if (p.mother) block(HeirKind::grandmother, "blocked by mother");

  // Hanafi treats the grandfather like a father against siblings.
  if (policy == MadhhabPolicy::hanafi && !p.father && p.grandfather)
    for (HeirKind k : {HeirKind::full_brother, HeirKind::full_sister,
                       HeirKind::paternal_brother, HeirKind::paternal_sister})
      block(k, "blocked by grandfather (hanafi)");

  if (count_of(eligible, HeirKind::full_brother))
    for (HeirKind k : {HeirKind::paternal_brother, HeirKind::paternal_sister})
      block(k, "blocked by full brother");

  // A full sister made residuary by female descendants stands in a full
  // brother's place against the paternal line.
  if (p.female_desc && count_of(eligible, HeirKind::full_sister))
    for (HeirKind k : {HeirKind::paternal_brother, HeirKind::paternal_sister})
      block(k, "blocked by full sister (residuary with descendants)");

  if (count_of(eligible, HeirKind::full_sister) >= 2 &&
      !count_of(eligible, HeirKind::paternal_brother))
    block(HeirKind::paternal_sister, "two full sisters exhaust the 2/3 share");

  return {eligible, blocked};
}

std::map<HeirKind, Rational> assign_fard(const std::map<HeirKind, int>& eligible,
                                         MadhhabPolicy policy) {
  (void)policy;
  auto p = presence(eligible);
  std::map<HeirKind, Rational> fard;

  int sons = count_of(eligible, HeirKind::son);
  int daughters = count_of(eligible, HeirKind::daughter);
  int sons_sons = count_of(eligible, HeirKind::sons_son);
  int sons_daughters = count_of(eligible, HeirKind::sons_daughter);
  int full_brothers = count_of(eligible, HeirKind::full_brother);
  int full_sisters = count_of(eligible, HeirKind::full_sister);
  int pat_brothers = count_of(eligible, HeirKind::paternal_brother);
  int pat_sisters = count_of(eligible, HeirKind::paternal_sister);
  int uterine = count_of(eligible, HeirKind::uterine_sibling);

  if (count_of(eligible, HeirKind::husband))
    fard[HeirKind::husband] = p.any_desc ? Rational(1, 4) : Rational(1, 2);
  if (count_of(eligible, HeirKind::wife))
    fard[HeirKind::wife] = p.any_desc ? Rational(1, 8) : Rational(1, 4);

  // Mother: 1/6 with descendants or two-plus siblings; 1/3 otherwise.
  // Umariyyatan (spouse + father, no descendants, fewer than two siblings):
  // one third of the remainder after the spouse.
  if (p.mother) {
    if (p.any_desc || p.sibling_heads >= 2) {
      fard[HeirKind::mother] = Rational(1, 6);
    } else if (p.spouse && p.father) {
      Rational spouse_share = count_of(eligible, HeirKind::husband)
                                  ? Rational(1, 2)
                                  : Rational(1, 4);
      fard[HeirKind::mother] = (Rational::one() - spouse_share) / Rational(3);
    } else {
      fard[HeirKind::mother] = Rational(1, 3);
    }
  }

  // Father and grandfather: a fixed 1/6 whenever descendants exist; the
  // residue on top of it (female descendants only) flows through asaba.
  if (p.father) {
    if (p.any_desc) fard[HeirKind::father] = Rational(1, 6);
  } else if (p.grandfather) {
    if (p.any_desc) fard[HeirKind::paternal_grandfather] = Rational(1, 6);
  }

  if (count_of(eligible, HeirKind::grandmother) && !p.mother)
    fard[HeirKind::grandmother] = Rational(1, 6);

  // Daughters take fard only without sons (otherwise shared residue 2:1).
  if (daughters && !sons)
    fard[HeirKind::daughter] = daughters >= 2 ? Rational(2, 3) : Rational(1, 2);

  // Son's daughters without a son's son: complete the descendants' 2/3.
  if (sons_daughters && !sons && !sons_sons) {
    if (daughters == 0)
      fard[HeirKind::sons_daughter] = sons_daughters >= 2 ? Rational(2, 3) : Rational(1, 2);
    else if (daughters == 1)
      fard[HeirKind::sons_daughter] = Rational(1, 6);
    // two+ daughters: blocked in hajb
  }

  // Full sisters: fard only when not residuary (no brother, no female
  // descendants making them asaba, no father/male descendant blocking).
  if (full_sisters && !full_brothers && !p.female_desc)
    fard[HeirKind::full_sister] = full_sisters >= 2 ? Rational(2, 3) : Rational(1, 2);

  // Paternal sisters mirror full sisters one tier down.
  if (pat_sisters && !pat_brothers && !p.female_desc && !full_brothers) {
    if (full_sisters == 0)
      fard[HeirKind::paternal_sister] = pat_sisters >= 2 ? Rational(2, 3) : Rational(1, 2);
    else if (full_sisters == 1)
      fard[HeirKind::paternal_sister] = Rational(1, 6);
  }

  if (uterine)
    fard[HeirKind::uterine_sibling] = uterine >= 2 ? Rational(1, 3) : Rational(1, 6);

  return fard;
}

namespace {

// Split `remainder` over a male/female pair 2:1 per head.
void split_tasib(std::map<HeirKind, Rational>& out, const Rational& remainder,
                 HeirKind male, int males, HeirKind female, int females) {
  long long units = 2LL * males + females;
  if (males) out[male] = remainder * Rational(2LL * males, units);
  if (females) out[female] = remainder * Rational(females, units);
}

}  // namespace

std::map<HeirKind, Rational> assign_asaba(const std::map<HeirKind, int>& eligible,
                                          const Rational& remainder,
                                          MadhhabPolicy policy) {
  (void)policy;
  std::map<HeirKind, Rational> out;
  if (remainder < Rational::zero()) return out;
  auto p = presence(eligible);

  int sons = count_of(eligible, HeirKind::son);
  int daughters = count_of(eligible, HeirKind::daughter);
  int sons_sons = count_of(eligible, HeirKind::sons_son);
  int sons_daughters = count_of(eligible, HeirKind::sons_daughter);
  int full_brothers = count_of(eligible, HeirKind::full_brother);
  int full_sisters = count_of(eligible, HeirKind::full_sister);
  int pat_brothers = count_of(eligible, HeirKind::paternal_brother);
  int pat_sisters = count_of(eligible, HeirKind::paternal_sister);

  if (sons) {
    split_tasib(out, remainder, HeirKind::son, sons, HeirKind::daughter, daughters);
  } else if (sons_sons) {
    split_tasib(out, remainder, HeirKind::sons_son, sons_sons, HeirKind::sons_daughter,
                sons_daughters);
  } else if (p.father) {
    out[HeirKind::father] = remainder;
  } else if (p.grandfather) {
    out[HeirKind::paternal_grandfather] = remainder;
  } else if (full_brothers) {
    split_tasib(out, remainder, HeirKind::full_brother, full_brothers,
                HeirKind::full_sister, full_sisters);
  } else if (full_sisters && p.female_desc) {
    out[HeirKind::full_sister] = remainder;  // asaba ma'a al-ghayr
  } else if (pat_brothers) {
    split_tasib(out, remainder, HeirKind::paternal_brother, pat_brothers,
                HeirKind::paternal_sister, pat_sisters);
  } else if (pat_sisters && p.female_desc) {
    out[HeirKind::paternal_sister] = remainder;
  }
  return out;
}

ReconcileResult reconcile(const std::map<HeirKind, Rational>& fard,
                          const std::map<HeirKind, Rational>& asaba,
                          const std::map<HeirKind, int>& eligible,
                          MadhhabPolicy policy) {
  ReconcileResult r;
  r.shares = fard;
  for (const auto& [k, v] : asaba) {
    r.shares[k] += v;
    if (v > Rational::zero()) r.applied.insert(RuleFlag::asaba);
  }

  Rational total;
  for (const auto& [k, v] : r.shares) total += v;

  if (total > Rational::one()) {
    // 'awl: proportional reduction of every share.
    for (auto& [k, v] : r.shares) v = v / total;
    r.applied.insert(RuleFlag::awl);
    return r;
  }

  if (total < Rational::one() && asaba.empty()) {
    Rational surplus = Rational::one() - total;
    bool spouse = r.shares.count(HeirKind::husband) || r.shares.count(HeirKind::wife);
    // Pro-rata base: fard heirs eligible for radd.
    auto radd_weight = [&](HeirKind k) -> Rational {
      if (k == HeirKind::husband || k == HeirKind::wife) return Rational::zero();
      return r.shares.at(k);
    };
    Rational base;
    for (const auto& [k, v] : r.shares) base += radd_weight(k);

    if (!spouse || policy == MadhhabPolicy::hanafi) {
      if (base > Rational::zero()) {
        for (auto& [k, v] : r.shares)
          if (radd_weight(k) > Rational::zero()) v += surplus * (v / base);
        r.applied.insert(RuleFlag::radd);
      } else if (spouse && policy == MadhhabPolicy::hanafi) {
        // Spouse alone: late hanafi doctrine returns the surplus to the spouse.
        for (auto& [k, v] : r.shares) v += surplus;
        r.applied.insert(RuleFlag::radd);
      } else {
        r.treasury = surplus;
        r.applied.insert(RuleFlag::treasury_residual);
      }
    } else {
      // Classical jumhur: fard shares stand; the surplus escheats.
      r.treasury = surplus;
      r.applied.insert(RuleFlag::treasury_residual);
    }
    return r;
  }

  if (total < Rational::one() && !asaba.empty())
    throw FaraidError("internal: residuary present but shares do not sum to 1");
  return r;
}

namespace {

// Jumhur grandfather-with-siblings: the grandfather takes the best of
// sharing as a brother (muqasama), one third of the residue, or one sixth
// of the whole estate; the nearest sibling class splits the rest 2:1.
std::map<HeirKind, Rational> jumhur_grandfather_residue(
    const std::map<HeirKind, int>& eligible, const Rational& residue) {
  int full_b = count_of(eligible, HeirKind::full_brother);
  int full_s = count_of(eligible, HeirKind::full_sister);
  int use_b = full_b, use_s = full_s;
  HeirKind bk = HeirKind::full_brother, sk = HeirKind::full_sister;
  if (full_b + full_s == 0) {
    use_b = count_of(eligible, HeirKind::paternal_brother);
    use_s = count_of(eligible, HeirKind::paternal_sister);
    bk = HeirKind::paternal_brother;
    sk = HeirKind::paternal_sister;
  }
  long long sibling_units = 2LL * use_b + use_s;
  Rational muqasama = residue * Rational(2, 2 + sibling_units);
  Rational third_residue = residue / Rational(3);
  Rational sixth_estate(1, 6);
  Rational g = std::max({muqasama, third_residue, sixth_estate});
  if (g > residue) g = residue;

  std::map<HeirKind, Rational> out;
  out[HeirKind::paternal_grandfather] = g;
  Rational rest = residue - g;
  if (rest > Rational::zero() && sibling_units > 0) {
    if (use_b) out[bk] = rest * Rational(2LL * use_b, sibling_units);
    if (use_s) out[sk] += rest * Rational(use_s, sibling_units);
  }
  return out;
}

DistributionOutcome run_pipeline(const std::map<HeirKind, int>& validated,
                                 long long net_estate_cents, MadhhabPolicy policy,
                                 std::vector<std::string> notes) {
  auto [eligible, blocked] = apply_hajb(validated, policy);
  auto fard = assign_fard(eligible, policy);

  Rational fard_total;
  for (const auto& [k, v] : fard) fard_total += v;

  std::map<HeirKind, Rational> asaba;
  bool gf_case = policy == MadhhabPolicy::jumhur &&
                 count_of(eligible, HeirKind::paternal_grandfather) &&
                 !count_of(eligible, HeirKind::father) &&
                 !count_of(eligible, HeirKind::son) &&
                 !count_of(eligible, HeirKind::sons_son) &&
                 (count_of(eligible, HeirKind::full_brother) ||
                  count_of(eligible, HeirKind::full_sister) ||
                  count_of(eligible, HeirKind::paternal_brother) ||
                  count_of(eligible, HeirKind::paternal_sister));
  if (fard_total < Rational::one()) {
    Rational residue = Rational::one() - fard_total;
    if (gf_case) {
      // The grandfather's 1/6-with-descendants fard is folded into this rule.
      fard.erase(HeirKind::paternal_grandfather);
      fard.erase(HeirKind::full_sister);
      fard.erase(HeirKind::paternal_sister);
      Rational base;
      for (const auto& [k, v] : fard) base += v;
      asaba = jumhur_grandfather_residue(eligible, Rational::one() - base);
      notes.push_back("grandfather shares with siblings (jumhur muqasama rule)");
    } else {
      asaba = assign_asaba(eligible, residue, policy);
    }
  }

  auto rec = reconcile(fard, asaba, eligible, policy);

  DistributionOutcome out;
  out.policy = policy;
  out.applied = rec.applied;
  if (!blocked.empty()) out.applied.insert(RuleFlag::hajb);
  out.explanation = std::move(notes);
  for (const auto& b : blocked)
    out.explanation.push_back(to_string(b.kind) + ": " + b.reason);

  for (const auto& [kind, frac] : rec.shares) {
    if (frac == Rational::zero()) continue;
    HeirShare s;
    s.fraction = frac;
    s.count = count_of(eligible, kind);
    s.amount_cents = div_round_half_even(net_estate_cents * frac.num(), frac.den());
    out.shares[to_string(kind)] = s;
  }
  if (rec.treasury > Rational::zero()) {
    HeirShare s;
    s.fraction = rec.treasury;
    s.count = 0;
    s.amount_cents = div_round_half_even(net_estate_cents * rec.treasury.num(), rec.treasury.den());
    out.shares[kTreasuryRecipient] = s;
    out.applied.insert(RuleFlag::treasury_residual);
  }
  if (out.shares.empty()) {
    // No recognized heir takes: the whole estate escheats.
    HeirShare s;
    s.fraction = Rational::one();
    s.count = 0;
    s.amount_cents = net_estate_cents;
    out.shares[kTreasuryRecipient] = s;
    out.applied.insert(RuleFlag::treasury_residual);
  }
  return out;
}

}  // namespace

std::vector<DistributionOutcome> distribute(const Estate& estate,
                                            std::optional<MadhhabPolicy> policy) {
  auto validated = validate_heirs(estate);

  if (policy)
    return {run_pipeline(validated, estate.net_estate_cents, *policy, {})};

  // Detect known disputed configurations to decide whether to branch.
  bool spouse = count_of(validated, HeirKind::husband) || count_of(validated, HeirKind::wife);
  bool gf_siblings = count_of(validated, HeirKind::paternal_grandfather) &&
                     !count_of(validated, HeirKind::father) &&
                     !count_of(validated, HeirKind::son) &&
                     !count_of(validated, HeirKind::sons_son) &&
                     (count_of(validated, HeirKind::full_brother) ||
                      count_of(validated, HeirKind::full_sister) ||
                      count_of(validated, HeirKind::paternal_brother) ||
                      count_of(validated, HeirKind::paternal_sister));

  auto jumhur = run_pipeline(validated, estate.net_estate_cents, MadhhabPolicy::jumhur, {});
  bool radd_spouse = spouse && (jumhur.applied.count(RuleFlag::radd) ||
                                jumhur.applied.count(RuleFlag::treasury_residual));

  if (gf_siblings || radd_spouse) {
    auto hanafi = run_pipeline(validated, estate.net_estate_cents, MadhhabPolicy::hanafi,
                               {"disputed case: parallel outcomes returned"});
    jumhur.explanation.insert(jumhur.explanation.begin(),
                              "disputed case: parallel outcomes returned");
    return {hanafi, jumhur};
  }
  return {jumhur};
}

}  // namespace minaret
