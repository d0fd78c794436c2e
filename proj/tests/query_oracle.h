#ifndef PATCLS_TESTS_QUERY_ORACLE_H_
#define PATCLS_TESTS_QUERY_ORACLE_H_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "patcls/query.h"

// Exhaustive reference semantics for the query language, written without
// reference to the matcher under test.
namespace patcls::testing::oracle {

using Toks = std::vector<std::string>;

// '+' expanded into every possible substring assignment by recursion over
// the token, independent of the matcher under test.
inline bool BruteWildcard(const std::string& p, size_t pi, const std::string& t, size_t ti) {
  if (pi == p.size()) return ti == t.size();
  if (p[pi] == '+') {
    for (size_t take = 0; ti + take <= t.size(); ++take) {
      if (BruteWildcard(p, pi + 1, t, ti + take)) return true;
    }
    return false;
  }
  return ti < t.size() && p[pi] == t[ti] && BruteWildcard(p, pi + 1, t, ti + 1);
}

inline const Toks kVocab = {"ab", "abc", "ba", "bab", "cab", "ca", "ac", "bc", "cc", "abb", "b", "c"};

inline QueryPtr RandomQuery(std::mt19937_64& gen, int depth) {
  const int kind = depth == 0 ? 0 : static_cast<int>(gen() % 3);
  if (kind == 0) {
    const std::string& w = kVocab[gen() % kVocab.size()];
    switch (gen() % 4) {
      case 0:
        return MakeTerm(w);
      case 1:
        return MakeTerm(w.substr(0, 1) + "+");
      case 2:
        return MakeTerm("+" + w.substr(w.size() - 1));
      default:
        return MakeTerm("+" + w.substr(0, 1) + "+");
    }
  }
  if (kind == 1) {
    return MakeProx(static_cast<int>(gen() % 6), RandomQuery(gen, depth - 1),
                    RandomQuery(gen, depth - 1));
  }
  std::vector<QueryPtr> alts;
  const size_t n = 2 + gen() % 2;
  for (size_t i = 0; i < n; ++i) alts.push_back(RandomQuery(gen, depth - 1));
  return MakeOr(std::move(alts));
}

// achievable[s][e]: some choice of witness tokens for the query's terms
// satisfies every proximity constraint and has hull [s, e].
using SpanTable = std::vector<std::vector<uint8_t>>;

inline SpanTable Achievable(const QueryNode& q, const Toks& toks) {
  const size_t n = toks.size();
  SpanTable table(n, std::vector<uint8_t>(n, 0));
  if (const auto* term = std::get_if<TermNode>(&q.value)) {
    for (size_t i = 0; i < n; ++i) table[i][i] = BruteWildcard(term->pattern, 0, toks[i], 0);
  } else if (const auto* alt = std::get_if<OrNode>(&q.value)) {
    for (const QueryPtr& a : alt->alternatives) {
      const SpanTable sub = Achievable(*a, toks);
      for (size_t s = 0; s < n; ++s)
        for (size_t e = 0; e < n; ++e) table[s][e] |= sub[s][e];
    }
  } else {
    const auto& prox = std::get<ProxNode>(q.value);
    const SpanTable left = Achievable(*prox.left, toks);
    const SpanTable right = Achievable(*prox.right, toks);
    for (size_t s1 = 0; s1 < n; ++s1)
      for (size_t e1 = s1; e1 < n; ++e1) {
        if (!left[s1][e1]) continue;
        for (size_t s2 = 0; s2 < n; ++s2)
          for (size_t e2 = s2; e2 < n; ++e2) {
            if (!right[s2][e2]) continue;
            // Tokens strictly between the two intervals.
            long between = 0;
            if (e1 < s2) between = static_cast<long>(s2) - static_cast<long>(e1) - 1;
            if (e2 < s1) between = static_cast<long>(s1) - static_cast<long>(e2) - 1;
            if (between <= prox.distance) table[std::min(s1, s2)][std::max(e1, e2)] = 1;
          }
      }
  }
  return table;
}

// Maximum number of pairwise disjoint achievable spans, by dynamic
// programming over start positions.
inline size_t MaxDisjoint(const SpanTable& table) {
  const size_t n = table.size();
  std::vector<size_t> best(n + 1, 0);
  for (size_t p = n; p-- > 0;) {
    best[p] = best[p + 1];
    for (size_t e = p; e < n; ++e) {
      if (table[p][e]) best[p] = std::max(best[p], 1 + best[e + 1]);
    }
  }
  return n == 0 ? 0 : best[0];
}

}  // namespace patcls::testing::oracle

#endif  // PATCLS_TESTS_QUERY_ORACLE_H_
