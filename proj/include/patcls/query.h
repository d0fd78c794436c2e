#ifndef PATCLS_QUERY_H_
#define PATCLS_QUERY_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patcls/error.h"

namespace patcls {

struct QueryNode;
using QueryPtr = std::shared_ptr<const QueryNode>;

// A single token pattern; '+' stands for any (possibly empty) run of
// characters and the pattern is anchored at both ends of the token.
struct TermNode {
  std::string pattern;
};

// Order-free proximity: at most `distance` tokens separate a left match from
// a right match.
struct ProxNode {
  int distance = 0;
  QueryPtr left;
  QueryPtr right;
};

struct OrNode {
  std::vector<QueryPtr> alternatives;  // at least two
};

struct QueryNode {
  std::variant<TermNode, ProxNode, OrNode> value;
};

QueryPtr MakeTerm(std::string pattern);
QueryPtr MakeProx(int distance, QueryPtr left, QueryPtr right);
QueryPtr MakeOr(std::vector<QueryPtr> alternatives);

class QueryParseError : public Error {
 public:
  QueryParseError(const std::string& message, size_t position);
  size_t position() const { return position_; }

 private:
  size_t position_;
};

// Grammar (whitespace separated, "or" binds looser than "Nd"):
//   or_expr   := prox_expr ("or" prox_expr)*
//   prox_expr := atom (INT "d" atom)*        left associative
//   atom      := TERM | "(" or_expr ")"
QueryPtr ParseQuery(std::string_view text);

// Canonical text form. Every Prox and every Or is parenthesised, so the
// output re-parses to a structurally equal tree.
std::string ToString(const QueryNode& query);
bool StructurallyEqual(const QueryNode& a, const QueryNode& b);

bool TermMatches(std::string_view pattern, std::string_view token);

struct MatchSpan {
  size_t start = 0;
  size_t end = 0;  // inclusive
  std::vector<size_t> witnesses;  // sorted token indices matched by terms
};

struct MatchResult {
  size_t count = 0;
  std::vector<MatchSpan> spans;  // sorted by start, pairwise disjoint
};

// Token gap between two spans; 0 when adjacent or overlapping.
size_t SpanGap(const MatchSpan& a, const MatchSpan& b);

// All distinct candidate spans of `query`, sorted by (start, end).
std::vector<MatchSpan> CandidateSpans(const QueryNode& query,
                                      std::span<const std::string> tokens);

// Leftmost-greedy non-overlapping selection over the candidate spans.
MatchResult Evaluate(const QueryNode& query,
                     std::span<const std::string> tokens);

// True iff Evaluate(...).count >= k; stops selecting after k spans.
// Throws ConfigError for k == 0.
bool CountAtLeast(const QueryNode& query, std::span<const std::string> tokens,
                  size_t k);

}  // namespace patcls

#endif  // PATCLS_QUERY_H_
