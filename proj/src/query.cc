#include "patcls/query.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <utility>

namespace patcls {

QueryPtr MakeTerm(std::string pattern) {
  return std::make_shared<const QueryNode>(
      QueryNode{TermNode{std::move(pattern)}});
}

QueryPtr MakeProx(int distance, QueryPtr left, QueryPtr right) {
  return std::make_shared<const QueryNode>(
      QueryNode{ProxNode{distance, std::move(left), std::move(right)}});
}

QueryPtr MakeOr(std::vector<QueryPtr> alternatives) {
  return std::make_shared<const QueryNode>(
      QueryNode{OrNode{std::move(alternatives)}});
}

QueryParseError::QueryParseError(const std::string& message, size_t position)
    : Error(ErrorCategory::kConfig,
            "query syntax error at position " + std::to_string(position) +
                ": " + message),
      position_(position) {}

namespace {

enum class LexKind { kTerm, kOr, kDistance, kOpen, kClose, kEnd };

struct Lexeme {
  LexKind kind;
  std::string text;
  int distance = 0;
  size_t position = 0;
};

bool IsDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

int ParseDistance(std::string_view digits, size_t position) {
  if (digits.size() > 6) throw QueryParseError("distance too large", position);
  return std::stoi(std::string(digits));
}

std::vector<Lexeme> Lex(std::string_view text) {
  std::vector<Lexeme> out;
  size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      out.push_back({c == '(' ? LexKind::kOpen : LexKind::kClose,
                     std::string(1, c), 0, i});
      ++i;
      continue;
    }
    const size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           text[i] != '(' && text[i] != ')') {
      ++i;
    }
    std::string word(text.substr(begin, i - begin));
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (word == "or") {
      out.push_back({LexKind::kOr, word, 0, begin});
      continue;
    }
    if (word.size() >= 2 && word.back() == 'd') {
      std::string_view body(word.data(), word.size() - 1);
      if (body.front() == '-' && IsDigits(body.substr(1))) {
        throw QueryParseError("negative distance '" + word + "'", begin);
      }
      if (IsDigits(body)) {
        out.push_back(
            {LexKind::kDistance, word, ParseDistance(body, begin), begin});
        continue;
      }
    }
    for (size_t k = 0; k < word.size(); ++k) {
      const unsigned char ch = word[k];
      if (!(std::isalnum(ch) || ch == '+')) {
        throw QueryParseError(
            std::string("invalid character '") + word[k] + "' in term", begin + k);
      }
    }
    if (word.find_first_not_of('+') == std::string::npos) {
      throw QueryParseError("term '" + word + "' has no literal characters",
                            begin);
    }
    out.push_back({LexKind::kTerm, word, 0, begin});
  }
  out.push_back({LexKind::kEnd, "", 0, text.size()});
  // "4 d" written with a space is accepted as a distance operator.
  std::vector<Lexeme> merged;
  for (size_t k = 0; k < out.size(); ++k) {
    if (out[k].kind == LexKind::kTerm && IsDigits(out[k].text) &&
        k + 1 < out.size() && out[k + 1].kind == LexKind::kTerm &&
        out[k + 1].text == "d") {
      merged.push_back({LexKind::kDistance, out[k].text + "d",
                        ParseDistance(out[k].text, out[k].position),
                        out[k].position});
      ++k;
      continue;
    }
    merged.push_back(out[k]);
  }
  return merged;
}

class Parser {
 public:
  explicit Parser(std::vector<Lexeme> lexemes) : lex_(std::move(lexemes)) {}

  QueryPtr Parse() {
    if (Peek().kind == LexKind::kEnd) {
      throw QueryParseError("empty query", Peek().position);
    }
    QueryPtr root = ParseOr();
    const Lexeme& next = Peek();
    switch (next.kind) {
      case LexKind::kEnd:
        return root;
      case LexKind::kClose:
        throw QueryParseError("unbalanced parentheses: unexpected ')'",
                              next.position);
      case LexKind::kTerm:
        if (next.text == "d") {
          throw QueryParseError("missing distance before 'd'", next.position);
        }
        [[fallthrough]];
      default:
        throw QueryParseError(
            "expected 'or' or a distance operator before '" + next.text + "'",
            next.position);
    }
  }

 private:
  const Lexeme& Peek() const { return lex_[pos_]; }
  const Lexeme& Take() { return lex_[pos_++]; }

  QueryPtr ParseOr() {
    std::vector<QueryPtr> alternatives;
    alternatives.push_back(ParseProx());
    while (Peek().kind == LexKind::kOr) {
      Take();
      alternatives.push_back(ParseProx());
    }
    if (alternatives.size() == 1) return alternatives.front();
    return MakeOr(std::move(alternatives));
  }

  QueryPtr ParseProx() {
    QueryPtr left = ParseAtom();
    while (Peek().kind == LexKind::kDistance) {
      const int distance = Take().distance;
      QueryPtr right = ParseAtom();
      left = MakeProx(distance, std::move(left), std::move(right));
    }
    return left;
  }

  QueryPtr ParseAtom() {
    const Lexeme& lexeme = Take();
    switch (lexeme.kind) {
      case LexKind::kTerm:
        return MakeTerm(lexeme.text);
      case LexKind::kOpen: {
        QueryPtr inner = ParseOr();
        if (Peek().kind != LexKind::kClose) {
          throw QueryParseError(
              Peek().kind == LexKind::kEnd
                  ? "unbalanced parentheses: missing ')'"
                  : "expected ')' before '" + Peek().text + "'",
              Peek().position);
        }
        Take();
        return inner;
      }
      case LexKind::kDistance:
        throw QueryParseError("distance operator '" + lexeme.text +
                                  "' is missing its left operand",
                              lexeme.position);
      case LexKind::kEnd:
        throw QueryParseError("unexpected end of query", lexeme.position);
      default:
        throw QueryParseError("expected a term or '(' but found '" +
                                  lexeme.text + "'",
                              lexeme.position);
    }
  }

  std::vector<Lexeme> lex_;
  size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

QueryPtr ParseQuery(std::string_view text) { return Parser(Lex(text)).Parse(); }

std::string ToString(const QueryNode& query) {
  return std::visit(
      Overloaded{
          [](const TermNode& t) { return t.pattern; },
          [](const ProxNode& p) {
            return "(" + ToString(*p.left) + " " + std::to_string(p.distance) +
                   "d " + ToString(*p.right) + ")";
          },
          [](const OrNode& o) {
            std::string out = "(";
            for (size_t i = 0; i < o.alternatives.size(); ++i) {
              if (i > 0) out += " or ";
              out += ToString(*o.alternatives[i]);
            }
            return out + ")";
          }},
      query.value);
}

bool StructurallyEqual(const QueryNode& a, const QueryNode& b) {
  if (a.value.index() != b.value.index()) return false;
  if (const auto* ta = std::get_if<TermNode>(&a.value)) {
    return ta->pattern == std::get<TermNode>(b.value).pattern;
  }
  if (const auto* pa = std::get_if<ProxNode>(&a.value)) {
    const auto& pb = std::get<ProxNode>(b.value);
    return pa->distance == pb.distance &&
           StructurallyEqual(*pa->left, *pb.left) &&
           StructurallyEqual(*pa->right, *pb.right);
  }
  const auto& oa = std::get<OrNode>(a.value).alternatives;
  const auto& ob = std::get<OrNode>(b.value).alternatives;
  if (oa.size() != ob.size()) return false;
  for (size_t i = 0; i < oa.size(); ++i) {
    if (!StructurallyEqual(*oa[i], *ob[i])) return false;
  }
  return true;
}

bool TermMatches(std::string_view pattern, std::string_view token) {
  // Wildcard match with single-star backtracking.
  size_t p = 0, t = 0;
  std::optional<size_t> star;
  size_t star_t = 0;
  while (t < token.size()) {
    if (p < pattern.size() && pattern[p] == '+') {
      star = p++;
      star_t = t;
    } else if (p < pattern.size() && pattern[p] == token[t]) {
      ++p;
      ++t;
    } else if (star) {
      p = *star + 1;
      t = ++star_t;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '+') ++p;
  return p == pattern.size();
}

size_t SpanGap(const MatchSpan& a, const MatchSpan& b) {
  if (a.end < b.start) return b.start - a.end - 1;
  if (b.end < a.start) return a.start - b.end - 1;
  return 0;
}

namespace {

using SpanKey = std::pair<size_t, size_t>;
using SpanSet = std::map<SpanKey, MatchSpan>;

std::vector<MatchSpan> ToVector(SpanSet&& set) {
  std::vector<MatchSpan> out;
  out.reserve(set.size());
  for (auto& [key, span] : set) out.push_back(std::move(span));
  return out;
}

std::vector<size_t> MergeWitnesses(const std::vector<size_t>& a,
                                   const std::vector<size_t>& b) {
  std::vector<size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<MatchSpan> ProxCandidates(const ProxNode& prox,
                                      std::span<const std::string> tokens) {
  const std::vector<MatchSpan> left = CandidateSpans(*prox.left, tokens);
  if (left.empty()) return {};
  const std::vector<MatchSpan> right = CandidateSpans(*prox.right, tokens);
  if (right.empty()) return {};
  size_t max_right_len = 0;
  for (const auto& b : right) max_right_len = std::max(max_right_len, b.end - b.start);
  const size_t n = static_cast<size_t>(prox.distance);

  SpanSet merged;
  for (const auto& a : left) {
    // b qualifies iff b.start <= a.end + n + 1 and b.end + n + 1 >= a.start.
    const size_t reach = n + 1 + max_right_len;
    const size_t lowest_start = a.start > reach ? a.start - reach : 0;
    auto it = std::lower_bound(
        right.begin(), right.end(), lowest_start,
        [](const MatchSpan& s, size_t v) { return s.start < v; });
    for (; it != right.end() && it->start <= a.end + n + 1; ++it) {
      if (SpanGap(a, *it) > n) continue;
      const SpanKey key{std::min(a.start, it->start), std::max(a.end, it->end)};
      if (merged.count(key)) continue;
      merged.emplace(key, MatchSpan{key.first, key.second,
                                    MergeWitnesses(a.witnesses, it->witnesses)});
    }
  }
  return ToVector(std::move(merged));
}

}  // namespace

std::vector<MatchSpan> CandidateSpans(const QueryNode& query,
                                      std::span<const std::string> tokens) {
  return std::visit(
      Overloaded{
          [&](const TermNode& term) {
            std::vector<MatchSpan> out;
            for (size_t i = 0; i < tokens.size(); ++i) {
              if (TermMatches(term.pattern, tokens[i])) {
                out.push_back(MatchSpan{i, i, {i}});
              }
            }
            return out;
          },
          [&](const ProxNode& prox) { return ProxCandidates(prox, tokens); },
          [&](const OrNode& alternatives) {
            SpanSet merged;
            for (const auto& alt : alternatives.alternatives) {
              for (auto& span : CandidateSpans(*alt, tokens)) {
                merged.try_emplace(SpanKey{span.start, span.end}, std::move(span));
              }
            }
            return ToVector(std::move(merged));
          }},
      query.value);
}

namespace {

MatchResult SelectGreedy(std::vector<MatchSpan> candidates, size_t limit) {
  MatchResult result;
  bool any = false;
  size_t last_end = 0;
  for (auto& span : candidates) {
    if (result.count >= limit) break;
    if (any && span.start <= last_end) continue;
    last_end = span.end;
    any = true;
    result.spans.push_back(std::move(span));
    ++result.count;
  }
  return result;
}

}  // namespace

MatchResult Evaluate(const QueryNode& query,
                     std::span<const std::string> tokens) {
  return SelectGreedy(CandidateSpans(query, tokens), SIZE_MAX);
}

bool CountAtLeast(const QueryNode& query, std::span<const std::string> tokens,
                  size_t k) {
  if (k == 0) throw ConfigError("match threshold k must be at least 1");
  return SelectGreedy(CandidateSpans(query, tokens), k).count >= k;
}

}  // namespace patcls
