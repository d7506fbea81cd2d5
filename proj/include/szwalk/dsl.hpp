#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/operators.hpp"
#include "szwalk/types.hpp"

// Textual pipeline language, e.g.  "S Q1{0,2} R(pi/2)".
//
//   pipeline := token+                      (whitespace-separated)
//   token    := "S" | "R" angle? | ("Q1"|"Q2") markset angle?
//   markset  := "{" int ("," int)* "}"
//   angle    := "(" expr ")"
//   expr     := decimal | "pi" | decimal "*" "pi" | "pi/" decimal
//
// Tokens read in operator notation: the leftmost operator is applied last.
// An omitted angle means pi, and the literal "pi" binds to the same exact
// sign-flip fast path as omitting it.

namespace szwalk {

struct AngleExpr {
  enum class Kind { plain, pi, multiple_of_pi, pi_over };
  Kind kind = Kind::pi;
  Real literal = 0.0;  // the decimal operand; unused for Kind::pi

  Real value() const {
    switch (kind) {
      case Kind::plain: return literal;
      case Kind::pi: return std::numbers::pi;
      case Kind::multiple_of_pi: return literal * std::numbers::pi;
      case Kind::pi_over: return std::numbers::pi / literal;
    }
    return std::numbers::pi;
  }

  friend bool operator==(const AngleExpr&, const AngleExpr&) = default;
};

struct PipelineToken {
  enum class Kind { reflection, swap, oracle1, oracle2 };
  Kind kind = Kind::swap;
  std::optional<AngleExpr> angle;  // reflection/oracle only
  std::vector<Index> marked;       // oracles only; sorted, deduplicated

  friend bool operator==(const PipelineToken&, const PipelineToken&) = default;
};

struct PipelineExpr {
  std::vector<PipelineToken> tokens;

  friend bool operator==(const PipelineExpr&, const PipelineExpr&) = default;
};

struct ParseError {
  std::size_t offset = 0;  // byte offset into the input
  std::string message;
};

using ParseResult = std::variant<PipelineExpr, ParseError>;

namespace dsl_detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::variant<AngleExpr, ParseError> run_angle_expr() {
    skip_ws();
    auto expr = parse_angle_expr();
    if (!expr) return error_;
    skip_ws();
    if (pos_ != text_.size()) {
      return ParseError{pos_, "trailing input after angle expression"};
    }
    return *expr;
  }

  ParseResult run() {
    PipelineExpr expr;
    skip_ws();
    while (pos_ < text_.size()) {
      auto token = parse_token();
      if (!token) return error_;
      expr.tokens.push_back(std::move(*token));
      if (pos_ < text_.size() && !is_ws(text_[pos_])) {
        return fail(pos_, "expected whitespace between tokens");
      }
      skip_ws();
    }
    if (expr.tokens.empty()) {
      return fail(0, "expected at least one operator token");
    }
    return expr;
  }

 private:
  static bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }

  void skip_ws() {
    while (pos_ < text_.size() && is_ws(text_[pos_])) ++pos_;
  }

  ParseError fail(std::size_t offset, std::string message) {
    error_ = ParseError{offset, std::move(message)};
    return error_;
  }

  std::optional<PipelineToken> parse_token() {
    PipelineToken token;
    const char c = text_[pos_];
    if (c == 'S') {
      ++pos_;
      token.kind = PipelineToken::Kind::swap;
      return token;
    }
    if (c == 'R') {
      ++pos_;
      token.kind = PipelineToken::Kind::reflection;
      if (pos_ < text_.size() && text_[pos_] == '(') {
        auto angle = parse_angle();
        if (!angle) return std::nullopt;
        token.angle = *angle;
      }
      return token;
    }
    if (c == 'Q') {
      ++pos_;
      if (pos_ >= text_.size() || (text_[pos_] != '1' && text_[pos_] != '2')) {
        fail(pos_, "expected 1 or 2 after Q");
        return std::nullopt;
      }
      token.kind = text_[pos_] == '1' ? PipelineToken::Kind::oracle1
                                      : PipelineToken::Kind::oracle2;
      ++pos_;
      auto marked = parse_markset();
      if (!marked) return std::nullopt;
      token.marked = std::move(*marked);
      if (pos_ < text_.size() && text_[pos_] == '(') {
        auto angle = parse_angle();
        if (!angle) return std::nullopt;
        token.angle = *angle;
      }
      return token;
    }
    fail(pos_, std::string("unexpected character '") + c + "'");
    return std::nullopt;
  }

  std::optional<std::vector<Index>> parse_markset() {
    if (pos_ >= text_.size() || text_[pos_] != '{') {
      fail(pos_, "expected '{' with marked nodes");
      return std::nullopt;
    }
    ++pos_;
    std::vector<Index> marked;
    while (true) {
      auto value = parse_int();
      if (!value) return std::nullopt;
      marked.push_back(*value);
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= text_.size() || text_[pos_] != '}') {
      fail(pos_, "expected ',' or '}' in marked set");
      return std::nullopt;
    }
    ++pos_;
    std::sort(marked.begin(), marked.end());
    marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
    return marked;
  }

  std::optional<Index> parse_int() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (pos_ == start) {
      fail(start, "expected a node index");
      return std::nullopt;
    }
    long long value = 0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_) {
      fail(start, "node index out of representable range");
      return std::nullopt;
    }
    return static_cast<Index>(value);
  }

  std::optional<AngleExpr> parse_angle() {
    ++pos_;  // consume '('
    auto expr = parse_angle_expr();
    if (!expr) return std::nullopt;
    if (pos_ >= text_.size() || text_[pos_] != ')') {
      fail(pos_, "expected ')' after angle expression");
      return std::nullopt;
    }
    ++pos_;
    return expr;
  }

  bool try_consume_pi() {
    if (pos_ + 1 < text_.size() && text_[pos_] == 'p' &&
        text_[pos_ + 1] == 'i') {
      pos_ += 2;
      return true;
    }
    return false;
  }

  std::optional<AngleExpr> parse_angle_expr() {
    AngleExpr expr;
    if (try_consume_pi()) {
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        auto denom = parse_decimal();
        if (!denom) return std::nullopt;
        if (*denom == 0.0) {
          fail(pos_, "division of pi by zero");
          return std::nullopt;
        }
        expr.kind = AngleExpr::Kind::pi_over;
        expr.literal = *denom;
        return expr;
      }
      expr.kind = AngleExpr::Kind::pi;
      return expr;
    }
    auto value = parse_decimal();
    if (!value) return std::nullopt;
    if (pos_ < text_.size() && text_[pos_] == '*') {
      ++pos_;
      if (!try_consume_pi()) {
        fail(pos_, "expected pi after '*'");
        return std::nullopt;
      }
      expr.kind = AngleExpr::Kind::multiple_of_pi;
      expr.literal = *value;
      return expr;
    }
    expr.kind = AngleExpr::Kind::plain;
    expr.literal = *value;
    return expr;
  }

  std::optional<Real> parse_decimal() {
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    const auto digits = [this] {
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      digits();
    }
    Real value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (pos_ == start || ec != std::errc{} ||
        ptr != text_.data() + pos_) {
      fail(start, "expected a decimal literal");
      return std::nullopt;
    }
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  ParseError error_;
};

inline void format_decimal(std::string& out, Real value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
  (void)ec;
}

}  // namespace dsl_detail

/// Parses the pipeline language; malformed input yields a positioned
/// ParseError value, never an exception.
inline ParseResult parse_pipeline(std::string_view text) {
  return dsl_detail::Parser(text).run();
}

/// Parses a standalone angle expression ("pi", "0.3*pi", "pi/2", "1.5").
inline std::variant<AngleExpr, ParseError> parse_angle_expr(
    std::string_view text) {
  return dsl_detail::Parser(text).run_angle_expr();
}

/// Canonical text form; format followed by parse reproduces the expression.
inline std::string format_pipeline(const PipelineExpr& expr) {
  std::string out;
  for (const PipelineToken& token : expr.tokens) {
    if (!out.empty()) out.push_back(' ');
    switch (token.kind) {
      case PipelineToken::Kind::swap: out.push_back('S'); break;
      case PipelineToken::Kind::reflection: out.push_back('R'); break;
      case PipelineToken::Kind::oracle1: out.append("Q1"); break;
      case PipelineToken::Kind::oracle2: out.append("Q2"); break;
    }
    if (token.kind == PipelineToken::Kind::oracle1 ||
        token.kind == PipelineToken::Kind::oracle2) {
      out.push_back('{');
      for (std::size_t i = 0; i < token.marked.size(); ++i) {
        if (i > 0) out.push_back(',');
        out.append(std::to_string(token.marked[i]));
      }
      out.push_back('}');
    }
    if (token.angle) {
      out.push_back('(');
      switch (token.angle->kind) {
        case AngleExpr::Kind::pi:
          out.append("pi");
          break;
        case AngleExpr::Kind::plain:
          dsl_detail::format_decimal(out, token.angle->literal);
          break;
        case AngleExpr::Kind::multiple_of_pi:
          dsl_detail::format_decimal(out, token.angle->literal);
          out.append("*pi");
          break;
        case AngleExpr::Kind::pi_over:
          out.append("pi/");
          dsl_detail::format_decimal(out, token.angle->literal);
          break;
      }
      out.push_back(')');
    }
  }
  return out;
}

/// A pipeline bound to a transition matrix; real when every angle is an
/// exact 0 or pi and no phase matrix is involved, complex otherwise.
using BoundPipeline =
    std::variant<UnitaryPipeline<Real>, UnitaryPipeline<Complex>>;

namespace dsl_detail {

inline Real token_angle(const PipelineToken& token) {
  return token.angle ? token.angle->value() : std::numbers::pi;
}

inline bool needs_complex(const PipelineExpr& expr, bool has_theta) {
  if (has_theta) return true;
  for (const PipelineToken& token : expr.tokens) {
    if (token.kind == PipelineToken::Kind::swap) continue;
    const Real angle = token_angle(token);
    if (angle != 0.0 && !is_sign_flip_angle(angle)) return true;
  }
  return false;
}

template <class Scalar>
UnitaryPipeline<Scalar> bind_as(const PipelineExpr& expr,
                                const TransitionMatrix& g,
                                const PhaseMatrix* theta) {
  std::shared_ptr<const PsiMatrix<Scalar>> psi;
  if constexpr (is_complex_v<Scalar>) {
    psi = std::make_shared<const PsiMatrix<Scalar>>(
        theta ? build_psi_matrix(g, *theta)
              : build_psi_matrix(g, PhaseMatrix::Zero(g.n(), g.n())));
  } else {
    psi = std::make_shared<const PsiMatrix<Scalar>>(build_psi_matrix(g));
  }
  std::vector<typename UnitaryPipeline<Scalar>::Op> ops;
  ops.reserve(expr.tokens.size());
  for (const PipelineToken& token : expr.tokens) {
    switch (token.kind) {
      case PipelineToken::Kind::swap:
        ops.emplace_back(SwapOperator{});
        break;
      case PipelineToken::Kind::reflection:
        ops.emplace_back(ReflectionOperator<Scalar>(psi, token_angle(token)));
        break;
      case PipelineToken::Kind::oracle1:
      case PipelineToken::Kind::oracle2: {
        for (Index m : token.marked) {
          if (m >= g.n()) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "marked node " + std::to_string(m) +
                            " out of range for N=" + std::to_string(g.n()));
          }
        }
        const Register reg = token.kind == PipelineToken::Kind::oracle1
                                 ? Register::first
                                 : Register::second;
        ops.emplace_back(OracleOperator(token.marked, reg,
                                        token_angle(token)));
        break;
      }
    }
  }
  return UnitaryPipeline<Scalar>(std::move(ops));
}

}  // namespace dsl_detail

/// Binds a parsed expression against a transition matrix, choosing real
/// arithmetic whenever the pipeline is phase-degenerate.
inline BoundPipeline bind_pipeline(const PipelineExpr& expr,
                                   const TransitionMatrix& g,
                                   const PhaseMatrix* theta = nullptr) {
  if (dsl_detail::needs_complex(expr, theta != nullptr)) {
    return dsl_detail::bind_as<Complex>(expr, g, theta);
  }
  return dsl_detail::bind_as<Real>(expr, g, theta);
}

}  // namespace szwalk
