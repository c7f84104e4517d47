#include "gsmpdist/logic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>
#include <vector>

#include "gsmpdist/j2.hpp"
#include "gsmpdist/rng.hpp"

namespace gsmpdist {

namespace {

void need(bool ok, const char* what) {
  if (!ok) throw Error(std::string("expression: ") + what);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

FPtr f_one() { return std::make_shared<FExpr>(); }

FPtr f_prop(std::string prop) {
  need(!prop.empty(), "proposition name must be nonempty");
  auto e = std::make_shared<FExpr>();
  e->kind = FExpr::Kind::prop;
  e->prop = std::move(prop);
  return e;
}

FPtr f_val() {
  auto e = std::make_shared<FExpr>();
  e->kind = FExpr::Kind::val;
  return e;
}

FPtr f_min(FPtr x, FPtr y) {
  need(x && y, "min needs two children");
  auto e = std::make_shared<FExpr>();
  e->kind = FExpr::Kind::min;
  e->f1 = std::move(x);
  e->f2 = std::move(y);
  return e;
}

FPtr f_clamp(double a, double b, FPtr x) {
  need(std::abs(a) <= 1.0, "clamp slope must satisfy |a| <= 1");
  need(std::isfinite(a) && std::isfinite(b), "clamp coefficients must be finite");
  need(static_cast<bool>(x), "clamp needs a child");
  auto e = std::make_shared<FExpr>();
  e->kind = FExpr::Kind::clamp;
  e->a = a;
  e->b = b;
  e->f1 = std::move(x);
  return e;
}

FPtr f_integral(GPtr g) {
  need(static_cast<bool>(g), "int needs a child");
  auto e = std::make_shared<FExpr>();
  e->kind = FExpr::Kind::integral;
  e->g = std::move(g);
  return e;
}

GPtr g_smooth(FPtr f, double t) {
  need(static_cast<bool>(f), "L needs a child");
  need(std::isfinite(t) && t >= 0.0, "L time must be finite and >= 0");
  auto e = std::make_shared<GExpr>();
  e->kind = GExpr::Kind::smooth;
  e->f = std::move(f);
  e->t = t;
  return e;
}

GPtr g_min(GPtr x, GPtr y) {
  need(x && y, "min needs two children");
  auto e = std::make_shared<GExpr>();
  e->kind = GExpr::Kind::min;
  e->g1 = std::move(x);
  e->g2 = std::move(y);
  return e;
}

GPtr g_clamp(double a, double b, GPtr x) {
  need(std::abs(a) <= 1.0, "clamp slope must satisfy |a| <= 1");
  need(std::isfinite(a) && std::isfinite(b), "clamp coefficients must be finite");
  need(static_cast<bool>(x), "clamp needs a child");
  auto e = std::make_shared<GExpr>();
  e->kind = GExpr::Kind::clamp;
  e->a = a;
  e->b = b;
  e->g1 = std::move(x);
  return e;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum class Kind { lparen, rparen, atom, string, number, end };
  Kind kind = Kind::end;
  std::string text;
  double number = 0.0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  [[noreturn]] void fail(const Token& at, const std::string& what) const {
    throw ParseError("line " + std::to_string(at.line) + ", col " +
                     std::to_string(at.col) + ": " + what);
  }

  Token next() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == ';') {  // comment to end of line
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= s_.size()) return t;
    const char c = s_[pos_];
    if (c == '(' || c == ')') {
      t.kind = c == '(' ? Token::Kind::lparen : Token::Kind::rparen;
      t.text = c;
      advance(1);
      return t;
    }
    if (c == '"') {
      advance(1);
      std::string out;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        char d = s_[pos_];
        if (d == '\\' && pos_ + 1 < s_.size()) {
          advance(1);
          d = s_[pos_];
        }
        if (d == '\n') fail(t, "unterminated string");
        out.push_back(d);
        advance(1);
      }
      if (pos_ >= s_.size()) fail(t, "unterminated string");
      advance(1);
      t.kind = Token::Kind::string;
      t.text = std::move(out);
      return t;
    }
    std::size_t end = pos_;
    while (end < s_.size() && !std::isspace(static_cast<unsigned char>(s_[end])) &&
           s_[end] != '(' && s_[end] != ')' && s_[end] != '"' && s_[end] != ';')
      ++end;
    t.text = s_.substr(pos_, end - pos_);
    advance(end - pos_);
    double v = 0.0;
    const auto [p, ec] =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec == std::errc() && p == t.text.data() + t.text.size()) {
      t.kind = Token::Kind::number;
      t.number = v;
    } else {
      t.kind = Token::Kind::atom;
    }
    return t;
  }

 private:
  void advance(std::size_t n) {
    pos_ += n;
    col_ += static_cast<int>(n);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { cur_ = lex_.next(); }

  FPtr parse_f_whole() {
    FPtr e = parse_f();
    expect_end();
    return e;
  }

  GPtr parse_g_whole() {
    GPtr e = parse_g();
    expect_end();
    return e;
  }

 private:
  Token take() {
    Token t = cur_;
    cur_ = lex_.next();
    return t;
  }

  void expect_end() {
    if (cur_.kind != Token::Kind::end)
      lex_.fail(cur_, "unexpected trailing input '" + cur_.text + "'");
  }

  Token expect(Token::Kind k, const char* what) {
    if (cur_.kind != k) lex_.fail(cur_, std::string("expected ") + what);
    return take();
  }

  double expect_number(const char* what) {
    if (cur_.kind != Token::Kind::number)
      lex_.fail(cur_, std::string("expected ") + what);
    return take().number;
  }

  // Head atom of a parenthesized form, already past the '('.
  std::string head() {
    if (cur_.kind != Token::Kind::atom)
      lex_.fail(cur_, "expected an operator name after '('");
    return take().text;
  }

  FPtr parse_f() {
    if (cur_.kind == Token::Kind::number && cur_.number == 1.0) {
      take();
      return f_one();
    }
    const Token open = cur_;
    expect(Token::Kind::lparen, "an F-expression: 1, (prop ...), (val), "
                                "(min ...), (clamp ...) or (int ...)");
    const std::string op = head();
    FPtr out;
    if (op == "one") {
      out = f_one();
    } else if (op == "val") {
      out = f_val();
    } else if (op == "prop") {
      if (cur_.kind != Token::Kind::string)
        lex_.fail(cur_, "expected a quoted proposition name");
      out = f_prop(take().text);
    } else if (op == "min") {
      FPtr x = parse_f();
      FPtr y = parse_f();
      out = f_min(std::move(x), std::move(y));
    } else if (op == "clamp") {
      const Token at = cur_;
      const double a = expect_number("clamp slope a");
      const double b = expect_number("clamp offset b");
      if (std::abs(a) > 1.0) lex_.fail(at, "clamp slope must satisfy |a| <= 1");
      out = f_clamp(a, b, parse_f());
    } else if (op == "int") {
      out = f_integral(parse_g());
    } else {
      lex_.fail(open, "unknown F operator '" + op + "'");
    }
    expect(Token::Kind::rparen, "')'");
    return out;
  }

  GPtr parse_g() {
    const Token open = cur_;
    expect(Token::Kind::lparen,
           "a G-expression: (L ...), (min ...) or (clamp ...)");
    const std::string op = head();
    GPtr out;
    if (op == "L") {
      FPtr f = parse_f();
      const Token at = cur_;
      const double t = expect_number("the L query time");
      if (t < 0.0) lex_.fail(at, "L time must be >= 0");
      out = g_smooth(std::move(f), t);
    } else if (op == "min") {
      GPtr x = parse_g();
      GPtr y = parse_g();
      out = g_min(std::move(x), std::move(y));
    } else if (op == "clamp") {
      const Token at = cur_;
      const double a = expect_number("clamp slope a");
      const double b = expect_number("clamp offset b");
      if (std::abs(a) > 1.0) lex_.fail(at, "clamp slope must satisfy |a| <= 1");
      out = g_clamp(a, b, parse_g());
    } else {
      lex_.fail(open, "unknown G operator '" + op + "'");
    }
    expect(Token::Kind::rparen, "')'");
    return out;
  }

  Lexer lex_;
  Token cur_;
};

std::string fmt_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

FPtr parse_f(const std::string& text) { return Parser(text).parse_f_whole(); }
GPtr parse_g(const std::string& text) { return Parser(text).parse_g_whole(); }

std::string to_string(const FExpr& e) {
  switch (e.kind) {
    case FExpr::Kind::one:
      return "1";
    case FExpr::Kind::prop:
      return "(prop " + quote(e.prop) + ")";
    case FExpr::Kind::val:
      return "(val)";
    case FExpr::Kind::min:
      return "(min " + to_string(*e.f1) + " " + to_string(*e.f2) + ")";
    case FExpr::Kind::clamp:
      return "(clamp " + fmt_number(e.a) + " " + fmt_number(e.b) + " " +
             to_string(*e.f1) + ")";
    case FExpr::Kind::integral:
      return "(int " + to_string(*e.g) + ")";
  }
  throw Error("expression: corrupt F node");
}

std::string to_string(const GExpr& e) {
  switch (e.kind) {
    case GExpr::Kind::smooth:
      return "(L " + to_string(*e.f) + " " + fmt_number(e.t) + ")";
    case GExpr::Kind::min:
      return "(min " + to_string(*e.g1) + " " + to_string(*e.g2) + ")";
    case GExpr::Kind::clamp:
      return "(clamp " + fmt_number(e.a) + " " + fmt_number(e.b) + " " +
             to_string(*e.g1) + ")";
  }
  throw Error("expression: corrupt G node");
}

double max_time(const FExpr& e) {
  switch (e.kind) {
    case FExpr::Kind::one:
    case FExpr::Kind::prop:
    case FExpr::Kind::val:
      return 0.0;
    case FExpr::Kind::min:
      return std::max(max_time(*e.f1), max_time(*e.f2));
    case FExpr::Kind::clamp:
      return max_time(*e.f1);
    case FExpr::Kind::integral:
      return max_time(*e.g);
  }
  throw Error("expression: corrupt F node");
}

double max_time(const GExpr& e) {
  switch (e.kind) {
    case GExpr::Kind::smooth:
      return std::max(e.t, max_time(*e.f));
    case GExpr::Kind::min:
      return std::max(max_time(*e.g1), max_time(*e.g2));
    case GExpr::Kind::clamp:
      return max_time(*e.g1);
  }
  throw Error("expression: corrupt G node");
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Model-mode evaluator. Integrals sample their own traces; trace i always
// uses stream(seed, {i}), so two evaluations at different states stay
// coupled sample-by-sample (the same discipline as the metric estimator).
struct Evaluator {
  const GsmpModel& model;
  const RunConfig& cfg;

  double f_at(const FExpr& e, const GeneralizedState& gs, bool inner) const {
    switch (e.kind) {
      case FExpr::Kind::one:
        return 1.0;
      case FExpr::Kind::prop:
        return has_prop(model, gs.state, e.prop) ? 1.0 : 0.0;
      case FExpr::Kind::val:
        throw Error("expression: (val) is only meaningful on scalar traces");
      case FExpr::Kind::min:
        return std::min(f_at(*e.f1, gs, inner), f_at(*e.f2, gs, inner));
      case FExpr::Kind::clamp:
        return clamp01(e.a * f_at(*e.f1, gs, inner) + e.b);
      case FExpr::Kind::integral: {
        const int n = inner ? cfg.inner_samples : cfg.samples;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
          Rng rng = stream(cfg.seed, {static_cast<std::uint64_t>(i)});
          const TimedTrace trace = sample_trace(model, gs, cfg.horizon, rng,
                                                cfg.zeno_guard, cfg.retry_budget);
          sum += g_on(*e.g, trace, build_graph(model, trace, cfg.grid));
        }
        return clamp01(cfg.k * sum / n);
      }
    }
    throw Error("expression: corrupt F node");
  }

  double g_on(const GExpr& e, const TimedTrace& trace, const TraceGraph& graph) const {
    switch (e.kind) {
      case GExpr::Kind::smooth: {
        // sup over graph points of F - |t' - t|, seeded with the exact query
        // point so L(1, t) is exactly 1. Scanning outward from t lets the
        // 1 - |t' - t| ceiling prune once the running best beats it.
        double best = 0.0;  // the true sup is >= F(f(t)) >= 0
        if (e.t < trace.horizon)
          best = f_at(*e.f, trace_at(model, trace, e.t), true);
        const auto& ts = graph.times;
        const int n = static_cast<int>(ts.size());
        const auto it = std::lower_bound(ts.begin(), ts.end(), e.t);
        int l = static_cast<int>(it - ts.begin()) - 1, r = l + 1;
        while (true) {
          const double dl = l >= 0 ? e.t - ts[l] : 2.0;
          const double dr = r < n ? ts[r] - e.t : 2.0;
          const double d = std::min(dl, dr);
          if (1.0 - d <= best) break;
          const int idx = dl <= dr ? l-- : r++;
          best = std::max(best, f_at(*e.f, graph.points[idx], true) - d);
        }
        return clamp01(best);
      }
      case GExpr::Kind::min:
        return std::min(g_on(*e.g1, trace, graph), g_on(*e.g2, trace, graph));
      case GExpr::Kind::clamp:
        return clamp01(e.a * g_on(*e.g1, trace, graph) + e.b);
    }
    throw Error("expression: corrupt G node");
  }

  // Same scan with a caller-provided valuation instead of f_at.
  double g_custom(const GExpr& e, const TimedTrace& trace, const TraceGraph& graph,
                  const PointValuation& valuation) const {
    switch (e.kind) {
      case GExpr::Kind::smooth: {
        double best = 0.0;
        if (e.t < trace.horizon)
          best = valuation(*e.f, trace_at(model, trace, e.t));
        const auto& ts = graph.times;
        const int n = static_cast<int>(ts.size());
        const auto it = std::lower_bound(ts.begin(), ts.end(), e.t);
        int l = static_cast<int>(it - ts.begin()) - 1, r = l + 1;
        while (true) {
          const double dl = l >= 0 ? e.t - ts[l] : 2.0;
          const double dr = r < n ? ts[r] - e.t : 2.0;
          const double d = std::min(dl, dr);
          if (1.0 - d <= best) break;
          const int idx = dl <= dr ? l-- : r++;
          best = std::max(best, valuation(*e.f, graph.points[idx]) - d);
        }
        return clamp01(best);
      }
      case GExpr::Kind::min:
        return std::min(g_custom(*e.g1, trace, graph, valuation),
                        g_custom(*e.g2, trace, graph, valuation));
      case GExpr::Kind::clamp:
        return clamp01(e.a * g_custom(*e.g1, trace, graph, valuation) + e.b);
    }
    throw Error("expression: corrupt G node");
  }
};

void check_horizon(double maxt, const RunConfig& cfg) {
  if (maxt > cfg.horizon)
    throw HorizonTooShort("expression queries time " + std::to_string(maxt) +
                          " beyond horizon " + std::to_string(cfg.horizon));
}

}  // namespace

double eval_f(const FExpr& e, const GsmpModel& model, const GeneralizedState& gs,
              const RunConfig& cfg) {
  cfg.check();
  check_horizon(max_time(e), cfg);
  if (gs.state < 0 || gs.state >= static_cast<int>(model.states.size()))
    throw Error("eval_f: state index out of range");
  return Evaluator{model, cfg}.f_at(e, gs, false);
}

double eval_g(const GExpr& e, const GsmpModel& model, const TimedTrace& trace,
              const PointValuation& valuation, double grid) {
  if (!(grid > 0)) throw Error("eval_g: grid must be positive");
  RunConfig dummy;  // g_custom never samples; only the model ref matters
  const TraceGraph graph = build_graph(model, trace, grid);
  return Evaluator{model, dummy}.g_custom(e, trace, graph, valuation);
}

double eval_g(const GExpr& e, const GsmpModel& model, const TimedTrace& trace,
              const RunConfig& cfg) {
  cfg.check();
  check_horizon(max_time(e), cfg);
  const TraceGraph graph = build_graph(model, trace, cfg.grid);
  return Evaluator{model, cfg}.g_on(e, trace, graph);
}

// ---------------------------------------------------------------------------
// Scalar preview mode

namespace {

double scalar_f(const FExpr& e, double v) {
  switch (e.kind) {
    case FExpr::Kind::one:
      return 1.0;
    case FExpr::Kind::val:
      return clamp01(v);
    case FExpr::Kind::min:
      return std::min(scalar_f(*e.f1, v), scalar_f(*e.f2, v));
    case FExpr::Kind::clamp:
      return clamp01(e.a * scalar_f(*e.f1, v) + e.b);
    case FExpr::Kind::prop:
    case FExpr::Kind::integral:
      throw Error("expression: only val/1/min/clamp F-leaves are valid on "
                  "scalar traces");
  }
  throw Error("expression: corrupt F node");
}

double scalar_g(const GExpr& e, const ScalarTrace& trace, const ScalarGraph& graph) {
  switch (e.kind) {
    case GExpr::Kind::smooth: {
      double best = 0.0;
      if (e.t < trace.horizon) best = scalar_f(*e.f, scalar_at(trace, e.t));
      for (std::size_t i = 0; i < graph.times.size(); ++i)
        best = std::max(best,
                        scalar_f(*e.f, graph.values[i]) -
                            std::abs(graph.times[i] - e.t));
      return clamp01(best);
    }
    case GExpr::Kind::min:
      return std::min(scalar_g(*e.g1, trace, graph),
                      scalar_g(*e.g2, trace, graph));
    case GExpr::Kind::clamp:
      return clamp01(e.a * scalar_g(*e.g1, trace, graph) + e.b);
  }
  throw Error("expression: corrupt G node");
}

}  // namespace

double eval_g_scalar(const GExpr& e, const ScalarTrace& trace, double grid) {
  const ScalarGraph graph = build_scalar_graph(trace, grid);
  return scalar_g(e, trace, graph);
}

// ---------------------------------------------------------------------------
// Family search

namespace {

struct Generator {
  const std::vector<std::string>& props;
  double horizon;
  bool allow_nested;

  FPtr gen_f(Rng& rng, int depth, bool inside_integral) const {
    const int leaf = props.empty() ? 0 : 1;
    // 0 one, 1 prop, 2 min, 3 clamp, 4 integral
    int choice;
    if (depth <= 0) {
      choice = static_cast<int>(rng.next() % (1 + leaf));
    } else {
      const bool can_int = allow_nested || !inside_integral;
      choice = static_cast<int>(rng.next() % (can_int ? 5 : 4));
      if (choice == 1 && !leaf) choice = 0;
    }
    switch (choice) {
      case 0:
        return f_one();
      case 1:
        return f_prop(props[rng.next() % props.size()]);
      case 2:
        return f_min(gen_f(rng, depth - 1, inside_integral),
                     gen_f(rng, depth - 1, inside_integral));
      case 3: {
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-0.5, 1.0);
        return f_clamp(a, b, gen_f(rng, depth - 1, inside_integral));
      }
      default:
        return f_integral(gen_g(rng, depth - 1));
    }
  }

  GPtr gen_g(Rng& rng, int depth) const {
    const int choice =
        depth <= 0 ? 0 : static_cast<int>(rng.next() % 3);  // 0 L, 1 min, 2 clamp
    switch (choice) {
      case 0:
        return g_smooth(gen_f(rng, depth, true),
                        rng.uniform(0.0, 0.8 * horizon));
      case 1:
        return g_min(gen_g(rng, depth - 1), gen_g(rng, depth - 1));
      default: {
        const double a = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-0.5, 1.0);
        return g_clamp(a, b, gen_g(rng, depth - 1));
      }
    }
  }
};

// Structure-preserving copy with every clamp (a, b) and L time perturbed.
FPtr perturb_f(const FExpr& e, Rng& rng, double step, double horizon);

GPtr perturb_g(const GExpr& e, Rng& rng, double step, double horizon) {
  switch (e.kind) {
    case GExpr::Kind::smooth: {
      double t = e.t + rng.uniform(-step, step) * horizon;
      t = std::min(std::max(t, 0.0), horizon);
      return g_smooth(perturb_f(*e.f, rng, step, horizon), t);
    }
    case GExpr::Kind::min:
      return g_min(perturb_g(*e.g1, rng, step, horizon),
                   perturb_g(*e.g2, rng, step, horizon));
    case GExpr::Kind::clamp: {
      const double a =
          std::min(1.0, std::max(-1.0, e.a + rng.uniform(-step, step)));
      const double b = e.b + rng.uniform(-step, step);
      return g_clamp(a, b, perturb_g(*e.g1, rng, step, horizon));
    }
  }
  throw Error("expression: corrupt G node");
}

FPtr perturb_f(const FExpr& e, Rng& rng, double step, double horizon) {
  switch (e.kind) {
    case FExpr::Kind::one:
    case FExpr::Kind::prop:
    case FExpr::Kind::val:
      return std::make_shared<FExpr>(e);
    case FExpr::Kind::min:
      return f_min(perturb_f(*e.f1, rng, step, horizon),
                   perturb_f(*e.f2, rng, step, horizon));
    case FExpr::Kind::clamp: {
      const double a =
          std::min(1.0, std::max(-1.0, e.a + rng.uniform(-step, step)));
      const double b = e.b + rng.uniform(-step, step);
      return f_clamp(a, b, perturb_f(*e.f1, rng, step, horizon));
    }
    case FExpr::Kind::integral:
      return f_integral(perturb_g(*e.g, rng, step, horizon));
  }
  throw Error("expression: corrupt F node");
}

}  // namespace

DkEstimate dk_estimate(const GsmpModel& model, const GeneralizedState& gs1,
                       const GeneralizedState& gs2, const DkFamily& family,
                       const RunConfig& cfg) {
  cfg.check();
  if (family.count < 0 || family.max_depth < 0 || family.local_iters < 0)
    throw Error("dk_estimate: family sizes must be >= 0");

  std::vector<std::string> props;
  for (const StateRecord& s : model.states)
    for (const std::string& p : s.props)
      if (std::find(props.begin(), props.end(), p) == props.end())
        props.push_back(p);
  std::sort(props.begin(), props.end());

  Evaluator ev{model, cfg};
  FPtr incumbent;
  double inc_val = -1.0;
  auto consider = [&](FPtr e) {
    if (max_time(*e) > cfg.horizon) return;  // family stays inside the horizon
    const double gap =
        std::abs(ev.f_at(*e, gs1, false) - ev.f_at(*e, gs2, false));
    if (gap > inc_val) {
      inc_val = gap;
      incumbent = std::move(e);
    }
  };

  // Deterministic seeds first: the constant, every bare proposition (a
  // prop-differing pair is separated at exactly 1 by one of these), and
  // quarter-horizon smoothing probes per proposition, which already catch
  // plain time shifts without any luck in the random draw.
  consider(f_one());
  for (const std::string& p : props) {
    consider(f_prop(p));
    for (int q = 0; q < 4; ++q)
      consider(f_integral(g_smooth(f_prop(p), 0.25 * q * cfg.horizon)));
  }

  const Generator gen{props, cfg.horizon, family.allow_nested};
  for (int i = 0; i < family.count; ++i) {
    Rng rng = stream(cfg.seed, {0xd1ULL, static_cast<std::uint64_t>(i)});
    consider(gen.gen_f(rng, family.max_depth, false));
  }

  // Local search over the incumbent's continuous parameters with a
  // shrinking step; improvements replace the incumbent.
  for (int it = 0; incumbent && it < family.local_iters; ++it) {
    Rng rng = stream(cfg.seed, {0xd2ULL, static_cast<std::uint64_t>(it)});
    const double step = 0.3 * std::pow(0.9, it);
    consider(perturb_f(*incumbent, rng, step, cfg.horizon));
  }

  DkEstimate best;
  if (incumbent) {
    best.value = std::max(0.0, inc_val);
    best.best = to_string(*incumbent);
  }
  return best;
}

}  // namespace gsmpdist
