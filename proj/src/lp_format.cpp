#include "pwlmilp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pwlmilp::milp {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_terms(std::ostream& os, const MilpModel& m,
                 const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  for (auto [vi, coef] : terms) {
    if (first) {
      if (coef < 0.0) os << "- ";
      first = false;
    } else {
      os << (coef < 0.0 ? " - " : " + ");
    }
    os << fmt17(std::abs(coef)) << ' ' << m.vars[vi].name;
  }
}

}  // namespace

std::string write_lp(const MilpModel& m) {
  std::ostringstream os;
  os << (m.obj.sense == ObjSense::Minimize ? "Minimize" : "Maximize") << '\n';
  os << " obj: ";
  if (m.obj.terms.empty()) {
    os << "0 " << (m.vars.empty() ? "x0" : m.vars.front().name);
  } else {
    write_terms(os, m, m.obj.terms);
  }
  os << '\n';
  os << "Subject To\n";
  for (const auto& c : m.cons) {
    os << ' ' << c.name << ": ";
    write_terms(os, m, c.terms);
    switch (c.sense) {
      case Sense::LE: os << " <= "; break;
      case Sense::GE: os << " >= "; break;
      case Sense::EQ: os << " = "; break;
    }
    os << fmt17(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.kind == VarKind::Binary) continue;
    if (v.lb == -std::numeric_limits<double>::infinity() &&
        v.ub == std::numeric_limits<double>::infinity()) {
      os << ' ' << v.name << " free\n";
    } else {
      os << ' ' << fmt17(v.lb) << " <= " << v.name << " <= " << fmt17(v.ub)
         << '\n';
    }
  }
  bool any_bin = false;
  for (const auto& v : m.vars)
    if (v.kind == VarKind::Binary) any_bin = true;
  if (any_bin) {
    os << "Binaries\n";
    for (const auto& v : m.vars)
      if (v.kind == VarKind::Binary) os << ' ' << v.name << '\n';
  }
  os << "End\n";
  return os.str();
}

void write_lp_file(const MilpModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << write_lp(m);
}

namespace {

struct Token {
  enum Kind { Word, Number, Op, Colon, End } kind;
  std::string text;
  double value = 0.0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\\') {  // comment to end of line
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= s_.size()) return {Token::End, ""};
    char c = s_[pos_];
    if (c == ':') {
      ++pos_;
      return {Token::Colon, ":"};
    }
    if (c == '+' || c == '-') {
      ++pos_;
      return {Token::Op, std::string(1, c)};
    }
    if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '=') {
        op += '=';
        ++pos_;
      }
      return {Token::Op, op};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      std::string text = s_.substr(pos_, used);
      pos_ += used;
      return {Token::Number, text, v};
    }
    // Identifier (LP names may hold letters, digits, _ and a few marks).
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != ':' && s_[pos_] != '+' && s_[pos_] != '-' &&
           s_[pos_] != '<' && s_[pos_] != '>' && s_[pos_] != '=')
      ++pos_;
    return {Token::Word, s_.substr(start, pos_ - start)};
  }

  Token peek() {
    std::size_t save = pos_;
    Token t = next();
    pos_ = save;
    return t;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

bool word_is(const Token& t, const char* kw) {
  if (t.kind != Token::Word) return false;
  std::string a = t.text;
  for (auto& ch : a) ch = static_cast<char>(std::tolower(ch));
  return a == kw;
}

}  // namespace

MilpModel parse_lp(const std::string& text) {
  Lexer lex(text);
  MilpModel m;
  std::map<std::string, int> index;
  auto ensure_var = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = m.add_var(name, VarKind::Continuous, 0.0,
                       std::numeric_limits<double>::infinity());
    index[name] = id;
    return id;
  };

  Token t = lex.next();
  if (word_is(t, "minimize") || word_is(t, "min")) {
    m.obj.sense = ObjSense::Minimize;
  } else if (word_is(t, "maximize") || word_is(t, "max")) {
    m.obj.sense = ObjSense::Maximize;
  } else {
    throw Error(ErrorCode::ParseError, "LP must start with Minimize/Maximize");
  }

  // Reads "name:" if present, then a linear expression until a sentinel
  // keyword or relational operator.
  auto parse_expr = [&](std::vector<std::pair<int, double>>& terms,
                        std::string* stop_op) -> std::string {
    double sign = 1.0;
    bool have_coef = false;
    double coef = 1.0;
    while (true) {
      Token tok = lex.peek();
      if (tok.kind == Token::End) return "";
      if (tok.kind == Token::Op) {
        if (tok.text == "+" || tok.text == "-") {
          lex.next();
          sign = tok.text == "-" ? -sign : sign;
          continue;
        }
        if (stop_op) {
          lex.next();
          *stop_op = tok.text;
          return "";
        }
        throw Error(ErrorCode::ParseError,
                    "unexpected operator " + tok.text + " in expression");
      }
      if (tok.kind == Token::Number) {
        lex.next();
        coef = tok.value;
        have_coef = true;
        continue;
      }
      if (tok.kind == Token::Word) {
        if (word_is(tok, "subject") || word_is(tok, "st") ||
            word_is(tok, "bounds") || word_is(tok, "binaries") ||
            word_is(tok, "binary") || word_is(tok, "end") ||
            word_is(tok, "generals") || word_is(tok, "free")) {
          return tok.text;
        }
        lex.next();
        if (lex.peek().kind == Token::Colon) {
          // Oops: this was a row label, not a variable.
          lex.next();
          return "label:" + tok.text;
        }
        if (have_coef || sign < 0) {
          terms.emplace_back(ensure_var(tok.text), sign * coef);
        } else {
          terms.emplace_back(ensure_var(tok.text), 1.0);
        }
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
        continue;
      }
      throw Error(ErrorCode::ParseError, "unexpected token in expression");
    }
  };

  // Objective: optional label, then expression.
  {
    Token tok = lex.peek();
    if (tok.kind == Token::Word) {
      lex.next();
      Token after = lex.peek();
      if (after.kind == Token::Colon) {
        lex.next();  // swallow label
      } else {
        // First objective term was a bare variable; emulate push-back.
        if (!(word_is(tok, "subject") || word_is(tok, "st")))
          m.obj.terms.emplace_back(ensure_var(tok.text), 1.0);
      }
    }
    std::string stopped = parse_expr(m.obj.terms, nullptr);
    // Drop explicit zero-coefficient placeholder terms.
    std::vector<std::pair<int, double>> cleaned;
    for (auto [vi, c] : m.obj.terms)
      if (c != 0.0) cleaned.emplace_back(vi, c);
    m.obj.terms = std::move(cleaned);
    if (!word_is({Token::Word, stopped}, "subject") && !word_is({Token::Word, stopped}, "st"))
      throw Error(ErrorCode::ParseError, "expected Subject To");
    lex.next();  // "Subject"
    Token to = lex.peek();
    if (word_is(to, "to")) lex.next();
  }

  // Constraints until Bounds/Binaries/End.
  std::string carried_label;
  while (true) {
    Token tok = lex.peek();
    if (tok.kind == Token::End)
      throw Error(ErrorCode::ParseError, "unexpected end before End");
    if (word_is(tok, "bounds") || word_is(tok, "binaries") ||
        word_is(tok, "binary") || word_is(tok, "end"))
      break;
    Constraint c;
    if (!carried_label.empty()) {
      c.name = carried_label;
      carried_label.clear();
    } else {
      Token name = lex.next();
      if (name.kind != Token::Word)
        throw Error(ErrorCode::ParseError, "expected constraint name");
      Token colon = lex.next();
      if (colon.kind != Token::Colon)
        throw Error(ErrorCode::ParseError, "expected ':' after row name");
      c.name = name.text;
    }
    std::string op;
    std::string stopped = parse_expr(c.terms, &op);
    if (stopped.rfind("label:", 0) == 0) {
      throw Error(ErrorCode::ParseError,
                  "row " + c.name + " has no relational operator");
    }
    if (op == "<=" || op == "<") c.sense = Sense::LE;
    else if (op == ">=" || op == ">") c.sense = Sense::GE;
    else if (op == "=") c.sense = Sense::EQ;
    else
      throw Error(ErrorCode::ParseError, "missing relation in row " + c.name);
    Token rhs = lex.next();
    double sign = 1.0;
    if (rhs.kind == Token::Op && (rhs.text == "-" || rhs.text == "+")) {
      sign = rhs.text == "-" ? -1.0 : 1.0;
      rhs = lex.next();
    }
    if (rhs.kind != Token::Number)
      throw Error(ErrorCode::ParseError, "missing rhs in row " + c.name);
    c.rhs = sign * rhs.value;
    m.cons.push_back(std::move(c));
  }

  // Bounds.
  Token section = lex.next();
  if (word_is(section, "bounds")) {
    while (true) {
      Token tok = lex.peek();
      if (word_is(tok, "binaries") || word_is(tok, "binary") ||
          word_is(tok, "end") || tok.kind == Token::End)
        break;
      // Forms: "lb <= name <= ub" | "name free" | "name <= ub" | "name >= lb"
      double sign = 1.0;
      Token first = lex.next();
      if (first.kind == Token::Op && (first.text == "-" || first.text == "+")) {
        sign = first.text == "-" ? -1.0 : 1.0;
        first = lex.next();
      }
      if (first.kind == Token::Number) {
        double lb = sign * first.value;
        Token le = lex.next();
        Token namet = lex.next();
        Token le2 = lex.next();
        Token ubs = lex.next();
        double usign = 1.0;
        if (ubs.kind == Token::Op && (ubs.text == "-" || ubs.text == "+")) {
          usign = ubs.text == "-" ? -1.0 : 1.0;
          ubs = lex.next();
        }
        if (le.text != "<=" || le2.text != "<=" || namet.kind != Token::Word ||
            ubs.kind != Token::Number)
          throw Error(ErrorCode::ParseError, "malformed bound line");
        int vi = ensure_var(namet.text);
        m.vars[vi].lb = lb;
        m.vars[vi].ub = usign * ubs.value;
      } else if (first.kind == Token::Word) {
        int vi = ensure_var(first.text);
        Token op = lex.next();
        if (word_is(op, "free")) {
          m.vars[vi].lb = -std::numeric_limits<double>::infinity();
          m.vars[vi].ub = std::numeric_limits<double>::infinity();
        } else if (op.kind == Token::Op && (op.text == "<=" || op.text == ">=")) {
          Token val = lex.next();
          double vsign = 1.0;
          if (val.kind == Token::Op && (val.text == "-" || val.text == "+")) {
            vsign = val.text == "-" ? -1.0 : 1.0;
            val = lex.next();
          }
          if (val.kind != Token::Number)
            throw Error(ErrorCode::ParseError, "malformed bound line");
          if (op.text == "<=")
            m.vars[vi].ub = vsign * val.value;
          else
            m.vars[vi].lb = vsign * val.value;
        } else {
          throw Error(ErrorCode::ParseError, "malformed bound line");
        }
      } else {
        throw Error(ErrorCode::ParseError, "malformed Bounds section");
      }
    }
    section = lex.next();
  }

  if (word_is(section, "binaries") || word_is(section, "binary")) {
    while (true) {
      Token tok = lex.next();
      if (word_is(tok, "end") || tok.kind == Token::End) {
        section = tok;
        break;
      }
      if (tok.kind != Token::Word)
        throw Error(ErrorCode::ParseError, "malformed Binaries section");
      int vi = ensure_var(tok.text);
      m.vars[vi].kind = VarKind::Binary;
      m.vars[vi].lb = 0.0;
      m.vars[vi].ub = 1.0;
    }
  }
  if (!word_is(section, "end"))
    throw Error(ErrorCode::ParseError, "missing End");
  return m;
}

MilpModel load_lp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open LP file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lp(ss.str());
}

}  // namespace pwlmilp::milp
