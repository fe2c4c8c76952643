#pragma once

// Test-side LP reader: validates the CPLEX LP text grammar the exporter
// targets and reconstructs the program's coefficients so tests can
// optimize the parsed file independently of the exporter.

#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lp_test {

struct Term {
  double coef = 1.0;
  std::string var;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  std::string op;  // "<=", ">=", "="
  double rhs = 0.0;
};

struct Program {
  std::vector<Term> objective;
  double objective_constant = 0.0;
  std::vector<Constraint> constraints;
  std::map<std::string, std::pair<double, double>> bounds;
  std::set<std::string> binaries;
};

namespace detail {

inline bool is_number_start(const std::string& tok) {
  return !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.');
}

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\') {  // comment to end of line
      flush();
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (c == '+' || c == '-' || c == ':') {
      // part of an exponent like 1e+02?
      if ((c == '+' || c == '-') && !cur.empty() && (cur.back() == 'e' || cur.back() == 'E') &&
          is_number_start(cur)) {
        cur += c;
        continue;
      }
      flush();
      tokens.emplace_back(1, c);
      continue;
    }
    if (c == '<' || c == '>' || c == '=') {
      flush();
      std::string op(1, c);
      if (i + 1 < text.size() && text[i + 1] == '=') {
        op += '=';
        ++i;
      }
      tokens.push_back(op);
      continue;
    }
    cur += c;
  }
  flush();
  return tokens;
}

// expression := [+-] item { (+|-) item }, item := number | [number] name
inline void parse_expression(const std::vector<std::string>& tokens, size_t& pos, size_t end,
                             std::vector<Term>& terms, double& constant) {
  double sign = 1.0;
  bool expect_item = true;
  while (pos < end) {
    const std::string& tok = tokens[pos];
    if (tok == "+" || tok == "-") {
      if (expect_item && !(terms.empty() && constant == 0.0))
        throw std::runtime_error("lp: dangling sign in expression");
      sign = tok == "-" ? -1.0 : 1.0;
      expect_item = true;
      ++pos;
      continue;
    }
    double coef = sign;
    bool had_number = false;
    if (is_number_start(tok)) {
      coef = sign * std::stod(tok);
      had_number = true;
      ++pos;
    }
    if (pos < end && !is_number_start(tokens[pos]) && tokens[pos] != "+" && tokens[pos] != "-" &&
        tokens[pos] != "<=" && tokens[pos] != ">=" && tokens[pos] != "=") {
      terms.push_back({coef, tokens[pos]});
      ++pos;
    } else if (had_number) {
      constant += coef;
    } else {
      throw std::runtime_error("lp: expected a term at token '" + tok + "'");
    }
    sign = 1.0;
    expect_item = false;
  }
  if (expect_item && !(terms.empty() && constant == 0.0)) throw std::runtime_error("lp: trailing operator");
}

inline size_t find_relation(const std::vector<std::string>& tokens, size_t from) {
  for (size_t i = from; i < tokens.size(); ++i)
    if (tokens[i] == "<=" || tokens[i] == ">=" || tokens[i] == "=") return i;
  return tokens.size();
}

inline bool is_keyword(const std::string& tok, const char* a, const char* b = nullptr) {
  return tok == a || (b && tok == b);
}

}  // namespace detail

// Parses the LP text; throws std::runtime_error on any grammar violation.
inline Program parse(const std::string& text) {
  using namespace detail;
  const std::vector<std::string> tokens = tokenize(text);
  size_t pos = 0;
  auto need = [&](const char* what) {
    if (pos >= tokens.size()) throw std::runtime_error(std::string("lp: unexpected end, wanted ") + what);
    return tokens[pos];
  };

  Program prog;
  if (!is_keyword(need("Minimize"), "Minimize", "MINIMIZE")) throw std::runtime_error("lp: expected Minimize");
  ++pos;
  // objective: [name :] expression, up to "Subject"
  size_t section_end = pos;
  while (section_end < tokens.size() && !is_keyword(tokens[section_end], "Subject", "SUBJECT")) ++section_end;
  if (pos + 1 < section_end && tokens[pos + 1] == ":") pos += 2;
  parse_expression(tokens, pos, section_end, prog.objective, prog.objective_constant);

  if (!is_keyword(need("Subject To"), "Subject")) throw std::runtime_error("lp: expected Subject To");
  ++pos;
  if (!is_keyword(need("To"), "To", "TO")) throw std::runtime_error("lp: expected To");
  ++pos;

  size_t bounds_at = pos;
  while (bounds_at < tokens.size() && !is_keyword(tokens[bounds_at], "Bounds", "BOUNDS")) ++bounds_at;
  while (pos < bounds_at) {
    Constraint con;
    if (pos + 1 < bounds_at && tokens[pos + 1] == ":") {
      con.name = tokens[pos];
      pos += 2;
    }
    const size_t rel = find_relation(tokens, pos);
    if (rel >= bounds_at) throw std::runtime_error("lp: constraint without relation");
    double lhs_constant = 0.0;
    parse_expression(tokens, pos, rel, con.terms, lhs_constant);
    con.op = tokens[rel];
    pos = rel + 1;
    if (pos >= bounds_at) throw std::runtime_error("lp: constraint without right-hand side");
    con.rhs = std::stod(tokens[pos]) - lhs_constant;
    ++pos;
    if (con.terms.empty()) throw std::runtime_error("lp: empty constraint " + con.name);
    prog.constraints.push_back(std::move(con));
  }
  if (pos >= tokens.size()) throw std::runtime_error("lp: missing Bounds section");
  ++pos;  // Bounds

  size_t bin_at = pos;
  while (bin_at < tokens.size() &&
         !is_keyword(tokens[bin_at], "Binaries", "Binary") && !is_keyword(tokens[bin_at], "Generals", "End"))
    ++bin_at;
  while (pos < bin_at) {
    // form: number <= name <= number
    if (pos + 4 > bin_at) throw std::runtime_error("lp: malformed bound line");
    const double lo = std::stod(tokens[pos]);
    if (tokens[pos + 1] != "<=") throw std::runtime_error("lp: malformed bound line");
    const std::string var = tokens[pos + 2];
    if (tokens[pos + 3] != "<=") throw std::runtime_error("lp: malformed bound line");
    const double hi = std::stod(tokens[pos + 4]);
    prog.bounds[var] = {lo, hi};
    pos += 5;
  }
  if (pos < tokens.size() && is_keyword(tokens[pos], "Binaries", "Binary")) {
    ++pos;
    while (pos < tokens.size() && !is_keyword(tokens[pos], "End", "END")) {
      prog.binaries.insert(tokens[pos]);
      ++pos;
    }
  }
  if (pos >= tokens.size() || !is_keyword(tokens[pos], "End", "END"))
    throw std::runtime_error("lp: missing End");
  return prog;
}

// Optimizes the parsed program by brute force over the binary variables,
// exploiting the exporter's per-task structure: given x/y, each fail_i
// constraint determines the cheapest feasible w_i after placing the
// assignment weights u_i_* on their best admissible column. Only valid
// for programs produced by the exporter (names x_i, y_i, w_i, u_i_j).
inline double optimize(const Program& prog, int n) {
  double best = std::numeric_limits<double>::infinity();
  std::map<std::string, double> obj_coef;
  for (const Term& t : prog.objective) obj_coef[t.var] += t.coef;

  for (uint32_t xmask = 0; xmask < (1u << n); ++xmask) {
    for (uint32_t ymask = 0; ymask < (1u << n); ++ymask) {
      if (xmask & ymask) continue;  // onehot: x_i + y_i <= 1
      double total = prog.objective_constant;
      for (int i = 0; i < n; ++i) {
        const std::string xi = "x_" + std::to_string(i + 1);
        const std::string yi = "y_" + std::to_string(i + 1);
        if (xmask & (1u << i)) total += obj_coef.count(xi) ? obj_coef[xi] : 0.0;
        if (ymask & (1u << i)) total += obj_coef.count(yi) ? obj_coef[yi] : 0.0;
      }
      for (const Constraint& con : prog.constraints) {
        if (con.name.rfind("fail_", 0) != 0) continue;
        const int i = std::stoi(con.name.substr(5));
        // fail_i: w_i + a x_i + y_i + sum coef_j u_i_j >= 1
        double fixed = 0.0;
        double best_u = 0.0;
        double w_coef_obj = 0.0;
        for (const Term& t : con.terms) {
          if (t.var == "w_" + std::to_string(i)) {
            w_coef_obj = obj_coef.count(t.var) ? obj_coef[t.var] : 0.0;
            continue;
          }
          if (t.var.rfind("u_", 0) == 0) {
            // u_i_j admissible when j == 0 or x_j == 1
            const size_t second = t.var.find('_', 2);
            const int j = std::stoi(t.var.substr(second + 1));
            if (j == 0 || (xmask & (1u << (j - 1)))) best_u = std::max(best_u, t.coef);
            continue;
          }
          const bool is_x = t.var.rfind("x_", 0) == 0;
          const int k = std::stoi(t.var.substr(2));
          const bool on = is_x ? (xmask & (1u << (k - 1))) : (ymask & (1u << (k - 1)));
          if (on) fixed += t.coef;
        }
        const double w = std::max(0.0, con.rhs - fixed - best_u);
        total += w_coef_obj * w;
      }
      best = std::min(best, total);
    }
  }
  return best;
}

}  // namespace lp_test
