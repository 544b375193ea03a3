#include <algorithm>
#include <fstream>
#include <sstream>

#include "mbc/blueprint.hpp"
#include "mbc/hash.hpp"

namespace mbc {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

// Grammar (one item per line, '#' starts a comment):
//   blueprint NAME
//   biases            then lines  SYMBOL = EXPR
//   mu                then lines  SYMBOL = DECIMAL      (omitted symbols get 0)
//   configs           then lines  SYMBOL SYMBOL EXPR DECIMAL
// EXPR is a signed sum of terms  DECIMAL | SYM | DECIMAL*SYM  with SYM in
// {b_GW, b, nu1, nu2} and b = 1 + b_GW.
Blueprint parse_blueprint(const std::string& text) {
  std::istringstream in(text);
  std::string line, name, section;
  std::vector<Bias> biases;
  std::vector<std::pair<std::string, Number>> mu_lines;
  std::vector<std::array<std::string, 4>> cfg_lines;
  const Constants& k = constants();
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw FormatError("blueprint line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto toks = split_ws(line);
    if (toks[0] == "blueprint") {
      if (toks.size() != 2) fail("expected 'blueprint NAME'");
      name = toks[1];
      continue;
    }
    if (toks.size() == 1 && (toks[0] == "biases" || toks[0] == "mu" || toks[0] == "configs")) {
      section = toks[0];
      continue;
    }
    if (toks[0] == "end") break;
    try {
      if (section == "biases" || section == "mu") {
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected SYMBOL = VALUE");
        std::string sym = trim(line.substr(0, eq)), rhs = trim(line.substr(eq + 1));
        if (sym.empty() || rhs.empty()) fail("expected SYMBOL = VALUE");
        if (section == "biases") {
          LinearExpr e = LinearExpr::parse(rhs);
          biases.push_back({sym, e, e.eval(k)});
        } else {
          mu_lines.emplace_back(sym, Number::parse(rhs));
        }
      } else if (section == "configs") {
        if (toks.size() < 4) fail("expected SYMBOL SYMBOL EXPR WEIGHT");
        std::string expr;
        for (std::size_t t = 2; t + 1 < toks.size(); ++t) expr += toks[t];
        cfg_lines.push_back({toks[0], toks[1], expr, toks.back()});
      } else {
        fail("content outside a section");
      }
    } catch (const FormatError& e) {
      if (std::string(e.what()).rfind("blueprint line", 0) == 0) throw;
      fail(e.what());
    }
  }
  if (name.empty()) throw FormatError("blueprint: missing name header");
  std::vector<Number> mu(biases.size(), Number::parse("0"));
  auto index_of = [&](const std::string& s) {
    for (std::size_t i = 0; i < biases.size(); ++i)
      if (biases[i].name == s) return static_cast<int>(i);
    throw FormatError("blueprint: unknown bias symbol " + s);
  };
  for (auto& [sym, num] : mu_lines) mu[index_of(sym)] = num;
  std::vector<ConfigEntry> configs;
  for (auto& c : cfg_lines) {
    ConfigEntry e;
    e.i = index_of(c[0]);
    e.j = index_of(c[1]);
    e.bij_expr = LinearExpr::parse(c[2]);
    e.bij = e.bij_expr.eval(k);
    e.weight = Number::parse(c[3]);
    configs.push_back(e);
  }
  return Blueprint(name, biases, mu, configs);
}

std::string write_blueprint(const Blueprint& bp) {
  std::ostringstream out;
  out << "blueprint " << bp.name() << "\n";
  out << "biases\n";
  for (const auto& b : bp.biases()) out << "  " << b.name << " = " << b.expr.str() << "\n";
  out << "mu\n";
  for (std::size_t k = 0; k < bp.biases().size(); ++k)
    out << "  " << bp.biases()[k].name << " = " << bp.mu()[k].text << "\n";
  out << "configs\n";
  for (const auto& c : bp.configs()) {
    std::string e = c.bij_expr.str();
    // expressions are written without inner spaces so the line splits cleanly
    e.erase(std::remove(e.begin(), e.end(), ' '), e.end());
    out << "  " << bp.biases()[c.i].name << " " << bp.biases()[c.j].name << " " << e << " " << c.weight.text << "\n";
  }
  return out.str();
}

const std::string& dstar_text() {
  static const std::string text =
      "blueprint dstar\n"
      "biases\n"
      "  b1 = -2*b - nu2\n"
      "  b2 = -b - nu1\n"
      "  b3 = nu1\n"
      "  b4 = b - nu1\n"
      "  b5 = 2*b + nu1\n"
      "mu\n"
      "  b1 = 0.325898600625\n"
      "  b2 = 0\n"
      "  b3 = 0\n"
      "  b4 = 0.674101399375\n"
      "  b5 = 0\n"
      "configs\n"
      "  b2 b4 b_GW 0.351359472465\n"
      "  b3 b4 b_GW 0.273707303709\n"
      "  b2 b3 b_GW 0.271584315668\n"
      "  b2 b5 b_GW 0.064406822738\n"
      "  b1 b5 b_GW 0.038942085420\n";
  return text;
}

Blueprint builtin_dstar() {
  static const Blueprint bp = parse_blueprint(dstar_text());
  return bp;
}

Blueprint load_blueprint(const std::string& path) {
  if (path == "dstar") return builtin_dstar();
  std::ifstream in(path);
  if (!in) throw Error("cannot open blueprint file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_blueprint(ss.str());
}

std::string blueprint_hash(const Blueprint& bp) { return sha256_hex(write_blueprint(bp)); }

}  // namespace mbc
