#include <dirac/config.hpp>

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <utility>

#include <dirac/expr.hpp>

#include "scenario_common.hpp"

namespace dirac {

const std::string& ConfigValue::as_string() const {
  if (kind != Kind::String) throw ConfigError("expected a quoted string", line);
  return text;
}

double ConfigValue::as_number() const {
  if (kind != Kind::Number) throw ConfigError("expected a number", line);
  return number;
}

int ConfigValue::as_int() const {
  double d = as_number();
  int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) throw ConfigError("expected an integer", line);
  return i;
}

const std::vector<ConfigValue>& ConfigValue::as_array() const {
  if (kind != Kind::Array) throw ConfigError("expected an array", line);
  return items;
}

const ConfigValue& ConfigSection::at(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    throw ConfigError("[" + name + "] is missing key '" + key + "'", line);
  return it->second;
}

const ConfigSection* ConfigDoc::find(const std::string& name) const {
  for (const ConfigSection& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

const ConfigSection& ConfigDoc::at(const std::string& name) const {
  const ConfigSection* s = find(name);
  if (!s) throw ConfigError("missing section [" + name + "]", 0);
  return *s;
}

// ---- TOML-subset parser ------------------------------------------------------

namespace {

struct Token {
  enum class Kind { LBracket, RBracket, Equals, Comma, String, Word, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;
};

// Values never contain newlines except inside arrays, so the lexer is free
// to treat all whitespace alike; line numbers are only for diagnostics.
struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  Token next() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '\n') {
        ++line;
        ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    if (pos >= src.size()) return {Token::Kind::End, "", line};
    int at = line;
    char c = src[pos];
    if (c == '[') return ++pos, Token{Token::Kind::LBracket, "[", at};
    if (c == ']') return ++pos, Token{Token::Kind::RBracket, "]", at};
    if (c == '=') return ++pos, Token{Token::Kind::Equals, "=", at};
    if (c == ',') return ++pos, Token{Token::Kind::Comma, ",", at};
    if (c == '"') {
      ++pos;
      std::string out;
      while (pos < src.size() && src[pos] != '"' && src[pos] != '\n') {
        if (src[pos] == '\\' && pos + 1 < src.size() &&
            (src[pos + 1] == '"' || src[pos + 1] == '\\'))
          ++pos;
        out.push_back(src[pos++]);
      }
      if (pos >= src.size() || src[pos] != '"')
        throw ConfigError("unterminated string", at);
      ++pos;
      return {Token::Kind::String, std::move(out), at};
    }
    size_t start = pos;
    while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                std::strchr("_+-.", src[pos]) != nullptr))
      ++pos;
    if (pos == start)
      throw ConfigError(std::string("unexpected character '") + c + "'", at);
    return {Token::Kind::Word, src.substr(start, pos - start), at};
  }
};

struct Parser {
  Lexer lex;
  Token tok;

  explicit Parser(const std::string& s) : lex(s), tok(lex.next()) {}

  void advance() { tok = lex.next(); }

  ConfigValue value() {
    ConfigValue v;
    v.line = tok.line;
    switch (tok.kind) {
      case Token::Kind::String:
        v.kind = ConfigValue::Kind::String;
        v.text = std::move(tok.text);
        advance();
        return v;
      case Token::Kind::LBracket: {
        advance();
        v.kind = ConfigValue::Kind::Array;
        while (tok.kind != Token::Kind::RBracket) {
          v.items.push_back(value());
          if (tok.kind == Token::Kind::Comma) {
            advance();
          } else if (tok.kind != Token::Kind::RBracket) {
            throw ConfigError("expected ',' or ']' in array", tok.line);
          }
        }
        advance();
        return v;
      }
      case Token::Kind::Word: {
        if (tok.text == "true" || tok.text == "false") {
          v.kind = ConfigValue::Kind::Bool;
          v.flag = tok.text == "true";
          advance();
          return v;
        }
        char* end = nullptr;
        v.number = std::strtod(tok.text.c_str(), &end);
        if (end != tok.text.c_str() + tok.text.size())
          throw ConfigError("expected a value, got '" + tok.text + "'", tok.line);
        v.kind = ConfigValue::Kind::Number;
        advance();
        return v;
      }
      default:
        throw ConfigError("expected a value", tok.line);
    }
  }

  ConfigDoc document() {
    ConfigDoc doc;
    doc.sections.push_back(ConfigSection{"", 1, {}});
    while (tok.kind != Token::Kind::End) {
      if (tok.kind == Token::Kind::LBracket) {
        int at = tok.line;
        advance();
        if (tok.kind != Token::Kind::Word)
          throw ConfigError("expected a section name after '['", at);
        std::string name = std::move(tok.text);
        advance();
        if (tok.kind != Token::Kind::RBracket)
          throw ConfigError("expected ']' after section name", at);
        advance();
        if (doc.find(name) != nullptr)
          throw ConfigError("duplicate section [" + name + "]", at);
        doc.sections.push_back(ConfigSection{std::move(name), at, {}});
        continue;
      }
      if (tok.kind != Token::Kind::Word)
        throw ConfigError("expected a key or a section header", tok.line);
      std::string key = std::move(tok.text);
      int at = tok.line;
      advance();
      if (tok.kind != Token::Kind::Equals)
        throw ConfigError("expected '=' after key '" + key + "'", at);
      advance();
      ConfigSection& sec = doc.sections.back();
      if (sec.has(key))
        throw ConfigError("duplicate key '" + key + "' in [" + sec.name + "]", at);
      sec.entries.emplace(std::move(key), value());
    }
    return doc;
  }
};

}  // namespace

ConfigDoc parse_config(const std::string& text) { return Parser(text).document(); }

// ---- expression-backed fields ------------------------------------------------

namespace {

// flat array of expression strings in x1..x<n_coords> (t aliases x1 when the
// input is one-dimensional)
std::vector<ExprPtr> parse_row(const ConfigValue& v, int n_coords, int expect,
                               const std::string& what) {
  const auto& arr = v.as_array();
  if (static_cast<int>(arr.size()) != expect)
    throw ConfigError(what + " needs " + std::to_string(expect) + " expressions, got " +
                          std::to_string(arr.size()),
                      v.line);
  std::map<std::string, int> aliases;
  if (n_coords == 1) aliases["t"] = 0;
  std::vector<ExprPtr> out;
  for (const ConfigValue& e : arr) {
    try {
      out.push_back(parse_expr(e.as_string(), n_coords, aliases));
    } catch (const ParseError& pe) {
      throw ConfigError(what + ": " + pe.what(), e.line);
    }
  }
  return out;
}

std::vector<std::vector<ExprPtr>> parse_rows(const ConfigValue& v, int n_coords, int rows,
                                             int cols, const std::string& what) {
  const auto& arr = v.as_array();
  if (rows >= 0 && static_cast<int>(arr.size()) != rows)
    throw ConfigError(
        what + " needs " + std::to_string(rows) + " rows, got " + std::to_string(arr.size()),
        v.line);
  if (arr.empty()) throw ConfigError(what + " must not be empty", v.line);
  std::vector<std::vector<ExprPtr>> out;
  for (const ConfigValue& row : arr) out.push_back(parse_row(row, n_coords, cols, what));
  return out;
}

SmoothMap map_from_exprs(int in, std::vector<ExprPtr> comps) {
  int out = static_cast<int>(comps.size());
  return SmoothMap::from_lambda(in, out, [comps = std::move(comps)](auto x, auto y) {
    for (size_t i = 0; i < comps.size(); ++i) y[i] = eval_expr(*comps[i], x);
  });
}

VectorField vector_field_from_exprs(int n, std::vector<ExprPtr> comps) {
  return VectorField::from_lambda(n, [comps = std::move(comps)](auto x, auto y) {
    for (size_t i = 0; i < comps.size(); ++i) y[i] = eval_expr(*comps[i], x);
  });
}

OneForm one_form_from_exprs(int n, std::vector<ExprPtr> comps) {
  return OneForm::from_lambda(n, [comps = std::move(comps)](auto x, auto y) {
    for (size_t i = 0; i < comps.size(); ++i) y[i] = eval_expr(*comps[i], x);
  });
}

MatrixField matrix_field_from_exprs(int n, std::vector<std::vector<ExprPtr>> m) {
  return MatrixField::from_lambda(n, [m = std::move(m)](auto x, auto y) {
    size_t nn = m.size();
    for (size_t i = 0; i < nn; ++i)
      for (size_t j = 0; j < nn; ++j) y[i * nn + j] = eval_expr(*m[i][j], x);
  });
}

// ---- section assembly ----------------------------------------------------

Eigen::VectorXd bounds_vector(const ConfigValue& v, int dim, const std::string& what) {
  Eigen::VectorXd out(dim);
  if (v.kind == ConfigValue::Kind::Number) {
    out.setConstant(v.number);
    return out;
  }
  const auto& arr = v.as_array();
  if (static_cast<int>(arr.size()) != dim)
    throw ConfigError(what + " needs " + std::to_string(dim) + " bounds", v.line);
  for (int i = 0; i < dim; ++i) out(i) = arr[i].as_number();
  return out;
}

Chart chart_from_section(const ConfigSection& sec, const std::string& default_name) {
  int dim = sec.at("dim").as_int();
  if (dim < 1) throw ConfigError("[" + sec.name + "] dim must be positive", sec.line);
  Eigen::VectorXd lo = bounds_vector(sec.at("lo"), dim, "lo");
  Eigen::VectorXd hi = bounds_vector(sec.at("hi"), dim, "hi");
  for (int i = 0; i < dim; ++i)
    if (!(lo(i) < hi(i)))
      throw ConfigError("[" + sec.name + "] bounds must satisfy lo < hi componentwise",
                        sec.line);
  std::string name = sec.has("name") ? sec.at("name").as_string() : default_name;
  return Chart(std::move(name), std::move(lo), std::move(hi));
}

DiracStructure structure_from_config(const ConfigDoc& doc, const Chart& chart) {
  const ConfigSection& sec = doc.at("structure");
  const std::string& kind = sec.at("kind").as_string();
  int n = chart.dim();

  if (kind == "poisson" || kind == "twoform") {
    MatrixField m =
        matrix_field_from_exprs(n, parse_rows(sec.at("matrix"), n, n, n, "matrix"));
    double asym = antisymmetry_residual(m, {chart.center()});
    if (asym > 1e-9)
      throw ConfigError("[structure] matrix is not antisymmetric at the chart center "
                        "(largest |m + m^T| entry is " +
                            std::to_string(asym) +
                            "); poisson and twoform matrices need m_ij = -m_ji",
                        sec.line);
    if (kind == "poisson") return graph_of_poisson(BivectorField(std::move(m)));
    return graph_of_twoform(TwoForm(std::move(m)));
  }

  if (kind == "frame") {
    auto xs = parse_rows(sec.at("x_parts"), n, -1, n, "x_parts");
    auto as = parse_rows(sec.at("a_parts"), n, -1, n, "a_parts");
    if (xs.size() != as.size())
      throw ConfigError("x_parts and a_parts need the same number of rows", sec.line);
    SectionFrame frame;
    frame.declared_rank = static_cast<int>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
      frame.sections.push_back(CourantSection{vector_field_from_exprs(n, std::move(xs[i])),
                                              one_form_from_exprs(n, std::move(as[i]))});
    return DiracStructure{std::move(frame)};
  }

  throw ConfigError("[structure] kind must be \"poisson\", \"twoform\" or \"frame\"",
                    sec.at("kind").line);
}

GroupActionData action_from_section(const ConfigSection& sec, int n) {
  int d = sec.at("dim").as_int();
  if (d < 1) throw ConfigError("[action] dim must be positive", sec.line);

  std::vector<double> f(static_cast<size_t>(d) * d * d, 0.0);
  if (sec.has("structure_constants")) {
    for (const ConfigValue& q : sec.at("structure_constants").as_array()) {
      const auto& quad = q.as_array();
      if (quad.size() != 4)
        throw ConfigError("structure_constants entries are [i, j, k, f] quadruples", q.line);
      int i = quad[0].as_int(), j = quad[1].as_int(), k = quad[2].as_int();
      if (i < 1 || i > d || j < 1 || j > d || k < 1 || k > d)
        throw ConfigError("structure-constant indices are 1-based and bounded by dim", q.line);
      if (i == j)
        throw ConfigError("structure constants with i = j vanish by antisymmetry", q.line);
      size_t ij = (static_cast<size_t>(k - 1) * d + (i - 1)) * d + (j - 1);
      size_t ji = (static_cast<size_t>(k - 1) * d + (j - 1)) * d + (i - 1);
      if (f[ij] != 0.0 || f[ji] != 0.0)
        throw ConfigError("duplicate structure constant for this index triple", q.line);
      f[ij] = quad[3].as_number();
      f[ji] = -f[ij];
    }
  }

  std::optional<Eigen::MatrixXd> bilinear;
  if (sec.has("bilinear_form")) {
    const ConfigValue& bv = sec.at("bilinear_form");
    const auto& rows = bv.as_array();
    if (static_cast<int>(rows.size()) != d)
      throw ConfigError("bilinear_form needs dim rows", bv.line);
    Eigen::MatrixXd b(d, d);
    for (int r = 0; r < d; ++r) {
      const auto& row = rows[static_cast<size_t>(r)].as_array();
      if (static_cast<int>(row.size()) != d)
        throw ConfigError("bilinear_form rows need dim entries", rows[static_cast<size_t>(r)].line);
      for (int c = 0; c < d; ++c) b(r, c) = row[static_cast<size_t>(c)].as_number();
    }
    bilinear = std::move(b);
  }

  LieAlgebraData algebra;
  try {
    algebra = make_lie_algebra(d, std::move(f), std::move(bilinear));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[action] ") + e.what(), sec.line);
  }

  std::vector<VectorField> gens;
  for (auto& row : parse_rows(sec.at("generators"), n, d, n, "generators"))
    gens.push_back(vector_field_from_exprs(n, std::move(row)));
  return GroupActionData{std::move(algebra), std::move(gens)};
}

}  // namespace

Scenario scenario_from_config(const ConfigDoc& doc) {
  Scenario s;
  const ConfigSection* root = doc.find("");
  s.name = root && root->has("name") ? root->at("name").as_string() : "custom";
  s.summary = "user-defined structure from a config file";

  Chart m = chart_from_section(doc.at("chart"), "m");
  const std::string m_chart = m.name;
  s.charts = {m};
  s.l = structure_from_config(doc, m);

  const ConfigSection* act_sec = doc.find("action");
  const ConfigSection* quo_sec = doc.find("quotient");
  if (quo_sec && !act_sec)
    throw ConfigError("[quotient] requires an [action] whose orbits it collapses",
                      quo_sec->line);

  s.checks.push_back(lagrangian_check(s.l, m_chart));
  s.checks.push_back(involutive_check(s.l, m_chart));
  s.checks.push_back(im_axioms_check(s.l, m_chart));

  if (act_sec) {
    s.act = action_from_section(*act_sec, m.dim());
    const GroupActionData act = s.act;
    s.checks.push_back({"action-structure", 1e-7,
                        [act, m_chart](const SampleMap& sm, double tol) {
                          CheckReport rep =
                              check_action_structure(act, samples_for(sm, m_chart), tol);
                          rep.name = "action-structure";
                          return rep;
                        }});
    s.checks.push_back(action_preserves_check(s.l, act, m_chart));
    s.checks.push_back(infinitesimal_symmetry_check(s.l, act, m_chart));
  }

  if (quo_sec) {
    Chart nchart = chart_from_section(*quo_sec, "y");
    if (nchart.name == m_chart)
      throw ConfigError("[quotient] chart name collides with the structure chart",
                        quo_sec->line);
    s.quotient = QuotientModel{
        map_from_exprs(m.dim(), parse_row(quo_sec->at("p"), m.dim(), nchart.dim(), "p")),
        map_from_exprs(nchart.dim(),
                       parse_row(quo_sec->at("sigma"), nchart.dim(), m.dim(), "sigma"))};
    s.charts.push_back(nchart);

    const DiracStructure l = s.l;
    const GroupActionData act = s.act;
    const QuotientModel q = s.quotient;
    const std::string n_chart = nchart.name;
    s.checks.push_back({"quotient-model", 1.0,
                        [q, act, n_chart](const SampleMap& sm, double tol) {
                          CheckReport rep = check_quotient_model(q, act, samples_for(sm, n_chart));
                          rep.name = "quotient-model";
                          rep.tol = tol;
                          rep.finalize();
                          return rep;
                        }});
    s.checks.push_back({"reduced-comparison", 1e-6,
                        [l, act, q, n_chart](const SampleMap& sm, double tol) {
                          CheckReport rep =
                              check_lemma_2red(l, act, q, samples_for(sm, n_chart), tol);
                          rep.name = "reduced-comparison";
                          return rep;
                        }});
  }
  return s;
}

PathSetup path_from_config(const ConfigDoc& doc) {
  Chart m = chart_from_section(doc.at("chart"), "m");
  DiracStructure l = structure_from_config(doc, m);

  PathSetup out;
  out.algebroid = algebroid_from_dirac(l);
  out.mu = im_form_from_dirac(l);
  if (const ConfigSection* act_sec = doc.find("action"))
    out.act = action_from_section(*act_sec, m.dim());

  const ConfigSection& sec = doc.at("path");
  int intervals = sec.at("intervals").as_int();
  if (intervals < 2) throw ConfigError("[path] needs at least 2 intervals", sec.line);
  if (sec.has("tol")) {
    out.tol = sec.at("tol").as_number();
    if (!(out.tol > 0.0)) throw ConfigError("[path] tol must be positive", sec.at("tol").line);
  }

  SmoothMap base = map_from_exprs(1, parse_row(sec.at("base"), 1, m.dim(), "base"));
  SmoothMap coeff =
      map_from_exprs(1, parse_row(sec.at("coeffs"), 1, out.algebroid.rank, "coeffs"));
  out.path = sample_apath(base, coeff, intervals);
  return out;
}

}  // namespace dirac
