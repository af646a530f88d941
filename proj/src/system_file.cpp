#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "hjc/error.hpp"
#include "hjc/parser.hpp"
#include "hjc/system.hpp"

namespace hjc {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

struct Entry {
  std::size_t line;
  std::string key;
  std::string value;
  std::size_t value_column;  // 1-based column of the value within the line
  bool has_value;
};

struct Section {
  std::string kind;  // system | constants | transformation
  std::string name;
  std::size_t line;
  std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

[[noreturn]] void fail(const std::string& msg, std::size_t line) { throw ParseError(msg, 0, line); }

std::vector<Section> split_sections(std::string_view contents) {
  std::vector<Section> sections;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string raw(contents.substr(pos, end - pos));
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    ++number;
    pos = end + 1;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#') {
      if (end == contents.size()) break;
      continue;
    }
    if (text.front() == '[') {
      if (text.back() != ']') fail("malformed section header", number);
      const auto words = split_words(text.substr(1, text.size() - 2));
      if (words.empty()) fail("empty section header", number);
      Section s{words[0], "", number, {}};
      if (s.kind == "system" || s.kind == "constants") {
        if (words.size() != 1) fail("section [" + s.kind + "] takes no name", number);
      } else if (s.kind == "transformation") {
        if (words.size() != 2 || !is_identifier(words[1])) {
          fail("section [transformation] needs exactly one name", number);
        }
        s.name = words[1];
      } else {
        fail("unknown section [" + s.kind + "]", number);
      }
      sections.push_back(std::move(s));
    } else {
      if (sections.empty()) fail("content outside of any section", number);
      const std::size_t eq = raw.find('=');
      Entry e{number, "", "", 0, eq != std::string::npos};
      if (e.has_value) {
        e.key = trim(std::string_view(raw).substr(0, eq));
        std::size_t vstart = eq + 1;
        while (vstart < raw.size() && std::isspace(static_cast<unsigned char>(raw[vstart]))) ++vstart;
        e.value = trim(std::string_view(raw).substr(eq + 1));
        e.value_column = vstart + 1;
      } else {
        e.key = text;
      }
      sections.back().entries.push_back(std::move(e));
    }
    if (end == contents.size()) break;
  }
  return sections;
}

Expr parse_at(const Entry& e, const SymbolTable& table, const std::optional<std::set<Role>>& allowed) {
  try {
    return parse_expression(e.value, table, allowed);
  } catch (const ParseError& err) {
    const std::size_t col = err.offset() > 0 ? err.offset() + e.value_column - 1 : 0;
    throw ParseError(err.bare_message(), col, e.line);
  } catch (const Error& err) {
    throw ParseError(err.what(), 0, e.line);
  }
}

std::pair<std::string, int> parse_potential(const Entry& e) {
  // "potential V(1)"
  const std::string rest = trim(std::string_view(e.key).substr(std::string("potential").size()));
  const auto open = rest.find('(');
  const auto close = rest.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open || close + 1 != rest.size()) {
    fail("expected 'potential NAME(ARITY)'", e.line);
  }
  const std::string name = trim(rest.substr(0, open));
  const std::string arity = trim(rest.substr(open + 1, close - open - 1));
  if (!is_identifier(name)) fail("invalid function name '" + name + "'", e.line);
  if (arity.empty() || arity.find_first_not_of("0123456789") != std::string::npos || arity.size() > 3) {
    fail("invalid arity for " + name, e.line);
  }
  return {name, std::stoi(arity)};
}

void check_new_name(const std::string& name, std::size_t line) {
  if (!is_identifier(name)) fail("invalid identifier '" + name + "'", line);
  if (name == "t" || name == "p0") fail("'" + name + "' is reserved", line);
}

TransformationSpec parse_transformation(const Section& sec, const SystemSpec& sys) {
  TransformationSpec tr;
  tr.name = sec.name;
  const Entry* new_entry = nullptr;
  const Entry* params_entry = nullptr;
  std::vector<const Entry*> subs;
  for (const auto& e : sec.entries) {
    if (!e.has_value) fail("expected 'key = value'", e.line);
    if (e.key == "new") {
      if (new_entry) fail("duplicate key 'new'", e.line);
      new_entry = &e;
    } else if (e.key == "params") {
      if (params_entry) fail("duplicate key 'params'", e.line);
      params_entry = &e;
    } else {
      subs.push_back(&e);
    }
  }
  if (!new_entry) fail("transformation " + sec.name + " is missing 'new'", sec.line);
  tr.new_coordinates = split_words(new_entry->value);
  if (tr.new_coordinates.empty()) fail("transformation " + sec.name + " declares no coordinates", new_entry->line);
  if (params_entry) tr.parameters = split_words(params_entry->value);

  try {
    for (const auto& c : tr.new_coordinates) {
      check_new_name(c, new_entry->line);
      tr.table.add_coordinate(c, "P_" + c);
    }
    for (const auto& [c, _] : sys.constants) tr.table.add_constant(c);
    for (const auto& [f, arity] : sys.table.functions()) tr.table.add_function(f, arity);
  } catch (const SymbolError& err) {
    fail(err.what(), new_entry->line);
  }
  std::set<std::string> seen_params;
  for (const auto& p : tr.parameters) {
    if (std::find(tr.new_coordinates.begin(), tr.new_coordinates.end(), p) == tr.new_coordinates.end()) {
      fail("parameter " + p + " is not a new coordinate", params_entry->line);
    }
    if (!seen_params.insert(p).second) fail("duplicate parameter " + p, params_entry->line);
  }

  const std::set<Role> allowed{Role::Coordinate, Role::Momentum, Role::Time, Role::Constant};
  std::map<std::string, Expr> explicit_subs;
  for (const Entry* e : subs) {
    auto old = sys.table.find(e->key);
    if (!old || (old->role != Role::Coordinate && old->role != Role::Momentum)) {
      fail("unknown key '" + e->key + "' (not an old coordinate or momentum)", e->line);
    }
    if (explicit_subs.count(e->key)) fail("duplicate substitution for " + e->key, e->line);
    explicit_subs.emplace(e->key, parse_at(*e, tr.table, allowed));
  }

  for (int i = 0; i < sys.table.dimension(); ++i) {
    const Symbol q = sys.table.coordinate(i);
    const Symbol p = sys.table.momentum(i);
    auto nq = tr.table.find(q.name());
    const bool identity = nq && nq->role == Role::Coordinate;
    for (Symbol old : {q, p}) {
      auto it = explicit_subs.find(old.name());
      if (it != explicit_subs.end()) {
        tr.substitutions.emplace_back(old, it->second);
      } else if (identity) {
        const Symbol target = old == q ? nq->symbol : tr.table.momentum(nq->index);
        tr.substitutions.emplace_back(old, Expr(target));
      } else {
        fail("transformation " + sec.name + " does not define " + old.name(), sec.line);
      }
    }
  }
  return tr;
}

}  // namespace

const TransformationSpec* SystemSpec::find_transformation(std::string_view n) const {
  for (const auto& t : transformations) {
    if (t.name == n) return &t;
  }
  return nullptr;
}

Bindings SystemSpec::constant_bindings() const {
  Bindings b;
  for (const auto& [name, value] : constants) {
    if (value) b.emplace(Symbol::intern(name), Expr(*value));
  }
  return b;
}

SystemSpec parse_system(std::string_view contents) {
  const auto sections = split_sections(contents);
  SystemSpec sys;

  const Section* system = nullptr;
  const Section* constants = nullptr;
  std::vector<const Section*> transformations;
  for (const auto& s : sections) {
    if (s.kind == "system") {
      if (system) fail("duplicate section [system]", s.line);
      system = &s;
    } else if (s.kind == "constants") {
      if (constants) fail("duplicate section [constants]", s.line);
      constants = &s;
    } else {
      for (const auto* t : transformations) {
        if (t->name == s.name) fail("duplicate transformation " + s.name, s.line);
      }
      transformations.push_back(&s);
    }
  }
  if (!system) fail("missing required section [system]", 0);

  const Entry* lagrangian = nullptr;
  const Entry* coords = nullptr;
  const Entry* params = nullptr;
  const Entry* name = nullptr;
  std::vector<std::pair<std::string, int>> potentials;
  std::vector<std::size_t> potential_lines;
  for (const auto& e : system->entries) {
    if (!e.has_value) {
      if (e.key.rfind("potential", 0) == 0 && e.key.size() > 9 &&
          std::isspace(static_cast<unsigned char>(e.key[9]))) {
        potentials.push_back(parse_potential(e));
        potential_lines.push_back(e.line);
        continue;
      }
      fail("expected 'key = value'", e.line);
    }
    const Entry** slot = nullptr;
    if (e.key == "name") slot = &name;
    else if (e.key == "coordinates") slot = &coords;
    else if (e.key == "parameters") slot = &params;
    else if (e.key == "lagrangian") slot = &lagrangian;
    else fail("unknown key '" + e.key + "' in [system]", e.line);
    if (*slot) fail("duplicate key '" + e.key + "'", e.line);
    *slot = &e;
  }
  if (!coords) fail("missing required key 'coordinates' in [system]", system->line);
  if (!lagrangian) fail("missing required key 'lagrangian' in [system]", system->line);
  sys.name = name ? name->value : "system";
  sys.coordinates = split_words(coords->value);
  if (sys.coordinates.empty()) fail("at least one coordinate is required", coords->line);

  try {
    std::set<std::string> seen;
    for (const auto& c : sys.coordinates) {
      check_new_name(c, coords->line);
      if (!seen.insert(c).second) fail("duplicate coordinate " + c, coords->line);
      sys.table.add_coordinate(c);
    }
  } catch (const SymbolError& err) {
    fail(err.what(), coords->line);
  }
  if (params) {
    sys.parameters = split_words(params->value);
    std::set<std::string> seen;
    for (const auto& p : sys.parameters) {
      if (std::find(sys.coordinates.begin(), sys.coordinates.end(), p) == sys.coordinates.end()) {
        fail("parameter " + p + " is not a coordinate", params->line);
      }
      if (!seen.insert(p).second) fail("duplicate parameter " + p, params->line);
    }
  }

  if (constants) {
    const SymbolTable empty;
    for (const auto& e : constants->entries) {
      check_new_name(e.key, e.line);
      if (sys.constants.count(e.key)) fail("duplicate constant " + e.key, e.line);
      std::optional<Rational> value;
      if (e.has_value) {
        const Expr v = parse_at(e, empty, std::set<Role>{});
        if (!v.is_constant()) fail("constant " + e.key + " must have a numeric value", e.line);
        value = *v.constant_value();
      }
      try {
        sys.table.add_constant(e.key);
      } catch (const SymbolError& err) {
        fail(err.what(), e.line);
      }
      sys.constants.emplace(e.key, value);
    }
  }

  for (std::size_t i = 0; i < potentials.size(); ++i) {
    try {
      sys.table.add_function(potentials[i].first, potentials[i].second);
    } catch (const SymbolError& err) {
      fail(err.what(), potential_lines[i]);
    }
  }

  sys.lagrangian_source = lagrangian->value;
  sys.lagrangian = parse_at(*lagrangian, sys.table,
                            std::set<Role>{Role::Coordinate, Role::Velocity, Role::Time, Role::Constant});

  for (const auto* t : transformations) sys.transformations.push_back(parse_transformation(*t, sys));
  return sys;
}

SystemSpec load_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error("cannot read file " + path);
  return parse_system(ss.str());
}

}  // namespace hjc
