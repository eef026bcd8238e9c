#include "jetcartan/sysfile.hpp"

#include <fstream>
#include <sstream>

#include "jetcartan/ret.hpp"

namespace jc {

namespace {

struct Entry {
  std::string key, value;
  int line;
};

struct Section {
  std::vector<Entry> entries;
  int line = 0;
  const Entry* find(const std::string& key) const {
    for (const Entry& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::map<std::string, Section> parse_ini(const std::string& text) {
  std::map<std::string, Section> out;
  std::istringstream in(text);
  std::string line, current;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SysError(ln, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw SysError(ln, "empty section name");
      if (out.count(current)) throw SysError(ln, "duplicate section [" + current + "]");
      out[current].line = ln;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SysError(ln, "expected key = value");
    if (current.empty()) throw SysError(ln, "key outside of any section");
    std::string key = trim(line.substr(0, eq));
    std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) throw SysError(ln, "empty key");
    out[current].entries.push_back({key, value, ln});
  }
  return out;
}

Expr parse_or_throw(const JetContext& ctx, const Entry& e) {
  try {
    return ctx.parse_expr(e.value);
  } catch (const ParseError& pe) {
    throw SysError(e.line, std::string(pe.what()) + " in '" + e.value + "'");
  }
}

}  // namespace

SystemFile load_string(const std::string& text) {
  auto ini = parse_ini(text);
  static const std::set<std::string> known{"context",      "parameters", "constitutive",
                                           "connection",   "vectorfields", "sections",
                                           "ret",          "frame"};
  for (auto& [name, sec] : ini)
    if (!known.count(name)) throw SysError(sec.line, "unknown section [" + name + "]");
  if (!ini.count("context")) throw SysError(1, "missing [context] section");

  SystemFile out;
  // ---------------------------------------------------------------- context
  {
    const Section& sec = ini.at("context");
    ContextBuilder b;
    std::vector<std::string> base;
    for (const Entry& e : sec.entries) {
      if (e.key == "base") {
        base = split_list(e.value);
        b.base(base);
      } else if (e.key == "fields") {
        b.fields(split_list(e.value));
      } else if (e.key == "jets") {
        std::string v = trim(e.value);
        if (!v.empty() && v.front() == '[') {
          // list form: [["x","y"], ["t","y"]]
          std::string flat;
          for (char c : v)
            if (c != '[' && c != ']' && c != '"' && c != '\'') flat += c;
          auto items = split_list(flat);
          if (items.size() % 2 != 0)
            throw SysError(e.line, "jets list entries are [\"dir\",\"field\"] pairs");
          for (size_t k = 0; k + 1 < items.size(); k += 2) b.jet(items[k], items[k + 1]);
        } else {
          for (const std::string& pair : split_list(v)) {
            auto colon = pair.find(':');
            if (colon == std::string::npos)
              throw SysError(e.line, "jets entries are dir:field pairs");
            b.jet(trim(pair.substr(0, colon)), trim(pair.substr(colon + 1)));
          }
        }
      } else if (e.key == "jets_all") {
        if (e.value == "true") b.all_jets();
      } else if (e.key.rfind("split.", 0) == 0) {
        std::string field = e.key.substr(6);
        std::string v = e.value;
        SplitKind k;
        if (v == "none") k = SplitKind::S0;
        else if (v == "t") k = SplitKind::St;
        else if (v == "x") k = SplitKind::Sx;
        else if (v == "tx") k = SplitKind::Stx;
        else throw SysError(e.line, "split values are none|t|x|tx");
        b.split(field, k);
      } else if (e.key == "metric") {
        // handled after build
      } else {
        throw SysError(e.line, "unknown [context] key '" + e.key + "'");
      }
    }
    if (ini.count("parameters")) {
      std::vector<std::string> names;
      for (const Entry& e : ini.at("parameters").entries) {
        names.push_back(e.key);
        if (!e.value.empty()) {
          try {
            out.param_values[e.key] = std::stod(e.value);
          } catch (...) {
            throw SysError(e.line, "parameter default must be numeric");
          }
        }
      }
      b.params(names);
    }
    try {
      out.ctx = b.build();
    } catch (const ContextError& ce) {
      throw SysError(sec.line, ce.what());
    }
    if (const Entry* e = sec.find("metric")) {
      std::string v = trim(e->value);
      if (v != "euclidean") {
        if (v.rfind("diag(", 0) != 0 || v.back() != ')')
          throw SysError(e->line, "metric is 'euclidean' or diag(g0, g1, ...)");
        auto entries = split_list(v.substr(5, v.size() - 6));
        if ((int)entries.size() != out.ctx.n1())
          throw SysError(e->line, "diag metric needs one entry per base coordinate");
        std::vector<std::vector<Expr>> g(out.ctx.n1(),
                                         std::vector<Expr>(out.ctx.n1(), Expr::zero()));
        for (int k = 0; k < out.ctx.n1(); ++k)
          g[k][k] = parse_or_throw(out.ctx, Entry{e->key, entries[k], e->line});
        try {
          out.ctx = out.ctx.with_metric(std::move(g));
        } catch (const ContextError& ce) {
          throw SysError(e->line, ce.what());
        }
      }
    }
  }
  const JetContext& ctx = out.ctx;
  out.connection = Connection::flat(ctx);

  // ------------------------------------------------------------ constitutive
  if (ini.count("constitutive")) {
    const Section& sec = ini.at("constitutive");
    std::string kind = "general";
    if (const Entry* e = sec.find("kind")) kind = e->value;
    bool negate = false;
    if (const Entry* e = sec.find("negate_source")) negate = e->value == "true";
    auto field_of = [&](const std::string& name, int line) {
      int i = ctx.field_index(name);
      if (i < 0) throw SysError(line, "unknown field '" + name + "'");
      return i;
    };
    auto dir_of = [&](const std::string& name, int line) {
      int mu = ctx.base_index(name);
      if (mu < 0) throw SysError(line, "unknown base direction '" + name + "'");
      return mu;
    };
    std::map<std::pair<int, int>, Expr> F;
    std::vector<Expr> Pi(ctx.m(), Expr::zero());
    std::vector<Expr> Q(ctx.m(), Expr::zero());
    std::vector<Expr> h(ctx.n1(), Expr::zero());
    std::optional<Expr> L, D;
    for (const Entry& e : sec.entries) {
      if (e.key == "kind" || e.key == "negate_source") continue;
      auto parts = split_list(e.key, '.');
      if (parts.size() == 3 && parts[0] == "F") {
        F[{dir_of(parts[2], e.line), field_of(parts[1], e.line)}] = parse_or_throw(ctx, e);
      } else if (parts.size() == 2 && parts[0] == "Pi") {
        Pi[field_of(parts[1], e.line)] = parse_or_throw(ctx, e);
      } else if (parts.size() == 2 && parts[0] == "Q") {
        Q[field_of(parts[1], e.line)] = parse_or_throw(ctx, e);
      } else if (parts.size() == 2 && parts[0] == "h") {
        h[dir_of(parts[1], e.line)] = parse_or_throw(ctx, e);
      } else if (e.key == "L") {
        L = parse_or_throw(ctx, e);
      } else if (e.key == "D") {
        D = parse_or_throw(ctx, e);
      } else {
        throw SysError(e.line, "unknown [constitutive] key '" + e.key + "'");
      }
    }
    try {
      if (kind == "general") {
        out.cr = ConstitutiveRelation::general(ctx, std::move(F), std::move(Pi));
      } else if (kind == "ret") {
        out.cr = ConstitutiveRelation::ret(ctx, std::move(F), std::move(Pi));
      } else if (kind == "lagrangian") {
        if (!L) throw SysError(sec.line, "lagrangian kind needs L");
        out.cr = ConstitutiveRelation::lagrangian(ctx, *L);
      } else if (kind == "semi_lagrangian") {
        if (!L) throw SysError(sec.line, "semi_lagrangian kind needs L");
        out.cr = ConstitutiveRelation::semi_lagrangian(ctx, *L, Q);
      } else if (kind == "l_plus_d") {
        if (!L || !D) throw SysError(sec.line, "l_plus_d kind needs L and D");
        out.cr = ConstitutiveRelation::l_plus_d(ctx, *L, *D);
      } else if (kind == "vector_potential") {
        out.cr = ConstitutiveRelation::vector_potential(ctx, h, Pi);
      } else {
        throw SysError(sec.line, "unknown constitutive kind '" + kind + "'");
      }
    } catch (const ContextError& ce) {
      throw SysError(sec.line, ce.what());
    }
    if (negate) out.cr = out.cr->with_negated_source();
  }

  // ------------------------------------------------------------- connection
  if (ini.count("connection")) {
    for (const Entry& e : ini.at("connection").entries) {
      auto parts = split_list(e.key, '.');
      if (parts.size() != 3 || parts[0] != "Gamma")
        throw SysError(e.line, "connection entries are Gamma.field.dir");
      int i = ctx.field_index(parts[1]);
      int mu = ctx.base_index(parts[2]);
      if (i < 0 || mu < 0) throw SysError(e.line, "unknown field or direction");
      out.connection.gamma[i][mu] = parse_or_throw(ctx, e);
    }
    try {
      out.connection.validate();
    } catch (const ContextError& ce) {
      throw SysError(ini.at("connection").line, ce.what());
    }
  }

  // ------------------------------------------------------------ vectorfields
  if (ini.count("vectorfields")) {
    for (const Entry& e : ini.at("vectorfields").entries) {
      auto parts = split_list(e.key, '.');
      if (parts.size() != 2)
        throw SysError(e.line, "vectorfield entries are name.coordinate");
      auto [it, fresh] = out.vectorfields.try_emplace(parts[0], VectorField(ctx));
      Coordinate c;
      if (int i = ctx.field_index(parts[1]); i >= 0) c = ctx.fiber(i);
      else if (int mu = ctx.base_index(parts[1]); mu >= 0) c = ctx.base(mu);
      else throw SysError(e.line, "unknown coordinate '" + parts[1] + "'");
      it->second.set(c, parse_or_throw(ctx, e));
    }
  }

  // --------------------------------------------------------------- sections
  if (ini.count("sections")) {
    for (const Entry& e : ini.at("sections").entries) {
      auto parts = split_list(e.key, '.');
      if (parts.size() != 2) throw SysError(e.line, "section entries are name.field");
      int i = ctx.field_index(parts[1]);
      if (i < 0) throw SysError(e.line, "unknown field '" + parts[1] + "'");
      Expr v = parse_or_throw(ctx, e);
      for (const Coordinate& c : free_coords(v))
        if (c.role != Role::Base)
          throw SysError(e.line, "sections depend on base coordinates only");
      out.sections[parts[0]][i] = v;
    }
  }

  // -------------------------------------------------------------------- ret
  if (ini.count("ret")) {
    const Section& sec = ini.at("ret");
    out.ret.present = true;
    std::vector<std::string> pnames(ctx.params().begin(), ctx.params().end());
    out.ret.dual = ret_dual_context(ctx.n1(), ctx.m(), ctx.base_names(), pnames);
    const JetContext& dual = out.ret.dual;
    std::vector<Expr> hhat(ctx.n1(), Expr::zero());
    std::vector<Expr> dpi(ctx.m(), Expr::zero());
    bool has_hhat = false, has_dpi = false;
    out.ret.hflux.assign(ctx.n1(), Expr::zero());
    for (const Entry& e : sec.entries) {
      auto parts = split_list(e.key, '.');
      if (e.key == "h0") {
        out.ret.h0 = parse_or_throw(ctx, e);
      } else if (e.key == "Psi") {
        try {
          out.ret.psi = parse(e.value, dual.scope());
        } catch (const ParseError& pe) {
          throw SysError(e.line, pe.what());
        }
      } else if (parts.size() == 2 && parts[0] == "hflux") {
        int mu = ctx.base_index(parts[1]);
        if (mu < 0) throw SysError(e.line, "unknown base direction '" + parts[1] + "'");
        out.ret.hflux[mu] = parse_or_throw(ctx, e);
      } else if (parts.size() == 2 && parts[0] == "hhat") {
        int mu = ctx.base_index(parts[1]);
        if (mu < 0) throw SysError(e.line, "unknown base direction '" + parts[1] + "'");
        try {
          hhat[mu] = parse(e.value, dual.scope());
        } catch (const ParseError& pe) {
          throw SysError(e.line, pe.what());
        }
        has_hhat = true;
      } else if (parts.size() == 2 && parts[0] == "Pi") {
        int i = dual.field_index(parts[1]);
        if (i < 0) throw SysError(e.line, "dual productions are Pi.lam<k>");
        try {
          dpi[i] = parse(e.value, dual.scope());
        } catch (const ParseError& pe) {
          throw SysError(e.line, pe.what());
        }
        has_dpi = true;
      } else {
        throw SysError(e.line, "unknown [ret] key '" + e.key + "'");
      }
    }
    if (has_hhat) out.ret.hhat = hhat;
    if (has_dpi) out.ret.dual_pi = dpi;
  }

  // ------------------------------------------------------------------ frame
  if (ini.count("frame")) {
    const Section& sec = ini.at("frame");
    std::vector<std::vector<Expr>> legs(ctx.n1());
    for (const Entry& e : sec.entries) {
      if (e.key.size() < 2 || e.key[0] != 'e')
        throw SysError(e.line, "frame entries are e0, e1, ...");
      int mu = std::stoi(e.key.substr(1));
      if (mu < 0 || mu >= ctx.n1()) throw SysError(e.line, "frame leg index out of range");
      for (const std::string& comp : split_list(e.value))
        legs[mu].push_back(parse_or_throw(ctx, Entry{e.key, comp, e.line}));
    }
    try {
      out.frame = make_frame(ctx, std::move(legs));
    } catch (const LiftError& le) {
      throw SysError(sec.line, le.what());
    }
  }

  return out;
}

SystemFile load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SysError(0, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_string(buf.str());
}

}  // namespace jc
