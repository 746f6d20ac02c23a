#include "pmdp/json_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "pmdp/errors.hpp"
#include "pmdp/games.hpp"

namespace pmdp {

using nlohmann::json;

Rational rational_from_json(const json& v, const std::string& what) {
  if (v.is_string()) return Rational::from_string(v.get<std::string>());
  if (v.is_number_integer()) {
    return Rational(static_cast<long>(v.get<std::int64_t>()));
  }
  if (v.is_number_float()) {
    throw ParseError(what + ": decimal literals are not exact, write a fraction string");
  }
  throw ParseError(what + ": expected an integer or a fraction string");
}

namespace {

const json& field(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(what + ": missing \"" + key + "\"");
  return *it;
}

int int_field(const json& j, const char* key, const std::string& what) {
  const json& v = field(j, key, what);
  if (!v.is_number_integer()) throw ParseError(what + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

std::string str_field(const json& j, const char* key, const std::string& what) {
  const json& v = field(j, key, what);
  if (!v.is_string()) throw ParseError(what + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

ParityMDP parse_arena(const json& j) {
  if (!j.is_object()) throw ParseError("arena: top level must be an object");
  const json& jstates = field(j, "states", "arena");
  const json& jtrans = field(j, "transitions", "arena");
  if (!jstates.is_array() || !jtrans.is_array()) {
    throw ParseError("arena: \"states\" and \"transitions\" must be arrays");
  }

  ParityMDP m;
  m.states.resize(jstates.size());
  std::vector<char> seen(jstates.size(), 0);
  for (const json& js : jstates) {
    const int id = int_field(js, "id", "state");
    if (id < 0 || id >= static_cast<int>(m.states.size()) || seen[id]) {
      throw ParseError("state ids must be dense 0..n-1 without repeats (bad id " +
                       std::to_string(id) + ")");
    }
    seen[id] = 1;
    State& s = m.states[id];
    s.id = id;
    s.owner = int_field(js, "owner", "state " + std::to_string(id));
    if (s.owner != 1 && s.owner != 2) {
      throw ParseError("state " + std::to_string(id) + ": owner must be 1 or 2");
    }
    s.rank = int_field(js, "rank", "state " + std::to_string(id));
    s.cost = rational_from_json(field(js, "cost", "state " + std::to_string(id)),
                                "state " + std::to_string(id) + " cost");
    s.name = js.contains("name") ? str_field(js, "name", "state") : "s" + std::to_string(id);
  }

  m.initial = int_field(j, "initial", "arena");
  if (m.initial < 0 || m.initial >= m.size()) {
    throw ParseError("arena: initial state out of range");
  }

  for (const json& jt : jtrans) {
    const int from = int_field(jt, "from", "transition");
    const int to = int_field(jt, "to", "transition");
    if (from < 0 || from >= m.size() || to < 0 || to >= m.size()) {
      throw ParseError("transition endpoints out of range");
    }
    Action a;
    a.name = str_field(jt, "action", "transition");
    a.to = to;
    State& s = m.states[from];
    for (const Action& prev : s.actions) {
      if (prev.name == a.name) {
        throw ParseError("state " + std::to_string(from) + ": duplicate action \"" + a.name +
                         "\" (system actions are deterministic; environment actions are single "
                         "edges)");
      }
    }
    if (s.owner == 2) {
      if (!jt.contains("prob")) {
        throw ParseError("state " + std::to_string(from) +
                         ": environment transition needs \"prob\"");
      }
      a.prob = rational_from_json(jt["prob"], "transition probability");
    } else {
      if (jt.contains("prob")) {
        throw ParseError("state " + std::to_string(from) +
                         ": system transitions take no probability");
      }
      a.prob = Rational(1);
    }
    a.id = static_cast<int>(s.actions.size());
    s.actions.push_back(std::move(a));
  }
  return m;
}

ParityMDP parse_arena_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad JSON: ") + e.what());
  }
  return parse_arena(j);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ParseError(path + ": bad JSON: " + e.what());
  }
}

ParityMDP load_arena_file(const std::string& path) { return parse_arena(load_json_file(path)); }

json arena_to_json(const ParityMDP& m) {
  json jstates = json::array();
  json jtrans = json::array();
  for (const State& s : m.states) {
    jstates.push_back({{"id", s.id},
                       {"name", s.name},
                       {"owner", s.owner},
                       {"rank", s.rank},
                       {"cost", s.cost.str()}});
    for (const Action& a : s.actions) {
      json t = {{"from", s.id}, {"action", a.name}, {"to", a.to}};
      if (s.owner == 2) t["prob"] = a.prob.str();
      jtrans.push_back(std::move(t));
    }
  }
  return json{{"states", jstates}, {"initial", m.initial}, {"transitions", jtrans}};
}

json memoryless_to_json(const ParityMDP& m, const MemorylessStrategy& f) {
  json actions = json::object();
  for (int s = 0; s < m.size(); ++s) {
    if (s < static_cast<int>(f.action.size()) && f.action[s] >= 0) {
      actions[m.states[s].name] = m.states[s].actions[f.action[s]].name;
    }
  }
  return json{{"kind", "memoryless"}, {"actions", actions}};
}

json finite_to_json(const ParityMDP& m, const FiniteMemoryStrategy& f) {
  json next = json::array();
  json act = json::array();
  for (int s = 0; s < m.size(); ++s) {
    json nrow = json::array();
    json arow = json::array();
    for (int mem = 0; mem < f.memory_count; ++mem) {
      nrow.push_back(f.next[s][mem]);
      const int a = f.act[s][mem];
      if (a >= 0) {
        arow.push_back(m.states[s].actions[a].name);
      } else {
        arow.push_back(nullptr);
      }
    }
    next.push_back(std::move(nrow));
    act.push_back(std::move(arow));
  }
  return json{{"kind", "finite"},
              {"memoryCount", f.memory_count},
              {"initialMemory", f.initial_memory},
              {"next", next},
              {"act", act}};
}

namespace {

int action_by_name(const State& s, const std::string& name) {
  for (const Action& a : s.actions) {
    if (a.name == name) return a.id;
  }
  throw ParseError("state " + s.name + " has no action \"" + name + "\"");
}

}  // namespace

FiniteMemoryStrategy parse_strategy(const ParityMDP& m, const json& j) {
  if (!j.is_object()) throw ParseError("strategy: top level must be an object");
  const std::string kind = str_field(j, "kind", "strategy");
  FiniteMemoryStrategy f;
  const int n = m.size();
  if (kind == "memoryless") {
    f.memory_count = 1;
    f.initial_memory = 0;
    f.next.assign(n, std::vector<int>(1, 0));
    f.act.assign(n, std::vector<int>(1, -1));
    const json& actions = field(j, "actions", "strategy");
    if (!actions.is_object()) throw ParseError("strategy: \"actions\" must be an object");
    for (auto it = actions.begin(); it != actions.end(); ++it) {
      auto sid = m.state_by_name(it.key());
      if (!sid) throw ParseError("strategy names unknown state \"" + it.key() + "\"");
      if (!it.value().is_string()) throw ParseError("strategy actions must be names");
      f.act[*sid][0] = action_by_name(m.states[*sid], it.value().get<std::string>());
    }
    return f;
  }
  if (kind != "finite") throw ParseError("strategy kind must be \"memoryless\" or \"finite\"");
  f.memory_count = int_field(j, "memoryCount", "strategy");
  f.initial_memory = int_field(j, "initialMemory", "strategy");
  if (f.memory_count <= 0 || f.initial_memory < 0 || f.initial_memory >= f.memory_count) {
    throw ParseError("strategy: bad memory bounds");
  }
  const json& next = field(j, "next", "strategy");
  const json& act = field(j, "act", "strategy");
  if (!next.is_array() || !act.is_array() || static_cast<int>(next.size()) != n ||
      static_cast<int>(act.size()) != n) {
    throw ParseError("strategy: \"next\"/\"act\" must have one row per state");
  }
  f.next.assign(n, std::vector<int>(f.memory_count, 0));
  f.act.assign(n, std::vector<int>(f.memory_count, -1));
  for (int s = 0; s < n; ++s) {
    if (static_cast<int>(next[s].size()) != f.memory_count ||
        static_cast<int>(act[s].size()) != f.memory_count) {
      throw ParseError("strategy: row " + std::to_string(s) + " has wrong width");
    }
    for (int mem = 0; mem < f.memory_count; ++mem) {
      if (!next[s][mem].is_number_integer()) throw ParseError("strategy: \"next\" entries are ints");
      const int nm = next[s][mem].get<int>();
      if (nm < 0 || nm >= f.memory_count) throw ParseError("strategy: memory id out of range");
      f.next[s][mem] = nm;
      const json& av = act[s][mem];
      if (av.is_null()) continue;
      if (!av.is_string()) throw ParseError("strategy: \"act\" entries are names or null");
      f.act[s][mem] = action_by_name(m.states[s], av.get<std::string>());
    }
  }
  return f;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace pmdp
