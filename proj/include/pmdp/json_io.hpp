#pragma once

#include <json.hpp>

#include <string>

#include "pmdp/arena.hpp"

namespace pmdp {

struct MemorylessStrategy;
struct FiniteMemoryStrategy;

// Arena file format:
//   {
//     "states": [ {"id":0, "name":"q0", "owner":1, "rank":1, "cost":"1"}, ... ],
//     "initial": 0,
//     "transitions": [ {"from":0, "action":"a", "to":0},
//                      {"from":2, "action":"u", "to":3, "prob":"1/2"}, ... ]
//   }
// Ids are dense 0..n-1. Costs and probabilities are exact rationals written
// as strings ("10", "1/2"); JSON integers are accepted for costs. Decimal
// floats are rejected. Probabilities are required on environment
// transitions and forbidden on system transitions. "name" is optional and
// defaults to "s<id>".
ParityMDP parse_arena(const nlohmann::json& j);
ParityMDP parse_arena_text(const std::string& text);
ParityMDP load_arena_file(const std::string& path);
nlohmann::json arena_to_json(const ParityMDP& m);

// Strategy files:
//   {"kind":"memoryless", "actions": {"q0":"c", "q1":"a"}}   (state name -> action name)
//   {"kind":"finite", "memoryCount":M, "initialMemory":k,
//    "next": [[...], ...],              next[state][mem] -> mem
//    "act":  [[...], ...]}              act[state][mem] -> action name or null
nlohmann::json memoryless_to_json(const ParityMDP& m, const MemorylessStrategy& f);
nlohmann::json finite_to_json(const ParityMDP& m, const FiniteMemoryStrategy& f);

// Parses either kind; memoryless strategies come back as a finite-memory
// strategy with a single memory state.
FiniteMemoryStrategy parse_strategy(const ParityMDP& m, const nlohmann::json& j);

// Reads a whole file; ParseError on I/O failure or bad JSON.
nlohmann::json load_json_file(const std::string& path);

// Exact rational from a JSON value: string "p/q"/"p" or integer. Floats and
// everything else raise ParseError mentioning `what`.
Rational rational_from_json(const nlohmann::json& v, const std::string& what);

// FNV-1a 64-bit digest of a byte string, rendered as 16 hex digits.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace pmdp
