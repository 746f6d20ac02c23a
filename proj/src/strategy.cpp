#include "pmdp/strategy.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "pmdp/errors.hpp"
#include "pmdp/games.hpp"
#include "pmdp/mdp.hpp"
#include "pmdp/surecost.hpp"

namespace pmdp {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

void require_schedule(const ScheduleParams& p) {
  if (p.gamma < 1) {
    throw DomainError("InvalidSchedule", "gamma must be a positive integer");
  }
}

}  // namespace

ScheduleParams simulator_defaults() { return {MeanSchedule::Pow4, 4}; }

std::uint64_t mean_steps(const ScheduleParams& p, long iteration) {
  switch (p.mean) {
    case MeanSchedule::Pow2:
      return iteration < 64 ? (std::uint64_t{1} << iteration) : kSaturated;
    case MeanSchedule::Pow4:
      return iteration < 32 ? (std::uint64_t{1} << (2 * iteration)) : kSaturated;
    case MeanSchedule::DoubleExp:
      return iteration < 6 ? (std::uint64_t{1} << (1L << iteration)) : kSaturated;
  }
  return kSaturated;
}

std::uint64_t reach_steps(const ScheduleParams& p, long iteration, long component_size) {
  if (iteration >= 64) return kSaturated;
  unsigned __int128 v = static_cast<unsigned __int128>(p.gamma) * component_size;
  v <<= iteration;
  if (v > kSaturated) return kSaturated;
  return static_cast<std::uint64_t>(v);
}

void ProceduralStrategy::reset() {
  mimic_steps_ = 0;
  target_seen_ = false;
  iteration_ = 1;
  step_in_phase_ = 0;
  if (has_mimic_) {
    phase_ = Phase::Mimic;
    active_ = -1;
    budget_ = 0;
  } else {
    phase_ = Phase::MeanPayoff;
    active_ = 0;
    budget_ = mean_steps(params_, 1);
  }
}

void ProceduralStrategy::activate(int schedule_index, int) {
  active_ = schedule_index;
  phase_ = Phase::MeanPayoff;
  iteration_ = 1;
  budget_ = mean_steps(params_, 1);
  step_in_phase_ = 0;
  target_seen_ = false;
}

int ProceduralStrategy::schedule_step(int state) {
  const bool sys = m_->states[state].owner == 1;
  const ComponentSchedule& cs = schedules_[active_];
  if (!cs.in_c[state]) {
    // Only zero-probability environment moves can take the play out of the
    // component; winning must still be guaranteed, the value need not.
    phase_ = Phase::Fallback;
    step_in_phase_ = 1;
    return sys ? fallback_.at(state) : -1;
  }
  while (budget_ == 0) {
    if (phase_ == Phase::MeanPayoff) {
      phase_ = Phase::Reach;
      budget_ = reach_steps(params_, iteration_, cs.size);
      step_in_phase_ = 0;
    } else {
      if (!target_seen_) {
        phase_ = Phase::Fallback;
        step_in_phase_ = 1;
        return sys ? fallback_.at(state) : -1;
      }
      target_seen_ = false;
      ++iteration_;
      phase_ = Phase::MeanPayoff;
      budget_ = mean_steps(params_, iteration_);
      step_in_phase_ = 0;
    }
  }
  if (cs.target[state]) target_seen_ = true;
  --budget_;
  ++step_in_phase_;
  if (!sys) return -1;
  return phase_ == Phase::MeanPayoff ? cs.g.at(state) : cs.reach.at(state);
}

int ProceduralStrategy::on_enter(int state) {
  const bool sys = m_->states[state].owner == 1;
  if (phase_ == Phase::Fallback) {
    ++step_in_phase_;
    return sys ? fallback_.at(state) : -1;
  }
  if (phase_ == Phase::Mimic) {
    if (mimic_steps_ >= n0_) {
      phase_ = Phase::Fallback;
      step_in_phase_ = 1;
      return sys ? fallback_.at(state) : -1;
    }
    if (trigger_[state] >= 0) {
      activate(trigger_[state], state);
      return schedule_step(state);
    }
    ++mimic_steps_;
    ++step_in_phase_;
    return sys ? mimic_.at(state) : -1;
  }
  return schedule_step(state);
}

namespace {

ProceduralStrategy::ComponentSchedule build_schedule(const ParityMDP& m, const EndComponent& c) {
  ProceduralStrategy::ComponentSchedule cs;
  cs.in_c.assign(m.size(), 0);
  cs.target.assign(m.size(), 0);
  for (int s : c.states) cs.in_c[s] = 1;
  int top = 0;
  for (int s : c.states) top = std::max(top, m.states[s].rank);
  std::vector<int> cmax;
  for (int s : c.states) {
    if (m.states[s].rank == top) {
      cs.target[s] = 1;
      cmax.push_back(s);
    }
  }
  cs.g = ec_solve(m, c).strategy;
  cs.reach = max_reach(m, c, cmax).strategy;
  cs.size = static_cast<long>(c.states.size());
  return cs;
}

}  // namespace

ProceduralStrategy epsilon_strategy_gec(const ParityMDP& m, const EndComponent& c,
                                        const ScheduleParams& params) {
  require_schedule(params);
  if (!is_end_component(m, c.states)) {
    throw DomainError("NotGEC", "state set is not an end component");
  }
  int top = 0;
  for (int s : c.states) top = std::max(top, m.states[s].rank);
  if (top % 2 != 0) {
    throw DomainError("NotGEC", "the component's top rank is odd");
  }
  auto psol = solve_parity(project_game(m));
  std::vector<char> win(m.size(), 0);
  for (int s : psol.w1) win[s] = 1;
  for (int s : c.states) {
    if (!win[s]) {
      throw DomainError("NotGEC",
                        "state " + m.states[s].name + " is outside the sure-winning region");
    }
  }

  ProceduralStrategy p;
  p.m_ = &m;
  p.params_ = params;
  p.schedules_.push_back(build_schedule(m, c));
  p.fallback_ = psol.strategy1;
  p.has_mimic_ = false;
  p.reset();
  return p;
}

ProceduralStrategy global_epsilon_strategy(const ParityMDP& m, const Rational& epsilon,
                                           std::uint64_t n0, const ScheduleParams& params) {
  require_schedule(params);
  (void)epsilon;  // approximation quality is governed by params and n0
  auto res = cost_sure_infinite(m);
  if (!res.realizable) {
    throw DomainError("Unrealizable", "initial state is not sure-winning");
  }

  ProceduralStrategy p;
  p.m_ = &m;
  p.params_ = params;
  p.fallback_ = res.parity_strategy;
  p.has_mimic_ = true;
  p.mimic_ = res.mprime.strategy;
  p.n0_ = n0;
  p.trigger_.assign(m.size(), -1);

  // Recurrent classes of the reduced-MDP-optimal strategy: entering one
  // means the mimicked strategy has settled; each lies inside a retained
  // component, whose schedule then takes over.
  auto ic = induced_chain(m, res.mprime.strategy, &res.winning, &res.reduced_cost);
  const int cn = ic.chain.size();
  std::vector<std::vector<int>> adj(cn);
  for (int i = 0; i < cn; ++i) {
    for (const auto& [j, pr] : ic.chain.rows[i]) {
      (void)pr;
      adj[i].push_back(j);
    }
  }
  std::map<int, int> schedule_of_component;
  for (const auto& comp : strongly_connected_components(adj)) {
    std::vector<char> inside(cn, 0);
    for (int i : comp) inside[i] = 1;
    bool bottom = true;
    for (int i : comp) {
      for (int j : adj[i]) bottom &= static_cast<bool>(inside[j]);
    }
    if (!bottom) continue;
    // Locate the retained component containing this recurrent class.
    int owner = -1;
    for (std::size_t ci = 0; ci < res.components.size(); ++ci) {
      const auto& cstates = res.components[ci].component.states;
      bool all = true;
      for (int i : comp) {
        all &= std::binary_search(cstates.begin(), cstates.end(), ic.index_map[i]);
      }
      if (all) {
        owner = static_cast<int>(ci);
        break;
      }
    }
    if (owner < 0) {
      throw InternalError("global_epsilon_strategy: optimal strategy settles outside components");
    }
    auto it = schedule_of_component.find(owner);
    if (it == schedule_of_component.end()) {
      it = schedule_of_component
               .emplace(owner, static_cast<int>(p.schedules_.size()))
               .first;
      p.schedules_.push_back(build_schedule(m, res.components[owner].component));
    }
    for (int i : comp) p.trigger_[ic.index_map[i]] = it->second;
  }
  p.reset();
  return p;
}

FiniteMemoryStrategy epsilon_strategy_sgec(const ParityMDP& m, const EndComponent& c, long k) {
  if (k < 1) {
    throw DomainError("InvalidSchedule", "the mean-payoff block length k must be positive");
  }
  SuperGoodResult sg;
  try {
    sg = super_good_states(m, c);
  } catch (const DomainError&) {
    throw DomainError("NotSGEC", "state set is not an end component");
  }
  if (!sg.is_sgec) {
    throw DomainError("NotSGEC", "component is not super-good");
  }
  const FiniteMemoryStrategy& h = *sg.witness;
  const MemorylessStrategy g = ec_solve(m, c).strategy;
  const auto peaks = peak_states(m, c);
  const MemorylessStrategy fb = solve_parity(project_game(m)).strategy1;

  const int n = m.size();
  std::vector<char> in_c(n, 0), is_peak(n, 0);
  for (int s : c.states) in_c[s] = 1;
  for (int s : peaks) is_peak[s] = 1;

  const int kk = static_cast<int>(k);
  const int hm = h.memory_count;
  // Memory layout: 0..k-1 count the mean-payoff block, k..k+hm-1 embed the
  // witness, then one fallback element and one start element.
  const int fb_mem = kk + hm;
  const int init_mem = kk + hm + 1;

  FiniteMemoryStrategy f;
  f.memory_count = kk + hm + 2;
  f.initial_memory = init_mem;
  f.next.assign(n, std::vector<int>(f.memory_count, fb_mem));
  f.act.assign(n, std::vector<int>(f.memory_count, -1));
  for (int t = 0; t < n; ++t) {
    const bool inside = in_c[t];
    const bool sys = m.states[t].owner == 1;
    f.next[t][init_mem] = inside ? 0 : fb_mem;
    f.next[t][fb_mem] = fb_mem;
    for (int j = 0; j < kk; ++j) {
      if (!inside) continue;
      f.next[t][j] = (j + 1 < kk) ? j + 1 : kk + h.next[t][h.initial_memory];
    }
    for (int hmem = 0; hmem < hm; ++hmem) {
      if (!inside) continue;
      f.next[t][kk + hmem] = is_peak[t] ? 0 : kk + h.next[t][hmem];
    }
    if (sys) {
      if (inside) {
        for (int j = 0; j < kk; ++j) f.act[t][j] = g.at(t);
        for (int hmem = 0; hmem < hm; ++hmem) f.act[t][kk + hmem] = h.act[t][hmem];
      }
      f.act[t][fb_mem] = fb.at(t);
    }
  }
  if (f.memory_count != static_cast<int>(k) + h.memory_count + 2) {
    throw InternalError("epsilon_strategy_sgec: memory accounting drifted");
  }
  return f;
}

std::uint64_t trajectory_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Exact sampler for one environment state: integer weights over the common
// denominator, sampled by unbiased rejection from the 64-bit generator.
// Falls back to arbitrary precision when the denominator does not fit.
struct Sampler {
  bool small = true;
  std::uint64_t total = 0;
  std::vector<std::pair<std::uint64_t, int>> prefix;  // (cumulative weight, action id)
  mpz_class total_big;
  std::vector<std::pair<mpz_class, int>> prefix_big;
};

Sampler build_sampler(const State& st) {
  mpz_class denom = 1;
  for (const Action& a : st.actions) {
    if (a.prob.sign() <= 0) continue;
    mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), a.prob.raw().get_den().get_mpz_t());
  }
  Sampler sp;
  sp.small = denom.fits_ulong_p() != 0;
  mpz_class acc = 0;
  for (const Action& a : st.actions) {
    if (a.prob.sign() <= 0) continue;
    mpz_class w = a.prob.raw().get_num() * (denom / a.prob.raw().get_den());
    acc += w;
    if (sp.small) {
      sp.prefix.push_back({acc.get_ui(), a.id});
    } else {
      sp.prefix_big.push_back({acc, a.id});
    }
  }
  if (sp.small) {
    sp.total = denom.get_ui();
  } else {
    sp.total_big = denom;
  }
  return sp;
}

std::uint64_t rand_below_u64(std::mt19937_64& eng, std::uint64_t d) {
  const std::uint64_t lim = std::numeric_limits<std::uint64_t>::max() -
                            std::numeric_limits<std::uint64_t>::max() % d;
  std::uint64_t x = eng();
  while (x >= lim) x = eng();
  return x % d;
}

mpz_class rand_below_big(std::mt19937_64& eng, const mpz_class& d) {
  const std::size_t bits = mpz_sizeinbase(d.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  while (true) {
    mpz_class x = 0;
    for (std::size_t w = 0; w < words; ++w) {
      x <<= 64;
      x += mpz_class(static_cast<unsigned long>(eng()));
    }
    x >>= (words * 64 - bits);
    if (x < d) return x;
  }
}

}  // namespace

TrajectoryStats simulate(const ParityMDP& m, StrategyRunner& f, std::uint64_t horizon,
                         std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  f.reset();

  const std::uint64_t visits = horizon + 1;
  const std::uint64_t window = (visits + 9) / 10;
  std::vector<int> ring(window, 0);
  std::vector<std::uint64_t> counts(m.size(), 0);
  std::vector<Sampler> samplers(m.size());

  int s = m.initial;
  for (std::uint64_t j = 0; j < visits; ++j) {
    ++counts[s];
    ring[j % window] = s;
    const int a = f.on_enter(s);
    if (j + 1 == visits) break;
    const State& st = m.states[s];
    if (st.owner == 1) {
      if (a < 0 || a >= static_cast<int>(st.actions.size())) {
        throw InternalError("simulate: strategy chose an unavailable action at state " + st.name);
      }
      s = st.actions[a].to;
    } else {
      Sampler& sp = samplers[s];
      if (sp.prefix.empty() && sp.prefix_big.empty()) sp = build_sampler(st);
      int chosen = -1;
      if (sp.small) {
        const std::uint64_t r = rand_below_u64(eng, sp.total);
        for (const auto& [cum, id] : sp.prefix) {
          if (r < cum) {
            chosen = id;
            break;
          }
        }
      } else {
        const mpz_class r = rand_below_big(eng, sp.total_big);
        for (const auto& [cum, id] : sp.prefix_big) {
          if (r < cum) {
            chosen = id;
            break;
          }
        }
      }
      s = st.actions[chosen].to;
    }
  }

  TrajectoryStats out;
  out.horizon = horizon;
  out.seed = seed;
  Rational sum;
  for (int i = 0; i < m.size(); ++i) {
    if (counts[i] == 0) continue;
    sum += m.states[i].cost * Rational(static_cast<long>(counts[i]));
  }
  out.mean_cost = sum / Rational(static_cast<long>(visits));
  std::vector<int> suffix(ring.begin(), ring.begin() + static_cast<long>(std::min<std::uint64_t>(window, visits)));
  std::sort(suffix.begin(), suffix.end());
  suffix.erase(std::unique(suffix.begin(), suffix.end()), suffix.end());
  out.suffix_visited = std::move(suffix);
  for (int q : out.suffix_visited) {
    out.max_suffix_rank = std::max(out.max_suffix_rank, m.states[q].rank);
  }
  return out;
}

std::vector<TrajectoryStats> simulate_many(
    const ParityMDP& m, const std::function<std::unique_ptr<StrategyRunner>()>& factory,
    std::uint64_t horizon, std::uint64_t base_seed, int count, int threads) {
  std::vector<TrajectoryStats> out(count);
  if (count <= 0) return out;
  threads = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) break;
      auto runner = factory();
      out[i] = simulate(m, *runner, horizon, trajectory_seed(base_seed, i));
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

CertifyResult certify_finite_strategy(const ParityMDP& m, const FiniteMemoryStrategy& f) {
  CertifyResult r;
  r.sure_winning = verify_finite_memory_winning(project_game(m), f, {m.initial}, nullptr);

  // Probabilistic product chain for the exact expected mean cost.
  const long mc = f.memory_count;
  std::map<long, int> ids;
  std::vector<std::pair<int, int>> nodes;
  auto intern = [&](int s, int mem) {
    const long key = static_cast<long>(s) * mc + mem;
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(nodes.size());
    ids[key] = id;
    nodes.push_back({s, mem});
    return id;
  };
  intern(m.initial, f.enter(m.initial, f.initial_memory));
  Chain chain;
  for (std::size_t qi = 0; qi < nodes.size(); ++qi) {
    const int s = nodes[qi].first;
    const int mem = nodes[qi].second;
    const State& st = m.states[s];
    std::vector<std::pair<int, Rational>> row;
    if (st.owner == 1) {
      const int a = f.action_at(s, mem);
      if (a < 0 || a >= static_cast<int>(st.actions.size())) {
        throw DomainError("InvalidRestriction",
                          "strategy has no action at state " + st.name + " under its memory");
      }
      const int t = st.actions[a].to;
      row.push_back({intern(t, f.enter(t, mem)), Rational(1)});
    } else {
      std::map<int, Rational> merged;
      for (const Action& a : st.actions) {
        if (a.prob.sign() <= 0) continue;
        merged[intern(a.to, f.enter(a.to, mem))] += a.prob;
      }
      row.assign(merged.begin(), merged.end());
    }
    chain.rows.push_back(std::move(row));
    chain.cost.push_back(st.cost);
  }
  r.value = chain_values(chain).gain[0];
  return r;
}

}  // namespace pmdp
