#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "pmdp/arena.hpp"
#include "pmdp/decomposition.hpp"
#include "pmdp/rational.hpp"
#include "pmdp/strategy_types.hpp"

namespace pmdp {

// Step schedule of the procedural strategies. Iteration i plays the
// mean-payoff-optimal strategy for mean_steps(i) steps and then the
// reach-optimal strategy for gamma * n * 2^i steps (n = component size).
// The doubly exponential schedule makes the textbook convergence argument
// immediate; the flatter ones fit several iterations into a simulation
// horizon. All step counts saturate at 2^64-1.
enum class MeanSchedule { Pow2, Pow4, DoubleExp };

struct ScheduleParams {
  MeanSchedule mean = MeanSchedule::Pow2;
  long gamma = 4;  // positive; scales the reach phase length
};

// Defaults used by the simulator CLI: 4^i mean phases.
ScheduleParams simulator_defaults();

std::uint64_t mean_steps(const ScheduleParams& p, long iteration);
std::uint64_t reach_steps(const ScheduleParams& p, long iteration, long component_size);

// Stateful strategy view used by the simulator: on_enter is called for
// every state the play enters, in order, starting with the initial state.
// It returns the action id to play at system states and -1 at environment
// states (where the simulator samples).
class StrategyRunner {
 public:
  virtual ~StrategyRunner() = default;
  virtual void reset() = 0;
  virtual int on_enter(int state) = 0;
};

class MemorylessRunner : public StrategyRunner {
 public:
  MemorylessRunner(const ParityMDP& m, MemorylessStrategy f) : m_(&m), f_(std::move(f)) {}
  void reset() override {}
  int on_enter(int state) override {
    return m_->states[state].owner == 1 ? f_.at(state) : -1;
  }

 private:
  const ParityMDP* m_;
  MemorylessStrategy f_;
};

class FiniteMemoryRunner : public StrategyRunner {
 public:
  FiniteMemoryRunner(const ParityMDP& m, FiniteMemoryStrategy f)
      : m_(&m), f_(std::move(f)), mem_(f_.initial_memory) {}
  void reset() override { mem_ = f_.initial_memory; }
  int on_enter(int state) override {
    mem_ = f_.enter(state, mem_);
    return m_->states[state].owner == 1 ? f_.action_at(state, mem_) : -1;
  }

 private:
  const ParityMDP* m_;
  FiniteMemoryStrategy f_;
  int mem_;
};

// Infinite-memory strategy with vanishing expected cost overhead: repeats
// ever longer blocks of the component-optimal mean-payoff strategy followed
// by maximal-probability runs toward the component's top-rank states, and
// drops to a positional parity-winning strategy if a full iteration misses
// them (a probability-zero event in the limit, so the expected mean cost
// tends to the component optimum while every play stays surely winning).
class ProceduralStrategy : public StrategyRunner {
 public:
  enum class Phase { Mimic, MeanPayoff, Reach, Fallback };

  struct ComponentSchedule {
    std::vector<char> in_c;     // arena mask of the component
    std::vector<char> target;   // arena mask of its top-rank states
    MemorylessStrategy g;       // mean-payoff optimal inside
    MemorylessStrategy reach;   // max-probability toward target
    long size = 0;
  };

  void reset() override;
  int on_enter(int state) override;

  Phase phase() const { return phase_; }
  long iteration() const { return iteration_; }
  std::uint64_t step_in_phase() const { return step_in_phase_; }
  const ScheduleParams& params() const { return params_; }

 private:
  friend ProceduralStrategy epsilon_strategy_gec(const ParityMDP&, const EndComponent&,
                                                 const ScheduleParams&);
  friend ProceduralStrategy global_epsilon_strategy(const ParityMDP&, const Rational&,
                                                    std::uint64_t, const ScheduleParams&);

  void activate(int schedule_index, int state);
  int schedule_step(int state);

  const ParityMDP* m_ = nullptr;
  ScheduleParams params_;
  std::vector<ComponentSchedule> schedules_;
  MemorylessStrategy fallback_;

  // Mimic front-end (global strategy only).
  bool has_mimic_ = false;
  MemorylessStrategy mimic_;
  std::vector<int> trigger_;  // state -> schedule index or -1
  std::uint64_t n0_ = 0;

  // Dynamic state.
  Phase phase_ = Phase::MeanPayoff;
  int active_ = 0;
  long iteration_ = 1;
  std::uint64_t step_in_phase_ = 0;
  std::uint64_t budget_ = 0;
  std::uint64_t mimic_steps_ = 0;
  bool target_seen_ = false;
};

// The component schedule for a good end component C of the pruned arena:
// g = optimal expected-mean-cost strategy inside C, reach phases steer to
// C's top-rank states with maximal probability, fallback = positional
// parity-winning strategy of the whole arena. Throws NotGEC when C is not
// a good end component inside the sure-winning region, InvalidSchedule on
// bad params. The returned object keeps a pointer to `m`.
ProceduralStrategy epsilon_strategy_gec(const ParityMDP& m, const EndComponent& c,
                                        const ScheduleParams& params = ScheduleParams{});

// Finite-memory strategy for a super-good end component: cycles "play the
// component-optimal strategy g for k steps, then play the witness h until
// a state of C^maxeven is entered, then start over". Its expected mean
// cost tends to the component optimum as k grows; every play is surely
// winning. Memory size is exactly k + |h's memory| + 2: one start element,
// and one fallback element holding a positional parity strategy for states
// outside C (reachable only through zero-probability environment moves).
// Throws NotSGEC.
FiniteMemoryStrategy epsilon_strategy_sgec(const ParityMDP& m, const EndComponent& c, long k);

// Whole-arena schedule: plays the optimal strategy of the reduced
// mean-payoff MDP for up to n0 steps; when the play enters a recurrent
// class of that strategy (contained in a retained good end component), the
// component's schedule takes over for good; if n0 steps pass first, the
// parity fallback takes over for good. epsilon is advisory: the
// approximation quality is governed by the schedule params and n0. Throws
// Unrealizable when the initial state is not sure-winning.
ProceduralStrategy global_epsilon_strategy(const ParityMDP& m, const Rational& epsilon,
                                           std::uint64_t n0,
                                           const ScheduleParams& params = ScheduleParams{});

// One simulated trajectory: s_0 .. s_m (so m steps, m+1 states), exact
// arithmetic mean of the visited states' costs, and diagnostics over the
// final window of ceil((m+1)/10) states: the maximal rank seen there and
// the set of states visited there.
struct TrajectoryStats {
  std::uint64_t horizon = 0;
  Rational mean_cost;
  int max_suffix_rank = 0;
  std::vector<int> suffix_visited;  // sorted, deduplicated
  std::uint64_t seed = 0;
};

// Runs one trajectory from the initial state. Environment actions are
// sampled with their exact probabilities (rejection sampling over the
// common denominator, driven by std::mt19937_64 seeded with `seed`), so
// results are bit-for-bit reproducible. System actions come from the
// runner and are checked for availability.
TrajectoryStats simulate(const ParityMDP& m, StrategyRunner& f, std::uint64_t horizon,
                         std::uint64_t seed);

// Derives the seed of trajectory `index` from a base seed (splitmix64
// applied to base + (index+1) increments of the splitmix constant).
std::uint64_t trajectory_seed(std::uint64_t base, std::uint64_t index);

// Runs `count` independent trajectories with seeds trajectory_seed(base,
// 0..count-1), on up to `threads` worker threads. The factory must produce
// a fresh runner per call; results come back ordered by trajectory index
// regardless of the thread count.
std::vector<TrajectoryStats> simulate_many(
    const ParityMDP& m, const std::function<std::unique_ptr<StrategyRunner>()>& factory,
    std::uint64_t horizon, std::uint64_t base_seed, int count, int threads = 1);

// Exact certificate for a finite-memory strategy from the initial state:
// sure_winning iff every reachable cycle of the (state, memory) product has
// even top rank with the environment fully adversarial (all actions, even
// zero-probability ones); value = exact long-run average cost of the
// product chain with the environment stochastic.
struct CertifyResult {
  bool sure_winning = false;
  Rational value;
};
CertifyResult certify_finite_strategy(const ParityMDP& m, const FiniteMemoryStrategy& f);

}  // namespace pmdp
