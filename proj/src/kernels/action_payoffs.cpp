#include "tactics/inmatch.hpp"

namespace tactics::kernels {

std::vector<double> action_payoffs_serial(const StateModelBank& bank, const GameState& state,
                                          const std::vector<SubstitutionAction>& actions,
                                          const MatchStrategies& strategies, Side our_side, double remaining_time,
                                          Objective objective) {
  std::vector<double> out(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out[i] = action_payoff(bank, state, actions[i], strategies, our_side, remaining_time, objective);
  }
  return out;
}

std::vector<double> action_payoffs_omp(const StateModelBank& bank, const GameState& state,
                                       const std::vector<SubstitutionAction>& actions,
                                       const MatchStrategies& strategies, Side our_side, double remaining_time,
                                       Objective objective) {
  std::vector<double> out(actions.size());
  const auto n = static_cast<long>(actions.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    slot.run([&] { out[i] = action_payoff(bank, state, actions[i], strategies, our_side, remaining_time, objective); });
  }
  slot.rethrow();
  return out;
}

}  // namespace tactics::kernels
