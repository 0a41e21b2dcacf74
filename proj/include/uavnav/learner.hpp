// Copyright 2026 The uavnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UAVNAV_LEARNER_HPP
#define UAVNAV_LEARNER_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavnav/features.hpp"
#include "uavnav/mdp.hpp"

namespace uavnav {

/// Raised when a TD target or a weight stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Half { A, B };
enum class Algorithm { DoubleQ, SingleQ };

/// Two sets of per-action linear weights: Q(s, a) = phi(s) . w_a.
class WeightBank {
 public:
  WeightBank() = default;
  WeightBank(std::size_t actions, std::size_t dim)
      : actions_(actions), dim_(dim), a_(actions * dim, 0.0), b_(actions * dim, 0.0) {}

  std::size_t actions() const { return actions_; }
  std::size_t dim() const { return dim_; }

  std::span<double> row(Half h, std::size_t action) {
    check(action);
    return {(h == Half::A ? a_ : b_).data() + action * dim_, dim_};
  }
  std::span<const double> row(Half h, std::size_t action) const {
    check(action);
    return {(h == Half::A ? a_ : b_).data() + action * dim_, dim_};
  }

  const std::vector<double>& raw(Half h) const { return h == Half::A ? a_ : b_; }
  std::vector<double>& raw(Half h) { return h == Half::A ? a_ : b_; }

  bool all_finite() const {
    auto fin = [](double v) { return std::isfinite(v); };
    return std::all_of(a_.begin(), a_.end(), fin) && std::all_of(b_.begin(), b_.end(), fin);
  }

  void scale(double factor) {
    for (double& v : a_) v *= factor;
    for (double& v : b_) v *= factor;
  }

  friend bool operator==(const WeightBank&, const WeightBank&) = default;

 private:
  void check(std::size_t action) const {
    if (action >= actions_) throw std::out_of_range("WeightBank: action index out of range");
  }

  std::size_t actions_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> a_;
  std::vector<double> b_;
};

struct LearnerConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  double eps_start = 0.5;
  double eps_end = 0.05;
  /// Episodes over which epsilon decays linearly; 0 means 60% of `episodes`.
  std::size_t decay_episodes = 0;
  std::size_t episodes = 2000;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::DoubleQ;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("learner.alpha must be in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("learner.gamma must be in [0, 1)");
    if (!(eps_start >= 0.0 && eps_start <= 1.0) || !(eps_end >= 0.0 && eps_end <= 1.0))
      throw std::invalid_argument("learner epsilon values must be in [0, 1]");
  }

  double epsilon(std::size_t episode) const {
    const std::size_t span =
        decay_episodes > 0 ? decay_episodes
                           : static_cast<std::size_t>(0.6 * static_cast<double>(episodes));
    if (span == 0 || episode >= span) return eps_end;
    const double frac = static_cast<double>(episode) / static_cast<double>(span);
    return eps_start + (eps_end - eps_start) * frac;
  }

  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

namespace detail {

inline void check_shape(std::span<const double> phi, const WeightBank& bank) {
  if (phi.size() != bank.dim())
    throw std::invalid_argument("feature dimension " + std::to_string(phi.size()) +
                                " does not match weight dimension " + std::to_string(bank.dim()));
}

inline double dot(std::span<const double> x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * w[i];
  return s;
}

// Entries this small contribute below double precision next to the dominant
// ones, so the learner skips them.
inline constexpr double kNegligibleFeature = 1e-16;

/// Non-negligible entries of a feature vector, used by the training loop.
struct Support {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  void assign(std::span<const double> phi) {
    index.clear();
    value.clear();
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (std::abs(phi[i]) > kNegligibleFeature) {
        index.push_back(static_cast<std::uint32_t>(i));
        value.push_back(phi[i]);
      }
    }
  }

  double dot(std::span<const double> w) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * w[index[k]];
    return s;
  }

  void axpy(double scale, std::span<double> w) const {
    for (std::size_t k = 0; k < index.size(); ++k) w[index[k]] += scale * value[k];
  }
};

template <class Phi>
double q_of(const Phi& phi, std::span<const double> w) {
  if constexpr (std::same_as<Phi, Support>)
    return phi.dot(w);
  else
    return dot(phi, w);
}

template <class Phi>
void add_scaled(const Phi& phi, double scale, std::span<double> w) {
  if constexpr (std::same_as<Phi, Support>) {
    phi.axpy(scale, w);
  } else {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += scale * phi[i];
  }
}

template <class Phi>
std::size_t argmax_half(const Phi& phi, const WeightBank& bank, Half h, std::size_t n_valid) {
  std::size_t best = 0;
  double best_q = q_of(phi, bank.row(h, 0));
  for (std::size_t a = 1; a < n_valid; ++a) {
    const double q = q_of(phi, bank.row(h, a));
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

template <class Phi>
std::size_t argmax_average(const Phi& phi, const WeightBank& bank, std::size_t n_valid) {
  std::size_t best = 0;
  double best_q = 0.0;
  for (std::size_t a = 0; a < n_valid; ++a) {
    const double q = 0.5 * (q_of(phi, bank.row(Half::A, a)) + q_of(phi, bank.row(Half::B, a)));
    if (a == 0 || q > best_q) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

template <class Rng>
double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <class Phi>
void apply_td(WeightBank& bank, Half h, const Phi& phi, std::size_t action, double target,
              double alpha) {
  if (!std::isfinite(target))
    throw DivergenceError("non-finite TD target (learning rate " + std::to_string(alpha) + ")");
  const auto w = bank.row(h, action);
  const double td_error = target - q_of(phi, w);
  add_scaled(phi, alpha * td_error, w);
  for (double v : w)
    if (!std::isfinite(v)) throw DivergenceError("weight vector of action " + std::to_string(action) +
                                                 " became non-finite");
}

template <class Phi>
double double_q_target(const WeightBank& bank, Half h, double reward, const Phi& phi_next,
                       bool done, double gamma, std::size_t n_valid_next) {
  if (done) return reward;
  const Half other = h == Half::A ? Half::B : Half::A;
  const std::size_t best = argmax_half(phi_next, bank, h, n_valid_next);
  return reward + gamma * q_of(phi_next, bank.row(other, best));
}

template <class Phi>
double single_q_target(const WeightBank& bank, double reward, const Phi& phi_next, bool done,
                       double gamma, std::size_t n_valid_next) {
  if (done) return reward;
  const std::size_t best = argmax_half(phi_next, bank, Half::A, n_valid_next);
  return reward + gamma * q_of(phi_next, bank.row(Half::A, best));
}

}  // namespace detail

inline double q_value(Half half, std::span<const double> phi, std::size_t action,
                      const WeightBank& bank) {
  detail::check_shape(phi, bank);
  return detail::dot(phi, bank.row(half, action));
}

/// Greedy action under the averaged weights (w^A + w^B) / 2, lowest index on ties.
inline std::size_t greedy_action(std::span<const double> phi, const WeightBank& bank,
                                 std::size_t n_valid = kActionCount) {
  detail::check_shape(phi, bank);
  return detail::argmax_average(phi, bank, std::min(n_valid, bank.actions()));
}

/// Epsilon-greedy behaviour policy.
template <class Rng>
std::size_t select_action(std::span<const double> phi, const WeightBank& bank, double epsilon,
                          Rng& rng, std::size_t n_valid = kActionCount) {
  n_valid = std::min(n_valid, bank.actions());
  if (detail::uniform01(rng) < epsilon)
    return std::uniform_int_distribution<std::size_t>(0, n_valid - 1)(rng);
  return greedy_action(phi, bank, n_valid);
}

/// Double Q-learning step on a chosen half: that half picks the bootstrap
/// action at phi_next, the other half evaluates it.
inline void double_q_update(WeightBank& bank, Half half, std::span<const double> phi,
                            std::size_t action, double reward, std::span<const double> phi_next,
                            bool done, const LearnerConfig& cfg,
                            std::size_t n_valid_next = kActionCount) {
  detail::check_shape(phi, bank);
  detail::check_shape(phi_next, bank);
  const double target = detail::double_q_target(bank, half, reward, phi_next, done, cfg.gamma,
                                                std::min(n_valid_next, bank.actions()));
  detail::apply_td(bank, half, phi, action, target, cfg.alpha);
}

/// Double Q-learning step with the half drawn uniformly from rng. Returns the
/// half that was updated.
template <class Rng>
Half double_q_update(WeightBank& bank, std::span<const double> phi, std::size_t action,
                     double reward, std::span<const double> phi_next, bool done,
                     const LearnerConfig& cfg, Rng& rng, std::size_t n_valid_next = kActionCount) {
  const Half half = detail::uniform01(rng) < 0.5 ? Half::A : Half::B;
  double_q_update(bank, half, phi, action, reward, phi_next, done, cfg, n_valid_next);
  return half;
}

/// Standard Q-learning on half A only.
inline void single_q_update(WeightBank& bank, std::span<const double> phi, std::size_t action,
                            double reward, std::span<const double> phi_next, bool done,
                            const LearnerConfig& cfg, std::size_t n_valid_next = kActionCount) {
  detail::check_shape(phi, bank);
  detail::check_shape(phi_next, bank);
  const double target = detail::single_q_target(bank, reward, phi_next, done, cfg.gamma,
                                                std::min(n_valid_next, bank.actions()));
  detail::apply_td(bank, Half::A, phi, action, target, cfg.alpha);
}

/// An episodic environment the trainer can drive. valid_actions() refers to
/// the current state; actions [0, valid_actions()) are legal.
template <class E>
concept EpisodicEnvironment = requires(E& env, const E& cenv, FeatureVector& phi, std::size_t a) {
  { cenv.num_actions() } -> std::convertible_to<std::size_t>;
  { cenv.valid_actions() } -> std::convertible_to<std::size_t>;
  { cenv.feature_dim() } -> std::convertible_to<std::size_t>;
  env.reset();
  env.observe(phi);
  { env.step(a) } -> std::same_as<Transition>;
  { cenv.feasible() } -> std::convertible_to<bool>;
};

struct EpisodeRecord {
  std::size_t steps = 0;
  double discounted_return = 0.0;
  bool feasible = false;
};

struct TrainResult {
  WeightBank bank;
  std::vector<EpisodeRecord> curve;
};

/// Runs cfg.episodes episodes from env.reset(), updating `bank` in place.
/// Bit-reproducible for a fixed cfg.seed.
template <EpisodicEnvironment Env>
std::vector<EpisodeRecord> train(Env& env, WeightBank& bank, const LearnerConfig& cfg) {
  cfg.validate();
  if (bank.actions() != env.num_actions() || bank.dim() != env.feature_dim())
    throw std::invalid_argument("train: weight bank shape does not match the environment");

  std::mt19937_64 rng(cfg.seed);
  std::vector<EpisodeRecord> curve;
  curve.reserve(cfg.episodes);
  FeatureVector phi, phi_next;
  detail::Support sup, sup_next;

  for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
    const double eps = cfg.epsilon(episode);
    env.reset();
    env.observe(phi);
    sup.assign(phi);
    EpisodeRecord rec;
    double discount = 1.0;
    for (;;) {
      const std::size_t n_valid = env.valid_actions();
      std::size_t action;
      if (detail::uniform01(rng) < eps)
        action = std::uniform_int_distribution<std::size_t>(0, n_valid - 1)(rng);
      else
        action = detail::argmax_average(sup, bank, n_valid);

      const Transition tr = env.step(action);
      env.observe(phi_next);
      sup_next.assign(phi_next);
      const std::size_t n_next = env.valid_actions();

      if (cfg.algorithm == Algorithm::DoubleQ) {
        const Half h = detail::uniform01(rng) < 0.5 ? Half::A : Half::B;
        const double target =
            detail::double_q_target(bank, h, tr.reward, sup_next, tr.terminal, cfg.gamma, n_next);
        detail::apply_td(bank, h, sup, action, target, cfg.alpha);
      } else {
        const double target =
            detail::single_q_target(bank, tr.reward, sup_next, tr.terminal, cfg.gamma, n_next);
        detail::apply_td(bank, Half::A, sup, action, target, cfg.alpha);
      }

      rec.discounted_return += discount * tr.reward;
      discount *= cfg.gamma;
      ++rec.steps;
      if (tr.terminal || tr.truncated) break;
      std::swap(phi, phi_next);
      std::swap(sup, sup_next);
    }
    rec.feasible = env.feasible();
    curve.push_back(rec);
  }
  return curve;
}

template <EpisodicEnvironment Env>
TrainResult train(Env& env, const LearnerConfig& cfg) {
  TrainResult out{WeightBank(env.num_actions(), env.feature_dim()), {}};
  out.curve = train(env, out.bank, cfg);
  return out;
}

/// Trains on the navigation task described by the given specs.
inline TrainResult train(const MapSpec& m, const ChannelParams& cp, const ScenarioSpec& sc,
                         const EncoderSpec& enc, const LearnerConfig& cfg) {
  NavigationEnv<SpecEncoder> env(m, cp, sc, SpecEncoder(enc), cfg.seed);
  return train(env, cfg);
}

/// Greedy rollout (epsilon = 0, averaged weights) from the start position.
template <class Encoder>
EpisodeTrace extract_trajectory(const WeightBank& bank, NavigationEnv<Encoder>& env,
                                double gamma = 0.9) {
  if (bank.actions() != env.num_actions() || bank.dim() != env.feature_dim())
    throw std::invalid_argument("extract_trajectory: weight bank shape does not match the environment");
  EpisodeTrace trace;
  env.reset();
  trace.positions.push_back(env.position());
  FeatureVector phi;
  double discount = 1.0;
  for (;;) {
    env.observe(phi);
    const std::size_t action = greedy_action(phi, bank, env.valid_actions());
    const Transition tr = env.step(action);
    const StepOutcome& out = env.last_outcome();
    trace.positions.push_back(out.next_state);
    trace.rewards.push_back(out.reward);
    trace.steps.push_back(out);
    trace.discounted_return += discount * tr.reward;
    discount *= gamma;
    if (tr.terminal || tr.truncated) break;
  }
  trace.goal_reached = env.done_reason() == DoneReason::GoalReached;
  trace.final_conn = env.connectivity();
  trace.feasible = env.feasible();
  trace.travel_time = static_cast<double>(trace.steps.size()) * env.scenario().dt;
  return trace;
}

inline EpisodeTrace extract_trajectory(const WeightBank& bank, const MapSpec& m,
                                       const ChannelParams& cp, const ScenarioSpec& sc,
                                       const EncoderSpec& enc, double gamma = 0.9) {
  NavigationEnv<SpecEncoder> env(m, cp, sc, SpecEncoder(enc));
  return extract_trajectory(bank, env, gamma);
}

}  // namespace uavnav

#endif  // UAVNAV_LEARNER_HPP
