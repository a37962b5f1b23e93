#include "fourthkind/differential_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double value) { return std::isnan(value) ? kInf : value; }

class BudgetedObjective {
 public:
  BudgetedObjective(const Objective& objective, std::size_t max_evaluations)
      : objective_(objective), max_evaluations_(max_evaluations) {}

  double operator()(const Vector& x) {
    ++evaluations_;
    return sanitize(objective_(x));
  }

  bool exhausted() const { return max_evaluations_ != 0 && evaluations_ >= max_evaluations_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const Objective& objective_;
  std::size_t max_evaluations_;
  std::size_t evaluations_ = 0;
};

}  // namespace

std::size_t DEConfig::population_for(std::size_t dimension) const {
  if (population != 0) return population;
  return std::max<std::size_t>(20, 15 * dimension);
}

void DEConfig::validate() const {
  if (population != 0 && population < 4) {
    throw DomainError("differential evolution needs a population of at least 4");
  }
  if (!(mutation > 0.0 && mutation <= 2.0)) throw DomainError("DE mutation factor must lie in (0, 2]");
  if (!(crossover >= 0.0 && crossover <= 1.0)) throw DomainError("DE crossover rate must lie in [0, 1]");
  if (max_generations == 0) throw DomainError("DE needs at least one generation");
  if (restarts == 0) throw DomainError("DE needs at least one run");
}

DEResult minimize_de(const Objective& objective, const ParameterBox& box, const DEConfig& config,
                     RandomStream& stream, std::span<const Vector> seeds,
                     std::size_t max_evaluations) {
  config.validate();
  const std::size_t dim = box.dimension();
  const std::size_t pop_size = config.population_for(dim);
  BudgetedObjective f(objective, max_evaluations);

  DEResult result;
  result.best = box.center();
  result.value = kInf;
  bool have_best = false;

  std::vector<Vector> pop;
  std::vector<double> fitness(pop_size);

  for (std::size_t run = 0; run < config.restarts && !f.exhausted(); ++run) {
    pop = latin_hypercube(box, pop_size, stream);
    std::size_t slot = 0;
    if (have_best) pop[slot++] = result.best;
    for (const Vector& seed : seeds) {
      if (slot >= pop_size) break;
      pop[slot++] = box.clamp(seed);
    }
    for (std::size_t i = 0; i < pop_size; ++i) {
      fitness[i] = f(pop[i]);
      if (!have_best || fitness[i] < result.value) {
        result.value = fitness[i];
        result.best = pop[i];
        have_best = true;
      }
    }

    std::deque<double> history;
    history.push_back(result.value);
    Vector trial(static_cast<Eigen::Index>(dim));
    for (std::size_t gen = 0; gen < config.max_generations && !f.exhausted(); ++gen) {
      for (std::size_t i = 0; i < pop_size && !f.exhausted(); ++i) {
        std::size_t r1, r2, r3;
        do r1 = stream.below(pop_size); while (r1 == i);
        do r2 = stream.below(pop_size); while (r2 == i || r2 == r1);
        do r3 = stream.below(pop_size); while (r3 == i || r3 == r1 || r3 == r2);
        const std::size_t forced = stream.below(dim);
        for (std::size_t j = 0; j < dim; ++j) {
          const auto a = static_cast<Eigen::Index>(j);
          if (j == forced || stream.uniform() < config.crossover) {
            trial[a] = pop[r1][a] + config.mutation * (pop[r2][a] - pop[r3][a]);
          } else {
            trial[a] = pop[i][a];
          }
        }
        trial = box.clamp(trial);
        const double value = f(trial);
        if (value <= fitness[i]) {
          pop[i] = trial;
          fitness[i] = value;
          if (value < result.value) {
            result.value = value;
            result.best = trial;
          }
        }
      }
      ++result.generations;
      history.push_back(result.value);
      if (history.size() > config.convergence_window + 1) history.pop_front();
      if (history.size() == config.convergence_window + 1 && std::isfinite(result.value)) {
        const double improvement = history.front() - history.back();
        const double scale = std::max(1.0, std::abs(result.value));
        if (improvement <= config.convergence_tolerance * scale) break;
      }
    }
  }
  result.evaluations = f.evaluations();
  return result;
}

DEResult polish_compass(const Objective& objective, const ParameterBox& box, const Vector& start,
                        double initial_step, double final_step, std::size_t max_evaluations) {
  BudgetedObjective f(objective, max_evaluations);
  const std::size_t dim = box.dimension();
  DEResult result;
  result.best = box.clamp(start);
  result.value = f(result.best);

  const Vector width = box.width().cwiseMax(1e-300);
  double step = initial_step;
  Vector last_move = Vector::Zero(static_cast<Eigen::Index>(dim));
  while (step >= final_step && !f.exhausted()) {
    bool improved = false;
    // Repeat the last successful displacement first.
    if (last_move.squaredNorm() > 0.0) {
      const Vector candidate = box.clamp(result.best + last_move);
      const double value = f(candidate);
      if (value < result.value) {
        result.value = value;
        result.best = candidate;
        improved = true;
      }
    }
    for (std::size_t j = 0; j < dim && !improved && !f.exhausted(); ++j) {
      for (const double sign : {1.0, -1.0}) {
        Vector candidate = result.best;
        const auto a = static_cast<Eigen::Index>(j);
        candidate[a] += sign * step * width[a];
        candidate = box.clamp(candidate);
        const double value = f(candidate);
        if (value < result.value) {
          last_move = candidate - result.best;
          result.value = value;
          result.best = candidate;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      last_move.setZero();
    }
    ++result.generations;
  }
  result.evaluations = f.evaluations();
  return result;
}

}  // namespace fourthkind
