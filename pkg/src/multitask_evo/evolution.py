"""Multifactorial evolutionary algorithm (MFEA) and the single-task baseline.

The population is stored column-wise in numpy arrays. Skill factors are
0-based task indices. Undefined factorial costs are ``nan`` and undefined
factorial ranks are ``0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .benchmarks import CompositeProblem, eval_task, single_task_problem
from .unified_space import TaskSpec, _decode_unchecked


class PopulationStateError(RuntimeError):
    """Population bookkeeping is inconsistent with the requested operation."""


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 100
    rmp: float = 0.3
    sbx_eta: float = 2.0
    mutation_eta: float = 5.0
    mutation_prob: Optional[float] = None  # None -> 1 / D_multitask
    eval_budget: int = 100_000
    penalty_lambda: float = 1e10
    seed: int = 0

    def validate(self, n_tasks: int = 1) -> None:
        n = self.population_size
        if n < 2 or n % 2:
            raise ValueError(f"population_size must be a positive even integer, got {n}")
        if n < 2 * n_tasks:
            raise ValueError(f"population_size {n} too small for {n_tasks} tasks")
        if not 0.0 <= self.rmp <= 1.0:
            raise ValueError(f"rmp must lie in [0, 1], got {self.rmp}")
        if self.sbx_eta <= 0 or self.mutation_eta <= 0:
            raise ValueError("distribution indices must be positive")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError(f"mutation_prob must lie in [0, 1], got {self.mutation_prob}")
        if self.eval_budget < n:
            raise ValueError(
                f"eval_budget {self.eval_budget} is smaller than population_size {n}"
            )
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def mutation_probability(self, dimension: int) -> float:
        return 1.0 / dimension if self.mutation_prob is None else self.mutation_prob


# Independent generator per concern so that adding draws in one place does
# not shift the others.
_STREAMS = {"init": 0, "mating": 1, "mutation": 2, "ties": 3}


@dataclass
class RandomStreams:
    init: np.random.Generator
    mating: np.random.Generator
    mutation: np.random.Generator
    ties: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        return cls(**{name: np.random.default_rng([seed, sid]) for name, sid in _STREAMS.items()})


@dataclass(frozen=True)
class Individual:
    chromosome: np.ndarray
    skill_factor: int
    factorial_costs: tuple
    factorial_ranks: tuple
    scalar_fitness: Optional[float]


@dataclass
class Population:
    chromosomes: np.ndarray  # (n, D)
    skill_factors: np.ndarray  # (n,) int
    factorial_costs: np.ndarray  # (n, K), nan where not evaluated
    factorial_ranks: np.ndarray = None  # (n, K), 0 where unranked
    scalar_fitness: np.ndarray = None  # (n,), nan until computed
    generation: int = 0

    def __post_init__(self):
        n, k = self.factorial_costs.shape
        if self.factorial_ranks is None:
            self.factorial_ranks = np.zeros((n, k), dtype=np.int64)
        if self.scalar_fitness is None:
            self.scalar_fitness = np.full(n, np.nan)

    def __len__(self):
        return self.chromosomes.shape[0]

    @property
    def n_tasks(self) -> int:
        return self.factorial_costs.shape[1]

    @property
    def members(self) -> list[Individual]:
        out = []
        for i in range(len(self)):
            costs = tuple(None if np.isnan(c) else float(c) for c in self.factorial_costs[i])
            ranks = tuple(None if r == 0 else int(r) for r in self.factorial_ranks[i])
            phi = self.scalar_fitness[i]
            out.append(
                Individual(
                    self.chromosomes[i].copy(),
                    int(self.skill_factors[i]),
                    costs,
                    ranks,
                    None if np.isnan(phi) else float(phi),
                )
            )
        return out

    def take(self, idx) -> "Population":
        return Population(
            self.chromosomes[idx],
            self.skill_factors[idx],
            self.factorial_costs[idx],
            self.factorial_ranks[idx],
            self.scalar_fitness[idx],
            self.generation,
        )

    @staticmethod
    def union(first: "Population", second: "Population") -> "Population":
        return Population(
            np.concatenate([first.chromosomes, second.chromosomes]),
            np.concatenate([first.skill_factors, second.skill_factors]),
            np.concatenate([first.factorial_costs, second.factorial_costs]),
            np.concatenate([first.factorial_ranks, second.factorial_ranks]),
            np.concatenate([first.scalar_fitness, second.scalar_fitness]),
            max(first.generation, second.generation),
        )


@dataclass
class RunTrace:
    """Per-generation best-so-far costs of one seeded run."""

    algorithm: str
    seed: int
    generations: np.ndarray  # (G,)
    evaluations: np.ndarray  # (G,) cumulative
    best: np.ndarray  # (G, K)
    task_labels: tuple = field(default_factory=tuple)

    @property
    def final_best(self) -> np.ndarray:
        return self.best[-1].copy()

    @property
    def per_generation(self) -> list[tuple]:
        return [
            (int(g), int(e), tuple(float(v) for v in b))
            for g, e, b in zip(self.generations, self.evaluations, self.best)
        ]


def factorial_cost(objective, violation=0.0, penalty_lambda: float = 1e10):
    """Penalized cost ``lambda * violation + objective``."""
    violation = np.asarray(violation, dtype=float)
    if np.any(violation < 0):
        raise ValueError("constraint violation must be non-negative")
    out = np.where(violation > 0, penalty_lambda * violation + objective, objective)
    return float(out) if out.ndim == 0 else out


def _evaluate_selective(chromosomes, skill_factors, problem, penalty_lambda):
    """Evaluate each row on its skill task only; returns (costs, n_evaluations)."""
    n = chromosomes.shape[0]
    costs = np.full((n, problem.n_tasks), np.nan)
    for k, task in enumerate(problem.tasks):
        rows = np.flatnonzero(skill_factors == k)
        if rows.size:
            x = _decode_unchecked(chromosomes[rows], task)
            costs[rows, k] = factorial_cost(eval_task(task, x), 0.0, penalty_lambda)
    return costs, n


def compute_factorial_ranks(pop: Population, rng: np.random.Generator) -> Population:
    """Rank members per task by ascending factorial cost, ties broken at random."""
    costs = pop.factorial_costs
    evaluated = ~np.isnan(costs)
    if not np.all(evaluated.any(axis=1)):
        raise PopulationStateError("member without any evaluated task")
    ranks = np.zeros(costs.shape, dtype=np.int64)
    for k in range(costs.shape[1]):
        rows = np.flatnonzero(evaluated[:, k])
        if rows.size == 0:
            continue
        order = np.lexsort((rng.random(rows.size), costs[rows, k]))
        ranks[rows[order], k] = np.arange(1, rows.size + 1)
    pop.factorial_ranks = ranks
    return pop


def compute_scalar_fitness(pop: Population) -> Population:
    """Set ``phi = 1 / rank`` on the skill task.

    Members ranked on several tasks first move their skill factor to the task
    where they rank best.
    """
    ranks = pop.factorial_ranks
    ranked = ranks > 0
    multi = ranked.sum(axis=1) > 1
    if np.any(multi):
        masked = np.where(ranked, ranks, np.iinfo(np.int64).max)
        pop.skill_factors = np.where(multi, np.argmin(masked, axis=1), pop.skill_factors)
    own = ranks[np.arange(len(pop)), pop.skill_factors]
    if np.any(own == 0):
        raise PopulationStateError("member has no rank on its skill task")
    pop.scalar_fitness = 1.0 / own
    return pop


def elitist_select(pop: Population, n: int, rng: np.random.Generator) -> Population:
    """Keep the ``n`` members with highest scalar fitness.

    Ties on fitness prefer the lower cost on the member's own skill task, then
    a random draw.
    """
    if n < 1 or len(pop) < n:
        raise ValueError(f"cannot select {n} members from {len(pop)}")
    phi = pop.scalar_fitness
    if np.any(np.isnan(phi)):
        raise PopulationStateError("scalar fitness not computed")
    own_cost = pop.factorial_costs[np.arange(len(pop)), pop.skill_factors]
    order = np.lexsort((rng.random(len(pop)), own_cost, -phi))
    return pop.take(order[:n])


def _sbx_beta(u, eta):
    return np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )


def _sbx_children(p1, p2, u, eta):
    beta = _sbx_beta(u, eta)
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1, c2


def sbx_crossover(p1, p2, eta: float, rng):
    """Simulated binary crossover applied to every coordinate.

    Children keep the coordinate order of their parents (no variable swap)
    and are clipped to ``[0, 1]``.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape:
        raise ValueError(f"parent shapes differ: {p1.shape} vs {p2.shape}")
    u = rng.random(p1.shape)
    c1, c2 = _sbx_children(p1, p2, u, eta)
    return np.clip(c1, 0.0, 1.0), np.clip(c2, 0.0, 1.0)


def _polynomial_delta(x, u, eta):
    # Bounded polynomial mutation on [0, 1].
    mut_pow = 1.0 / (eta + 1.0)
    lower = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - x) ** (eta + 1.0)
    upper = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * x ** (eta + 1.0)
    with np.errstate(invalid="ignore"):
        return np.where(u < 0.5, lower**mut_pow - 1.0, 1.0 - upper**mut_pow)


def polynomial_mutation(c, eta: float, prob: float, rng):
    """Mutate each key independently with probability ``prob``."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"mutation probability must lie in [0, 1], got {prob}")
    c = np.asarray(c, dtype=float)
    mask = rng.random(c.shape) < prob
    u = rng.random(c.shape)
    mutated = np.clip(c + _polynomial_delta(c, u, eta), 0.0, 1.0)
    return np.where(mask, mutated, c)


def generate_offspring(
    pop: Population,
    config: EvolutionConfig,
    rng: np.random.Generator,
    mutation_rng: Optional[np.random.Generator] = None,
) -> Population:
    """Assortative mating with selective imitation of skill factors.

    Parents are shuffled and paired. A pair undergoes SBX when both parents
    share a skill factor or a uniform draw falls below ``rmp``; each child
    then imitates either parent with equal probability. Otherwise each parent
    yields one mutated child that keeps the parent's skill factor. All
    children go through polynomial mutation.
    """
    if mutation_rng is None:
        mutation_rng = rng
    n = len(pop)
    if n < 2:
        raise ValueError("need at least two parents")
    n_pairs = n // 2
    d = pop.chromosomes.shape[1]

    perm = rng.permutation(n)
    ia, ib = perm[0 : 2 * n_pairs : 2], perm[1 : 2 * n_pairs : 2]
    pa, pb = pop.chromosomes[ia], pop.chromosomes[ib]
    sa, sb = pop.skill_factors[ia], pop.skill_factors[ib]

    mate_draw = rng.random(n_pairs)
    u = rng.random((n_pairs, d))
    imitate = rng.random((n_pairs, 2))
    crossover = (sa == sb) | (mate_draw < config.rmp)

    c1, c2 = _sbx_children(pa, pb, u, config.sbx_eta)
    cx = crossover[:, None]
    child_a = np.where(cx, c1, pa)
    child_b = np.where(cx, c2, pb)
    skill_a = np.where(crossover, np.where(imitate[:, 0] <= 0.5, sa, sb), sa)
    skill_b = np.where(crossover, np.where(imitate[:, 1] <= 0.5, sa, sb), sb)

    children = np.clip(np.concatenate([child_a, child_b]), 0.0, 1.0)
    children = polynomial_mutation(
        children, config.mutation_eta, config.mutation_probability(d), mutation_rng
    )
    skills = np.concatenate([skill_a, skill_b])
    if n % 2:
        # Odd population: the unpaired parent reproduces by mutation alone.
        last = perm[-1:]
        lone = polynomial_mutation(
            pop.chromosomes[last], config.mutation_eta, config.mutation_probability(d), mutation_rng
        )
        children = np.concatenate([children, lone])
        skills = np.concatenate([skills, pop.skill_factors[last]])

    return Population(
        children,
        skills.astype(np.int64),
        np.full((n, pop.n_tasks), np.nan),
        generation=pop.generation + 1,
    )


def initialize_population(
    config: EvolutionConfig,
    problem: CompositeProblem,
    rng: np.random.Generator,
    tie_rng: Optional[np.random.Generator] = None,
) -> tuple[Population, int]:
    """Random population with round-robin skill factors, evaluated selectively.

    The j-th member (1-based) gets task ``mod(j, K)``, i.e. task index
    ``mod(j, K) + 1`` in 1-based numbering. Returns the population and the
    number of evaluations spent.
    """
    config.validate(problem.n_tasks)
    n, k = config.population_size, problem.n_tasks
    chromosomes = rng.random((n, problem.dimension))
    skills = (np.arange(1, n + 1) % k).astype(np.int64)
    costs, used = _evaluate_selective(chromosomes, skills, problem, config.penalty_lambda)
    pop = Population(chromosomes, skills, costs)
    compute_factorial_ranks(pop, tie_rng if tie_rng is not None else rng)
    compute_scalar_fitness(pop)
    return pop, used


def _best_per_task(pop: Population) -> np.ndarray:
    costs = pop.factorial_costs
    return np.array(
        [np.min(col[~np.isnan(col)]) if np.any(~np.isnan(col)) else np.inf for col in costs.T]
    )


GenerationHook = Callable[[Population, int], None]


def evolve(
    problem: CompositeProblem,
    config: EvolutionConfig,
    algorithm: str = "mfea",
    on_generation: Optional[GenerationHook] = None,
) -> RunTrace:
    """Generational (mu + lambda) multifactorial loop under a shared evaluation budget.

    ``on_generation(population, evaluations_used)`` is called after
    initialization and after every generation.
    """
    config.validate(problem.n_tasks)
    streams = RandomStreams.from_seed(config.seed)
    n = config.population_size

    pop, used = initialize_population(config, problem, streams.init, streams.ties)
    best = _best_per_task(pop)
    gens, evals, bests = [0], [used], [best.copy()]
    if on_generation is not None:
        on_generation(pop, used)

    while used + n <= config.eval_budget:
        children = generate_offspring(pop, config, streams.mating, streams.mutation)
        children.factorial_costs, spent = _evaluate_selective(
            children.chromosomes, children.skill_factors, problem, config.penalty_lambda
        )
        used += spent
        merged = Population.union(children, pop)
        compute_factorial_ranks(merged, streams.ties)
        compute_scalar_fitness(merged)
        pop = elitist_select(merged, n, streams.ties)
        pop.generation = children.generation
        # Re-rank within the survivors so ranks stay a permutation of 1..m.
        compute_factorial_ranks(pop, streams.ties)
        compute_scalar_fitness(pop)

        best = np.minimum(best, _best_per_task(pop))
        gens.append(pop.generation)
        evals.append(used)
        bests.append(best.copy())
        if on_generation is not None:
            on_generation(pop, used)

    return RunTrace(
        algorithm=algorithm,
        seed=config.seed,
        generations=np.array(gens, dtype=np.int64),
        evaluations=np.array(evals, dtype=np.int64),
        best=np.array(bests),
        task_labels=tuple(t.label or t.function_id for t in problem.tasks),
    )


def run_mfea(
    problem: CompositeProblem,
    config: EvolutionConfig,
    on_generation: Optional[GenerationHook] = None,
) -> RunTrace:
    return evolve(problem, config, "mfea", on_generation)


def run_soea(
    task: TaskSpec,
    config: EvolutionConfig,
    on_generation: Optional[GenerationHook] = None,
) -> RunTrace:
    """Single-task EA with the same operators; with one task every pair mates."""
    return evolve(single_task_problem(task), config, "soea", on_generation)


def with_budget(config: EvolutionConfig, eval_budget: int, seed: Optional[int] = None) -> EvolutionConfig:
    changes = {"eval_budget": eval_budget}
    if seed is not None:
        changes["seed"] = seed
    return replace(config, **changes)
