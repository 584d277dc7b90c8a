"""Expected-infection dynamics of a self-replicating payload on a LAN.

Three views of the same process:

* a discrete recurrence for the expected infected count,
  ``E[n+1] = E[n] + (M/N) * E[n] * (1 - E[n]/N)``;
* its logistic closed form ``N / (1 + (N/X0 - 1) * exp(-n*M/N))``;
* an agent-based Monte Carlo simulation over uniformly random ordered
  communication pairs, used as an independent oracle.

N is the machine count, M the number of data communications per unit time,
X0 the initially infected count. The per-communication infection rule is:
the target becomes infected iff the source is infected and the target is
not. Pairs are drawn with replacement (the pair distribution is otherwise
unspecified); curve values are real-valued expectations, never rounded.

The recurrence view is a discrete logistic map: it stays monotone and
bounded by N only while M <= N. For larger M it can overshoot, and
iterating raises a domain error once the state leaves [0, N]. The closed
form is well behaved for any M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, ParseError

__all__ = [
    "PropagationParams",
    "PropagationCurve",
    "CommGraph",
    "expected_infected_closed_form",
    "step_recurrence",
    "simulate_curve",
    "inflection_time",
    "monte_carlo_propagation",
    "write_curve_csv",
    "read_curve_csv",
]


@dataclass(frozen=True)
class PropagationParams:
    """Model parameters: machine count N, communications per interval M, seed count X0."""

    n_computers: int
    comms_per_interval: int
    initial_infected: int = 1

    def __post_init__(self):
        if self.n_computers < 1:
            raise ParameterError(f"n_computers must be >= 1, got {self.n_computers}")
        if self.comms_per_interval < 1:
            raise ParameterError(f"comms_per_interval must be >= 1, got {self.comms_per_interval}")
        if not 1 <= self.initial_infected <= self.n_computers:
            raise ParameterError(
                f"initial_infected must lie in [1, {self.n_computers}], got {self.initial_infected}")


@dataclass(eq=False)
class PropagationCurve:
    """Expected infected count per time step."""

    steps: np.ndarray
    expected_infected: np.ndarray

    def __post_init__(self):
        self.steps = np.asarray(self.steps, dtype=np.int64)
        self.expected_infected = np.asarray(self.expected_infected, dtype=np.float64)
        if self.steps.shape != self.expected_infected.shape or self.steps.ndim != 1:
            raise ParameterError("steps and expected_infected must be matching 1-d sequences")
        if self.steps.size and np.any(np.diff(self.steps) <= 0):
            raise ParameterError("time steps must be strictly increasing")

    def __len__(self) -> int:
        return int(self.steps.size)

    def points(self) -> list[tuple[int, float]]:
        return [(int(n), float(v)) for n, v in zip(self.steps, self.expected_infected)]


@dataclass
class CommGraph:
    """Machines, directed data-flow pairs between them, and the infected subset."""

    nodes: set = field(default_factory=set)
    edges: set = field(default_factory=set)
    infected: set = field(default_factory=set)

    def __post_init__(self):
        for src, dst in self.edges:
            if src == dst:
                raise ParameterError(f"self-loop ({src}, {dst}) is not a valid communication pair")
            if src not in self.nodes or dst not in self.nodes:
                raise ParameterError(f"edge ({src}, {dst}) references unknown nodes")
        if not self.infected <= self.nodes:
            raise ParameterError("infected set must be a subset of nodes")

    @classmethod
    def complete(cls, n: int, infected=(0,)) -> "CommGraph":
        """Fully connected graph on nodes 0..n-1 (every ordered pair communicates)."""
        nodes = set(range(n))
        edges = {(i, j) for i in nodes for j in nodes if i != j}
        return cls(nodes=nodes, edges=edges, infected=set(infected))

    def communicate(self, source, target) -> bool:
        """Apply one communication; returns True if the target was newly infected."""
        if (source, target) not in self.edges:
            return False
        if source in self.infected and target not in self.infected:
            self.infected.add(target)
            return True
        return False


def expected_infected_closed_form(params: PropagationParams, n: float) -> float:
    """Logistic expected infected count at (integer or real) time n."""
    if n < 0:
        raise ParameterError(f"time step must be nonnegative, got {n}")
    big_n = params.n_computers
    x0 = params.initial_infected
    return big_n / (1.0 + (big_n / x0 - 1.0) * math.exp(-n * params.comms_per_interval / big_n))


def step_recurrence(params: PropagationParams, current: float) -> float:
    """One step of the expectation recurrence; fixed points at 0 and N."""
    big_n = params.n_computers
    if not 0 <= current <= big_n:
        raise ParameterError(f"current must lie in [0, {big_n}], got {current}")
    rate = params.comms_per_interval / big_n
    return current + rate * current * (1.0 - current / big_n)


def simulate_curve(params: PropagationParams, n_max: int, method: str = "closed_form") -> PropagationCurve:
    """Expected-infection trajectory for n = 0..n_max."""
    if n_max < 0:
        raise ParameterError(f"n_max must be >= 0, got {n_max}")
    steps = np.arange(n_max + 1)
    if method == "closed_form":
        values = np.array([expected_infected_closed_form(params, int(n)) for n in steps])
    elif method == "recurrence":
        values = np.empty(n_max + 1)
        values[0] = float(params.initial_infected)
        for i in range(n_max):
            values[i + 1] = step_recurrence(params, values[i])
    else:
        raise ParameterError(f"unknown method {method!r} (expected 'closed_form' or 'recurrence')")
    return PropagationCurve(steps, values)


def inflection_time(params: PropagationParams) -> float:
    """Time at which the closed form reaches N/2: (N/M) * ln(N/X0 - 1)."""
    if params.initial_infected >= params.n_computers:
        raise ParameterError("no inflection point: initial_infected >= n_computers")
    big_n = params.n_computers
    return (big_n / params.comms_per_interval) * math.log(big_n / params.initial_infected - 1.0)


def monte_carlo_propagation(params: PropagationParams, seed: int, n_max: int,
                            trials: int) -> PropagationCurve:
    """Agent simulation: mean infected count per step across seeded trials.

    Each step draws ``comms_per_interval`` uniformly random ordered pairs
    (source != target, with replacement) and applies them sequentially, so an
    infection can propagate onward within the same interval. Deterministic
    for a fixed seed.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if n_max < 0:
        raise ParameterError(f"n_max must be >= 0, got {n_max}")
    rng = np.random.default_rng(seed)
    n = params.n_computers
    m = params.comms_per_interval
    totals = np.zeros(n_max + 1, dtype=np.float64)
    for _ in range(trials):
        infected = np.zeros(n, dtype=bool)
        infected[: params.initial_infected] = True
        count = params.initial_infected
        totals[0] += count
        for step in range(1, n_max + 1):
            if count < n and n >= 2:
                sources = rng.integers(0, n, size=m)
                targets = rng.integers(0, n - 1, size=m)
                targets = targets + (targets >= sources)
                for s, t in zip(sources, targets):
                    if infected[s] and not infected[t]:
                        infected[t] = True
                        count += 1
            totals[step] += count
    return PropagationCurve(np.arange(n_max + 1), totals / trials)


def write_curve_csv(curve: PropagationCurve, path) -> None:
    """CSV export, header ``n,expected_infected``, full float precision."""
    lines = ["n,expected_infected"]
    lines.extend(f"{int(n)},{float(v)!r}" for n, v in zip(curve.steps, curve.expected_infected))
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve_csv(path) -> PropagationCurve:
    steps, values = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line == "n,expected_infected":
            continue
        try:
            n_text, _, v_text = line.partition(",")
            steps.append(int(n_text))
            values.append(float(v_text))
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: bad curve row {line!r}") from e
    return PropagationCurve(np.array(steps), np.array(values))
