"""Periodic Markov chain for a fulfillment center with deadline-driven demand.

State (x_c, x_s, tau): x_c orders due at the next deadline, x_s total
unprocessed orders, tau the age of the operating cycle (time mod T).  Express
orders join the current cycle's deadline batch, regular orders the next one;
processing is oldest-first, so only x_c and x_s matter.  The state space is
truncated at a total-workload bound chosen so the stationary probability of
rejecting orders is negligible.

Two evaluation paths are provided and cross-validated:

* the generic one: :func:`build_kernel` materializes per-age sparse kernels
  over the triangular state enumeration and :func:`stationary` power-iterates
  the cycle map;
* the structural one: :func:`steady_state` exploits that at age 0 the joint
  state is diagonal (the deadline reset makes x_c = x_s) with the
  policy-independent total-workload marginal as its distribution, and that a
  within-cycle step factorizes into a diagonal (express - capacity) shift, a
  deterministic relocation of heavy overflow to the truncation boundary, and
  a regular-order convolution along columns.  One policy evaluation is then
  T - 1 cheap dense-array pushes, which is what makes exhaustive fee-grid
  searches tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .choice import ChoiceModel, split_rates
from .distributions import CapacitySpec, Pmf, discretized_beta, poisson_pmf
from .errors import CapacityInfeasibleError, NumericsError, ParameterError
from .policies import FeeStructure

# Poisson supports are truncated at this residual tail mass (folded onto the
# last support point), keeping every kernel row exactly stochastic.
TAIL_EPS = 1e-12


@dataclass(frozen=True)
class Scenario:
    """Model primitives: cycle length, arrivals, capacity, choice, penalty."""

    period_length: int
    lam: float
    capacity: Pmf
    choice: ChoiceModel
    penalty: float
    rejection_threshold: float = 0.023

    def __post_init__(self) -> None:
        if self.period_length < 2:
            raise ParameterError("period_length must be at least 2")
        if self.lam < 0.0:
            raise ParameterError("arrival rate must be nonnegative")
        if self.penalty < 0.0:
            raise ParameterError("backorder penalty must be nonnegative")
        if not 0.0 < self.rejection_threshold <= 1.0:
            raise ParameterError("rejection_threshold must lie in (0, 1]")
        mean_cap = self.capacity.mean()
        if mean_cap <= 0.0:
            raise ParameterError("capacity must have positive mean")
        if not self.lam < mean_cap:
            raise ParameterError(
                f"utilization lam/E[B] = {self.lam / mean_cap:.4g} must be < 1"
            )

    @property
    def utilization(self) -> float:
        return self.lam / self.capacity.mean()

    @classmethod
    def from_utilization(
        cls,
        period_length: int,
        lam: float,
        utilization: float,
        capacity_scv: float,
        capacity_support_max: int,
        choice: ChoiceModel,
        penalty: float,
        rejection_threshold: float = 0.023,
    ) -> "Scenario":
        """Build a scenario with discretized-Beta capacity hitting a target load."""
        if not 0.0 < utilization < 1.0:
            raise ParameterError("utilization must lie in (0, 1)")
        spec = CapacitySpec(capacity_support_max, lam / utilization, capacity_scv)
        return cls(
            period_length,
            lam,
            discretized_beta(spec),
            choice,
            penalty,
            rejection_threshold,
        )


@dataclass(frozen=True)
class AgeIncome:
    """Arrival split at one age: express/regular pmfs and the posted fee."""

    fee: float
    express_rate: float
    express: Pmf
    regular: Pmf


def age_incomes(scenario: Scenario, policy: FeeStructure) -> tuple[AgeIncome, ...]:
    """Per-age truncated express/regular order pmfs under a policy."""
    if policy.period_length != scenario.period_length:
        raise ParameterError(
            f"policy covers {policy.period_length} ages, scenario has "
            f"{scenario.period_length}"
        )
    out = []
    for fee in policy.fees:
        e_rate, r_rate = split_rates(scenario.choice, scenario.lam, fee)
        out.append(
            AgeIncome(fee, e_rate, poisson_pmf(e_rate, TAIL_EPS), poisson_pmf(r_rate, TAIL_EPS))
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# State enumeration: states (x_c, x_s) with 0 <= x_c <= x_s <= bound, ordered
# by total workload then deadline count.


def state_count(bound: int) -> int:
    return (bound + 1) * (bound + 2) // 2


def state_index(x_c, x_s):
    """Flat index of state (x_c, x_s); accepts scalars or arrays."""
    return x_s * (x_s + 1) // 2 + x_c


def state_pairs(bound: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (x_c, x_s) listing all states in enumeration order."""
    s = np.repeat(np.arange(bound + 1), np.arange(1, bound + 2))
    c = np.concatenate([np.arange(k + 1) for k in range(bound + 1)])
    return c, s


def joint_from_vector(vec: np.ndarray, bound: int) -> np.ndarray:
    """Reshape a state vector into the (x_c, x_s) joint array."""
    c, s = state_pairs(bound)
    J = np.zeros((bound + 1, bound + 1))
    J[c, s] = vec
    return J


def vector_from_joint(J: np.ndarray) -> np.ndarray:
    bound = J.shape[0] - 1
    c, s = state_pairs(bound)
    return J[c, s].copy()


def transition(
    x_c: int, x_s: int, e: int, r: int, b: int, bound: int, deadline: bool = False
) -> tuple[int, int]:
    """One truncated transition given realized arrivals and capacity.

    Overflow beyond the bound is rejected from regular orders first, then
    express; the deadline step resets the due count to the full workload.
    """
    o = max(x_s + e + r - b - bound, 0)
    r_acc = max(r - o, 0)
    e_acc = max(e - max(o - r, 0), 0)
    x_s2 = max(x_s + e_acc + r_acc - b, 0)
    x_c2 = x_s2 if deadline else max(x_c + e_acc - b, 0)
    return x_c2, x_s2


# ---------------------------------------------------------------------------
# Dense linear algebra helpers.


def _gth_stationary(P: np.ndarray) -> np.ndarray:
    """Stationary vector of a row-stochastic matrix by GTH elimination.

    Subtraction-free state reduction; numerically robust for the nearly
    reducible chains that show up at large truncation bounds.
    """
    A = np.array(P, dtype=float)
    n = A.shape[0]
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        if s <= 0.0:
            raise NumericsError("GTH pivot vanished; chain not irreducible")
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    x = np.empty(n)
    x[0] = 1.0
    for k in range(1, n):
        x[k] = x[:k] @ A[:k, k]
    return x / x.sum()


def _suffix_tails(arr: np.ndarray) -> np.ndarray:
    """tails[i] = sum over arr[i:], with one extra trailing zero."""
    out = np.zeros(arr.size + 1)
    out[:-1] = np.cumsum(arr[::-1])[::-1]
    return out


def _workload_matrix(v: np.ndarray, origin: int, bound: int) -> np.ndarray:
    """Kernel of x' = clamp(x + V, 0, bound) for a pmf v with v[origin] = P(V=0)."""
    N = bound + 1
    vals = np.arange(v.size) - origin
    W = np.zeros((N, N))
    for x in range(N):
        np.add.at(W[x], np.clip(x + vals, 0, bound), v)
    return W


# ---------------------------------------------------------------------------
# Structural fast path.


class _AgeStep:
    """Within-cycle transition operator at one age, acting on joint arrays.

    The joint pmf J[x_c, x_s] (upper triangular) evolves by conditioning on
    u = express - capacity and the regular count r, which are independent:

    * mass with u <= bound - x_s shifts diagonally by u;
    * heavier express surpluses overflow: rejections push the state exactly
      onto (x_c + bound - x_s, bound), independent of the realized u;
    * r then shifts the column index, folding at the bound (regular orders
      are rejected first, so rows are unaffected);
    * negative indices finally fold to zero (idle capacity is lost).
    """

    def __init__(self, express: Pmf, regular: Pmf, capacity: Pmf, bound: int):
        self.bound = bound
        self.nb = capacity.support_max
        self.u = np.convolve(express.mass, capacity.mass[::-1])
        self.r = regular.mass
        self.emax = express.support_max
        self._u_tails = _suffix_tails(self.u)
        # total one-step workload shift v = e + r - b, reused for rejection
        # probabilities and the deadline reset
        self.v = np.convolve(self.u, self.r)
        self._v_tails = _suffix_tails(self.v)

    def u_tail(self, m: int) -> float:
        """P(u > m)."""
        idx = min(max(m + self.nb + 1, 0), self.u.size)
        return float(self._u_tails[idx])

    def v_tail(self, m: int) -> float:
        """P(v > m)."""
        idx = min(max(m + self.nb + 1, 0), self.v.size)
        return float(self._v_tails[idx])

    def push(self, J: np.ndarray) -> np.ndarray:
        N = self.bound + 1
        X = self.bound
        nb = self.nb
        A = np.zeros((N + nb, N + nb))
        u = self.u
        for i in range(u.size):
            w = u[i]
            if w == 0.0:
                continue
            uv = i - nb
            k = N if uv <= 0 else N - uv
            if k <= 0:
                continue
            A[nb + uv : nb + uv + k, nb + uv : nb + uv + k] += w * J[:k, :k]
        for s in range(max(X - self.emax + 1, 0), N):
            t = self.u_tail(X - s)
            if t == 0.0:
                continue
            A[nb + X - s : nb + X + 1, nb + X] += t * J[: s + 1, s]
        r = self.r
        B2 = np.zeros((N + nb, N + nb + r.size - 1))
        for j in range(r.size):
            if r[j] == 0.0:
                continue
            B2[:, j : j + N + nb] += r[j] * A
        core = B2[:, nb : nb + N]
        core[:, 0] += B2[:, :nb].sum(axis=1)
        core[:, N - 1] += B2[:, nb + N :].sum(axis=1)
        out = np.empty((N, N))
        out[0, :] = core[: nb + 1, :].sum(axis=0)
        out[1:, :] = core[nb + 1 :, :]
        return out

    def deadline_push(self, J: np.ndarray) -> np.ndarray:
        """Deadline transition: x_c resets to x_s, which moves by v (clamped)."""
        m = J.sum(axis=0)
        N = self.bound + 1
        vals = np.arange(self.v.size) - self.nb
        m2 = np.zeros(N)
        for x in range(N):
            if m[x] == 0.0:
                continue
            np.add.at(m2, np.clip(x + vals, 0, self.bound), m[x] * self.v)
        return np.diag(m2)


def _backorder_matrix(
    express: Pmf, capacity: Pmf, bound: int, adjusted: bool = True
) -> np.ndarray:
    """G[x_c, x_s] = E[(x_c + E' - B)^+] at the deadline age, per state.

    With the adjusted convention, express arrivals beyond the truncation
    headroom bound - x_s are rejected, which pins the surplus to
    x_c + bound - x_s on that event.  The raw convention ignores rejections
    (column-independent).
    """
    N = bound + 1
    nb = capacity.support_max
    u = np.convolve(express.mass, capacity.mass[::-1])
    tails = _suffix_tails(u)
    xc = np.arange(N, dtype=float)[:, None]
    G = np.zeros((N, N))
    for i in range(u.size):
        w = u[i]
        if w == 0.0:
            continue
        uv = i - nb
        pos = np.maximum(xc + uv, 0.0)
        if adjusted and uv > 0:
            # clamp: a negative stop would wrap and hit the wrong columns
            stop = max(N - uv, 0)
            if stop:
                G[:, :stop] += w * pos
        else:
            G += w * pos
    if adjusted:
        for s in range(max(bound - (u.size - 1 - nb) + 1, 0), N):
            m = bound - s
            t = tails[min(m + nb + 1, u.size)]
            if t == 0.0:
                continue
            G[:, s] += t * (xc[:, 0] + m)
    return G


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary joint distribution per age over the triangular enumeration."""

    bound: int
    per_age: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        frozen = []
        S = state_count(self.bound)
        for vec in self.per_age:
            arr = np.asarray(vec, dtype=float).copy()
            if arr.shape != (S,):
                raise ParameterError("per-age vector has wrong length")
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "per_age", tuple(frozen))

    @property
    def period_length(self) -> int:
        return len(self.per_age)

    def joint(self, age: int) -> np.ndarray:
        return joint_from_vector(self.per_age[age], self.bound)

    def workload_marginal(self, age: int) -> np.ndarray:
        return self.joint(age).sum(axis=0)


class PolicyEvaluator:
    """Steady-state evaluation of many policies at a shared truncation bound.

    Caches the per-fee transition operators and deadline matrices, and walks
    fee vectors in sorted order so that policies sharing a fee prefix share
    the corresponding pushes.  The age-0 state is diag(m) with m the
    stationary total-workload marginal, which is policy independent: express
    plus regular arrivals always total Poisson(lam) regardless of the fee.
    """

    def __init__(self, scenario: Scenario, bound: int):
        if bound < 0:
            raise ParameterError("bound must be nonnegative")
        self.scenario = scenario
        self.bound = bound
        self._steps: dict[float, _AgeStep] = {}
        self._gmats: dict[tuple[float, bool], np.ndarray] = {}
        self._rates: dict[float, float] = {}
        demand = poisson_pmf(scenario.lam, TAIL_EPS)
        v = np.convolve(demand.mass, scenario.capacity.mass[::-1])
        nb = scenario.capacity.support_max
        if bound == 0:
            self.workload = np.array([1.0])
        else:
            self.workload = _gth_stationary(_workload_matrix(v, nb, bound))
        self._root = np.diag(self.workload)

    # -- caches ------------------------------------------------------------

    def _rate(self, fee: float) -> float:
        if fee not in self._rates:
            e_rate, _ = split_rates(self.scenario.choice, self.scenario.lam, fee)
            self._rates[fee] = e_rate
        return self._rates[fee]

    def _step(self, fee: float) -> _AgeStep:
        if fee not in self._steps:
            e_rate = self._rate(fee)
            self._steps[fee] = _AgeStep(
                poisson_pmf(e_rate, TAIL_EPS),
                poisson_pmf(self.scenario.lam - e_rate, TAIL_EPS),
                self.scenario.capacity,
                self.bound,
            )
        return self._steps[fee]

    def _gmat(self, fee: float, adjusted: bool = True) -> np.ndarray:
        key = (fee, adjusted)
        if key not in self._gmats:
            e_rate = self._rate(fee)
            self._gmats[key] = _backorder_matrix(
                poisson_pmf(e_rate, TAIL_EPS),
                self.scenario.capacity,
                self.bound,
                adjusted,
            )
        return self._gmats[key]

    # -- evaluation --------------------------------------------------------

    def revenue(self, fees: tuple[float, ...]) -> float:
        """Expected express revenue per cycle at idealized thinned rates."""
        total = 0.0
        for fee in fees:
            rate = self._rate(fee)
            if rate > 0.0:
                total += fee * rate
        return total

    def joints(self, fees: tuple[float, ...]) -> list[np.ndarray]:
        """Per-age joint pmfs J[x_c, x_s] for one policy."""
        if len(fees) != self.scenario.period_length:
            raise ParameterError("fee vector length must equal period_length")
        out = [self._root]
        for fee in fees[:-1]:
            out.append(self._step(fee).push(out[-1]))
        return out

    def backorders(self, fees: tuple[float, ...], adjusted: bool = True) -> float:
        J = self._root
        for fee in fees[:-1]:
            J = self._step(fee).push(J)
        return float(np.sum(J * self._gmat(fees[-1], adjusted)))

    def profit(self, fees: tuple[float, ...]) -> float:
        return self.revenue(fees) - self.scenario.penalty * self.backorders(fees)

    def profits_batch(
        self, fee_vectors: list[tuple[float, ...]]
    ) -> tuple[np.ndarray, np.ndarray]:
        """(variable profit, backorders) for each fee vector.

        Vectors are processed in lexicographic order with a stack of partial
        pushes, so the cost is one push per distinct fee prefix rather than
        per policy.
        """
        n = len(fee_vectors)
        profits = np.empty(n)
        backorders = np.empty(n)
        order = sorted(range(n), key=lambda i: fee_vectors[i])
        depth_fees: list[float] = []
        stack = [self._root]
        last = self.scenario.period_length - 1
        for i in order:
            fees = fee_vectors[i]
            if len(fees) != self.scenario.period_length:
                raise ParameterError("fee vector length must equal period_length")
            d = 0
            while d < len(depth_fees) and d < last and depth_fees[d] == fees[d]:
                d += 1
            del depth_fees[d:]
            del stack[d + 1 :]
            while d < last:
                stack.append(self._step(fees[d]).push(stack[-1]))
                depth_fees.append(fees[d])
                d += 1
            em = float(np.sum(stack[last] * self._gmat(fees[last])))
            backorders[i] = em
            profits[i] = self.revenue(fees) - self.scenario.penalty * em
        return profits, backorders

    def distribution(self, fees: tuple[float, ...]) -> StationaryDistribution:
        vecs = [vector_from_joint(J) for J in self.joints(fees)]
        return StationaryDistribution(self.bound, tuple(vecs))


def steady_state(
    scenario: Scenario, policy: FeeStructure, bound: int
) -> StationaryDistribution:
    """Stationary per-age distribution via the structural evaluator."""
    return PolicyEvaluator(scenario, bound).distribution(policy.fees)


# ---------------------------------------------------------------------------
# Generic kernel path.


@dataclass(frozen=True)
class TruncatedKernel:
    """Per-age sparse transition kernels over the triangular enumeration.

    rejection_mass_per_age[tau][i] is the probability that the next step from
    state i at age tau overflows the bound (some order is rejected);
    expected_rejected_per_age[tau][i] is the expected number of rejected
    orders on that step.
    """

    bound: int
    per_age: tuple[sparse.csr_matrix, ...]
    rejection_mass_per_age: tuple[np.ndarray, ...]
    expected_rejected_per_age: tuple[np.ndarray, ...]

    @property
    def period_length(self) -> int:
        return len(self.per_age)


def build_kernel(
    scenario: Scenario, policy: FeeStructure, bound: int
) -> TruncatedKernel:
    """Materialize the truncated per-age kernels for one policy.

    Rows enumerate (x_c, x_s) with x_c <= x_s <= bound; every row sums to one
    exactly because arrival pmfs are tail-folded before use.
    """
    if bound < 1:
        raise ParameterError("bound must be at least 1")
    incomes = age_incomes(scenario, policy)
    cap = scenario.capacity
    nb = cap.support_max
    S = state_count(bound)
    T = scenario.period_length
    kernels = []
    overflow = []
    rejected = []
    for tau in range(T):
        inc = incomes[tau]
        u = np.convolve(inc.express.mass, cap.mass[::-1])
        u_vals = np.arange(u.size) - nb
        u_tails = _suffix_tails(u)
        r = inc.regular.mass
        r_vals = np.arange(r.size)
        v = np.convolve(u, r)
        v_vals = np.arange(v.size) - nb
        v_tails = _suffix_tails(v)
        rows_acc, cols_acc, data_acc = [], [], []
        over = np.empty(S)
        rej = np.empty(S)
        for s in range(bound + 1):
            src = state_index(np.arange(s + 1), s)
            headroom = bound - s
            idx_tail = min(headroom + nb + 1, v.size)
            over[src] = v_tails[idx_tail]
            rej[src] = np.maximum(v_vals - headroom, 0.0) @ v
            if tau == T - 1:
                dest_tot = np.clip(s + v_vals, 0, bound)
                dest = state_index(dest_tot, dest_tot)
                rows_acc.append(np.repeat(src, v.size))
                cols_acc.append(np.tile(dest, s + 1))
                data_acc.append(np.tile(v, s + 1))
                continue
            keep = u_vals <= headroom
            ub, wb = u_vals[keep], u[keep]
            cols3 = np.clip(s + ub[:, None] + r_vals[None, :], 0, bound)
            rows2 = np.maximum(np.arange(s + 1)[:, None] + ub[None, :], 0)
            dest = state_index(
                rows2[:, :, None], np.broadcast_to(cols3, (s + 1, ub.size, r.size))
            )
            w3 = np.broadcast_to(
                (wb[:, None] * r[None, :])[None, :, :], dest.shape
            )
            rows_acc.append(np.repeat(src, ub.size * r.size))
            cols_acc.append(dest.ravel())
            data_acc.append(w3.ravel().copy())
            t_heavy = u_tails[min(headroom + nb + 1, u.size)]
            if t_heavy > 0.0:
                dest_h = state_index(np.arange(s + 1) + headroom, bound)
                rows_acc.append(src)
                cols_acc.append(dest_h)
                data_acc.append(np.full(s + 1, t_heavy))
        mat = sparse.coo_matrix(
            (
                np.concatenate(data_acc),
                (np.concatenate(rows_acc), np.concatenate(cols_acc)),
            ),
            shape=(S, S),
        ).tocsr()
        mat.sum_duplicates()
        kernels.append(mat)
        overflow.append(over)
        rejected.append(rej)
    return TruncatedKernel(bound, tuple(kernels), tuple(overflow), tuple(rejected))


def stationary(
    kernel: TruncatedKernel,
    initial: np.ndarray | None = None,
    tol: float = 1e-12,
    max_cycles: int = 10**6,
) -> StationaryDistribution:
    """Stationary per-age distribution by power iteration on the cycle map.

    Iterates the age-0 vector through one full cycle per step until the L1
    change drops below tol; a 0.5 damping factor kicks in only if the
    residual starts oscillating.  Raises on non-convergence.
    """
    S = kernel.per_age[0].shape[0]
    transposed = [P.T.tocsr() for P in kernel.per_age]
    if initial is None:
        v = np.full(S, 1.0 / S)
    else:
        v = np.asarray(initial, dtype=float).copy()
        if v.shape != (S,) or np.any(v < 0.0) or v.sum() <= 0.0:
            raise ParameterError("initial vector must be a nonnegative pmf")
        v /= v.sum()
    prev_diff = np.inf
    damp = False
    for _ in range(max_cycles):
        w = v
        for Pt in transposed:
            w = Pt @ w
        w = w / w.sum()
        diff = float(np.abs(w - v).sum())
        if diff <= tol:
            v = w
            break
        if diff > prev_diff and not damp:
            damp = True
        v = 0.5 * (v + w) if damp else w
        prev_diff = diff
    else:
        raise NumericsError(
            f"power iteration did not reach tol={tol:g} in {max_cycles} cycles "
            f"(residual {diff:.3g})"
        )
    per_age = [v]
    cur = v
    for Pt in transposed[:-1]:
        cur = Pt @ cur
        cur = cur / cur.sum()
        per_age.append(cur)
    return StationaryDistribution(kernel.bound, tuple(per_age))


# ---------------------------------------------------------------------------
# Truncation bound search.


def _cycle_rejection(scenario: Scenario, policy: FeeStructure, bound: int) -> float:
    """Stationary per-period probability of rejecting at least one order."""
    ev = PolicyEvaluator(scenario, bound)
    joints = ev.joints(policy.fees)
    total = 0.0
    for tau, J in enumerate(joints):
        step = ev._step(policy.fees[tau])
        m = J.sum(axis=0)
        idx = np.minimum(bound - np.arange(bound + 1) + step.nb + 1, step.v.size)
        total += float(m @ step._v_tails[idx])
    return total / scenario.period_length


def find_bound(
    scenario: Scenario, policy: FeeStructure, hard_cap: int = 2000
) -> int:
    """Smallest workload bound keeping the rejection probability acceptable.

    Exponential bracketing followed by bisection; monotonicity of the
    rejection probability in the bound is assumed, checked against all
    probes, and on violation the search falls back to a linear scan upward.
    Raises CapacityInfeasibleError if even hard_cap is not enough.
    """
    threshold = scenario.rejection_threshold
    probes: dict[int, float] = {}

    def rej(b: int) -> float:
        if b not in probes:
            probes[b] = _cycle_rejection(scenario, policy, b)
        return probes[b]

    def monotone() -> bool:
        items = sorted(probes.items())
        return all(
            a[1] >= b[1] - 1e-15 for a, b in zip(items, items[1:])
        )

    if rej(1) <= threshold:
        return 1
    lo = 1
    hi = 1
    while rej(hi) > threshold:
        if hi >= hard_cap:
            raise CapacityInfeasibleError(
                f"rejection probability {rej(hard_cap):.4g} still above "
                f"{threshold:g} at bound {hard_cap}"
            )
        lo = hi
        hi = min(hi * 2, hard_cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if rej(mid) <= threshold:
            hi = mid
        else:
            lo = mid
    if not monotone():
        b = 1
        while rej(b) > threshold:
            b += 1
            if b > hard_cap:
                raise CapacityInfeasibleError(
                    f"no bound up to {hard_cap} meets threshold {threshold:g}"
                )
        return b
    return hi
