"""Composable finite-size key lengths: statistical penalties, expected key
lengths for both protocol styles, the security budget and the bipartite
baseline optimized over strategy and basis probability."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import binary_entropy
from .network import (
    CHECK_RULE_PRINTED,
    BasisStrategy,
    Family,
    NetworkConfig,
    ProtocolSpec,
    expected_counts,
    formula_party_count,
    sifting,
    yields,
)
from .noise import NoiseParams, QberPair, memoryless_qber
from .optimize import ScalarMaximum, maximize_unit_interval


def xi1(eps: float, m: float) -> float:
    """Concentration penalty for estimating a rate from m samples of a
    pre-characterized distribution (Hoeffding form, natural log)."""
    if m < 1:
        raise ValueError("need m >= 1")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    return math.sqrt(math.log(1.0 / eps) / m)


def xi2(eps: float, m: float, k: float) -> float:
    """Sampling-without-replacement penalty when k checks bound the error
    of the remaining m rounds (Serfling form)."""
    if m < 1 or k < 1:
        raise ValueError("need m >= 1 and k >= 1")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    # (m+k)(k+1)/(m k^2), factored to avoid overflow for huge k
    ratio = (1.0 + k / m) * ((k + 1.0) / k / k)
    return math.sqrt(ratio * math.log(1.0 / eps))


@dataclass(frozen=True)
class EpsilonBudget:
    eps_c: float
    eps_pa: float
    eps_pe: float
    eps_ec: float
    eps_rob: float


def epsilon_budget(
    epsilon: float, eps_rob: float | None = None, eps_ec: float | None = None
) -> EpsilonBudget:
    """Split of the overall security parameter: eps_c + eps_pa + 2*eps_pe
    = epsilon with the 1/2, 1/4, 1/8 weights.

    The error-correction and robustness parameters are not part of the
    secrecy budget; both default to eps_c.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    eps_c = epsilon / 2.0
    return EpsilonBudget(
        eps_c=eps_c,
        eps_pa=epsilon / 4.0,
        eps_pe=epsilon / 8.0,
        eps_ec=eps_c if eps_ec is None else eps_ec,
        eps_rob=eps_c if eps_rob is None else eps_rob,
    )


@dataclass(frozen=True)
class FiniteSizeParams:
    """Finite-run description: either total rounds L or a target block size
    (expected key-basis detections), plus the security budget."""

    epsilon: float
    rounds: float | None = None
    block_size: float | None = None
    eps_rob: float | None = None
    eps_ec: float | None = None
    mc_samples: int = 1000
    seed: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if (self.rounds is None) == (self.block_size is None):
            raise ValueError("set exactly one of rounds / block_size")
        if self.rounds is not None and self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.block_size is not None and self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        for name in ("eps_rob", "eps_ec"):
            value = getattr(self, name)
            if value is not None and not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")

    def budget(self) -> EpsilonBudget:
        budget = epsilon_budget(self.epsilon, self.eps_rob, self.eps_ec)
        total = budget.eps_c + budget.eps_pa + 2.0 * budget.eps_pe
        if abs(total - self.epsilon) > 1e-12 * self.epsilon:
            raise AssertionError("security budget does not add up")
        return budget

    def scaled(self, factor: float) -> "FiniteSizeParams":
        """Budget for one of several parallel sub-protocols (epsilon/factor);
        explicit eps overrides are re-derived from the scaled default."""
        return FiniteSizeParams(
            epsilon=self.epsilon / factor,
            rounds=self.rounds,
            block_size=self.block_size,
            mc_samples=self.mc_samples,
            seed=self.seed,
        )


STATUS_OK = "ok"
STATUS_ABORT = "abort"
STATUS_INSUFFICIENT = "insufficient-detections"


@dataclass(frozen=True)
class KeyLengthResult:
    """Expected extractable key length and its term-by-term breakdown."""

    ell: float
    raw: float
    rounds: float
    secret_fraction: float
    status: str
    m: float
    k: float
    q_x_eff: float
    q_z_eff: float
    pe_term: float
    ec_term: float
    log_term: float
    preshared_term: float


def _entropy_penalty(q_eff: float) -> float:
    # A penalized error rate at or beyond 1/2 saturates the bound; the
    # inverted comparison also routes non-finite values to the cap.
    if not q_eff < 0.5:
        return 1.0
    return binary_entropy(q_eff)


def _rounds_for(
    cfg: NetworkConfig, spec: ProtocolSpec, fsp: FiniteSizeParams, check_rule: str
) -> float:
    if fsp.rounds is not None:
        return fsp.rounds
    eta = sifting(spec, formula_party_count(cfg, spec), check_rule)
    per_round = eta.eta_key * yields(cfg, spec)
    if per_round <= 0.0:
        return math.inf
    return max(fsp.block_size / per_round, 1.0)


def _assemble(
    rounds: float,
    m: float,
    k: float,
    q_x_eff: float,
    q_z_eff: float,
    pe_pen: float,
    ec_pen: float,
    log_term: float,
    preshared_term: float,
    eps_rob: float,
) -> KeyLengthResult:
    raw = (1.0 - eps_rob) * (m * (1.0 - pe_pen - ec_pen) - preshared_term - log_term)
    ell = max(raw, 0.0)
    if m < 1.0 or k < 1.0:
        status = STATUS_INSUFFICIENT
    elif ell > 0.0:
        status = STATUS_OK
    else:
        status = STATUS_ABORT
    fraction = ell / rounds if math.isfinite(rounds) and rounds > 0 else 0.0
    return KeyLengthResult(
        ell=ell,
        raw=raw,
        rounds=rounds,
        secret_fraction=fraction,
        status=status,
        m=m,
        k=k,
        q_x_eff=q_x_eff,
        q_z_eff=q_z_eff,
        pe_term=m * pe_pen,
        ec_term=m * ec_pen,
        log_term=log_term,
        preshared_term=preshared_term,
    )


def expected_key_length_cka(
    cfg: NetworkConfig,
    spec: ProtocolSpec,
    fsp: FiniteSizeParams,
    qbers: QberPair,
    check_rule: str = CHECK_RULE_PRINTED,
) -> KeyLengthResult:
    """Expected key length of a pre-shared-basis conference-key run.

    The key lives in the Z basis, checks are the collective X parity, the
    pre-shared basis string consumes h2(p_key) bits per network use and the
    per-Bob union bound rescales the robustness parameter.
    """
    if spec.basis_strategy is not BasisStrategy.PRESHARED:
        raise ValueError("conference-key formula assumes the pre-shared basis strategy")
    n_formula = formula_party_count(cfg, spec)
    budget = fsp.budget()
    rounds = _rounds_for(cfg, spec, fsp, check_rule)
    if not math.isfinite(rounds):
        return _assemble(rounds, 0.0, 0.0, qbers.q_x, qbers.q_z, 1.0, 1.0, 0.0, 0.0, budget.eps_rob)
    counts = expected_counts(cfg, spec, rounds, check_rule)
    m, k = counts.m, counts.k
    log_term = math.log2((n_formula - 1) / (2.0 * budget.eps_c * budget.eps_pa**2))
    preshared_term = rounds * binary_entropy(spec.p_key)
    if m <= 0.0 or k <= 0.0:
        return _assemble(
            rounds, m, k, qbers.q_x, qbers.q_z, 1.0, 1.0, log_term, preshared_term, budget.eps_rob
        )
    eps_z = budget.eps_rob / math.sqrt(n_formula - 1)
    q_x_eff = qbers.q_x + xi2(budget.eps_pe, max(m, 1.0), max(k, 1.0))
    q_z_eff = qbers.q_z + xi1(eps_z, max(m, 1.0))
    return _assemble(
        rounds,
        m,
        k,
        q_x_eff,
        q_z_eff,
        _entropy_penalty(q_x_eff),
        _entropy_penalty(q_z_eff),
        log_term,
        preshared_term,
        budget.eps_rob,
    )


def expected_key_length_qss(
    cfg: NetworkConfig,
    spec: ProtocolSpec,
    fsp: FiniteSizeParams,
    qbers: QberPair,
    check_rule: str = CHECK_RULE_PRINTED,
    per_pair_checks: bool = False,
) -> KeyLengthResult:
    """Expected key length of a basis-switching secret-sharing run.

    Dual basis roles: the key lives in X, the per-Bob Z checks carry the
    sampling penalty, and no pre-shared basis string exists to replenish.
    """
    if spec.basis_strategy is not BasisStrategy.SWITCHING:
        raise ValueError("secret-sharing formula assumes active basis switching")
    n_formula = formula_party_count(cfg, spec)
    budget = fsp.budget()
    rounds = _rounds_for(cfg, spec, fsp, check_rule)
    if not math.isfinite(rounds):
        return _assemble(rounds, 0.0, 0.0, qbers.q_x, qbers.q_z, 1.0, 1.0, 0.0, 0.0, budget.eps_rob)
    counts = expected_counts(cfg, spec, rounds, check_rule, per_pair_checks)
    m, k = counts.m, counts.k_per_bob
    log_term = math.log2((n_formula - 1) / (2.0 * budget.eps_ec * budget.eps_pa**2))
    if m <= 0.0 or k <= 0.0:
        return _assemble(rounds, m, k, qbers.q_x, qbers.q_z, 1.0, 1.0, log_term, 0.0, budget.eps_rob)
    eps_z = budget.eps_pe / math.sqrt(n_formula - 1)
    q_z_eff = qbers.q_z + xi2(eps_z, max(m, 1.0), max(k, 1.0))
    q_x_eff = qbers.q_x + xi1(budget.eps_rob, max(m, 1.0))
    return _assemble(
        rounds,
        m,
        k,
        q_x_eff,
        q_z_eff,
        _entropy_penalty(q_z_eff),
        _entropy_penalty(q_x_eff),
        log_term,
        0.0,
        budget.eps_rob,
    )


def expected_key_length(
    cfg: NetworkConfig,
    spec: ProtocolSpec,
    fsp: FiniteSizeParams,
    qbers: QberPair,
    check_rule: str = CHECK_RULE_PRINTED,
) -> KeyLengthResult:
    """Dispatch on the basis strategy of the protocol."""
    if spec.basis_strategy is BasisStrategy.PRESHARED:
        return expected_key_length_cka(cfg, spec, fsp, qbers, check_rule)
    return expected_key_length_qss(cfg, spec, fsp, qbers, check_rule)


@dataclass(frozen=True)
class BipartiteOptimum:
    """Best bipartite baseline over strategy, memory use and p_key."""

    result: KeyLengthResult
    family: Family
    memories: bool
    p_key: float
    indeterminate: bool
    candidates: dict


def bipartite_optimal(
    cfg: NetworkConfig,
    noise: NoiseParams,
    fsp: FiniteSizeParams,
    memory_qbers: QberPair | None = None,
    include_memoryless: bool = True,
    check_rule: str = CHECK_RULE_PRINTED,
    p_key_tol: float = 1e-5,
) -> BipartiteOptimum:
    """N-1 parallel two-party links as the baseline for an N-party task.

    Each link runs with security parameter epsilon/(N-1); the basis
    probability is optimized independently for the pre-shared and the
    switching strategy, with and without memories where error rates for
    the memory-assisted link are supplied.
    """
    n = cfg.n_parties
    fsp_link = fsp.scaled(n - 1) if n > 2 else fsp
    modes: list[tuple[bool, QberPair]] = []
    if include_memoryless:
        modes.append((False, memoryless_qber(noise.f_depol, 2)))
    if memory_qbers is not None:
        modes.append((True, memory_qbers))
    if not modes:
        raise ValueError("no bipartite mode selected")
    candidates: dict = {}
    best: tuple[float, KeyLengthResult, Family, bool, float] | None = None
    for family in (Family.BCKA, Family.BQSS):
        for memories, qbers in modes:
            def fraction(p_key: float) -> float:
                spec = ProtocolSpec(family, memories=memories, p_key=p_key)
                return expected_key_length(cfg, spec, fsp_link, qbers, check_rule).secret_fraction

            opt: ScalarMaximum = maximize_unit_interval(fraction, tol=p_key_tol)
            candidates[(family.value, memories)] = (opt.x, opt.value)
            if opt.indeterminate:
                continue
            spec = ProtocolSpec(family, memories=memories, p_key=opt.x)
            result = expected_key_length(cfg, spec, fsp_link, qbers, check_rule)
            if best is None or result.secret_fraction > best[0]:
                best = (result.secret_fraction, result, family, memories, opt.x)
    if best is None:
        # Every strategy aborts; report a concrete dead evaluation.
        family, memories, qbers = Family.BQSS, modes[0][0], modes[0][1]
        spec = ProtocolSpec(family, memories=memories, p_key=0.5)
        result = expected_key_length(cfg, spec, fsp_link, qbers, check_rule)
        return BipartiteOptimum(result, family, memories, math.nan, True, candidates)
    return BipartiteOptimum(best[1], best[2], best[3], best[4], False, candidates)
