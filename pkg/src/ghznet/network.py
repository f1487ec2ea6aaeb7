"""Bottleneck-network topology: yields, sifting efficiencies and detection counts.

The network is a star: Alice reaches a central router over one link of
length ``d_a_km`` and the router reaches each of the N-1 Bobs over links of
length ``d_b_km``.  Multipartite protocols deliver an entangled state to all
players in one network use; bipartite baselines spend N-1 uses, one per Bob.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import check_probability, transmission


class Family(str, Enum):
    MQSS = "mQSS"
    MCKA = "mCKA"
    BQSS = "bQSS"
    BCKA = "bCKA"

    @property
    def bipartite(self) -> bool:
        return self in (Family.BQSS, Family.BCKA)


class BasisStrategy(str, Enum):
    PRESHARED = "preshared"
    SWITCHING = "switching"


# Check-round probability under basis switching.  PRINTED keeps the
# conventional (1-p)(1-p^(N-2)) form; ALL_BOBS counts "Alice plus at least
# one of the N-1 Bobs in the check basis" directly, giving the N-1
# exponent.  The sifting Monte Carlo reports which one it reproduces.
CHECK_RULE_PRINTED = "printed"
CHECK_RULE_ALL_BOBS = "all-bobs"


@dataclass(frozen=True)
class NetworkConfig:
    """Star topology with one Alice link and N-1 identical Bob links."""

    n_parties: int
    d_a_km: float
    d_b_km: float
    symmetric: bool = False

    def __post_init__(self) -> None:
        if self.n_parties < 2:
            raise ValueError(f"need at least 2 parties, got {self.n_parties}")
        if self.d_a_km < 0 or self.d_b_km < 0:
            raise ValueError("link distances must be non-negative")
        if self.symmetric and self.d_a_km != self.d_b_km:
            raise ValueError("symmetric networks need d_a_km == d_b_km")

    @classmethod
    def make_symmetric(cls, n_parties: int, d_km: float) -> "NetworkConfig":
        return cls(n_parties, d_km, d_km, symmetric=True)

    @property
    def p_a(self) -> float:
        return transmission(self.d_a_km)

    @property
    def p_b(self) -> float:
        return transmission(self.d_b_km)

    def with_parties(self, n_parties: int) -> "NetworkConfig":
        return NetworkConfig(n_parties, self.d_a_km, self.d_b_km, self.symmetric)


def _default_strategy(family: Family) -> BasisStrategy:
    if family in (Family.MQSS, Family.BQSS):
        return BasisStrategy.SWITCHING
    return BasisStrategy.PRESHARED


@dataclass(frozen=True)
class ProtocolSpec:
    """Which protocol runs on the network and how bases are chosen."""

    family: Family
    memories: bool = False
    basis_strategy: BasisStrategy | None = None
    p_key: float = 1.0

    def __post_init__(self) -> None:
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        strategy = self.basis_strategy
        if strategy is None:
            strategy = _default_strategy(family)
        strategy = BasisStrategy(strategy)
        object.__setattr__(self, "basis_strategy", strategy)
        if family is Family.MQSS and strategy is not BasisStrategy.SWITCHING:
            # A pre-shared basis key would hand malicious players the round
            # schedule, so secret sharing must switch bases actively.
            raise ValueError("mQSS requires active basis switching")
        check_probability(self.p_key, "p_key")

    @property
    def bipartite(self) -> bool:
        return self.family.bipartite


@dataclass(frozen=True)
class SiftingEfficiencies:
    eta_key: float
    eta_check: float

    def __post_init__(self) -> None:
        check_probability(self.eta_key, "eta_key")
        check_probability(self.eta_check, "eta_check")
        if self.eta_key + self.eta_check > 1.0 + 1e-12:
            raise ValueError("eta_key + eta_check must not exceed 1")


def formula_party_count(cfg: NetworkConfig, spec: ProtocolSpec) -> int:
    """Party count entering the QBER/sifting/key-length formulas.

    Bipartite baselines run N-1 two-party links, so their per-link formulas
    use 2 while the yield still divides by the N-1 network uses.
    """
    return 2 if spec.bipartite else cfg.n_parties


def yields(cfg: NetworkConfig, spec: ProtocolSpec) -> float:
    """Deliverable states per network use, before basis sifting.

    Without memories every link must succeed at once; with memories the
    short links are pre-established and the Alice link alone limits the
    rate (valid for p_a <= p_b, enforced here).
    """
    n = cfg.n_parties
    p_a, p_b = cfg.p_a, cfg.p_b
    if spec.memories and p_a > p_b:
        raise ValueError(
            "memory-assisted yields assume p_a <= p_b (long Alice link, short Bob links)"
        )
    if spec.bipartite:
        per_link = p_a if spec.memories else p_a * p_b
        return per_link / (n - 1)
    if spec.memories:
        return p_a
    return p_a * p_b ** (n - 1)


def sifting(
    spec: ProtocolSpec, n_parties: int, check_rule: str = CHECK_RULE_PRINTED
) -> SiftingEfficiencies:
    """Probability that a delivered round is usable for key / for checks."""
    p = spec.p_key
    if n_parties < 2:
        raise ValueError("need at least 2 parties")
    if spec.basis_strategy is BasisStrategy.PRESHARED:
        return SiftingEfficiencies(p, 1.0 - p)
    if n_parties == 2:
        # Two-party switching: both in key basis / both in check basis.
        return SiftingEfficiencies(p * p, (1.0 - p) ** 2)
    if check_rule == CHECK_RULE_PRINTED:
        eta_check = (1.0 - p) * (1.0 - p ** (n_parties - 2))
    elif check_rule == CHECK_RULE_ALL_BOBS:
        eta_check = (1.0 - p) * (1.0 - p ** (n_parties - 1))
    else:
        raise ValueError(f"unknown check rule {check_rule!r}")
    return SiftingEfficiencies(p**n_parties, eta_check)


@dataclass(frozen=True)
class ExpectedCounts:
    m: float
    k: float
    k_per_bob: float


def expected_counts(
    cfg: NetworkConfig,
    spec: ProtocolSpec,
    rounds: float,
    check_rule: str = CHECK_RULE_PRINTED,
    per_pair_checks: bool = False,
) -> ExpectedCounts:
    """Expected key/check detections in `rounds` network uses.

    `per_pair_checks` switches the per-Bob check count from the global
    check count to the (1-p_key)^2 pairwise coincidence alternative.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds!r}")
    y = yields(cfg, spec)
    eta = sifting(spec, formula_party_count(cfg, spec), check_rule)
    m = eta.eta_key * y * rounds
    k = eta.eta_check * y * rounds
    if per_pair_checks:
        k_per_bob = (1.0 - spec.p_key) ** 2 * y * rounds
    else:
        k_per_bob = k
    return ExpectedCounts(m, k, k_per_bob)


def simulate_sifting(
    spec: ProtocolSpec, n_parties: int, rounds: int, seed: int | np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo estimate of the sifting efficiencies.

    Samples basis choices round by round (independent per party under
    switching, one shared coin under a pre-shared key) and counts rounds
    where everyone chose the key basis, and rounds where Alice plus at
    least one Bob chose the check basis.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if spec.basis_strategy is BasisStrategy.PRESHARED:
        key_round = rng.random(rounds) < spec.p_key
        return float(key_round.mean()), float(1.0 - key_round.mean())
    key_choice = rng.random((rounds, n_parties)) < spec.p_key
    all_key = key_choice.all(axis=1)
    check_usable = ~key_choice[:, 0] & (~key_choice[:, 1:]).any(axis=1)
    return float(all_key.mean()), float(check_usable.mean())
