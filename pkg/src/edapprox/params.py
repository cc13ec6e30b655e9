"""Parameter sets: exact theoretical constants or small practical presets."""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Any, Literal, Mapping

Mode = Literal["paper", "practical"]

# Beyond this many bits a power is kept symbolic.
_MATERIALIZE_BITS = 1 << 16


@dataclass(frozen=True)
class Power:
    """Exact product ``coef * prod(base ** exp)`` with possibly astronomic exponents."""

    factors: tuple[tuple[int, int], ...]
    coef: int = 1

    @classmethod
    def of(cls, base: int, exp: int, coef: int = 1) -> "Power":
        return cls(((base, exp),), coef)

    def log2(self) -> float:
        total = math.log2(self.coef)
        for base, exp in self.factors:
            total += exp * math.log2(base)
        return total

    def value(self) -> int:
        """Materialize as an int; refuses values too large to hold."""
        if self.log2() > _MATERIALIZE_BITS:
            raise OverflowError("power too large to materialize")
        out = self.coef
        for base, exp in self.factors:
            out *= base**exp
        return out

    def __mul__(self, other: "Power | int") -> "Power":
        if isinstance(other, int):
            return Power(self.factors, self.coef * other)
        merged = dict(self.factors)
        for base, exp in other.factors:
            merged[base] = merged.get(base, 0) + exp
        return Power(tuple(sorted(merged.items())), self.coef * other.coef)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Power":
        factors = [(b, e * k) for b, e in self.factors]
        if self.coef != 1:
            factors.append((self.coef, k))
        merged: dict[int, int] = {}
        for b, e in factors:
            merged[b] = merged.get(b, 0) + e
        return Power(tuple(sorted(merged.items())))

    def to_json(self) -> dict:
        return {"coef": str(self.coef), "factors": [[str(b), str(e)] for b, e in self.factors]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Power":
        return cls(tuple((int(b), int(e)) for b, e in data["factors"]), int(data["coef"]))


def as_int_or_power(x: "int | Power") -> "int | Power":
    """Materialize a Power when it fits comfortably, else keep it symbolic."""
    if isinstance(x, Power) and x.log2() <= _MATERIALIZE_BITS:
        return x.value()
    return x


def at_most(x: "int | Power", limit: int) -> int:
    """``min(x, limit)`` for a possibly symbolic ``x``."""
    if isinstance(x, Power):
        if x.log2() > limit.bit_length() + 1:
            return limit
        x = x.value()
    return min(x, limit)


@dataclass(frozen=True)
class LevelParams:
    """Constants used by one level ``L`` of the recursion."""

    L: int
    c: "int | Power"
    alpha: "int | Power"
    beta: "int | Power"


@dataclass(frozen=True)
class ParamSet:
    mode: Mode
    delta: Fraction
    L_max: int
    i_max: int
    eps: Fraction
    eps_prime: Fraction
    tau_max: "int | Power"
    rho_exp: Fraction  # rho = t ** rho_exp
    multipliers: tuple[int, ...] = (1, 7)
    c: "int | None" = None  # practical: constant ball expansion rate
    child_count: "int | None" = None  # practical override of t^{eps_{i+1}} * rho
    shrink_slack: "float | None" = None  # None: derived from the snap ladder
    exact_fallback_n: int = 0
    Delta_fraction: Fraction = Fraction(1, 16)  # practical default Delta = n * this
    strict: bool = True
    seed: int = 0

    def eps_i(self, i: int) -> Fraction:
        return Fraction(100) ** (i + 1) * self.eps

    def level(self, L: int) -> LevelParams:
        if L < 1:
            raise ValueError("level parameters exist for L >= 1")
        if self.mode == "practical":
            c = self.c
            beta = c ** (int(self.tau_max) + 2)
            return LevelParams(L, c, None, beta)
        c = 100 * alpha(self, L - 1)
        beta = c ** (self.tau_max + 2) if isinstance(c, Power) else Power.of(c, self.tau_max + 2)
        return LevelParams(L, as_int_or_power(c), alpha(self, L), as_int_or_power(beta))

    def rho(self, t: int) -> float:
        return float(t) ** float(self.rho_exp)

    def children(self, t: int, i: int) -> int:
        """Number of sampled cliques at a depth-``i`` Query node."""
        if self.child_count is not None:
            return self.child_count
        return max(1, ceil_power(t, self.eps_i(i + 1) + self.rho_exp))

    def with_overrides(self, **kw: Any) -> "ParamSet":
        return replace(self, **kw)

    def to_json(self) -> dict:
        out: dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Fraction):
                v = str(v)
            elif isinstance(v, Power):
                v = {"power": v.to_json()}
            elif isinstance(v, int) and not isinstance(v, bool) and v.bit_length() > 53:
                v = {"int": str(v)}
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ParamSet":
        kw: dict[str, Any] = {}
        for f in fields(cls):
            if f.name not in data:
                continue
            v = data[f.name]
            if isinstance(v, dict) and "power" in v:
                v = Power.from_json(v["power"])
            elif isinstance(v, dict) and "int" in v:
                v = int(v["int"])
            elif f.name in ("delta", "eps", "eps_prime", "rho_exp", "Delta_fraction"):
                v = Fraction(v)
            elif f.name == "multipliers":
                v = tuple(v)
            kw[f.name] = v
        return cls(**kw)


def ceil_power(t: int, e: Fraction) -> int:
    """Exact ``ceil(t ** e)`` for integer ``t >= 1`` and rational ``e >= 0``.

    Exponents such as ``1/10 + 10**-26`` defeat floats, so the sign of
    ``e*ln t - ln r`` is settled with increasing decimal precision.
    """
    e = Fraction(e)
    if t == 1 or e == 0:
        return 1
    p, q = e.numerator, e.denominator
    r = math.ceil(t ** float(e))
    if q <= 256 and p * t.bit_length() <= 1 << 16:
        # small exponents: integer test of r**q >= t**p
        target = t**p
        while r > 1 and (r - 1) ** q >= target:
            r -= 1
        while r**q < target:
            r += 1
        return r
    prec = 50
    while True:
        with decimal.localcontext() as ctx:
            ctx.prec = prec
            lhs = decimal.Decimal(t).ln() * p / q
            # r is the ceiling iff ln(r - 1) < e ln t <= ln r
            up = lhs - decimal.Decimal(r).ln()
            down = lhs - decimal.Decimal(r - 1).ln() if r > 1 else decimal.Decimal(1)
            tol = decimal.Decimal(10) ** (-prec + 10)
            if abs(up) > tol and abs(down) > tol:
                if up > 0:
                    r += 1
                elif down <= 0:
                    r -= 1
                else:
                    return r
                continue
        prec *= 2
        if prec > 100_000:
            raise ArithmeticError("cannot resolve power ceiling")


def alpha(params: ParamSet, L: int) -> "int | Power":
    """Approximation factor of level ``L``: 2 ** ((20000 / eps**2) ** L)."""
    exponent = Fraction(20000) / params.eps**2
    exponent = exponent**L
    if exponent.denominator != 1:
        raise ValueError("alpha exponent is not integral")
    return as_int_or_power(Power.of(2, int(exponent)))


def t_min(params: ParamSet, L: int) -> Power:
    base = Fraction(1000) / params.eps**10
    exp = Fraction(4) ** (L + 1) / params.eps**2
    return Power.of(int(base), int(exp))


def n_min(params: ParamSet, L: int) -> Power:
    base = Fraction(1000) / params.eps_prime**10
    exp = Fraction(4) ** (L + 2) / params.eps_prime**2
    return Power.of(int(base), int(exp))


PRESETS: dict[str, dict[str, Any]] = {
    "desk": dict(
        eps=Fraction(1, 4),
        tau_max=6,
        c=4,
        child_count=4,
        i_max=3,
        exact_fallback_n=2048,
    ),
}


def derive_params(
    delta: "Fraction | float | str" = Fraction(1),
    mode: Mode = "practical",
    overrides: Mapping[str, Any] | None = None,
    *,
    preset: str | None = "desk",
) -> ParamSet:
    """Build a ParamSet from the running-time exponent ``delta``.

    Paper mode uses the exact theoretical constants.  Practical mode starts
    from the named preset and applies ``overrides``; ``L_max`` still comes
    from ``delta`` unless overridden.
    """
    delta = Fraction(delta)
    if not 0 < delta <= 2:
        raise ValueError("delta must lie in (0, 2]")
    overrides = dict(overrides or {})
    ratio = Fraction(2) / delta
    L_max = 0
    while Fraction(2) ** (L_max + 1) <= ratio:
        L_max += 1
    i_max = math.floor(Fraction(10) / delta)

    if mode == "paper":
        eps = Fraction(1, 200 ** (L_max + i_max + 1))
        eps_prime = Fraction(1, 200 ** (L_max + i_max + 2))
        tau_max = Fraction(1000) / eps**3
        params = ParamSet(
            mode="paper",
            delta=delta,
            L_max=L_max,
            i_max=i_max,
            eps=eps,
            eps_prime=eps_prime,
            tau_max=int(tau_max),
            rho_exp=Fraction(1, i_max),
            strict=False,
        )
        unknown = set(overrides) - {"seed", "exact_fallback_n", "strict"}
        if unknown:
            raise ValueError(f"paper mode does not accept overrides {sorted(unknown)}")
        return replace(params, **overrides)
    if mode != "practical":
        raise ValueError(f"unknown mode {mode!r}")

    base: dict[str, Any] = dict(PRESETS[preset]) if preset else {}
    base.update({k: v for k, v in overrides.items() if v is not None})
    i_max = int(base.pop("i_max", i_max))
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    L_max = int(base.pop("L_max", L_max))
    eps = Fraction(base.pop("eps", Fraction(1, 4)))
    rho_exp = Fraction(base.pop("rho_exp", Fraction(1, i_max)))
    params = ParamSet(
        mode="practical",
        delta=delta,
        L_max=L_max,
        i_max=i_max,
        eps=eps,
        eps_prime=Fraction(base.pop("eps_prime", eps / 2)),
        tau_max=int(base.pop("tau_max", 6)),
        rho_exp=rho_exp,
        c=int(base.pop("c", 4)),
        **base,
    )
    validate_practical(params)
    return params


def validate_practical(p: ParamSet) -> None:
    if p.c is None or p.c < 2:
        raise ValueError("c must be >= 2")
    if p.tau_max < 3:
        raise ValueError("tau_max must be >= 3")
    if p.rho_exp <= 0:
        raise ValueError("rho must exceed 1 (rho_exp > 0)")
    if p.i_max < 1:
        raise ValueError("i_max must be >= 1")
    if p.L_max < 0:
        raise ValueError("L_max must be >= 0")
    if not 0 < p.eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if p.child_count is not None and p.child_count < 1:
        raise ValueError("child_count must be >= 1")
    if p.shrink_slack is not None and p.shrink_slack <= 0:
        raise ValueError("shrink_slack must be positive")
    if p.exact_fallback_n < 0:
        raise ValueError("exact_fallback_n must be >= 0")
    if not 0 < p.Delta_fraction <= 1:
        raise ValueError("Delta_fraction must lie in (0, 1]")
