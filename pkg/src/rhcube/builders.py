"""Seeded object generators behind the ``gen`` operation.

Builders: delta, constant, local-system, extension, esnault and
direct-sum (whose components are nested builder specs).  Every builder is
deterministic given its seed and always emits an object that passes
validation at the default tolerance.  Random commuting monodromies are
drawn as polynomials with random coefficients in a single random matrix,
which commute exactly by construction.
"""

from __future__ import annotations

import numpy as np

from . import predmod
from .linalg import FundamentalDomain
from .predmod import PreDModule
from .strata import PolydiskContext


class BuilderError(ValueError):
    pass


def _as_complex(value) -> complex:
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def _context(params, default_r: int = 1) -> PolydiskContext:
    r = int(params.get("r", default_r))
    d = int(params.get("d", max(r, 1)))
    try:
        return PolydiskContext(d, r)
    except ValueError as exc:
        raise BuilderError(str(exc)) from None


def random_commuting_monodromies(r: int, n: int, rng,
                                 max_attempts: int = 50) -> list[np.ndarray]:
    """Invertible pairwise-commuting n x n matrices: polynomials in one matrix."""
    for _ in range(max_attempts):
        base = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if np.linalg.cond(base) > 1e4:
            continue
        powers = [np.eye(n, dtype=complex)]
        for _ in range(n - 1):
            powers.append(powers[-1] @ base)
        mats = []
        for _ in range(r):
            coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            m = sum(c * p for c, p in zip(coeffs, powers))
            mats.append(m)
        if all(np.linalg.svd(m, compute_uv=False)[-1] > 1e-3 for m in mats):
            return mats
    raise BuilderError("could not draw well-conditioned commuting monodromies")


def _build_local_system(params, seed: int) -> PreDModule:
    ctx = _context(params)
    n = int(params.get("n", 2))
    if n < 1:
        raise BuilderError("local-system needs n >= 1")
    sigma = float(params.get("sigma", 0.0))
    rng = np.random.default_rng(seed)
    mats = random_commuting_monodromies(ctx.r, n, rng)
    style = params.get("style", predmod.STYLE_T_THETA)
    return predmod.from_local_system(mats, FundamentalDomain(sigma), style, ctx=ctx)


def parse_component_spec(spec: str) -> tuple[str, dict]:
    """Parse compact builder specs like ``constant:alpha=0.3,r=2``."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise BuilderError(f"component spec item {item!r} needs key=value")
            params[key.strip()] = value.strip()
    return name.strip(), params


def gen(builder: str, params: dict | None = None, seed: int = 0) -> PreDModule:
    """Build a named test object; deterministic given (builder, params, seed)."""
    params = dict(params or {})
    if builder == "delta":
        obj = predmod.delta(_context(params))
    elif builder == "constant":
        ctx = _context(params)
        alpha = params.get("alpha", 0.3)
        if isinstance(alpha, dict):
            alphas = {int(k): _as_complex(v) for k, v in alpha.items()}
        else:
            alphas = _as_complex(alpha)
        obj = predmod.constant(ctx, alphas, params.get("style", predmod.STYLE_T_THETA))
    elif builder == "local-system":
        obj = _build_local_system(params, seed)
    elif builder == "extension":
        obj = predmod.extension(_context(params), _as_complex(params.get("alpha", 1.0)))
    elif builder == "esnault":
        obj = predmod.esnault(good=bool(params.get("good", False)))
    elif builder == "direct-sum":
        of = params.get("of")
        if not isinstance(of, (list, tuple)) or not of:
            raise BuilderError("direct-sum needs a nonempty list of component specs")
        parts = []
        for i, item in enumerate(of):
            if isinstance(item, str):
                name, sub_params = parse_component_spec(item)
            elif isinstance(item, dict):
                item = dict(item)
                name = item.pop("builder", None)
                sub_params = item
                if name is None:
                    raise BuilderError(f"component {i} is missing its builder name")
            else:
                raise BuilderError(f"component {i} must be a spec string or object")
            for inherited in ("r", "d"):
                if inherited in params:
                    sub_params.setdefault(inherited, params[inherited])
            parts.append(gen(name, sub_params, seed + i))
        obj = parts[0]
        for part in parts[1:]:
            obj = obj.direct_sum(part)
    else:
        raise BuilderError(f"unknown builder {builder!r}")
    meta = {"name": builder, "seed": seed}
    if params:
        meta["params"] = {k: str(v) for k, v in params.items() if k != "of"}
        if "of" in params:
            meta["params"]["of"] = [str(x) for x in params["of"]]
    obj.metadata = meta
    return obj
