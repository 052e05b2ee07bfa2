"""Named surfaces and weights used by the experiment runner."""
from __future__ import annotations

import math

import numpy as np

from .surface import build_collapsed_disk, build_conformal, build_rectangle

WEIGHTS = {
    "one": lambda x, y: np.ones_like(x),
    "linear": lambda x, y: 1.0 + x,
    "quadratic": lambda x, y: 1.0 + x * x + y * y,
    "wave": lambda x, y: 2.0 + np.sin(2 * math.pi * x) * np.sin(math.pi * y),
}

# builder name -> (function, parameter names with defaults)
BUILDERS = {
    "rectangle": (lambda n, width, height: build_rectangle(width, height, n),
                  {"width": 1.0, "height": 1.0}),
    "conformal": (lambda n, width, height, weight: build_conformal(width, height, n, WEIGHTS[weight]),
                  {"width": 1.0, "height": 1.0, "weight": "quadratic"}),
    "collapsed_disk": (lambda n, outer_half_width, collapse_radius:
                       build_collapsed_disk(outer_half_width, n, collapse_radius),
                       {"outer_half_width": 1.5, "collapse_radius": 0.5}),
}

ZOO = {
    "square": ("rectangle", {"width": 1.0, "height": 1.0}),
    "rectangle2": ("rectangle", {"width": 2.0, "height": 1.0}),
    "conformal_quadratic": ("conformal", {"weight": "quadratic"}),
    "conformal_wave": ("conformal", {"weight": "wave"}),
    "collapsed_disk": ("collapsed_disk", {}),
}
SMOOTH = ("square", "rectangle2", "conformal_quadratic", "conformal_wave")


class UnknownBuilder(KeyError):
    pass


def build(builder: str, n: int, **params):
    """Run a named builder; unknown names list the available ones."""
    if builder not in BUILDERS:
        raise UnknownBuilder(f"unknown builder {builder!r}; available: {', '.join(sorted(BUILDERS))}")
    fn, defaults = BUILDERS[builder]
    extra = set(params) - set(defaults)
    if extra:
        raise ValueError(f"unknown parameters for {builder}: {', '.join(sorted(extra))}")
    args = {**defaults, **params}
    if "weight" in args and args["weight"] not in WEIGHTS:
        raise ValueError(f"unknown weight {args['weight']!r}; available: {', '.join(sorted(WEIGHTS))}")
    return fn(n, **args)


def zoo_surface(name: str, n: int):
    if name not in ZOO:
        raise UnknownBuilder(f"unknown zoo surface {name!r}; available: {', '.join(ZOO)}")
    builder, params = ZOO[name]
    return build(builder, n, **params)
