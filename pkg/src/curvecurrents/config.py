"""Run configuration: INI-style config files plus CLI flag overrides.

Sections: ``[curve]`` (kind, r, s, gamma1, gamma2, ball_radius),
``[regularization]`` (delta_max, ratio, count, extrapolation_order),
``[quadrature]`` (radial_points, angular_points, tol), ``[output]``
(path, format).  All numeric fields are validated before any
computation starts.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .curves import CurveSpec, curve_from_config, make_cusp, make_disc, \
    make_parametrized, normalize, parse_gamma
from .regularization import QuadratureSpec, RegularizationSchedule


@dataclass
class RunConfig:
    curve: CurveSpec | None = None
    delta_max: float | None = None
    ratio: float = 0.5
    count: int = 8
    extrapolation_order: int = 2
    radial_points: int = 16
    angular_points: int = 128
    tol: float = 1e-7
    output_path: str | None = None
    output_format: str = "json"
    jobs: int = 0

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(
            radial_points=self.radial_points,
            angular_points=self.angular_points,
            adaptive_tolerance=self.tol,
        )

    def schedule(self, disc_radius: float) -> RegularizationSchedule:
        delta_max = self.delta_max if self.delta_max is not None \
            else 0.2 * disc_radius
        return RegularizationSchedule(
            delta_max=delta_max, ratio=self.ratio, count=self.count,
            extrapolation_order=self.extrapolation_order,
        )

    def validate(self):
        self.quadrature()
        if self.delta_max is not None:
            self.schedule(1.0)
        else:
            RegularizationSchedule(0.2, self.ratio, self.count,
                                   self.extrapolation_order)
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        return self


def parse_curve_arg(text: str) -> CurveSpec:
    """Parse curve syntax: ``cusp:r,s[,ball]``, ``map:g1,g2[,ball]``, ``disc[:radius]``."""
    text = text.strip()
    if text.startswith("cusp:"):
        parts = text[5:].split(",")
        if len(parts) not in (2, 3):
            raise ValueError("cusp takes r,s[,ball_radius]")
        ball = float(parts[2]) if len(parts) == 3 else 1.0
        return make_cusp(int(parts[0]), int(parts[1]), ball)
    if text.startswith("map:"):
        parts = text[4:].split(",")
        if len(parts) not in (2, 3):
            raise ValueError("map takes gamma1,gamma2[,ball_radius]")
        ball = float(parts[2]) if len(parts) == 3 else 1.0
        return make_parametrized(parse_gamma(parts[0]), parse_gamma(parts[1]),
                                 ball)
    if text == "disc" or text.startswith("disc:"):
        radius = float(text[5:]) if text.startswith("disc:") else 1.0
        return make_disc(radius)
    raise ValueError(f"unknown curve syntax {text!r}")


def load_config(path: str) -> RunConfig:
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    cfg = RunConfig()
    if parser.has_section("curve"):
        cfg.curve = curve_from_config(dict(parser.items("curve")))
    if parser.has_section("regularization"):
        sec = parser["regularization"]
        if "delta_max" in sec:
            cfg.delta_max = sec.getfloat("delta_max")
        cfg.ratio = sec.getfloat("ratio", cfg.ratio)
        cfg.count = sec.getint("count", cfg.count)
        cfg.extrapolation_order = sec.getint("extrapolation_order",
                                             cfg.extrapolation_order)
    if parser.has_section("quadrature"):
        sec = parser["quadrature"]
        cfg.radial_points = sec.getint("radial_points", cfg.radial_points)
        cfg.angular_points = sec.getint("angular_points", cfg.angular_points)
        cfg.tol = sec.getfloat("tol", cfg.tol)
    if parser.has_section("output"):
        sec = parser["output"]
        cfg.output_path = sec.get("path", cfg.output_path)
        cfg.output_format = sec.get("format", cfg.output_format)
    return cfg.validate()


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    """Fold parsed argparse flags into the config (flags win)."""
    for flag, attr in [
        ("delta_max", "delta_max"), ("ratio", "ratio"), ("count", "count"),
        ("extrapolation_order", "extrapolation_order"),
        ("radial_points", "radial_points"),
        ("angular_points", "angular_points"), ("tol", "tol"),
        ("out", "output_path"), ("format", "output_format"),
        ("jobs", "jobs"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)
    if getattr(args, "curve", None):
        cfg.curve = parse_curve_arg(args.curve)
    return cfg.validate()
