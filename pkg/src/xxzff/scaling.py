"""Finite-size scaling studies: sweep the chain length, collect determinant
form-factor products next to their thermodynamic predictions, and fit the
power law log S = a - theta log M + b log M / M."""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .bethe import solve_bethe_state
from .thermo import build_thermo
from .finite import ff_product_with_distance
from .asympt import predict_product

__all__ = [
    "FitIllConditioned",
    "StudyConfig",
    "ScalingRecord",
    "fit_power_law",
    "run_scaling_study",
    "emit",
]

CSV_HEADER = ["M", "N", "alpha", "S_N", "prediction", "theta_pred", "P_ex"]


class FitIllConditioned(ValueError):
    """Too few chain lengths for the three-parameter power-law fit."""


@dataclass(frozen=True)
class StudyConfig:
    """One scaling sweep: channel, excitation class and the list of lengths."""

    zeta: float
    D: float
    channel: str                  # "zz" or "pm"
    M_list: tuple
    r: int = 0
    p_plus: tuple = ()
    h_plus: tuple = ()
    p_minus: tuple = ()
    h_minus: tuple = ()
    alphas: tuple = (1e-2, 5e-3, 2.5e-3)
    order: int = 128

    def __post_init__(self):
        Ms = tuple(int(m) for m in self.M_list)
        object.__setattr__(self, "M_list", Ms)
        if list(Ms) != sorted(set(Ms)):
            raise ValueError("M list must be strictly increasing")
        for M in Ms:
            if M % 2:
                raise ValueError(f"M = {M} must be even")
            if abs(self.D * M - round(self.D * M)) > 1e-9:
                raise ValueError(f"D*M = {self.D * M} must be an integer")
        if self.channel not in ("zz", "pm"):
            raise ValueError(f"unknown channel {self.channel!r}")

    def excitation_spec(self, N):
        from .bethe import pr_class_quantum_numbers
        channel = "z" if self.channel == "zz" else "plus"
        nk = N if channel == "z" else N + 1
        return pr_class_quantum_numbers(
            self.r, self.p_plus, self.h_plus, self.p_minus, self.h_minus,
            N_kappa=nk, channel=channel)

    @classmethod
    def from_json(cls, obj):
        return cls(zeta=obj["zeta"], D=obj["D"], channel=obj["channel"],
                   M_list=tuple(obj["M_list"]), r=obj.get("r", 0),
                   p_plus=tuple(obj.get("p_plus", ())),
                   h_plus=tuple(obj.get("h_plus", ())),
                   p_minus=tuple(obj.get("p_minus", ())),
                   h_minus=tuple(obj.get("h_minus", ())))


@dataclass(frozen=True)
class ScalingRecord:
    """One chain length worth of data."""

    M: int
    N: int
    alpha: float
    S_N: float
    prediction: float
    theta_pred: float
    P_ex: float

    def row(self):
        return [self.M, self.N, repr(self.alpha), repr(self.S_N),
                repr(self.prediction), repr(self.theta_pred), repr(self.P_ex)]

    def to_json(self):
        return {"M": self.M, "N": self.N, "alpha": self.alpha, "S_N": self.S_N,
                "prediction": self.prediction, "theta_pred": self.theta_pred,
                "P_ex": self.P_ex}


def fit_power_law(M_values, S_values, correction=True):
    """Least squares for log S = a - theta log M [+ b log M / M].

    Returns a dict with theta, amplitude e^a, b, and the max residual.
    """
    M_values = np.asarray(M_values, dtype=float)
    S_values = np.asarray(S_values, dtype=float)
    if len(M_values) < 4:
        raise FitIllConditioned("need at least 4 chain lengths")
    x = np.log(M_values)
    y = np.log(S_values)
    cols = [np.ones_like(x), -x]
    if correction:
        cols.append(x / M_values)
    Amat = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(Amat, y, rcond=None)
    resid = np.max(np.abs(Amat @ coef - y))
    out = {"theta": float(coef[1]), "amplitude": float(np.exp(coef[0])),
           "b": float(coef[2]) if correction else 0.0,
           "max_residual": float(resid)}
    return out


def run_scaling_study(config, progress=None):
    """Sweep the configured chain lengths and fit the decay exponent.

    Returns (records, fit) where fit carries the fitted theta next to the
    predicted one.
    """
    grid = build_thermo(config.zeta, config.D, order=config.order)
    pred = predict_product(
        config.channel, "critical", grid, r=config.r,
        p_plus=config.p_plus, h_plus=config.h_plus,
        p_minus=config.p_minus, h_minus=config.h_minus,
        alphas=config.alphas)
    records = []
    for M in config.M_list:
        N = int(round(config.D * M))
        spec = config.excitation_spec(N)
        grd = solve_bethe_state(ModelParams(config.zeta, M, N, 0.0))

        def solve(a):
            return solve_bethe_state(ModelParams(config.zeta, M, N, a), spec), grd

        v, P_ex, _ = ff_product_with_distance(
            solve, "z" if config.channel == "zz" else "plus",
            alphas=config.alphas)
        records.append(ScalingRecord(
            M=M, N=N, alpha=0.0, S_N=float(np.abs(v)),
            prediction=float(np.abs(pred.assembled(0, M))),
            theta_pred=pred.theta, P_ex=P_ex))
        if progress is not None:
            progress(records[-1])
    fit = fit_power_law([r.M for r in records], [r.S_N for r in records])
    fit["theta_pred"] = pred.theta
    fit["prediction"] = pred.to_json()
    return records, fit


def emit(records, fmt, path):
    """Write scaling records as csv (fixed header) or json, sorted by M."""
    records = sorted(records, key=lambda r: r.M)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in records:
                w.writerow(r.row())
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump([r.to_json() for r in records], fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path
