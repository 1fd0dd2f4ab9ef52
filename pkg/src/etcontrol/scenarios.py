"""Named closed-loop scenarios: model, weights, trigger parameters, grid.

A scenario is a YAML document with explicit matrix row lists (so printed
models stay copy-auditable), or an ``identify`` directive pointing at an
input/output CSV to run the realization pipeline on.  Three scenarios ship
with the package: ``maglev``, ``mass-spring``, and ``ieee13``.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from .design import DesignWeights, LtiModel
from .simulate import POLICIES, SimConfig

BUNDLED = ("maglev", "mass-spring", "ieee13")


class ScenarioError(Exception):
    """Configuration problem; the message names the offending field."""


@dataclass(frozen=True)
class Scenario:
    name: str
    model: LtiModel
    weights: DesignWeights
    sigma: float
    epsilon: float
    config: SimConfig
    Q_tilde: np.ndarray | None = None

    def with_overrides(self, sigma=None, epsilon=None, policy=None,
                       delay=None, horizon=None, step=None):
        """A modified copy; the stored scenario is never mutated."""
        cfg = self.config
        cfg = replace(
            cfg,
            step=cfg.step if step is None else float(step),
            horizon=cfg.horizon if horizon is None else float(horizon),
            policy=cfg.policy if policy is None else policy,
            delay=cfg.delay if delay is None else float(delay),
        )
        return replace(
            self,
            sigma=self.sigma if sigma is None else float(sigma),
            epsilon=self.epsilon if epsilon is None else float(epsilon),
            config=cfg,
        )


def _require(mapping, field, context):
    if field not in mapping:
        raise ScenarioError(f"{context}: missing required field '{field}'")
    return mapping[field]


def _matrix(obj, field):
    try:
        m = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field '{field}': not a numeric matrix ({exc})") from exc
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ScenarioError(f"field '{field}': expected a 2-D matrix, got ndim={m.ndim}")
    return m


def _vector(obj, field):
    try:
        v = np.asarray(obj, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field '{field}': not a numeric vector ({exc})") from exc
    return v


def _scalar(obj, field):
    try:
        return float(obj)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"field '{field}': expected a number, got {obj!r}") from exc


def _load_model(spec, base_dir):
    """Literal matrices, or an identification directive over a CSV dataset."""
    if "identify" in spec:
        from .sysid import EraDataset, identify

        ident = spec["identify"]
        path = Path(_require(ident, "dataset", "model.identify"))
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        if not path.exists():
            raise ScenarioError(f"model.identify.dataset: file not found: {path}")
        data = np.genfromtxt(path, delimiter=",", names=True)
        for col in ("u", "y"):
            if data.dtype.names is None or col not in data.dtype.names:
                raise ScenarioError(f"model.identify.dataset: CSV lacks a '{col}' column")
        rate = _scalar(_require(ident, "sample_rate", "model.identify"), "sample_rate")
        result = identify(
            EraDataset(u=data["u"], y=data["y"], sample_rate=rate),
            threshold=float(ident.get("threshold", 0.99)),
            order=ident.get("order"),
        )
        return result.model
    A = _matrix(_require(spec, "A", "model"), "model.A")
    B = _matrix(_require(spec, "B", "model"), "model.B")
    C = _matrix(_require(spec, "C", "model"), "model.C")
    if B.shape[0] != A.shape[0] and B.shape[1] == A.shape[0]:
        B = B.T  # row list shorthand for a column vector
    D = spec.get("D", 0.0)
    D = _matrix(D, "model.D") if not np.isscalar(D) else np.full((C.shape[0], B.shape[1]), float(D))
    try:
        return LtiModel(A=A, B=B, C=C, D=D)
    except ValueError as exc:
        raise ScenarioError(f"model: {exc}") from exc


def _weight(spec, field, n, default_scale=1.0):
    raw = spec.get(field)
    if raw is None:
        return default_scale * np.eye(n)
    if np.isscalar(raw):
        return float(raw) * np.eye(n)
    return _matrix(raw, f"weights.{field}")


def load_scenario_dict(doc, name=None, base_dir=None):
    """Build a Scenario from a parsed YAML mapping; errors name the field."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a mapping")
    name = doc.get("name", name or "unnamed")
    model = _load_model(_require(doc, "model", name), base_dir)
    n, m, q = model.n, model.m, model.q
    wspec = doc.get("weights", {})
    try:
        weights = DesignWeights(
            Q=_weight(wspec, "Q", n),
            R=_weight(wspec, "R", m),
            W=_weight(wspec, "W", n),
            V=_weight(wspec, "V", q),
        )
    except ValueError as exc:
        raise ScenarioError(f"weights: {exc}") from exc
    trig = _require(doc, "trigger", name)
    sigma = _scalar(_require(trig, "sigma", "trigger"), "trigger.sigma")
    epsilon = _scalar(_require(trig, "epsilon", "trigger"), "trigger.epsilon")
    Q_tilde = trig.get("Q_tilde")
    if Q_tilde is not None:
        Q_tilde = float(Q_tilde) * np.eye(2 * n) if np.isscalar(Q_tilde) else _matrix(
            Q_tilde, "trigger.Q_tilde"
        )
    sim = _require(doc, "sim", name)
    policy = sim.get("policy", "event-floor")
    if policy not in POLICIES:
        raise ScenarioError(f"sim.policy: must be one of {POLICIES}, got {policy!r}")
    x0 = _vector(_require(sim, "x0", "sim"), "sim.x0")
    xhat0 = _vector(sim.get("xhat0", np.zeros(n)), "sim.xhat0")
    if x0.size != n:
        raise ScenarioError(f"sim.x0: expected {n} entries, got {x0.size}")
    if xhat0.size != n:
        raise ScenarioError(f"sim.xhat0: expected {n} entries, got {xhat0.size}")
    try:
        config = SimConfig(
            step=_scalar(_require(sim, "step", "sim"), "sim.step"),
            horizon=_scalar(_require(sim, "horizon", "sim"), "sim.horizon"),
            x0=x0,
            xhat0=xhat0,
            policy=policy,
            delay=_scalar(sim.get("delay", 0.0), "sim.delay"),
        )
    except ValueError as exc:
        raise ScenarioError(f"sim: {exc}") from exc
    return Scenario(
        name=name, model=model, weights=weights,
        sigma=sigma, epsilon=epsilon, config=config, Q_tilde=Q_tilde,
    )


def load_scenario_file(path):
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: invalid YAML: {exc}") from exc
    return load_scenario_dict(doc, name=path.stem, base_dir=path.parent)


def save_scenario(scenario: Scenario, path):
    """Write a scenario back out as YAML with explicit row lists."""
    doc = {
        "name": scenario.name,
        "model": {
            "A": scenario.model.A.tolist(),
            "B": scenario.model.B.tolist(),
            "C": scenario.model.C.tolist(),
            "D": scenario.model.D.tolist(),
        },
        "weights": {
            "Q": scenario.weights.Q.tolist(),
            "R": scenario.weights.R.tolist(),
            "W": scenario.weights.W.tolist(),
            "V": scenario.weights.V.tolist(),
        },
        "trigger": {"sigma": scenario.sigma, "epsilon": scenario.epsilon},
        "sim": {
            "step": scenario.config.step,
            "horizon": scenario.config.horizon,
            "x0": scenario.config.x0.tolist(),
            "xhat0": scenario.config.xhat0.tolist(),
            "policy": scenario.config.policy,
            "delay": scenario.config.delay,
        },
    }
    if scenario.Q_tilde is not None:
        doc["trigger"]["Q_tilde"] = scenario.Q_tilde.tolist()
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))


def bundled_names():
    return list(BUNDLED)


def load_bundled(name):
    """One of the packaged scenarios by name."""
    if name not in BUNDLED:
        raise ScenarioError(f"unknown scenario {name!r}; bundled: {', '.join(BUNDLED)}")
    ref = importlib.resources.files("etcontrol") / "data" / f"{name}.yaml"
    doc = yaml.safe_load(ref.read_text())
    return load_scenario_dict(doc, name=name)


def get_scenario(name_or_path):
    """Bundled name first, then a path to a YAML file."""
    if name_or_path in BUNDLED:
        return load_bundled(name_or_path)
    p = Path(name_or_path)
    if p.exists():
        return load_scenario_file(p)
    raise ScenarioError(
        f"{name_or_path!r} is neither a bundled scenario ({', '.join(BUNDLED)}) "
        "nor an existing file"
    )
