"""Scenario files: a single JSON document describing protocol, source,
detector and link, plus an optional repeater chain.

run_scenario dispatches to the closed-form distance bounds where they
exist (fiber and far-field diffraction with single-photon, attenuated
or decoy sources) and to the guarded bisection everywhere else. Results
come back as a ResultRecord whose JSON form validates against
schemas/result_record.schema.json.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from importlib import resources

from . import __version__
from .detection import Attenuated, Decoy, DetectorModel, SinglePhoton, SourceModel
from .distance import (
    DistanceBound,
    GammaThreshold,
    gamma_threshold,
    max_diffraction_distance,
    max_distance_numeric,
    max_fiber_distance,
    omega,
)
from .errors import InfeasibleConfigurationError, ValidationError
from .links import (
    BeamGeometry,
    FiberLink,
    GroundAtmosphere,
    SatellitePath,
    atmospheric_transmissivity,
    diffraction_transmissivity,
    fiber_transmissivity,
    satellite_transmissivity,
)
from .pauli import PauliDistribution
from .qber import QberSet, symmetric_threshold
from .repeater import ChainSpec, chain_qber_verdict, chain_verdict

SCHEMA_VERSION = 1

_LINK_KINDS = ("fiber", "ground_atmosphere", "diffraction", "freespace", "satellite")
_DEFAULT_BRACKETS_KM = {
    "fiber": (1e-6, 1e5),
    "ground_atmosphere": (1e-6, 1e7),
    "diffraction": (1e-3, 1e12),
    "freespace": (1e-3, 1e7),
    "satellite": (1e-3, 1e10),
}


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario: protocol, hardware and exactly one link variant,
    optionally a repeater chain alongside."""

    mub_count: int
    source: SourceModel | None
    detector: DetectorModel | None
    link: dict | None
    solver: tuple[float, float] | None
    chain: ChainSpec | None
    raw: dict


@dataclass(frozen=True)
class ResultRecord:
    """Self-describing computation record (inputs echoed, outputs, version)."""

    command: str
    inputs: dict
    results: dict
    schema_version: int = SCHEMA_VERSION
    artifact_name: str = "qkdlimits"
    artifact_version: str = __version__
    timestamp: str | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "artifact": {"name": self.artifact_name, "version": self.artifact_version},
            "command": self.command,
            "timestamp": self.timestamp,
            "inputs": self.inputs,
            "results": self.results,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRecord":
        return cls(
            command=d["command"],
            inputs=d["inputs"],
            results=d["results"],
            schema_version=d["schema_version"],
            artifact_name=d["artifact"]["name"],
            artifact_version=d["artifact"]["version"],
            timestamp=d.get("timestamp"),
        )


def result_record_schema() -> dict:
    text = resources.files("qkdlimits").joinpath("schemas/result_record.schema.json").read_text()
    return json.loads(text)


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ValidationError(f"scenario field {path}: missing required key {key!r}")
    return obj[key]


def _number(obj: dict, key: str, path: str, default=None):
    if key not in obj:
        if default is None:
            raise ValidationError(f"scenario field {path}: missing required key {key!r}")
        return default
    v = obj[key]
    if v is None:
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"scenario field {path}.{key}: expected a number, got {v!r}")
    return float(v)


def _check_keys(obj: dict, allowed: set[str], path: str):
    if not isinstance(obj, dict):
        raise ValidationError(f"scenario field {path}: expected an object, got {obj!r}")
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"scenario field {path}: unknown keys {sorted(unknown)}")


def _parse_source(obj: dict) -> SourceModel:
    kind = _require(obj, "kind", "source")
    if kind == "single_photon":
        _check_keys(obj, {"kind", "k"}, "source")
        k = obj.get("k", 1)
        if isinstance(k, bool) or not isinstance(k, int):
            raise ValidationError(f"scenario field source.k: expected an integer, got {k!r}")
        return SinglePhoton(k=k)
    if kind == "attenuated":
        _check_keys(obj, {"kind", "mu"}, "source")
        return Attenuated(mu=_number(obj, "mu", "source"))
    if kind == "decoy":
        _check_keys(
            obj,
            {"kind", "intensities", "probabilities", "rep_rate_hz", "dead_time_s"},
            "source",
        )
        return Decoy(
            intensities=tuple(_require(obj, "intensities", "source")),
            probabilities=tuple(_require(obj, "probabilities", "source")),
            rep_rate_hz=_number(obj, "rep_rate_hz", "source", default=0.0),
            dead_time_s=_number(obj, "dead_time_s", "source", default=0.0),
        )
    raise ValidationError(f"scenario field source.kind: unknown source {kind!r}")


def _parse_link(obj: dict) -> dict:
    kind = _require(obj, "kind", "link")
    if kind not in _LINK_KINDS:
        raise ValidationError(
            f"scenario field link.kind: unknown link {kind!r}, expected one of {_LINK_KINDS}"
        )
    allowed = {
        "fiber": {"kind", "alpha_db_per_km"},
        "ground_atmosphere": {"kind", "alpha0_per_km", "scale_height_km", "altitude_km"},
        "diffraction": {"kind", "w0_m", "wavelength_m", "aperture_radius_m", "curvature_m"},
        "freespace": {"kind", "beam", "atmosphere"},
        "satellite": {"kind", "beam", "zenith_angle_rad", "eta_zenith"},
    }[kind]
    _check_keys(obj, allowed, "link")
    return obj


def _parse_beam(obj: dict, path: str) -> BeamGeometry:
    _check_keys(obj, {"w0_m", "wavelength_m", "aperture_radius_m", "curvature_m"}, path)
    return BeamGeometry(
        w0_m=_number(obj, "w0_m", path),
        wavelength_m=_number(obj, "wavelength_m", path),
        aperture_radius_m=_number(obj, "aperture_radius_m", path),
        curvature_m=_number(obj, "curvature_m", path, default=math.inf),
    )


def _parse_chain(obj: dict) -> ChainSpec:
    _check_keys(obj, {"links", "qbers"}, "chain")
    links_raw = _require(obj, "links", "chain")
    if not isinstance(links_raw, list) or not links_raw:
        raise ValidationError("scenario field chain.links: expected a nonempty list")
    links = tuple(PauliDistribution(entry) for entry in links_raw)
    qbers = None
    if obj.get("qbers") is not None:
        sets = []
        for i, q in enumerate(obj["qbers"]):
            _check_keys(q, {"e_x", "e_z", "e_y"}, f"chain.qbers[{i}]")
            e_y = q.get("e_y")
            sets.append(
                QberSet(
                    e_x=_number(q, "e_x", f"chain.qbers[{i}]"),
                    e_z=_number(q, "e_z", f"chain.qbers[{i}]"),
                    e_y=None if e_y is None else float(e_y),
                )
            )
        qbers = tuple(sets)
    return ChainSpec(links=links, qbers=qbers)


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document and build the model objects."""
    _check_keys(
        doc,
        {"schema_version", "protocol", "source", "detector", "link", "solver", "chain"},
        "<root>",
    )
    version = _require(doc, "schema_version", "<root>")
    if version != SCHEMA_VERSION:
        raise ValidationError(
            f"scenario field schema_version: got {version!r}, this build reads {SCHEMA_VERSION}"
        )
    protocol = _require(doc, "protocol", "<root>")
    _check_keys(protocol, {"mub_count"}, "protocol")
    mub_count = _require(protocol, "mub_count", "protocol")
    if mub_count not in (2, 3):
        raise ValidationError(f"scenario field protocol.mub_count: must be 2 or 3, got {mub_count!r}")

    source = _parse_source(doc["source"]) if doc.get("source") is not None else None
    detector = None
    if doc.get("detector") is not None:
        det = doc["detector"]
        _check_keys(det, {"y0", "e_det", "eta_eff"}, "detector")
        detector = DetectorModel(
            y0=_number(det, "y0", "detector"),
            e_det=_number(det, "e_det", "detector"),
            eta_eff=_number(det, "eta_eff", "detector", default=1.0),
        )
    link = _parse_link(doc["link"]) if doc.get("link") is not None else None
    chain = _parse_chain(doc["chain"]) if doc.get("chain") is not None else None
    if link is None and chain is None:
        raise ValidationError("scenario needs a link, a chain, or both")
    if link is not None and (source is None or detector is None):
        raise ValidationError("scenario with a link needs source and detector too")

    solver = None
    if doc.get("solver") is not None:
        s = doc["solver"]
        _check_keys(s, {"d_lo_km", "d_hi_km"}, "solver")
        solver = (_number(s, "d_lo_km", "solver"), _number(s, "d_hi_km", "solver"))

    return Scenario(
        mub_count=mub_count,
        source=source,
        detector=detector,
        link=link,
        solver=solver,
        chain=chain,
        raw=doc,
    )


def scenario_from_file(path: str) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}:{exc.lineno}:{exc.colno}: not valid JSON ({exc.msg})"
        ) from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: scenario must be a JSON object")
    return parse_scenario(doc)


def _closed_form_source(src: SourceModel) -> bool:
    return isinstance(src, (Attenuated, Decoy)) or (
        isinstance(src, SinglePhoton) and src.k == 1
    )


def _channel_model(sc: Scenario):
    """Transmissivity as a function of distance in km, per link kind."""
    link = sc.link
    kind = link["kind"]
    if kind == "fiber":
        fiber = FiberLink(alpha_db_per_km=_number(link, "alpha_db_per_km", "link"))
        return fiber, lambda d: fiber_transmissivity(fiber, d)
    if kind == "ground_atmosphere":
        atm = GroundAtmosphere(
            alpha0_per_km=_number(link, "alpha0_per_km", "link", default=GroundAtmosphere.alpha0_per_km),
            scale_height_km=_number(link, "scale_height_km", "link", default=GroundAtmosphere.scale_height_km),
            altitude_km=_number(link, "altitude_km", "link", default=0.0),
        )
        return atm, lambda d: atmospheric_transmissivity(atm, d)
    if kind == "diffraction":
        beam = _parse_beam({k: v for k, v in link.items() if k != "kind"}, "link")
        return beam, lambda d: diffraction_transmissivity(beam, d * 1000.0)
    if kind == "freespace":
        beam = _parse_beam(_require(link, "beam", "link"), "link.beam")
        atm_obj = link.get("atmosphere") or {}
        _check_keys(atm_obj, {"alpha0_per_km", "scale_height_km", "altitude_km"}, "link.atmosphere")
        atm = GroundAtmosphere(
            alpha0_per_km=_number(atm_obj, "alpha0_per_km", "link.atmosphere", default=GroundAtmosphere.alpha0_per_km),
            scale_height_km=_number(atm_obj, "scale_height_km", "link.atmosphere", default=GroundAtmosphere.scale_height_km),
            altitude_km=_number(atm_obj, "altitude_km", "link.atmosphere", default=0.0),
        )
        return (beam, atm), lambda d: diffraction_transmissivity(beam, d * 1000.0) * atmospheric_transmissivity(atm, d)
    if kind == "satellite":
        beam = _parse_beam(_require(link, "beam", "link"), "link.beam")
        sat = SatellitePath(
            zenith_angle_rad=_number(link, "zenith_angle_rad", "link", default=0.0),
            eta_zenith=_number(link, "eta_zenith", "link", default=SatellitePath.eta_zenith),
        )
        eta_atm = satellite_transmissivity(sat)
        return (beam, sat), lambda d: diffraction_transmissivity(beam, d * 1000.0) * eta_atm
    raise ValidationError(f"unknown link kind {kind!r}")


def _bound_to_results(bound: DistanceBound) -> dict:
    return {
        "d_max_km": None if math.isinf(bound.d_max_km) else bound.d_max_km,
        "feasible": bound.feasible,
        "method": bound.method,
        "status": bound.status,
    }


def _plob_bits(eta: float) -> float:
    # Repeaterless rate bound -log2(1 - eta); informational only.
    return -math.log1p(-eta) / math.log(2.0)


def distance_analysis(sc: Scenario) -> dict:
    """Gamma/Omega thresholds and the distance bound for the scenario link."""
    if sc.link is None:
        raise ValidationError("scenario has no link to analyze")
    det, src = sc.detector, sc.source
    g = gamma_threshold(det, sc.mub_count)
    results = {
        "mub_count": sc.mub_count,
        "qber_threshold": symmetric_threshold(sc.mub_count),
        "gamma_min": g.gamma_min,
    }
    kind = sc.link["kind"]
    obj, model = _channel_model(sc)

    bound = None
    if kind in ("fiber", "diffraction") and _closed_form_source(src):
        o = omega(det, src, g)
        results["omega"] = o.omega
        results["omega_prime"] = None if math.isinf(o.omega_prime) else o.omega_prime
        results["source_kind"] = o.source_kind
        if kind == "fiber":
            bound = max_fiber_distance(obj, o)
        else:
            bound = max_diffraction_distance(obj, o)
    else:
        lo, hi = sc.solver if sc.solver is not None else _DEFAULT_BRACKETS_KM[kind]
        bound = max_distance_numeric(model, src, det, g, lo, hi)

    results.update(_bound_to_results(bound))
    if kind == "satellite":
        sat = obj[1]
        results["eta_atmosphere"] = satellite_transmissivity(sat)
        if bound.status == "solved":
            results["altitude_km"] = bound.d_max_km * math.cos(sat.zenith_angle_rad)
    if bound.status == "solved" and math.isfinite(bound.d_max_km):
        eta_tot = det.eta_eff * model(bound.d_max_km)
        results["eta_channel_at_d_max"] = model(bound.d_max_km)
        results["plob_bits_per_use_at_d_max"] = _plob_bits(eta_tot)
        results["plob_note"] = "informational repeaterless rate bound, not a verdict"
    if not bound.feasible:
        om = results.get("omega")
        if om is not None and om >= 1.0:
            results["infeasible_reason"] = (
                f"required channel transmissivity omega={om} is at or above 1; "
                "even a lossless channel cannot bring the QBER under the threshold"
            )
        else:
            results["infeasible_reason"] = (
                f"detection probability never exceeds gamma_min={g.gamma_min} "
                "on the searched interval; QBER stays at or above the protocol threshold"
            )
    return results


def chain_analysis(chain: ChainSpec) -> dict:
    v = chain_verdict(chain)
    out = {
        "links": len(chain.links),
        "p_max_min": v.p_max_min,
        "zero_capacity_certain": v.zero_capacity_certain,
        "upper_bound_bits": v.upper_bound_bits,
        "converse_known": v.converse_known,
    }
    if chain.qbers is not None:
        qv = chain_qber_verdict(chain)
        out["all_links_pass"] = qv.all_links_pass
        out["worst_link_index"] = qv.worst_link_index
        out["link_margins"] = [v.margin for v in qv.link_verdicts]
    return out


def run_scenario(sc: Scenario, command: str = "run") -> ResultRecord:
    """Execute everything the scenario describes; timestamp left unset."""
    results: dict = {}
    if sc.link is not None:
        results.update(distance_analysis(sc))
    if sc.chain is not None:
        results["chain"] = chain_analysis(sc.chain)
    return ResultRecord(command=command, inputs=sc.raw, results=results)


_SWEEP_PARAMS = ("y0", "e_det", "eta_eff", "mu", "alpha")


def _with_param(sc: Scenario, param: str, value: float) -> Scenario:
    det, src, link = sc.detector, sc.source, sc.link
    if param in ("y0", "e_det", "eta_eff"):
        det = DetectorModel(**{**dataclasses.asdict(det), param: value})
    elif param == "mu":
        if not isinstance(src, Attenuated):
            raise ValidationError("sweep over mu needs an attenuated source")
        src = Attenuated(mu=value)
    elif param == "alpha":
        if link is None or link["kind"] != "fiber":
            raise ValidationError("sweep over alpha needs a fiber link")
        link = {**link, "alpha_db_per_km": value}
    else:
        raise ValidationError(f"unknown sweep parameter {param!r}, expected one of {_SWEEP_PARAMS}")
    return dataclasses.replace(sc, detector=det, source=src, link=link)


def sweep_scenario(
    sc: Scenario, param: str, start: float, stop: float, points: int, scale: str
) -> list[tuple[str, float, float, bool]]:
    """Distance bound as one scenario parameter sweeps a range.

    Returns (param, value, d_max_km, feasible) rows in input order;
    infeasible points are flagged rows, not errors.
    """
    if sc.link is None:
        raise ValidationError("sweep needs a scenario with a link")
    if param not in _SWEEP_PARAMS:
        raise ValidationError(f"unknown sweep parameter {param!r}, expected one of {_SWEEP_PARAMS}")
    if not (isinstance(points, int) and points >= 1):
        raise ValidationError(f"points={points!r} must be an integer >= 1")
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ValidationError("log scale needs positive endpoints")
        values = [
            start * (stop / start) ** (i / (points - 1)) if points > 1 else start
            for i in range(points)
        ]
    elif scale == "linear":
        values = [
            start + (stop - start) * i / (points - 1) if points > 1 else start
            for i in range(points)
        ]
    else:
        raise ValidationError(f"scale must be 'log' or 'linear', got {scale!r}")

    rows = []
    for v in values:
        try:
            res = distance_analysis(_with_param(sc, param, v))
            d = res["d_max_km"]
            rows.append((param, v, math.inf if d is None else d, bool(res["feasible"])))
        except InfeasibleConfigurationError:
            rows.append((param, v, 0.0, False))
    return rows
