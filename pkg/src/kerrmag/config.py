"""Flat ``key = value`` run configuration with human units.

Sections in square brackets are allowed for readability and ignored; ``#``
starts a comment.  Every key is optional and falls back to the power-sweep
operating point.  Rates are written as f/2pi with a unit suffix.
"""
from __future__ import annotations

from dataclasses import dataclass

from .dynamics import IntegratorOptions
from .errors import ConfigError, DomainError
from .experiments import Baseline, SweepSpec, SweepVariable
from .nonreciprocity import BranchPolicy
from .params import parse_quantity
from .steady_state import RootTolerances

# key -> (section, kind, default); kind "sweep" resolves from `variable`
SCHEMA = {
    "name": ("run", "text", "custom"),
    "kappa1": ("system", "frequency", "25 MHz"),
    "kappa2": ("system", "frequency", "5 MHz"),
    "gamma_m": ("system", "frequency", "20 MHz"),
    "g": ("system", "frequency", "41 MHz"),
    "delta": ("system", "frequency", "80 MHz"),
    "omega_m": ("system", "frequency", "10.1 GHz"),
    "omega_d": ("system", "frequency", "10.1 GHz"),
    "kerr": ("system", "frequency", "0.5 uHz"),
    "eta1": ("system", "dimensionless", "0.5"),
    "eta2": ("system", "dimensionless", "0.5"),
    "eta_m": ("system", "dimensionless", "0.5"),
    "j_mult": ("coupling", "dimensionless", "1.0"),
    "lambda_mult": ("coupling", "dimensionless", "1.0"),
    "j_coupling": ("coupling", "frequency?", ""),
    "lambda_p": ("coupling", "frequency?", ""),
    "power": ("drive", "power", "100 mW"),
    "p_m": ("drive", "power", "0 W"),
    "drive": ("drive", "choice:pdc,mc,both", "pdc"),
    "variable": ("sweep", "choice:Power,Detuning,BiasField,KerrCoeff", "Power"),
    "lo": ("sweep", "sweep", "50 mW"),
    "hi": ("sweep", "sweep", "350 mW"),
    "points": ("sweep", "count", "400"),
    "spacing": ("sweep", "choice:linear,log", "linear"),
    "policy": ("sweep",
               "choice:ForwardSweep,BackwardSweep,LowestStable,HighestStable",
               "ForwardSweep"),
    "rtol": ("tolerances", "dimensionless", "1e-9"),
    "conv_tol": ("tolerances", "dimensionless", "1e-9"),
    "horizon": ("tolerances", "dimensionless", "500"),
    "margin": ("tolerances", "dimensionless", "1e-9"),
    "root_merge": ("tolerances", "dimensionless", "1e-9"),
}

_SWEEP_KIND = {"Power": "power", "Detuning": "frequency", "BiasField": "field",
               "KerrCoeff": "frequency"}


def _check(key, raw, values, line=None):
    kind = SCHEMA[key][1]
    if kind == "text":
        return
    try:
        if kind == "frequency?":
            if raw.strip():
                parse_quantity(raw, "frequency")
        elif kind.startswith("choice:"):
            allowed = kind[len("choice:"):].split(",")
            if raw not in allowed:
                raise DomainError(f"expected one of {allowed}, got {raw!r}")
        elif kind == "count":
            if not raw.strip().isdigit():
                raise DomainError(f"expected a positive integer, got {raw!r}")
        elif kind == "sweep":
            parse_quantity(raw, _SWEEP_KIND[values["variable"]])
        else:
            parse_quantity(raw, kind)
    except DomainError as exc:
        raise ConfigError(str(exc), key=key, line=line) from None


def read_entries(text):
    """(entries, line numbers) for the keys written in ``text``."""
    entries, lines = {}, {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=n)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key", key=key, line=n)
        if key in entries:
            raise ConfigError("duplicate key", key=key, line=n)
        entries[key] = value
        lines[key] = n
    return entries, lines


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration: every schema key mapped to its text value."""

    values: tuple

    @property
    def mapping(self):
        return dict(self.values)

    def __getitem__(self, key):
        return self.mapping[key]

    @classmethod
    def from_entries(cls, entries=None, lines=None):
        """Build from a key -> text dict; ``lines`` maps keys to source lines."""
        entries = dict(entries or {})
        lines = lines or {}
        for key in entries:
            if key not in SCHEMA:
                raise ConfigError("unknown key", key=key, line=lines.get(key))
        values = {k: str(entries.get(k, spec[2])).strip() for k, spec in SCHEMA.items()}
        # the unit of lo / hi follows the sweep variable
        _check("variable", values["variable"], values, lines.get("variable"))
        for key in SCHEMA:
            _check(key, values[key], values, lines.get(key))
        return cls(tuple(values.items()))

    @classmethod
    def parse(cls, text):
        return cls.from_entries(*read_entries(text))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def render(self):
        out, section = [], None
        for key, value in self.values:
            sec = SCHEMA[key][0]
            if sec != section:
                if out:
                    out.append("")
                out.append(f"[{sec}]")
                section = sec
            out.append(f"{key} = {value}")
        return "\n".join(out) + "\n"

    def with_overrides(self, assignments):
        """Apply ``key=value`` strings (later ones win)."""
        entries = self.mapping
        for item in assignments:
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not key=value")
            key, value = (s.strip() for s in item.split("=", 1))
            if key not in SCHEMA:
                raise ConfigError("unknown key", key=key)
            entries[key] = value
        return RunConfig.from_entries(entries)

    # ------------------------------------------------------------ conversion

    def _q(self, key):
        kind = SCHEMA[key][1]
        if kind == "sweep":
            kind = _SWEEP_KIND[self["variable"]]
        return parse_quantity(self[key], kind)

    def baseline(self):
        return Baseline(
            kappa1=self._q("kappa1"), kappa2=self._q("kappa2"),
            gamma_m=self._q("gamma_m"), g=self._q("g"),
            omega_m=self._q("omega_m"), omega_d=self._q("omega_d"),
            kerr_k=self._q("kerr"), eta1=self._q("eta1"), eta2=self._q("eta2"),
            eta_m=self._q("eta_m"), delta=self._q("delta"),
            power=self._q("power"), p_m=self._q("p_m"),
        )

    def to_spec(self) -> SweepSpec:
        opt = {}
        for key in ("j_coupling", "lambda_p"):
            if self[key]:
                opt["j_abs" if key == "j_coupling" else "lambda_abs"] = \
                    parse_quantity(self[key], "frequency")
        try:
            return SweepSpec(
                name=self["name"], variable=SweepVariable(self["variable"]),
                lo=self._q("lo"), hi=self._q("hi"), points=int(self["points"]),
                spacing=self["spacing"], j_mult=self._q("j_mult"),
                lambda_mult=self._q("lambda_mult"),
                policy=BranchPolicy(self["policy"]), base=self.baseline(), **opt)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def integrator_options(self):
        return IntegratorOptions(rtol=self._q("rtol"), conv_tol=self._q("conv_tol"),
                                 horizon=self._q("horizon"))

    def root_tolerances(self):
        return RootTolerances(merge=self._q("root_merge"))

    def stability_margin(self, gamma_m):
        return self._q("margin") * gamma_m

    def operating_point(self):
        """(params, drives) at the baseline, driven per the ``drive`` key."""
        spec = self.to_spec()
        params, template = spec.configure(spec.base_abscissa())
        which = self["drive"]
        if which == "both":
            return params, template
        return spec.configure_single(spec.base_abscissa(), which)
