"""File formats and operator/state specifications.

Operator interchange format (JSON, human-readable):

    {"format": "husimi-kit-operator", "dim": D,
     "hermitian": true,                      # optional
     "entries": [[re, im], ...]}             # row-major, D*D pairs

Floats are serialised with shortest round-trip repr, so write/read is
bit-exact.

PhaseGrid CSV: one header row ``x_min,x_max,nx,p_min,p_max,np`` followed
by nx*np rows ``re,im`` in row-major order (x outer, p inner).  Samples
sit at x_min + j dx with dx = (x_max - x_min)/nx (right edge excluded).

Operator/state specs (command line):

    identity | ladder | number | parity | position | momentum
    poly-ladder:a,b,re[,im];a,b,re[,im];...   -> sum c (a^dag)^a a^b
    random-hermitian:seed                      (unit spectral norm)
    vacuum | fock:n | coherent:x,p | thermal:nbar   (density matrices)
    @file.json                                 (operator file)
"""

import hashlib
import json
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .backend import coherent_amplitudes
from .errors import SpecParseError
from .fock import (FockOperator, PhasePoint, build_ladder, build_momentum,
                   build_number, build_parity, build_position, coherent_state)
from .symbols import GridSpec, PhaseGrid

OPERATOR_FORMAT = "husimi-kit-operator"


# ---------------------------------------------------------------------------
# operator file format

def operator_to_json(op: FockOperator) -> str:
    entries = [[v.real, v.imag] for v in op.matrix.ravel()]
    doc = {"format": OPERATOR_FORMAT, "dim": op.dim, "entries": entries}
    if op.hermitian:
        doc["hermitian"] = True
    return json.dumps(doc, indent=None, separators=(",", ":"))


def operator_from_json(text: str) -> FockOperator:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"operator file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != OPERATOR_FORMAT:
        raise SpecParseError(f"missing format tag {OPERATOR_FORMAT!r}")
    try:
        dim = int(doc["dim"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecParseError(f"operator file missing dim/entries: {exc}") from exc
    if dim < 1 or len(entries) != dim * dim:
        raise SpecParseError(
            f"entry count {len(entries)} does not match dim {dim}")
    mat = np.array([complex(re, im) for re, im in entries]).reshape(dim, dim)
    return FockOperator(mat, hermitian=doc.get("hermitian", None))


# ---------------------------------------------------------------------------
# PhaseGrid CSV

def grid_to_csv(grid: PhaseGrid) -> str:
    s = grid.spec
    lines = [f"{float(s.x_min)!r},{float(s.x_max)!r},{s.nx},"
             f"{float(s.p_min)!r},{float(s.p_max)!r},{s.np_}"]
    vals = np.asarray(grid.values, dtype=complex).ravel()
    lines.extend(f"{float(v.real)!r},{float(v.imag)!r}" for v in vals)
    return "\n".join(lines) + "\n"


def grid_from_csv(text: str) -> PhaseGrid:
    lines = text.strip().split("\n")
    try:
        x0, x1, nx, p0, p1, np_ = lines[0].split(",")
        spec = GridSpec(float(x0), float(x1), int(nx),
                        float(p0), float(p1), int(np_))
    except (ValueError, IndexError) as exc:
        raise SpecParseError(f"bad grid header: {exc}") from exc
    if len(lines) != 1 + spec.nx * spec.np_:
        raise SpecParseError(
            f"expected {spec.nx * spec.np_} value rows, got {len(lines) - 1}")
    vals = np.empty(spec.nx * spec.np_, dtype=complex)
    for i, ln in enumerate(lines[1:]):
        try:
            re, im = ln.split(",")
            vals[i] = complex(float(re), float(im))
        except ValueError as exc:
            raise SpecParseError(f"bad value row {i + 2}: {ln!r}") from exc
    return PhaseGrid(spec, vals.reshape(spec.nx, spec.np_))


# ---------------------------------------------------------------------------
# spec strings

def _parse_floats(body, n, what):
    parts = body.split(",")
    if len(parts) != n:
        raise SpecParseError(f"{what} expects {n} numbers, got {body!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise SpecParseError(f"{what}: {exc}") from exc


def parse_operator_spec(spec: str, dim) -> FockOperator:
    """Build a FockOperator from a spec string (see module docstring)."""
    spec = spec.strip()
    if spec.startswith("@"):
        with open(spec[1:], "r", encoding="utf-8") as fh:
            return operator_from_json(fh.read())
    name, _, body = spec.partition(":")
    if dim is None:
        raise SpecParseError("builtin operator specs require --dim")
    if name == "identity":
        return FockOperator.identity(dim)
    if name == "ladder":
        return build_ladder(dim)[0]
    if name == "number":
        return build_number(dim)
    if name == "parity":
        return build_parity(dim)
    if name == "position":
        return build_position(dim)
    if name == "momentum":
        return build_momentum(dim)
    if name == "poly-ladder":
        return _poly_ladder(body, dim)
    if name == "random-hermitian":
        try:
            seed = int(body)
        except ValueError as exc:
            raise SpecParseError(f"random-hermitian needs an integer seed, "
                                 f"got {body!r}") from exc
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h = (m + m.conj().T) / 2.0
        return FockOperator(h / np.linalg.norm(h, 2), hermitian=True)
    raise SpecParseError(f"unknown operator spec {spec!r}")


def _poly_ladder(body, dim):
    if not body:
        raise SpecParseError("poly-ladder needs terms 'a,b,re[,im];...'")
    a_op, ad_op = build_ladder(dim)
    out = np.zeros((dim, dim), dtype=complex)
    for term in body.split(";"):
        parts = term.split(",")
        if len(parts) not in (3, 4):
            raise SpecParseError(f"poly-ladder term {term!r}: want a,b,re[,im]")
        try:
            a_pow, b_pow = int(parts[0]), int(parts[1])
            c = complex(float(parts[2]), float(parts[3]) if len(parts) == 4 else 0.0)
        except ValueError as exc:
            raise SpecParseError(f"poly-ladder term {term!r}: {exc}") from exc
        if a_pow < 0 or b_pow < 0:
            raise SpecParseError("poly-ladder powers must be >= 0")
        out += c * (np.linalg.matrix_power(ad_op.matrix, a_pow)
                    @ np.linalg.matrix_power(a_op.matrix, b_pow))
    return FockOperator(out)


def parse_state_spec(spec: str, dim) -> FockOperator:
    """Build a density matrix from a state spec string."""
    spec = spec.strip()
    if spec.startswith("@"):
        return parse_operator_spec(spec, dim)
    name, _, body = spec.partition(":")
    if dim is None:
        raise SpecParseError("state specs require --dim")
    if name == "vacuum":
        v = np.zeros(dim, complex)
        v[0] = 1.0
        return FockOperator(np.outer(v, v.conj()), hermitian=True)
    if name == "fock":
        try:
            n = int(body)
        except ValueError as exc:
            raise SpecParseError(f"fock:n needs an integer, got {body!r}") from exc
        if not 0 <= n < dim:
            raise SpecParseError(f"fock index {n} out of range for dim {dim}")
        v = np.zeros(dim, complex)
        v[n] = 1.0
        return FockOperator(np.outer(v, v.conj()), hermitian=True)
    if name == "coherent":
        x, p = _parse_floats(body, 2, "coherent:x,p")
        c = coherent_state(PhasePoint(x, p), dim).coeffs
        c = c / np.linalg.norm(c)  # renormalise the truncated vector
        return FockOperator(np.outer(c, c.conj()), hermitian=True)
    if name == "thermal":
        (nbar,) = _parse_floats(body, 1, "thermal:nbar")
        if nbar <= 0:
            raise SpecParseError("thermal:nbar needs nbar > 0")
        w = (nbar / (1.0 + nbar)) ** np.arange(dim)
        return FockOperator(np.diag(w / w.sum()).astype(complex), hermitian=True)
    raise SpecParseError(f"unknown state spec {spec!r}")


def parse_grid_spec(text: str) -> GridSpec:
    """'xmin:xmax:nx' (square) or 'xmin:xmax:nx:pmin:pmax:np'."""
    parts = text.split(":")
    try:
        if len(parts) == 3:
            x0, x1, nx = float(parts[0]), float(parts[1]), int(parts[2])
            return GridSpec(x0, x1, nx, x0, x1, nx)
        if len(parts) == 6:
            return GridSpec(float(parts[0]), float(parts[1]), int(parts[2]),
                            float(parts[3]), float(parts[4]), int(parts[5]))
    except ValueError as exc:
        raise SpecParseError(f"bad grid spec {text!r}: {exc}") from exc
    raise SpecParseError(f"grid spec {text!r}: want xmin:xmax:nx[:pmin:pmax:np]")


# ---------------------------------------------------------------------------
# run manifests

@dataclass
class ManifestWriter:
    """Collects inputs/outputs of one CLI run and writes the manifest."""

    command: list
    config: dict

    def __post_init__(self):
        self._t0 = time.monotonic()
        self._outputs = []
        self._hashes = {}

    def add_input(self, label, payload: str):
        self._hashes[label] = hashlib.sha256(payload.encode()).hexdigest()

    def add_output(self, path):
        self._outputs.append(str(path))

    def write(self, path, status="ok", error=None):
        doc = {
            "command": self.command,
            "config": self.config,
            "input_hashes": self._hashes,
            "library_version": __version__,
            "wall_time_s": round(time.monotonic() - self._t0, 6),
            "outputs": sorted(self._outputs),
            "status": status,
        }
        if error is not None:
            doc["error"] = str(error)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
