"""JSON codecs for every on-disk artifact.

Scalars anywhere in the schemas serialize as two-element [re, im] lists;
matrices are row-major nested lists of such scalars.  Decoding is liberal and
also accepts bare numbers.
"""

from __future__ import annotations

import json

import numpy as np

from .basis import DegreeGradedBasis, ThreeTermBasis, standard_basis
from .linearize import Pencil, PencilMeta
from .ratmodel import (
    HermitianRealization,
    PoleResidue,
    PolyMat,
    RationalMatrix,
    StateSpaceRealization,
    SymmetricRealization,
)
from .realize import MarkovSequence

__all__ = [
    "encode_scalar",
    "decode_scalar",
    "encode_matrix",
    "decode_matrix",
    "basis_to_json",
    "basis_from_json",
    "rational_to_json",
    "rational_from_json",
    "pencil_to_json",
    "pencil_from_json",
    "markov_from_json",
    "realization_to_json",
    "realization_from_json",
    "load_json",
    "dump_json",
]


def encode_scalar(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_scalar(v):
    if isinstance(v, (int, float)):
        return float(v)
    re, im = float(v[0]), float(v[1])
    return complex(re, im) if im != 0.0 else re


def encode_matrix(M) -> list:
    M = np.atleast_2d(np.asarray(M))
    return [[encode_scalar(x) for x in row] for row in M]


def decode_matrix(rows) -> np.ndarray:
    data = [[decode_scalar(x) for x in row] for row in rows]
    arr = np.array(data)
    if np.iscomplexobj(arr) and not np.any(arr.imag != 0):
        arr = arr.real
    return arr


def _encode_vector(v) -> list:
    return [encode_scalar(x) for x in np.asarray(v).reshape(-1)]


def _decode_vector(vals) -> np.ndarray:
    arr = np.array([decode_scalar(x) for x in vals])
    if np.iscomplexobj(arr) and not np.any(arr.imag != 0):
        arr = arr.real
    return arr


def basis_to_json(basis) -> dict:
    if isinstance(basis, DegreeGradedBasis):
        return {
            "kind": "degree_graded",
            "alpha": _encode_vector(basis.alpha),
            "beta_table": [_encode_vector(r) for r in basis.beta_table],
        }
    return {
        "kind": basis.name if basis.name in ("monomial", "chebyshev1", "chebyshev2") else "custom",
        "alpha": _encode_vector(basis.alpha),
        "beta": _encode_vector(basis.beta),
        "gamma": _encode_vector(basis.gamma),
    }


def basis_from_json(obj) -> object:
    kind = obj.get("kind", "custom")
    if kind == "degree_graded":
        return DegreeGradedBasis(
            _decode_vector(obj["alpha"]),
            tuple(_decode_vector(r) for r in obj.get("beta_table", [])),
        )
    if kind in ("monomial", "chebyshev1", "chebyshev2") and "alpha" not in obj:
        return standard_basis(kind, int(obj["k"]))
    return ThreeTermBasis(
        _decode_vector(obj["alpha"]),
        _decode_vector(obj["beta"]),
        _decode_vector(obj["gamma"]),
        name=kind,
    )


def _sp_to_json(sp) -> dict:
    if sp is None:
        return {"form": "zero"}
    if isinstance(sp, StateSpaceRealization):
        return {"form": "state_space", "A": encode_matrix(sp.A), "B": encode_matrix(sp.B), "C": encode_matrix(sp.C)}
    if isinstance(sp, SymmetricRealization):
        return {"form": "symmetric", "S1": encode_matrix(sp.S1), "S2": encode_matrix(sp.S2), "W": encode_matrix(sp.W)}
    if isinstance(sp, HermitianRealization):
        return {"form": "hermitian", "H1": encode_matrix(sp.H1), "H2": encode_matrix(sp.H2), "W": encode_matrix(sp.W)}
    if isinstance(sp, PoleResidue):
        return {
            "form": "pole_residue",
            "poles": _encode_vector(sp.poles),
            "residues": [encode_matrix(R) for R in sp.residues],
        }
    raise TypeError(f"cannot serialize strictly proper part of type {type(sp)!r}")


def _sp_from_json(obj):
    form = obj.get("form", "zero")
    if form == "zero":
        return None
    if form == "state_space":
        return StateSpaceRealization(decode_matrix(obj["A"]), decode_matrix(obj["B"]), decode_matrix(obj["C"]))
    if form == "symmetric":
        return SymmetricRealization(decode_matrix(obj["S1"]), decode_matrix(obj["S2"]), decode_matrix(obj["W"]))
    if form == "hermitian":
        return HermitianRealization(decode_matrix(obj["H1"]), decode_matrix(obj["H2"]), decode_matrix(obj["W"]))
    if form == "pole_residue":
        return PoleResidue(_decode_vector(obj["poles"]), np.array([decode_matrix(R) for R in obj["residues"]]))
    raise ValueError(f"unknown strictly proper form {form!r}")


def rational_to_json(G: RationalMatrix) -> dict:
    out = {"structure": G.structure, "sp": _sp_to_json(G.sp)}
    if G.poly is not None:
        out["basis"] = basis_to_json(G.poly.basis)
        out["poly_coeffs"] = [encode_matrix(C) for C in G.poly.coeffs]
    return out


def rational_from_json(obj) -> RationalMatrix:
    poly = None
    if "poly_coeffs" in obj and obj["poly_coeffs"]:
        basis = basis_from_json(obj["basis"])
        coeffs = np.array([decode_matrix(C) for C in obj["poly_coeffs"]])
        poly = PolyMat(basis, coeffs)
    sp = _sp_from_json(obj.get("sp", {"form": "zero"}))
    if isinstance(sp, PoleResidue):
        from .realize import from_pole_residue

        sp = from_pole_residue(sp)
    return RationalMatrix(poly, sp, obj.get("structure", "general"))


def pencil_to_json(L: Pencil) -> dict:
    meta = L.meta
    out = {
        "X": encode_matrix(L.X),
        "Y": encode_matrix(L.Y),
        "meta": {
            "n": meta.n,
            "k": meta.k,
            "m": meta.m,
            "family": meta.family,
            "structured": meta.structured,
        },
    }
    md = out["meta"]
    if meta.basis is not None:
        md["basis"] = basis_to_json(meta.basis)
    if meta.ansatz is not None:
        md["ansatz_v"] = _encode_vector(meta.ansatz)
    for name, val in (
        ("state_x", meta.state_x),
        ("state_y", meta.state_y),
        ("h_matrix", meta.h_matrix),
        ("left_trace", meta.left_trace),
        ("right_trace", meta.right_trace),
    ):
        if val is not None:
            md[name] = encode_matrix(val)
    if meta.realization is not None:
        md["realization"] = _sp_to_json(meta.realization)
    return out


def pencil_from_json(obj) -> Pencil:
    md = obj["meta"]
    meta = PencilMeta(
        n=int(md["n"]),
        k=int(md["k"]),
        m=int(md["m"]),
        family=md["family"],
        basis=basis_from_json(md["basis"]) if "basis" in md else None,
        ansatz=_decode_vector(md["ansatz_v"]) if "ansatz_v" in md else None,
        state_x=decode_matrix(md["state_x"]) if "state_x" in md else None,
        state_y=decode_matrix(md["state_y"]) if "state_y" in md else None,
        realization=_sp_from_json(md["realization"]) if "realization" in md else None,
        h_matrix=decode_matrix(md["h_matrix"]) if "h_matrix" in md else None,
        left_trace=decode_matrix(md["left_trace"]) if "left_trace" in md else None,
        right_trace=decode_matrix(md["right_trace"]) if "right_trace" in md else None,
        structured=bool(md.get("structured", True)),
    )
    return Pencil(decode_matrix(obj["X"]), decode_matrix(obj["Y"]), meta)


def markov_from_json(obj) -> MarkovSequence:
    terms = np.array([decode_matrix(M) for M in obj["markov"]])
    return MarkovSequence(terms, int(obj["n"]))


def realization_to_json(R) -> dict:
    out = _sp_to_json(R)
    out["n"] = 0 if R is None else R.n
    return out


def realization_from_json(obj):
    return _sp_from_json(obj)


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
