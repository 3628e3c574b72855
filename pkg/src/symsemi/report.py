"""Report objects emitted by the command-line front end.

Each report serializes two ways: ``to_json`` yields a deterministic JSON
document (sorted keys, no timing field, so identical inputs give
byte-identical bytes in exact mode), ``to_text`` yields a human-readable
table that additionally carries the elapsed time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


def stable_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _flag(value: bool) -> str:
    return "yes" if value else "no"


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


def spectrum_table(values) -> list[tuple[float, int]]:
    """Distinct spectrum values (rounded) with multiplicities, ascending."""
    counts: dict[float, int] = {}
    for v in values:
        key = round(float(v), 9) + 0.0   # collapse -0.0
        counts[key] = counts.get(key, 0) + 1
    return sorted(counts.items())


@dataclass(frozen=True)
class ComputeReport:
    model: dict
    p: int
    betti: tuple
    euler_characteristic: int
    semi_characteristic: int
    applicable: bool
    palindromic: bool
    symplectic: dict
    omega: list | None
    warnings: tuple
    elapsed: float

    def to_payload(self) -> dict:
        payload = {
            "report": "compute",
            "model": self.model,
            "p": self.p,
            "betti": list(self.betti),
            "euler_characteristic": self.euler_characteristic,
            "semi_characteristic": self.semi_characteristic,
            "counting_applicable": self.applicable,
            "palindromic": self.palindromic,
            "symplectic": self.symplectic,
            "warnings": list(self.warnings),
        }
        if self.omega is not None:
            payload["omega"] = self.omega
        return payload

    def to_json(self) -> str:
        return stable_json(self.to_payload())

    def to_text(self) -> str:
        m = self.model
        lines = [
            f"model                {m['source']} "
            f"({m['kind']}, manifold dim {m['manifold_dim']})",
            f"cone parameter p     {self.p}",
            "cone Betti numbers",
        ]
        lines += [f"    b_{k}^w = {v}" for k, v in enumerate(self.betti)]
        lines += [
            f"euler characteristic {self.euler_characteristic}",
            f"semi-characteristic  k = {self.semi_characteristic}",
            "counting applies     "
            + (_flag(self.applicable)
               + ("" if self.applicable else " (dimension is 2 mod 4)")),
            f"palindromic Betti    {_flag(self.palindromic)} (observation)",
            "symplectic check     "
            f"closed {_flag(self.symplectic['closed'])}, "
            f"nondegenerate {_flag(self.symplectic['nondegenerate'])}",
        ]
        lines += [f"warning              {w}" for w in self.warnings]
        lines.append(f"elapsed              {self.elapsed:.3f} s")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VerifyReport:
    model: dict
    semi_characteristic: int
    manifold_euler: int
    census: dict
    counting: dict
    euler: dict
    warnings: tuple
    elapsed: float

    @property
    def passed(self) -> bool:
        return (self.counting["status"] != "fail"
                and self.euler.get("passed", True))

    def to_payload(self) -> dict:
        return {
            "report": "verify",
            "model": self.model,
            "semi_characteristic": self.semi_characteristic,
            "manifold_euler_characteristic": self.manifold_euler,
            "census": self.census,
            "counting": self.counting,
            "euler_cross_check": self.euler,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return stable_json(self.to_payload())

    def to_text(self) -> str:
        m = self.model
        c = self.census
        zeros = ("nonvanishing field" if c["nonvanishing"]
                 else f"{c['zero_count']} zeros")
        count = self.counting
        lines = [
            f"model                {m['source']} "
            f"({m['kind']}, manifold dim {m['manifold_dim']})",
            f"semi-characteristic  k = {self.semi_characteristic}",
            f"census               {c['source'] or '(unnamed)'}: {zeros}",
            f"counting check       {count['status']}"
            + (f" ({count['detail']})" if count["detail"] else ""),
        ]
        if "skipped" in self.euler:
            lines.append(f"euler cross-check    skipped: "
                         f"{self.euler['skipped']}")
        else:
            e = self.euler
            lines.append(
                f"euler cross-check    {'pass' if e['passed'] else 'fail'} "
                f"(signed sum {e['signed_sum']}, "
                f"chi = {e['expected']})")
        lines += [f"warning              {w}" for w in self.warnings]
        lines.append(f"elapsed              {self.elapsed:.3f} s")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CliffordReport:
    n: int
    m: int
    mode: str
    identities: tuple
    passed: bool
    elapsed: float

    def to_payload(self) -> dict:
        return {
            "report": "clifford",
            "n": self.n,
            "dimension": self.m,
            "mode": self.mode,
            "identities": list(self.identities),
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return stable_json(self.to_payload())

    def to_text(self) -> str:
        lines = [f"clifford identities  dimension {self.m} "
                 f"(n = {self.n}), {self.mode} mode"]
        for ident in self.identities:
            status = "pass" if ident["passed"] else "FAIL"
            line = f"  {ident['name']:<24} {status}"
            if self.mode == "float":
                line += f"  residual {ident['max_residual']:.3e}"
            if ident["detail"]:
                line += f"  ({ident['detail']})"
            lines.append(line)
        lines.append(f"overall              "
                     f"{'pass' if self.passed else 'FAIL'}")
        lines.append(f"elapsed              {self.elapsed:.3f} s")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class OscillatorReport:
    matrix: dict
    Ts: tuple
    degree_cap: int
    kernel_dimension: int
    parity: str
    parity_matches_det: bool
    spectrum: dict
    eta: dict
    passed: bool
    elapsed: float

    def to_payload(self) -> dict:
        return {
            "report": "oscillator",
            "matrix": self.matrix,
            "T": list(self.Ts),
            "degree_cap": self.degree_cap,
            "kernel_dimension": self.kernel_dimension,
            "parity": self.parity,
            "parity_matches_det": self.parity_matches_det,
            "spectrum": self.spectrum,
            "eta": self.eta,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return stable_json(self.to_payload())

    def to_text(self) -> str:
        m = self.matrix
        lines = [
            f"matrix               {m['source']} ({m['size']}x{m['size']}, "
            f"det sign {m['det_sign']}, {m['mode']} mode)",
            f"couplings T          {', '.join(self.Ts)}",
            f"kernel dimension     {self.kernel_dimension}",
            f"kernel parity        {self.parity} "
            f"(matches det sign: {_flag(self.parity_matches_det)})",
        ]
        table = ", ".join(f"{v:g} x{mult}"
                          for v, mult in self.spectrum["table"])
        lines += [
            f"spectrum / T         {table} (degree cap {self.degree_cap})",
            f"spectral gap / T     {self.spectrum['gap']:g}",
            "T-independence       "
            + ("pass" if self.spectrum["passed"] else "FAIL")
            + (f" ({self.spectrum['detail']})"
               if self.spectrum["detail"] else ""),
            f"C1 (eta scaling)     {self.eta['c1']:.9f}",
            "  C1^2 per T         " + ", ".join(self.eta["c1_squared"]),
            "eta T^(-1/2) law     "
            + ("pass" if self.eta["passed"] else "FAIL")
            + (f" ({self.eta['detail']})" if self.eta["detail"] else ""),
        ]
        if self.eta["source_vanished"]:
            lines.append("note                 eta source vanished; C1 = 0")
        lines.append(f"overall              "
                     f"{'pass' if self.passed else 'FAIL'}")
        lines.append(f"elapsed              {self.elapsed:.3f} s")
        return "\n".join(lines) + "\n"
