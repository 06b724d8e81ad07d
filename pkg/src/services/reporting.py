from collections.abc import Iterable
from fractions import Fraction
from typing import Any

from src.chains.box import BoxFamily, BoxPoint
from src.hilbert.vectors import HilbertVec
from src.services.management.exceptions import ToolkitError
from src.services.management.schemas import CheckRecord, Report

MAX_WITNESSES = 5

# Every report check names one of these clauses; the value is the statement it instantiates.
CLAUSES: dict[str, str] = {
    "chain/structure": "normal, finite-index, nested subgroups with trivial intersection",
    "chain/quotient-length": "l_n([g]) = min{l(gh) : h in G_n}",
    "chain/separation": "B(1, 2r) meets G_n only in 1 from the level n_r on",
    "box-space/metric": "d' is a metric on the disjoint union of the quotients",
    "box-space/separation": "cross-component distances grow with n + m",
    "box-space/transfer": "fibred embeddings of the box family and of the box space carry each other",
    "coarse-embedding/controls": "m(d(x, y)) <= d(f x, f y) <= M(d(x, y)) with m unbounded, images forming a C-net",
    "cocycle/identity": "b(gh) = b(g) + L(g) b(h) with L(g) a linear isometry",
    "fibred-cce/condition-1": "rho_1(d(x, y)) <= |t_C(x)s(x) - t_C(y)s(y)| <= rho_2(d(x, y)) on subsets of diameter < r",
    "fibred-cce/condition-2": "t_C1(x) o t_C2(x)^-1 is one affine isometry on the overlap",
    "fibred-cce/attained-distance": "the trivialized section distance equals |b(lift(x)^-1 lift(y))|^2",
    "kernel/well-defined": "k_r([x], [y]) does not depend on the subset C",
    "kernel/sandwich": "rho_1^2 <= k_r <= rho_2^2 along the quotient distance",
    "psi/local-cnd": "psi_r is r-locally conditionally negative definite",
    "psi/symmetry": "psi_r(g) = psi_r(g^-1)",
    "psi/envelope": "rho_1(l(g))^2 <= psi_r(g) <= rho_2(l(g))^2 on the ball",
    "psi-limit/stabilization": "psi_r converges pointwise",
    "psi-limit/global-cnd": "the limit psi is conditionally negative definite",
    "psi-limit/envelope": "the limit psi is proper",
}


def fmt_number(value: Fraction | int | float | None) -> int | float | str | None:
    """Integers stay integers, other rationals become 'p/q' strings"""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    return value


def fmt_point(family: BoxFamily, p: BoxPoint) -> str:
    return f"{p.level}:{family.component(p.level).quotient.format(p.coset)}"


def fmt_vector(v: HilbertVec) -> str:
    if not v.support():
        return "0"
    return " + ".join(f"{coef}*e{key!r}" for key, coef in v.sorted_items())


class ReportBuilder:
    """Collects check records in order; the summary fails as soon as one check fails"""

    def __init__(self, command: str, metadata: dict[str, Any] | None = None):
        self.command = command
        self.metadata = dict(metadata or {})
        self.checks: list[CheckRecord] = []
        self.notes: list[str] = []

    def check(
        self,
        name: str,
        clause: str,
        verdict: bool,
        witnesses: Iterable[str] = (),
        **numbers: Fraction | int | float | str | None,
    ) -> CheckRecord:
        if clause not in CLAUSES:
            raise ToolkitError(f"Check {name!r} names unknown clause {clause!r}")
        record = CheckRecord(
            name=name,
            clause=clause,
            verdict=bool(verdict),
            witnesses=list(witnesses)[:MAX_WITNESSES],
            numbers={key: fmt_number(value) for key, value in numbers.items()},
        )
        self.checks.append(record)
        return record

    def extend(self, records: Iterable[CheckRecord]) -> None:
        self.checks.extend(records)

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    @property
    def summary(self) -> bool:
        return all(record.verdict for record in self.checks)

    def build(self) -> Report:
        return Report(
            command=self.command,
            metadata=self.metadata,
            checks=list(self.checks),
            notes=list(self.notes),
            summary=self.summary,
        )
