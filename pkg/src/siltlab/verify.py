"""Verification suites over one algebra.

Each suite returns a :class:`SuiteResult` with status ``pass``, ``fail`` or
``undecided`` (an exploration or module sweep hit its bound).  Results only
contain registry IDs, dimension vectors and JSON-serialised complexes/maps,
so a report is deterministic for a fixed algebra, prime, seed and bounds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .algebra import Algebra
from .complexes import complex_registry
from .errors import Truncated
from .modules import (
    decompose,
    direct_sum,
    enumerate_stau,
    fac_member,
    indec_projective,
    module_registry,
)
from .poset import (
    HassePoset,
    algebra_hash,
    cover_violations,
    explore,
    explore_nterm,
    interval,
    is_maximal_chain,
    left_mutation_at,
    mgs_search,
    path_exists,
    presilting_proper_summands,
    quotient_endomorphism_algebra,
    stau_hasse,
    stau_has_mgs,
    summand_filter,
)
from .reduction import build_context, red, verify_square
from .silting import (
    bongartz,
    co_bongartz,
    degree_span_ok,
    from_stau_pair,
    is_presilting,
    leq,
    mutate,
    regular,
    regular_shift,
    to_stau_pair,
)

SUITES = ("bijection", "interval", "mutation", "reduction", "square", "regularity", "mgs", "nterm")


@dataclass
class Bounds:
    max_nodes: int = 64
    max_depth: int = 10
    dim_bound: int = 6
    nterm_nodes: int = 10_000


@dataclass
class SuiteResult:
    suite: str
    status: str
    summary: dict
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"suite": self.suite, "status": self.status, "summary": self.summary, "witnesses": self.witnesses}


def _status(ok: bool, undecided: bool = False) -> str:
    if not ok:
        return "fail"
    return "undecided" if undecided else "pass"


class Session:
    """Shared explorations and caches for the suites of one algebra."""

    def __init__(self, alg: Algebra, bounds: Bounds | None = None):
        self.alg = alg
        self.bounds = bounds or Bounds()
        self._reports: dict = {}

    @cached_property
    def hasse(self) -> HassePoset:
        return explore(self.alg, max_nodes=self.bounds.max_nodes)

    @cached_property
    def stau(self):
        try:
            return enumerate_stau(self.alg, self.bounds.dim_bound)
        except Truncated:
            return None

    @property
    def complete(self) -> bool:
        return not self.hasse.truncated

    def square_report(self, U):
        if U not in self._reports:
            ctx = build_context(self.alg, U)
            rep = verify_square(ctx, summand_filter(self.hasse, U), self.bounds.dim_bound, getattr(self.alg, "name", ""))
            self._reports[U] = (ctx, rep)
        return self._reports[U]


# ------------------------------------------------------------------ suites


def suite_bijection(s: Session) -> SuiteResult:
    alg, h = s.alg, s.hasse
    if h.truncated or s.stau is None:
        return SuiteResult("bijection", "undecided", {
            "silting_found": len(h.vertices), "poset_truncated": h.truncated,
            "module_sweep_truncated": s.stau is None})
    pairs = {T: to_stau_pair(alg, T) for T in h.vertices}
    injective = len(set(pairs.values())) == len(pairs)
    equal = set(pairs.values()) == set(s.stau)
    inverse = all(from_stau_pair(alg, P) == T for T, P in pairs.items())
    mods = {T: P.module(alg) for T, P in pairs.items()}
    order_bad = []
    for T, S in itertools.product(h.vertices, repeat=2):
        if leq(alg, T, S) != fac_member(mods[T], mods[S]):
            order_bad.append([list(T), list(S)])
    ok = injective and equal and inverse and not order_bad
    wit = [{"T": list(T), "module_summands": list(P.module_ids), "module_dimvec": list(P.dimvec(alg)),
            "proj": list(P.proj_verts)} for T, P in pairs.items()]
    return SuiteResult("bijection", _status(ok), {
        "silting": len(h.vertices), "stau": len(s.stau), "injective": injective, "equal_sets": equal,
        "inverse": inverse, "order_violations": len(order_bad)}, wit + [{"order_violation": v} for v in order_bad])


def suite_interval(s: Session) -> SuiteResult:
    alg, h = s.alg, s.hasse
    if h.truncated:
        return SuiteResult("interval", "undecided", {"poset_truncated": True})
    wit, bad = [], 0
    for U in presilting_proper_summands(h):
        N, M = bongartz(alg, U), co_bongartz(alg, U)
        by_interval = interval(h, M, N).vertices
        by_summand = summand_filter(h, U)
        meet = sorted(set(N) & set(M)) == sorted(U)
        ok = by_interval == by_summand and meet and leq(alg, M, N)
        bad += not ok
        wit.append({"U": list(U), "bongartz": list(N), "co_bongartz": list(M), "size": len(by_summand),
                    "equal": by_interval == by_summand, "add_meet_is_U": meet})
    return SuiteResult("interval", _status(not bad), {"contexts": len(wit), "violations": bad}, wit)


def suite_mutation(s: Session) -> SuiteResult:
    alg, h = s.alg, s.hasse
    if h.truncated:
        return SuiteResult("mutation", "undecided", {"poset_truncated": True})
    almost = sorted({U for T in h.vertices for U in itertools.combinations(T, alg.n - 1)})
    wit, bad = [], 0
    for U in almost:
        if U:
            N, M = bongartz(alg, U), co_bongartz(alg, U)
        else:
            N, M = regular(alg), regular_shift(alg)
        completions = summand_filter(h, U)
        two = sorted(completions) == sorted({N, M}) and N != M
        X = next(i for i in N if i not in U)
        m = mutate(alg, N, N.index(X), certify=True)
        tri = m.triangle
        ok = two and m.result == M and tri.ok
        bad += not ok
        wit.append({
            "U": list(U), "completions": [list(T) for T in completions], "bongartz": list(N), "co_bongartz": list(M),
            "exchanged": [tri.upper, tri.lower],
            "left_approximation": tri.left.map.to_json(), "right_approximation": tri.right.map.to_json(),
            "checks": {"left_factorizes": tri.left_factorizes, "left_minimal": tri.left_minimal,
                       "right_factorizes": tri.right_factorizes, "right_minimal": tri.right_minimal,
                       "cone_matches": tri.cone_matches, "middle_matches": tri.middle_matches},
        })
    return SuiteResult("mutation", _status(not bad), {"almost_complete": len(almost), "violations": bad}, wit)


def _reduction_rows(s: Session):
    for U in presilting_proper_summands(s.hasse):
        yield U, *s.square_report(U)


def suite_reduction(s: Session) -> SuiteResult:
    alg, h = s.alg, s.hasse
    if h.truncated:
        return SuiteResult("reduction", "undecided", {"poset_truncated": True})
    wit, bad, undecided = [], 0, 0
    for U, ctx, rep in _reduction_rows(s):
        if rep.truncated:
            undecided += 1
            wit.append({"U": list(U), "status": "undecided"})
            continue
        B = ctx.B
        regular_B = direct_sum(*[indec_projective(B, v) for v in range(B.n)])
        top_ok = decompose(red(ctx, ctx.N)) == decompose(regular_B)
        bottom_ok = red(ctx, ctx.M).total == 0
        rank_ok = B.n == alg.n - len(U)
        ok = rep.bijection and rep.order_iso and top_ok and bottom_ok and rank_ok
        bad += not ok
        wit.append({"U": list(U), "B_dim": B.dim, "B_vertices": B.n, "sizes": {"silt_U": rep.silt_U, "stau_B": rep.stau_B},
                    "bijection": rep.bijection, "order_iso": rep.order_iso, "red_top_is_B": top_ok,
                    "red_bottom_is_zero": bottom_ok})
    return SuiteResult("reduction", _status(not bad, undecided > 0),
                       {"contexts": len(wit), "violations": bad, "undecided": undecided}, wit)


def suite_square(s: Session) -> SuiteResult:
    h = s.hasse
    if h.truncated:
        return SuiteResult("square", "undecided", {"poset_truncated": True})
    wit, bad, undecided = [], 0, 0
    for U, ctx, rep in _reduction_rows(s):
        if rep.truncated:
            undecided += 1
            continue
        bad += not rep.passed
        wit.append(rep.to_json())
    return SuiteResult("square", _status(not bad, undecided > 0),
                       {"contexts": len(wit) + undecided, "violations": bad, "undecided": undecided}, wit)


def suite_regularity(s: Session) -> SuiteResult:
    alg, h = s.alg, s.hasse
    if h.truncated:
        return SuiteResult("regularity", "undecided", {"poset_truncated": True, "explored": len(h.vertices)})
    degs = h.degree()
    deg_bad = [list(T) for T, d in degs.items() if d != alg.n]
    covers_bad = cover_violations(h)
    from_bottom = explore(alg, regular_shift(alg), max_nodes=s.bounds.max_nodes)
    same = from_bottom.vertices == h.vertices and from_bottom.edges == h.edges
    wit, int_bad, checked = [], 0, 0
    for N in h.vertices:
        for r in range(1, len(N) + 1):
            for X in itertools.combinations(N, r):
                mu = left_mutation_at(alg, N, X)
                if not degree_span_ok(alg, mu, -1, 0):
                    continue
                checked += 1
                I = interval(h, mu, N)
                d = sorted(set(I.degree().values()))
                if d != [len(X)]:
                    int_bad += 1
                    wit.append({"N": list(N), "X": list(X), "bottom": list(mu), "degrees": d})
    ok = not deg_bad and not covers_bad and same and not int_bad
    return SuiteResult("regularity", _status(ok), {
        "vertices": len(h.vertices), "edges": len(h.edges), "degree": alg.n, "degree_violations": len(deg_bad),
        "cover_violations": len(covers_bad), "same_from_bottom": same, "intervals_checked": checked,
        "interval_violations": int_bad}, wit + [{"degree_violation": T} for T in deg_bad])


def suite_mgs(s: Session) -> SuiteResult:
    alg, h = s.alg, s.hasse
    res = mgs_search(alg, max_len=s.bounds.max_depth, hasse=h)
    lengths = sorted(q.length for q in res.sequences)
    summary = {"sequences": len(res.sequences), "lengths": lengths, "search_truncated": res.truncated,
               "poset_truncated": h.truncated}
    seq_wit = [q.to_json() for q in res.sequences[:50]]
    if h.truncated:
        summary["comparison"] = "undecided-truncated"
        return SuiteResult("mgs", "undecided", summary, seq_wit)
    chains_ok = all(is_maximal_chain(h, q) for q in res.sequences) and bool(res.sequences)
    wit, compared, mismatch, undecided = [], 0, 0, 0
    for N in h.vertices:
        for r in range(1, len(N) + 1):
            for X in itertools.combinations(N, r):
                mu = left_mutation_at(alg, N, X)
                if not degree_span_ok(alg, mu, -1, 0):
                    continue
                C = quotient_endomorphism_algebra(alg, X, [i for i in N if i not in X])
                try:
                    has = stau_has_mgs(C, s.bounds.dim_bound)
                    size = len(stau_hasse(C, s.bounds.dim_bound)[0])
                except Truncated:
                    undecided += 1
                    continue
                path = path_exists(h, N, mu)
                same_size = size == len(interval(h, mu, N).vertices)
                compared += 1
                if path != has or not same_size:
                    mismatch += 1
                    wit.append({"N": list(N), "X": list(X), "path": path, "quotient_mgs": has,
                                "interval_size": len(interval(h, mu, N).vertices), "stau_quotient": size})
    summary.update({"chains_maximal": chains_ok, "comparisons": compared, "mismatches": mismatch,
                    "undecided": undecided})
    return SuiteResult("mgs", _status(chains_ok and not mismatch, undecided > 0), summary, seq_wit + wit)


def suite_nterm(s: Session, n: int = 3) -> SuiteResult:
    alg, h = s.alg, s.hasse
    if h.truncated or s.stau is None:
        return SuiteResult("nterm", "undecided", {"experimental": True, "reason": "two-term data incomplete"})
    nh = explore_nterm(alg, n, s.bounds.nterm_nodes)
    d = n - 2
    bound = (d + 1) * len(s.stau) - d
    if nh.truncated:
        return SuiteResult("nterm", "undecided", {"experimental": True, "explored": len(nh.vertices), "closed": False})
    filt = all(len(T) == alg.n and is_presilting(alg, T, two_term=False) for T in nh.vertices)
    ends = regular(alg) in nh.vertices and regular_shift(alg, n - 1) in nh.vertices
    ok = filt and ends and len(nh.vertices) >= bound
    reg = complex_registry(alg)
    wit = [{"T": list(T), "degree_range": [min(reg[i].lo for i in T), max(reg[i].hi for i in T)]} for T in nh.vertices]
    return SuiteResult("nterm", _status(ok), {
        "experimental": True, "n": n, "count": len(nh.vertices), "lower_bound": bound, "closed": True,
        "presilting_filter": filt, "endpoints_reached": ends}, wit)


_RUNNERS = {
    "bijection": suite_bijection,
    "interval": suite_interval,
    "mutation": suite_mutation,
    "reduction": suite_reduction,
    "square": suite_square,
    "regularity": suite_regularity,
    "mgs": suite_mgs,
    "nterm": suite_nterm,
}


def run_suites(alg: Algebra, suites, bounds: Bounds | None = None) -> dict:
    """Run the named suites (``"all"`` expands) and return a JSON-ready report."""
    if isinstance(suites, str):
        suites = [suites]
    names = list(SUITES) if list(suites) == ["all"] else list(suites)
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
    s = Session(alg, bounds)
    results = [_RUNNERS[name](s) for name in names]
    reg = complex_registry(alg)
    mreg = module_registry(alg)
    return {
        "algebra": getattr(alg, "name", ""),
        "algebra_hash": algebra_hash(alg),
        "prime": alg.p,
        "seed": alg.seed,
        "suites": [r.to_json() for r in results],
        "status": overall([r.status for r in results]),
        "complexes": {str(i): reg[i].to_json() for i in range(len(reg))},
        "modules": {str(i): mreg[i].to_json() for i in range(len(mreg))},
    }


def overall(statuses) -> str:
    statuses = list(statuses)
    if "fail" in statuses:
        return "fail"
    if "undecided" in statuses:
        return "undecided"
    return "pass"
