import random
from pathlib import Path

from conerigid.lattice import CycleClass
from conerigid.untwist import S1, S2, SECTION_PAIR, CurveMark, MarkedSystem, UntwistError, untwist

GOLDEN = Path(__file__).parent / "golden"


def random_system(rng: random.Random, n_max: int = 40) -> MarkedSystem:
    """A marked system with at most one maximal mark, multiplicity in (n, 3n/2]."""
    n = rng.randint(1, n_max)
    m = rng.randint(0, 5)
    marks = []
    if rng.random() < 0.6:
        marks.append(CurveMark("s1", S1, CycleClass(1, 0), 0))
    if rng.random() < 0.6:
        marks.append(CurveMark("s2", S2, CycleClass(1, 0), 0))
    for k in range(rng.randint(0, 2)):
        marks.append(CurveMark(f"l{k}", SECTION_PAIR, CycleClass(1, rng.randint(0, 1)), 0,
                               rng.randint(0, n)))
    if not marks:
        marks.append(CurveMark("s1", S1, CycleClass(1, 0), 0))
    hot = rng.randrange(len(marks))
    out = []
    for i, mk in enumerate(marks):
        nu = rng.randint(n + 1, (3 * n) // 2) if i == hot and (3 * n) // 2 > n else rng.randint(0, n)
        out.append(CurveMark(mk.id, mk.kind, mk.cls, nu, mk.conj_mult))
    return MarkedSystem("V", n, m, tuple(out))


def admissible_systems(count: int, seed: int = 20261016):
    """``count`` random systems on which untwist runs without a validation error."""
    rng = random.Random(seed)
    found, rejected = [], 0
    while len(found) < count:
        s = random_system(rng)
        try:
            untwist(s)
        except UntwistError:
            rejected += 1
            continue
        found.append(s)
    return found, rejected


def brute_paths(N, arrows, top=None):
    """Count directed paths top -> i by explicit depth-first enumeration."""
    top = N if top is None else top
    succ = {i: [j for (a, j) in arrows if a == i] for i in range(1, N + 1)}
    counts = [0] * (N + 1)

    def walk(v):
        counts[v] += 1
        for w in succ[v]:
            walk(w)

    walk(top)
    return tuple(counts[1:])


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion[" in nodeid and rep.when == "call" or \
                    (status == "error" and "test_acceptance" in nodeid):
                name = nodeid.split("[", 1)[1].rstrip("]")
                lines.append((name, "PASS" if status == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(lines, key=lambda x: int(x[0].split("_")[1])):
            terminalreporter.write_line(f"{name.replace('_', ' ')}: {status}")
