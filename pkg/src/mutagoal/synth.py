"""Deterministic generator for the large synthetic MiniLang corpus.

Six class templates (counters, wallets, thermostats, shelves, orders that
draw from shelves, and loop-based series) are instantiated with constants
drawn from a seeded RNG. Every test's expected values are computed here by a
plain Python model of the template, never by the MiniLang interpreter.

The corpus deliberately contains:

* helper mutators reached only through other mutators (focal coverage < 100%),
* tests that observe several state changes through one inspector, so a
  mutant can be killed by a test that is not responsible for its method,
* orders whose tests exercise another class's shelf (class-scoped misses),
* weak tests that leave some mutants alive.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

DEFAULT_SEED = 20231
INSTANCES_PER_TEMPLATE = 7

CONFIG_TEXT = """\
# Loop mutants (for instance i := i - 1) never terminate; a tight budget
# keeps the exhaustive kill matrix fast without changing any verdict of
# the unmutated program.
budget = 1000
"""


@dataclass
class Generated:
    class_name: str
    source: str
    tests: list[tuple[str, list[str]]] = field(default_factory=list)
    params: dict[str, int] = field(default_factory=dict)


def _block(lines: list[str], depth: int) -> str:
    pad = "    " * depth
    return "\n".join(pad + line if line else "" for line in lines)


def _class(name: str, fields_: list[tuple[str, str]], methods: list[str]) -> str:
    out = [f"class {name} {{"]
    out += [f"    field {f} := {v}" for f, v in fields_]
    for m in methods:
        out.append("")
        out.append(_block(m.strip("\n").splitlines(), 1))
    out.append("}")
    return "\n".join(out) + "\n"


# -- templates -----------------------------------------------------------------


def counter(name: str, rng: random.Random) -> Generated:
    limit = rng.randint(20, 60)
    step = rng.randint(2, 5)
    src = _class(name, [("count", "0"), ("limit", str(limit)), ("step", str(step))], [
        """
method increment() {
    if self.count + self.step <= self.limit {
        self.count := self.count + self.step
    }
}""", """
method add(n) {
    if n > 0 and self.count + n <= self.limit {
        self.count := self.count + n
    } else {
        self.count := self.limit
    }
}""", """
method reset() {
    self.count := 0
}""", """
method value() returns {
    return self.count
}""", """
method isFull() returns {
    return self.count >= self.limit
}""", """
method remaining() returns {
    return self.limit - self.count
}""",
    ])
    g = Generated(name, src)
    a = rng.randint(1, limit - step - 3)
    g.tests.append(("testIncrement", [
        f"c := new {name}()",
        "c.increment()",
        f"assertEqual(c.value(), {step})",
    ]))
    g.tests.append(("testAddWithinLimit", [
        f"c := new {name}()",
        f"c.add({a})",
        f"assertEqual(c.value(), {a})",
        "assertFalse(c.isFull())",
    ]))
    g.tests.append(("testAddOverflowFills", [
        f"c := new {name}()",
        f"c.add({limit + rng.randint(1, 9)})",
        "assertTrue(c.isFull())",
    ]))
    g.tests.append(("testResetRestoresRoom", [
        f"c := new {name}()",
        f"c.add({a})",
        "c.reset()",
        f"assertEqual(c.remaining(), {limit})",
    ]))
    # two sub-scenarios on the same object
    g.tests.append(("testIncrementThenAdd", [
        f"c := new {name}()",
        "c.increment()",
        f"assertEqual(c.value(), {step})",
        "c.add(2)",
        f"assertEqual(c.remaining(), {limit - step - 2})",
    ]))
    return g


def wallet(name: str, rng: random.Random) -> Generated:
    fee = rng.randint(1, 4)
    limit = rng.randint(30, 80)
    src = _class(name, [("balance", "0"), ("fee", str(fee)), ("limit", str(limit))], [
        """
method deposit(n) {
    if n > 0 {
        self.balance := self.balance + n
    }
}""", """
method withdraw(n) returns {
    if n <= self.balance and n <= self.limit {
        self.balance := self.balance - n
        return true
    }
    return false
}""", """
method charge(n) {
    self.balance := self.balance - n
}""", """
method applyFee() {
    if self.balance >= self.fee {
        self.charge(self.fee)
    }
}""", """
method transfer(other, n) returns {
    if self.withdraw(n) {
        other.deposit(n)
        return true
    }
    return false
}""", """
method getBalance() returns {
    return self.balance
}""",
    ])
    g = Generated(name, src)
    d = rng.randint(10, 25)
    k = rng.randint(1, d - 1)
    g.tests.append(("testDeposit", [
        f"w := new {name}()",
        f"w.deposit({d})",
        f"assertEqual(w.getBalance(), {d})",
    ]))
    g.tests.append(("testWithdraw", [
        f"w := new {name}()",
        f"w.deposit({d})",
        f"ok := w.withdraw({k})",
        "assertTrue(ok)",
        f"assertEqual(w.getBalance(), {d - k})",
    ]))
    g.tests.append(("testWithdrawTooMuch", [
        f"w := new {name}()",
        f"w.deposit({d})",
        f"ok := w.withdraw({d + 1})",
        "assertFalse(ok)",
    ]))
    g.tests.append(("testApplyFee", [
        f"w := new {name}()",
        f"w.deposit({d})",
        "w.applyFee()",
        f"assertEqual(w.getBalance(), {d - fee})",
    ]))
    g.tests.append(("testTransfer", [
        f"a := new {name}()",
        f"b := new {name}()",
        f"a.deposit({d})",
        f"ok := a.transfer(b, {k})",
        "assertTrue(ok)",
        f"assertEqual(b.getBalance(), {k})",
    ]))
    return g


def thermostat(name: str, rng: random.Random) -> Generated:
    lo, hi = 5, 35
    current = rng.randint(12, 20)
    target = current + rng.randint(2, 6)
    src = _class(name, [("current", str(current)), ("target", str(target)), ("enabled", "false")], [
        """
method enable() {
    self.enabled := true
}""", f"""
method setTarget(t) {{
    if t >= {lo} and t <= {hi} {{
        self.target := t
    }}
}}""", """
method tick() {
    if self.enabled and self.current < self.target {
        self.current := self.current + 1
    } else {
        if self.enabled and self.current > self.target {
            self.current := self.current - 1
        }
    }
}""", """
method isHeating() returns {
    return self.enabled and self.current < self.target
}""", """
method temperature() returns {
    return self.current
}""",
    ])
    g = Generated(name, src)
    g.tests.append(("testTickHeats", [
        f"t := new {name}()",
        "t.enable()",
        "t.tick()",
        f"assertEqual(t.temperature(), {current + 1})",
    ]))
    g.tests.append(("testTickWhileDisabled", [
        f"t := new {name}()",
        "t.tick()",
        f"assertEqual(t.temperature(), {current})",
    ]))
    g.tests.append(("testCoolsTowardLowerTarget", [
        f"t := new {name}()",
        "t.enable()",
        f"t.setTarget({current - 2})",
        "t.tick()",
        f"assertEqual(t.temperature(), {current - 1})",
    ]))
    g.tests.append(("testEnableStartsHeating", [
        f"t := new {name}()",
        "t.enable()",
        "assertTrue(t.isHeating())",
    ]))
    if rng.random() < 0.5:
        g.tests.append(("testRejectsTargetOutOfRange", [
            f"t := new {name}()",
            "t.enable()",
            f"t.setTarget({hi + rng.randint(1, 20)})",
            "assertTrue(t.isHeating())",
        ]))
    return g


def shelf(name: str, rng: random.Random) -> Generated:
    cap = rng.randint(8, 20)
    src = _class(name, [("items", "0"), ("capacity", str(cap))], [
        """
method put(n) returns {
    if self.items + n > self.capacity {
        return false
    }
    self.items := self.items + n
    return true
}""", """
method take(n) returns {
    if n > self.items {
        return false
    }
    self.items := self.items - n
    return true
}""", """
method isEmpty() returns {
    return self.items == 0
}""", """
method free() returns {
    return self.capacity - self.items
}""",
    ])
    g = Generated(name, src, params={"capacity": cap})
    p = rng.randint(2, cap - 2)
    g.tests.append(("testPutFits", [
        f"s := new {name}()",
        f"ok := s.put({p})",
        "assertTrue(ok)",
        f"assertEqual(s.free(), {cap - p})",
    ]))
    g.tests.append(("testPutOverCapacity", [
        f"s := new {name}()",
        f"ok := s.put({cap + 1})",
        "assertFalse(ok)",
    ]))
    g.tests.append(("testTakeAll", [
        f"s := new {name}({p})",
        f"s.take({p})",
        "assertTrue(s.isEmpty())",
    ]))
    # weak: never checks the remaining amount
    g.tests.append(("testTakeTooMuch", [
        f"s := new {name}({p})",
        f"ok := s.take({p + 1})",
        "assertFalse(ok)",
    ]))
    return g


def order(name: str, rng: random.Random, shelf_name: str, shelf_cap: int) -> Generated:
    src = _class(name, [("quantity", "0"), ("filled", "false")], [
        """
method request(n) {
    if n > 0 {
        self.quantity := n
    }
}""", """
method fill(store) {
    if not self.filled and self.quantity > 0 {
        self.filled := store.take(self.quantity)
    }
}""", """
method isFilled() returns {
    return self.filled
}""", """
method pending() returns {
    return self.quantity
}""",
    ])
    g = Generated(name, src)
    stock = rng.randint(4, shelf_cap)
    q = rng.randint(1, stock - 1)
    g.tests.append(("testFillFromShelf", [
        f"s := new {shelf_name}({stock})",
        f"o := new {name}()",
        f"o.request({q})",
        "o.fill(s)",
        "assertTrue(o.isFilled())",
        f"assertEqual(s.free(), {shelf_cap - stock + q})",
    ]))
    g.tests.append(("testFillShortShelf", [
        f"s := new {shelf_name}({q})",
        f"o := new {name}()",
        f"o.request({q + 1})",
        "o.fill(s)",
        "assertFalse(o.isFilled())",
    ]))
    g.tests.append(("testRequest", [
        f"o := new {name}()",
        f"o.request({q})",
        f"assertEqual(o.pending(), {q})",
    ]))
    return g


def series(name: str, rng: random.Random) -> Generated:
    factor = rng.randint(2, 5)
    src = _class(name, [("total", "0"), ("count", "0")], [
        f"""
method addRange(n) {{
    i := 1
    while i <= n {{
        self.total := self.total + i * {factor}
        i := i + 1
    }}
    self.count := self.count + n
}}""", """
method mean() returns {
    if self.count == 0 {
        return 0
    }
    return self.total / self.count
}""", """
method sum() returns {
    return self.total
}""",
    ])
    g = Generated(name, src)
    n = rng.randint(3, 8)
    total = factor * n * (n + 1) // 2
    g.tests.append(("testAddRange", [
        f"r := new {name}()",
        f"r.addRange({n})",
        f"assertEqual(r.sum(), {total})",
    ]))
    g.tests.append(("testMean", [
        f"r := new {name}()",
        f"r.addRange({n})",
        f"assertEqual(r.mean(), {total // n})",
    ]))
    g.tests.append(("testEmptyMean", [
        f"r := new {name}()",
        "assertEqual(r.mean(), 0)",
    ]))
    g.tests.append(("testTwoRanges", [
        f"r := new {name}()",
        "r.addRange(2)",
        f"r.addRange({n})",
        f"assertEqual(r.sum(), {factor * 3 + total})",
    ]))
    return g


# -- assembly --------------------------------------------------------------------


def _snake(name: str) -> str:
    out = []
    for i, ch in enumerate(name):
        if ch.isupper() and i:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)


def generate(seed: int = DEFAULT_SEED, instances: int = INSTANCES_PER_TEMPLATE) -> dict[str, str]:
    """Return ``{relative path: text}`` for the whole corpus."""
    rng = random.Random(seed)
    generated: list[Generated] = []
    for k in range(1, instances + 1):
        generated.append(counter(f"Counter{k}", rng))
        generated.append(wallet(f"Wallet{k}", rng))
        generated.append(thermostat(f"Thermostat{k}", rng))
        s = shelf(f"Shelf{k}", rng)
        generated.append(s)
        generated.append(order(f"Order{k}", rng, s.class_name, s.params["capacity"]))
        generated.append(series(f"Series{k}", rng))
    files = {"mutagoal.conf": CONFIG_TEXT}
    for g in generated:
        stem = _snake(g.class_name)
        files[f"src/{stem}.mini"] = g.source
        body = [f"suite {g.class_name}Test {{"]
        for i, (test_name, lines) in enumerate(g.tests):
            if i:
                body.append("")
            body.append(f"    test {test_name} {{")
            body.append(_block(lines, 2))
            body.append("    }")
        body.append("}")
        files[f"tests/{stem}_test.mini"] = "\n".join(body) + "\n"
    return files
