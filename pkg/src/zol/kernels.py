"""Batch evaluation of a sentence over many sampled substructure masks.

This is the package's hot loop: Monte Carlo fraction estimates evaluate one
fixed sentence on 10^5 induced substructures of one fixed ball. The sentence
is compiled once into flat opcode arrays and dense relation lookup tables;
evaluation with quantifiers relativized to the kept-element mask then runs in
one of two interchangeable kernels:

* ``numba``: @njit machine code generated per sentence, nested short-circuit
  quantifier loops over one mask row at a time (an interpreter would route
  every opcode through numba's call dispatcher and lose to numpy);
* ``numpy``: a pure-numpy evaluator vectorized across mask rows (atoms are
  scalar per assignment, quantifiers combine mask columns).

Both count exactly the same satisfying rows; selection is by the ``impl``
argument, else the ``ZOL_NO_NUMBA=1`` environment flag, else workload size
(the JIT warmup only pays for itself on large batches). numba being absent
just disables that path.
"""

from __future__ import annotations

import os
from typing import List, Optional

import numpy as np

from .errors import GuardError, ValidationError
from .formulas import (
    And,
    Atom,
    Equal,
    Exists,
    FalseConst,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    TrueConst,
    free_vars,
    quantifier_rank,
    validate,
)
from .structures import Structure

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


OP_FALSE, OP_TRUE, OP_ATOM, OP_EQ, OP_NOT = 0, 1, 2, 3, 4
OP_AND, OP_OR, OP_IMP, OP_IFF, OP_EXISTS, OP_FORALL = 5, 6, 7, 8, 9, 10

_TABLE_CELL_LIMIT = 1 << 22
_AUTO_NUMBA_ROWS = 20_000


class CompiledEval:
    """A sentence compiled against one structure, ready for batch counting."""

    def __init__(self, structure: Structure, formula: Formula):
        validate(formula, structure.vocabulary)
        if free_vars(formula):
            raise ValidationError("batch evaluation requires a sentence")
        self.structure = structure
        self.formula = formula
        self.size = structure.size
        self.n_slots = max(1, quantifier_rank(formula))

        names = structure.vocabulary.names
        cells = sum(structure.size ** structure.vocabulary.arity(n) for n in names)
        if cells > _TABLE_CELL_LIMIT:
            raise GuardError(
                f"dense relation tables would need {cells} cells "
                f"(limit {_TABLE_CELL_LIMIT}); use a smaller ball"
            )
        rel_index = {n: i for i, n in enumerate(names)}
        self._rel_index = rel_index
        rel_base = np.zeros(len(names) + 1, dtype=np.int64)
        stride_base = np.zeros(len(names) + 1, dtype=np.int64)
        strides: List[int] = []
        for i, n in enumerate(names):
            r = structure.vocabulary.arity(n)
            rel_base[i + 1] = rel_base[i] + structure.size**r
            stride_base[i + 1] = stride_base[i] + r
            strides.extend(structure.size ** (r - 1 - j) for j in range(r))
        rel_data = np.zeros(int(rel_base[-1]), dtype=np.uint8)
        for i, n in enumerate(names):
            base = int(rel_base[i])
            st = strides[int(stride_base[i]) : int(stride_base[i + 1])]
            for t in structure.relations[n]:
                rel_data[base + sum(v * s for v, s in zip(t, st))] = 1
        self._rel_data = rel_data
        self._rel_base = rel_base
        self._strides = np.array(strides, dtype=np.int64) if strides else np.zeros(0, np.int64)
        self._stride_base = stride_base
        self._rel_views = tuple(
            rel_data[int(rel_base[i]) : int(rel_base[i + 1])].reshape(
                (structure.size,) * structure.vocabulary.arity(n)
            )
            for i, n in enumerate(names)
        )
        self._numba_fn = None

        ops: List[int] = []
        a1: List[int] = []
        a2: List[int] = []
        atom_rel: List[int] = []
        atom_ptr: List[int] = [0]
        atom_slots: List[int] = []
        env: dict = {}

        def emit(op: int, x: int = 0, y: int = 0) -> int:
            ops.append(op)
            a1.append(x)
            a2.append(y)
            return len(ops) - 1

        def walk(f: Formula, depth: int) -> int:
            if isinstance(f, TrueConst):
                return emit(OP_TRUE)
            if isinstance(f, FalseConst):
                return emit(OP_FALSE)
            if isinstance(f, Equal):
                return emit(OP_EQ, env[f.left], env[f.right])
            if isinstance(f, Atom):
                atom_rel.append(rel_index[f.rel])
                atom_slots.extend(env[v] for v in f.args)
                atom_ptr.append(len(atom_slots))
                return emit(OP_ATOM, len(atom_rel) - 1)
            if isinstance(f, Not):
                return emit(OP_NOT, walk(f.body, depth))
            if isinstance(f, (And, Or, Implies, Iff)):
                op = {And: OP_AND, Or: OP_OR, Implies: OP_IMP, Iff: OP_IFF}[type(f)]
                left = walk(f.left, depth)
                right = walk(f.right, depth)
                return emit(op, left, right)
            if isinstance(f, (Exists, Forall)):
                slot = depth
                saved = env.get(f.var)
                env[f.var] = slot
                body = walk(f.body, depth + 1)
                if saved is None:
                    del env[f.var]
                else:
                    env[f.var] = saved
                op = OP_EXISTS if isinstance(f, Exists) else OP_FORALL
                return emit(op, slot, body)
            raise TypeError(f"not a formula node: {f!r}")

        self._root = walk(formula, 0)
        self._ops = np.array(ops, dtype=np.int64)
        self._a1 = np.array(a1, dtype=np.int64)
        self._a2 = np.array(a2, dtype=np.int64)
        self._atom_rel = np.array(atom_rel, dtype=np.int64) if atom_rel else np.zeros(0, np.int64)
        self._atom_ptr = np.array(atom_ptr, dtype=np.int64)
        self._atom_slots = (
            np.array(atom_slots, dtype=np.int64) if atom_slots else np.zeros(0, np.int64)
        )

    # -- public API -------------------------------------------------------

    def count(self, masks: np.ndarray, impl: Optional[str] = None) -> int:
        """Number of mask rows whose induced substructure satisfies the sentence."""
        masks = np.ascontiguousarray(masks, dtype=np.uint8)
        if masks.ndim != 2 or masks.shape[1] != self.size:
            raise ValidationError(
                f"masks must have shape (rows, {self.size}), got {masks.shape}"
            )
        chosen = self._choose_impl(impl, masks.shape[0])
        if chosen == "numba":
            if self._numba_fn is None:
                namespace: dict = {"np": np}
                exec(_gen_count_source(self.formula, self.size, self._rel_index), namespace)
                self._numba_fn = njit(cache=False)(namespace["_generated_count"])
            return int(self._numba_fn(masks, *self._rel_views))
        res = self._eval_numpy(self._root, masks, [0] * self.n_slots)
        return int(np.count_nonzero(np.broadcast_to(res, (masks.shape[0],))))

    def eval_one(self, mask_row) -> bool:
        """Evaluate the sentence on a single kept-element mask."""
        row = np.asarray(mask_row, dtype=np.uint8).reshape(1, -1)
        return self.count(row, impl="numpy") == 1

    # -- implementation selection ------------------------------------------

    @staticmethod
    def _choose_impl(impl: Optional[str], rows: int) -> str:
        if impl not in (None, "numba", "numpy"):
            raise ValidationError(f"impl must be 'numba' or 'numpy', got {impl!r}")
        disabled = os.environ.get("ZOL_NO_NUMBA", "") not in ("", "0")
        if impl == "numba":
            if not HAS_NUMBA:
                raise ValidationError("numba requested but not installed")
            if disabled:
                raise ValidationError("numba requested but disabled by ZOL_NO_NUMBA")
            return "numba"
        if impl == "numpy":
            return "numpy"
        if HAS_NUMBA and not disabled and rows >= _AUTO_NUMBA_ROWS:
            return "numba"
        return "numpy"

    # -- numpy path ---------------------------------------------------------

    def _eval_numpy(self, node: int, masks: np.ndarray, env: List[int]):
        op = int(self._ops[node])
        if op == OP_TRUE:
            return np.bool_(True)
        if op == OP_FALSE:
            return np.bool_(False)
        if op == OP_EQ:
            return np.bool_(env[self._a1[node]] == env[self._a2[node]])
        if op == OP_ATOM:
            ai = int(self._a1[node])
            r = int(self._atom_rel[ai])
            st = self._strides[self._stride_base[r] : self._stride_base[r + 1]]
            slots = self._atom_slots[self._atom_ptr[ai] : self._atom_ptr[ai + 1]]
            idx = int(self._rel_base[r]) + sum(
                env[int(s)] * int(stv) for s, stv in zip(slots, st)
            )
            return np.bool_(self._rel_data[idx] != 0)
        if op == OP_NOT:
            return ~self._eval_numpy(int(self._a1[node]), masks, env)
        if op in (OP_AND, OP_OR, OP_IMP, OP_IFF):
            left = self._eval_numpy(int(self._a1[node]), masks, env)
            right = self._eval_numpy(int(self._a2[node]), masks, env)
            if op == OP_AND:
                return left & right
            if op == OP_OR:
                return left | right
            if op == OP_IMP:
                return ~left | right
            return ~(left ^ right)
        if op in (OP_EXISTS, OP_FORALL):
            slot, child = int(self._a1[node]), int(self._a2[node])
            rows = masks.shape[0]
            if op == OP_EXISTS:
                acc = np.zeros(rows, dtype=bool)
                for u in range(self.size):
                    kept = masks[:, u] != 0
                    if not kept.any():
                        continue
                    env[slot] = u
                    acc |= kept & self._eval_numpy(child, masks, env)
                    if acc.all():
                        break
                return acc
            acc = np.ones(rows, dtype=bool)
            for u in range(self.size):
                kept = masks[:, u] != 0
                if not kept.any():
                    continue
                env[slot] = u
                acc &= ~kept | self._eval_numpy(child, masks, env)
                if not acc.any():
                    break
            return acc
        raise ValidationError(f"bad opcode {op}")


def compile_eval(structure: Structure, formula: Formula) -> CompiledEval:
    """Compile ``formula`` (a sentence) for batch evaluation on ``structure``."""
    return CompiledEval(structure, formula)


def available_impls() -> List[str]:
    """Kernel paths usable right now, honoring the ZOL_NO_NUMBA flag."""
    out = ["numpy"]
    if HAS_NUMBA and os.environ.get("ZOL_NO_NUMBA", "") in ("", "0"):
        out.append("numba")
    return out


def _gen_count_source(formula: Formula, size: int, rel_index: dict) -> str:
    """Python source for a per-row counting loop specialized to the sentence.

    Quantifiers become nested for-loops over kept elements with early exit,
    connectives become guarded assignments, atoms index the dense relation
    tables directly. The result is exec'd and handed to @njit, so every name
    it uses must resolve from builtins and its arguments alone.
    """
    body: List[str] = []
    env: dict = {}
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"t{counter[0]}"

    def emit(f: Formula, depth: int, indent: int) -> str:
        pad = "    " * indent
        v = fresh()
        if isinstance(f, TrueConst):
            body.append(f"{pad}{v} = True")
        elif isinstance(f, FalseConst):
            body.append(f"{pad}{v} = False")
        elif isinstance(f, Equal):
            body.append(f"{pad}{v} = {env[f.left]} == {env[f.right]}")
        elif isinstance(f, Atom):
            subscript = ", ".join(env[a] for a in f.args)
            body.append(f"{pad}{v} = rel_{rel_index[f.rel]}[{subscript}] != 0")
        elif isinstance(f, Not):
            inner = emit(f.body, depth, indent)
            body.append(f"{pad}{v} = not {inner}")
        elif isinstance(f, Iff):
            left = emit(f.left, depth, indent)
            right = emit(f.right, depth, indent)
            body.append(f"{pad}{v} = {left} == {right}")
        elif isinstance(f, (And, Or, Implies)):
            left = emit(f.left, depth, indent)
            # short circuit: And skips a decided False, Or/Implies a True
            default, guard = {
                And: ("False", f"if {left}:"),
                Or: ("True", f"if not {left}:"),
                Implies: ("True", f"if {left}:"),
            }[type(f)]
            body.append(f"{pad}{v} = {default}")
            body.append(f"{pad}{guard}")
            right = emit(f.right, depth, indent + 1)
            body.append(f"{pad}    {v} = {right}")
        elif isinstance(f, (Exists, Forall)):
            exists = isinstance(f, Exists)
            elem = f"e{depth}"
            body.append(f"{pad}{v} = {'False' if exists else 'True'}")
            body.append(f"{pad}for i{depth} in range(nk):")
            body.append(f"{pad}    {elem} = kept[i{depth}]")
            saved = env.get(f.var)
            env[f.var] = elem
            inner = emit(f.body, depth + 1, indent + 1)
            if saved is None:
                del env[f.var]
            else:
                env[f.var] = saved
            body.append(f"{pad}    if {inner if exists else f'not {inner}'}:")
            body.append(f"{pad}        {v} = {'True' if exists else 'False'}")
            body.append(f"{pad}        break")
        else:
            raise TypeError(f"not a formula node: {f!r}")
        return v

    root = emit(formula, 0, 2)
    args = "".join(f", rel_{i}" for i in range(len(rel_index)))
    lines = [
        f"def _generated_count(masks{args}):",
        f"    kept = np.empty({size}, np.int64)",
        "    cnt = 0",
        "    for i in range(masks.shape[0]):",
        "        nk = 0",
        f"        for u in range({size}):",
        "            if masks[i, u] != 0:",
        "                kept[nk] = u",
        "                nk += 1",
        *body,
        f"        if {root}:",
        "            cnt += 1",
        "    return cnt",
    ]
    return "\n".join(lines) + "\n"
