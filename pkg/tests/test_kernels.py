import numpy as np
import pytest
from helpers import VOC_S

from zol import (
    GuardError,
    Structure,
    SubsetMask,
    ValidationError,
    Vocabulary,
    available_impls,
    ball_of,
    compile_eval,
    eval_formula,
    induced,
    make_generator,
    parse,
    sample_masks,
)
from zol.kernels import HAS_NUMBA, _gen_count_source

SENTENCES = [
    "true",
    "false",
    "exists x. x = x",
    "exists x. S(x,x)",
    "exists x. exists y. S(x,y)",
    "forall x. exists y. S(x,y) | S(y,x)",
    "forall x. forall y. S(x,y) -> ~S(y,x)",
    "exists x. forall y. ~S(y,x)",
    "(exists x. exists y. S(x,y)) <-> ~(forall x. forall y. ~S(x,y))",
    "forall x. exists y. exists z. S(x,y) & (S(y,z) | z = x)",
]

GRID_SENTENCES = [
    "exists x. exists y. H(x,y) & V(x,y)",
    "forall x. exists y. H(x,y) | H(y,x) | V(x,y) | V(y,x)",
    "exists x. exists y. exists z. H(x,y) & V(y,z)",
]


def _naive_count(structure, phi, masks):
    hits = 0
    for row in masks:
        sub, _ = induced(structure, SubsetMask(structure.size, np.flatnonzero(row).tolist()))
        hits += eval_formula(sub, phi)
    return hits


class TestAgainstNaiveEvaluator:
    @pytest.mark.parametrize("text", SENTENCES)
    def test_line_ball(self, text):
        host = ball_of(make_generator("z"), "0", 3).structure
        phi = parse(text)
        masks = sample_masks(17, 300, host.size, 0.5)
        ce = compile_eval(host, phi)
        assert ce.count(masks, impl="numpy") == _naive_count(host, phi, masks)

    @pytest.mark.parametrize("text", GRID_SENTENCES)
    def test_grid_ball(self, text):
        host = ball_of(make_generator("grid2"), "0,0", 2).structure
        phi = parse(text)
        masks = sample_masks(23, 200, host.size, 0.5)
        ce = compile_eval(host, phi)
        assert ce.count(masks, impl="numpy") == _naive_count(host, phi, masks)

    def test_all_masks_of_a_small_ball(self):
        host = ball_of(make_generator("z"), "0", 2).structure
        bits = np.arange(1 << host.size, dtype=np.uint64)
        masks = ((bits[:, None] >> np.arange(host.size, dtype=np.uint64)) & 1).astype(np.uint8)
        phi = parse("exists x. exists y. S(x,y)")
        ce = compile_eval(host, phi)
        assert ce.count(masks, impl="numpy") == _naive_count(host, phi, masks)


class TestGeneratedSource:
    def test_runs_as_plain_python_and_matches_numpy(self):
        # the jit path's source must already be correct before numba sees it
        host = ball_of(make_generator("z"), "0", 2).structure
        masks = sample_masks(3, 200, host.size, 0.5)
        for text in SENTENCES:
            ce = compile_eval(host, parse(text))
            namespace = {"np": np}
            exec(_gen_count_source(ce.formula, ce.size, ce._rel_index), namespace)
            fn = namespace["_generated_count"]
            assert fn(masks, *ce._rel_views) == ce.count(masks, impl="numpy")

    def test_relation_argument_order_is_vocabulary_order(self):
        host = ball_of(make_generator("grid2"), "0,0", 1).structure
        ce = compile_eval(host, parse("exists x. exists y. V(x,y)"))
        src = _gen_count_source(ce.formula, ce.size, ce._rel_index)
        assert "def _generated_count(masks, rel_0, rel_1):" in src
        assert "rel_1[" in src and "rel_0[" not in src  # V is second in (H, V)


@pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")
class TestNumbaParity:
    def test_counts_agree_across_impls(self):
        host = ball_of(make_generator("z"), "0", 4).structure
        masks = sample_masks(3, 2000, host.size, 0.5)
        for text in SENTENCES:
            ce = compile_eval(host, parse(text))
            assert ce.count(masks, impl="numba") == ce.count(masks, impl="numpy")

    def test_auto_dispatch_same_answer_on_large_batch(self):
        host = ball_of(make_generator("z"), "0", 3).structure
        masks = sample_masks(5, 25000, host.size, 0.5)
        ce = compile_eval(host, parse("forall x. exists y. S(x,y) | S(y,x)"))
        assert ce.count(masks) == ce.count(masks, impl="numpy")


class TestImplSelection:
    def test_available_impls_always_has_numpy(self):
        impls = available_impls()
        assert "numpy" in impls

    def test_no_numba_flag_hides_the_jit_path(self, monkeypatch):
        monkeypatch.setenv("ZOL_NO_NUMBA", "1")
        assert available_impls() == ["numpy"]

    @pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")
    def test_no_numba_flag_rejects_explicit_numba(self, monkeypatch):
        host = ball_of(make_generator("z"), "0", 1).structure
        ce = compile_eval(host, parse("true"))
        masks = np.ones((4, host.size), dtype=np.uint8)
        monkeypatch.setenv("ZOL_NO_NUMBA", "1")
        with pytest.raises(ValidationError):
            ce.count(masks, impl="numba")
        assert ce.count(masks, impl="numpy") == 4

    def test_unknown_impl_rejected(self):
        host = ball_of(make_generator("z"), "0", 1).structure
        ce = compile_eval(host, parse("true"))
        with pytest.raises(ValidationError):
            ce.count(np.ones((1, host.size), dtype=np.uint8), impl="cython")


class TestCompiledEvalSurface:
    def test_eval_one(self):
        host = ball_of(make_generator("z"), "0", 1).structure
        ce = compile_eval(host, parse("exists x. exists y. S(x,y)"))
        assert ce.eval_one([1, 1, 0]) is True  # keeps the edge -1 -> 0
        assert ce.eval_one([1, 0, 1]) is False  # -1 and 1 are not adjacent
        assert ce.eval_one([0, 0, 0]) is False

    def test_empty_structure(self):
        empty = Structure(VOC_S, 0, {})
        masks = np.zeros((5, 0), dtype=np.uint8)
        assert compile_eval(empty, parse("true")).count(masks) == 5
        assert compile_eval(empty, parse("exists x. x = x")).count(masks) == 0
        assert compile_eval(empty, parse("forall x. false")).count(masks) == 5

    def test_free_variables_rejected(self):
        host = ball_of(make_generator("z"), "0", 1).structure
        with pytest.raises(ValidationError):
            compile_eval(host, parse("S(x,y)"))

    def test_unknown_relation_rejected(self):
        host = ball_of(make_generator("z"), "0", 1).structure
        with pytest.raises(ValidationError):
            compile_eval(host, parse("exists x. E(x,x)"))

    def test_mask_shape_checked(self):
        host = ball_of(make_generator("z"), "0", 1).structure
        ce = compile_eval(host, parse("true"))
        with pytest.raises(ValidationError):
            ce.count(np.ones((2, 7), dtype=np.uint8))
        with pytest.raises(ValidationError):
            ce.count(np.ones(3, dtype=np.uint8))

    def test_table_cell_guard(self):
        wide = Structure(Vocabulary([("Q", 4)]), 46, {})  # 46^4 cells
        with pytest.raises(GuardError):
            compile_eval(wide, parse("exists x. Q(x,x,x,x)"))

    def test_quantifier_relativization(self):
        # dropped elements must be invisible to both quantifiers
        host = ball_of(make_generator("z"), "0", 2).structure
        ce = compile_eval(host, parse("forall x. exists y. S(x,y) | S(y,x)"))
        assert ce.eval_one([1, 1, 1, 1, 1]) is True
        assert ce.eval_one([1, 1, 0, 1, 1]) is True  # two detached edges
        assert ce.eval_one([1, 0, 0, 1, 1]) is False  # -2 left isolated
        assert ce.eval_one([0, 0, 0, 0, 0]) is True  # vacuous forall
