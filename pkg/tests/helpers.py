"""Shared structure builders for the test suite."""

from zol import Structure, Vocabulary

VOC_S = Vocabulary([("S", 2)])
VOC_E = Vocabulary([("E", 2)])


def s_path(n: int) -> Structure:
    """Directed successor path on n vertices, the shape of a line ball."""
    return Structure(VOC_S, n, {"S": [(i, i + 1) for i in range(n - 1)]})


def e_graph(size: int, edges) -> Structure:
    return Structure(VOC_E, size, {"E": edges})


def s_graph(size: int, edges) -> Structure:
    return Structure(VOC_S, size, {"S": edges})


def k1(vocab=VOC_S) -> Structure:
    return Structure(vocab, 1)
