import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldfish.embedding import EmbeddingVector
from goldfish.errors import DimensionMismatch, EmptyIndex, ZeroVector
from goldfish.index import ClipRecord, KeyKind, VideoIndex
from goldfish.retrieval import (
    FusionStrategy,
    RetrievalConfig,
    RetrievalQuery,
    cosine_similarity,
    retrieve_top_k,
    score_keys,
)

ENC = "enc-t"


def _vec(values) -> EmbeddingVector:
    values = tuple(float(np.float32(v)) for v in values)
    return EmbeddingVector(values=values, dim=len(values), encoder_id=ENC)


def _index(vectors: dict[int, tuple], video_id="v") -> VideoIndex:
    """vectors: clip_id -> (summary_values, subtitle_values)."""
    index = VideoIndex(video_id=video_id)
    for cid, (summ, sub) in sorted(vectors.items()):
        record = ClipRecord(cid, f"s{cid}", f"u{cid}", (cid - 1) * 1000, cid * 1000)
        index.upsert_clip(record, _vec(summ), _vec(sub))
    return index


def _query(values) -> RetrievalQuery:
    return RetrievalQuery(question="q", embedding=_vec(values))


# --- cosine ---


def test_cosine_identical_unit_vectors():
    assert cosine_similarity(_vec((1, 0, 0)), _vec((1, 0, 0))) == 1.0


def test_cosine_orthogonal():
    assert cosine_similarity(_vec((1, 0)), _vec((0, 1))) == 0.0


def test_cosine_hand_value():
    # 32 / sqrt(14 * 77), evaluated with 50-digit decimal arithmetic.
    expected = 0.9746318461970762
    assert abs(cosine_similarity(_vec((1, 2, 3)), _vec((4, 5, 6))) - expected) < 1e-9


def test_cosine_symmetry_and_range():
    rng = np.random.default_rng(5)
    for _ in range(300):
        a = rng.standard_normal(rng.integers(2, 32))
        b = rng.standard_normal(a.shape[0])
        s = cosine_similarity(a, b)
        assert s == cosine_similarity(b, a)
        assert abs(s) <= 1.0 + 1e-6


def test_cosine_rejects_zero_vector_and_dim_mismatch():
    with pytest.raises(ZeroVector):
        cosine_similarity(_vec((0.0, 0.0)), _vec((1.0, 0.0)))
    with pytest.raises(DimensionMismatch):
        cosine_similarity(_vec((1.0, 0.0)), _vec((1.0, 0.0, 0.0)))


def test_cosine_exact_under_power_of_two_scaling():
    rng = np.random.default_rng(11)
    a = rng.standard_normal(16)
    b = rng.standard_normal(16)
    base = cosine_similarity(a, b)
    for c in (0.25, 0.5, 2.0, 8.0, 1024.0):
        assert cosine_similarity(a, c * b) == base


# --- score_keys ---


def test_union_scores_two_keys_per_clip():
    index = _index({1: ((1, 0), (0, 1)), 2: ((1, 1), (1, -1))})
    scored = score_keys(_query((1, 0)), index, FusionStrategy.UNION)
    assert len(scored) == 4


def test_single_kind_strategies_score_one_key_per_clip():
    index = _index({1: ((1, 0), (0, 1)), 2: ((1, 1), (1, -1))})
    subs = score_keys(_query((1, 0)), index, FusionStrategy.SUBTITLES_ONLY)
    summs = score_keys(_query((1, 0)), index, FusionStrategy.SUMMARY_ONLY)
    assert len(subs) == len(summs) == 2
    assert {s.kind for s in subs} == {"subtitle"}
    assert {s.kind for s in summs} == {"summary"}


def test_concatenated_scores_one_entry_per_clip():
    index = _index({1: ((1, 0), (0, 1)), 2: ((1, 1), (1, -1))})
    scored = score_keys(_query((1, 0)), index, FusionStrategy.CONCATENATED)
    assert len(scored) == 2
    assert {s.kind for s in scored} == {"concatenated"}


def test_concatenated_orthogonal_parts_value():
    # E_sub = T_Q, E_sum orthogonal, all unit: cosine of [E_sub; E_sum]
    # against [T_Q; T_Q] is (1+0)/(sqrt(2)*sqrt(2)) = 0.5, checked against
    # direct numpy evaluation of the stacked construction.
    q = np.array([1.0, 0.0])
    e_sub, e_sum = q, np.array([0.0, 1.0])
    stacked = np.concatenate([e_sub, e_sum])
    doubled = np.concatenate([q, q])
    oracle = float(stacked @ doubled / (np.linalg.norm(stacked) * np.linalg.norm(doubled)))
    index = _index({1: (tuple(e_sum), tuple(e_sub))})
    scored = score_keys(_query(tuple(q)), index, FusionStrategy.CONCATENATED)
    assert scored[0].score == pytest.approx(oracle, abs=1e-12)
    assert scored[0].score == pytest.approx(0.5, abs=1e-12)


def test_empty_index_is_an_error():
    with pytest.raises(EmptyIndex):
        score_keys(_query((1, 0)), VideoIndex(video_id="v"), FusionStrategy.UNION)


# --- retrieve_top_k ---


def test_fewer_clips_than_k_returns_all():
    index = _index({1: ((1, 0), (0, 1)), 2: ((1, 1), (1, -1))})
    hits = retrieve_top_k(_query((1, 0)), index, RetrievalConfig(k=3))
    assert len(hits) == 2


def test_union_dedup_keeps_best_key_per_clip():
    index = _index({1: ((1, 0), (0.9, 0.1)), 2: ((0, 1), (-1, 0))})
    hits = retrieve_top_k(_query((1, 0)), index, RetrievalConfig(k=2))
    assert [h.clip_id for h in hits] == [1, 2]
    assert hits[0].matched_kind == "summary"  # summary key scores 1.0
    assert len({h.clip_id for h in hits}) == len(hits)


def test_exact_tie_broken_by_lower_clip_id():
    same = (0.6, 0.8)
    index = _index({9: (same, (0, -1)), 4: (same, (0, -1)), 2: ((-1, 0), (0, -1))})
    hits = retrieve_top_k(_query((0.6, 0.8)), index, RetrievalConfig(k=2))
    assert [h.clip_id for h in hits] == [4, 9]
    assert hits[0].score == hits[1].score


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        RetrievalConfig(k=0)


# --- brute-force oracle ---


def brute_force_top_k(
    key_matrix: np.ndarray,
    key_labels: list[tuple[int, str]],
    query: np.ndarray,
    k: int,
) -> list[tuple[int, str, float]]:
    """Independent reference: normalize everything, full sort, dedup clips.

    Tie rule mirrors the contract: higher score first, then lower clip id,
    then summary before subtitle.
    """
    kind_rank = {"summary": 0, "subtitle": 1, "concatenated": 2}
    normed = key_matrix / np.linalg.norm(key_matrix, axis=1, keepdims=True)
    scores = normed @ (query / np.linalg.norm(query))
    order = sorted(
        range(len(key_labels)),
        key=lambda i: (-scores[i], key_labels[i][0], kind_rank[key_labels[i][1]]),
    )
    out = []
    seen = set()
    for i in order:
        cid, kind = key_labels[i]
        if cid in seen:
            continue
        seen.add(cid)
        out.append((cid, kind, float(scores[i])))
        if len(out) == k:
            break
    return out


def _random_index(rng: np.random.Generator, m: int, dim: int):
    vectors = {
        cid: (tuple(rng.standard_normal(dim)), tuple(rng.standard_normal(dim)))
        for cid in range(1, m + 1)
    }
    return _index(vectors), vectors


def _oracle_inputs(index: VideoIndex, strategy: FusionStrategy, query: np.ndarray):
    rows, labels = [], []
    for cid in index.clip_ids():
        summ = index.key_vector(cid, KeyKind.SUMMARY).as_array()
        sub = index.key_vector(cid, KeyKind.SUBTITLE).as_array()
        if strategy is FusionStrategy.CONCATENATED:
            rows.append(np.concatenate([sub, summ]))
            labels.append((cid, "concatenated"))
        else:
            if strategy in (FusionStrategy.UNION, FusionStrategy.SUMMARY_ONLY):
                rows.append(summ)
                labels.append((cid, "summary"))
            if strategy in (FusionStrategy.UNION, FusionStrategy.SUBTITLES_ONLY):
                rows.append(sub)
                labels.append((cid, "subtitle"))
    q = np.concatenate([query, query]) if strategy is FusionStrategy.CONCATENATED else query
    return np.vstack(rows), labels, q


@pytest.mark.parametrize("strategy", list(FusionStrategy))
def test_matches_brute_force_on_50_random_clips(strategy):
    rng = np.random.default_rng(1234)
    index, _ = _random_index(rng, m=50, dim=12)
    query = rng.standard_normal(12)
    qvec = _query(tuple(query))
    hits = retrieve_top_k(qvec, index, RetrievalConfig(k=7, strategy=strategy))
    matrix, labels, q = _oracle_inputs(index, strategy, qvec.embedding.as_array())
    expected = brute_force_top_k(matrix, labels, q, 7)
    assert [(h.clip_id, h.matched_kind) for h in hits] == [(c, kind) for c, kind, _ in expected]
    for hit, (_, _, score) in zip(hits, expected):
        assert hit.score == pytest.approx(score, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    m=st.integers(1, 30),
    dim=st.integers(2, 16),
    k=st.integers(1, 12),
    strategy=st.sampled_from(list(FusionStrategy)),
    seed=st.integers(0, 2**31),
)
def test_oracle_equivalence_property(m, dim, k, strategy, seed):
    rng = np.random.default_rng(seed)
    index, _ = _random_index(rng, m, dim)
    qvec = _query(tuple(rng.standard_normal(dim)))
    hits = retrieve_top_k(qvec, index, RetrievalConfig(k=k, strategy=strategy))
    matrix, labels, q = _oracle_inputs(index, strategy, qvec.embedding.as_array())
    expected = brute_force_top_k(matrix, labels, q, k)
    assert [(h.clip_id, h.matched_kind) for h in hits] == [(c, kind) for c, kind, _ in expected]


@settings(max_examples=30, deadline=None)
@given(
    m=st.integers(2, 20),
    k=st.integers(1, 8),
    strategy=st.sampled_from(list(FusionStrategy)),
    seed=st.integers(0, 2**31),
)
def test_topk_prefix_property(m, k, strategy, seed):
    """The top-k prefix of a larger retrieval equals the k-retrieval."""
    rng = np.random.default_rng(seed)
    index, _ = _random_index(rng, m, 8)
    qvec = _query(tuple(rng.standard_normal(8)))
    small = retrieve_top_k(qvec, index, RetrievalConfig(k=k, strategy=strategy))
    large = retrieve_top_k(qvec, index, RetrievalConfig(k=k + 5, strategy=strategy))
    assert large[: len(small)] == small


def test_scores_unchanged_under_positive_query_scaling():
    rng = np.random.default_rng(77)
    index, _ = _random_index(rng, m=20, dim=10)
    base = rng.standard_normal(10)
    hits = retrieve_top_k(_query(tuple(base)), index, RetrievalConfig(k=5))
    for c in (0.5, 2.0, 64.0):
        scaled = retrieve_top_k(_query(tuple(c * base)), index, RetrievalConfig(k=5))
        assert scaled == hits
