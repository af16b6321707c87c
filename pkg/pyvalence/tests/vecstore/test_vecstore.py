import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pyvalence.errors import DomainError, OutOfVocabularyError, ParseError, ValidationError
from pyvalence.vecstore import EmbeddingSpace, Vocabulary, analogy, cosine, load_vectors, nearest

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def nonzero_vectors(draw, dimension):
    vector = draw(arrays(np.float64, dimension, elements=finite))
    assume(np.linalg.norm(vector) > 1e-6)
    return vector


def make_space(rows, words=None):
    rows = np.asarray(rows, dtype=np.float64)
    words = words or [f'w{i}' for i in range(len(rows))]
    return EmbeddingSpace(Vocabulary(words), rows)


def write(tmp_path, text, name='vectors.txt'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path


def test_load_vectors_word2vec_header(tmp_path):
    space = load_vectors(write(tmp_path, '2 3\nbom 1 2 3\nmau -1 0.5 1e-3\n'))

    assert space.vocab.words == ['bom', 'mau']
    assert space.input_vectors.shape == (2, 3)
    assert space.vector('mau')[2] == 1e-3
    assert space.lock_mask.all()
    assert not space.output_vectors.any()
    assert space.vocab.counts == {'bom': 0, 'mau': 0}


def test_load_vectors_glove_headerless(tmp_path):
    space = load_vectors(write(tmp_path, 'bom 1 2 3 4\nmau 4 3 2 1\n'))

    assert len(space.vocab) == 2
    assert space.dimension == 4


def test_load_vectors_short_line(tmp_path):
    with pytest.raises(ParseError, match='line 3') as excinfo:
        load_vectors(write(tmp_path, '2 3\nbom 1 2 3\nmau 1 2\n'))

    assert excinfo.value.lineno == 3


@pytest.mark.parametrize('value', ['nan', 'inf', '-inf'])
def test_load_vectors_non_finite(tmp_path, value):
    with pytest.raises(ParseError, match='non-finite'):
        load_vectors(write(tmp_path, f'bom 1 {value}\n'))


def test_load_vectors_non_numeric(tmp_path):
    with pytest.raises(ParseError, match='non-numeric'):
        load_vectors(write(tmp_path, 'bom 1 x\n'))


def test_load_vectors_duplicate_word(tmp_path):
    with pytest.raises(ValidationError, match='duplicate word'):
        load_vectors(write(tmp_path, 'bom 1 2\nbom 3 4\n'))


def test_load_vectors_header_count_mismatch(tmp_path):
    with pytest.raises(ParseError, match='header declares 3 words'):
        load_vectors(write(tmp_path, '3 2\nbom 1 2\n'))


def test_load_vectors_binary(tmp_path):
    path = tmp_path / 'vectors.bin'
    path.write_bytes(b'2 3\n\xff\xfe\x00\x80')

    with pytest.raises(ParseError, match='binary'):
        load_vectors(path)


def test_load_vectors_empty(tmp_path):
    with pytest.raises(ParseError, match='no vectors'):
        load_vectors(write(tmp_path, ''))


def test_save_and_load_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    space = make_space(rng.normal(size=(5, 4)), words=['a', 'ção', '@ana', '#tag', 'b'])
    path = tmp_path / 'space.txt'

    space.save(path)
    loaded = load_vectors(path)

    assert loaded.vocab.words == space.vocab.words
    np.testing.assert_allclose(loaded.input_vectors, space.input_vectors, rtol=1e-5)


@pytest.mark.parametrize(
    'u, v, expected',
    [
        ((1, 0), (1, 0), 1.0),
        ((1, 0), (0, 1), 0.0),
        ((3, 4), (4, 3), 0.96),
        ((1, 0), (-2, 0), -1.0),
    ],
)
def test_cosine(u, v, expected):
    assert cosine(u, v) == pytest.approx(expected, abs=1e-15)


def test_cosine_zero_norm():
    with pytest.raises(DomainError):
        cosine((0, 0), (1, 0))


def test_cosine_dimension_mismatch():
    with pytest.raises(DomainError):
        cosine((1, 0), (1, 0, 0))


@given(data=st.data(), dimension=st.integers(min_value=1, max_value=8))
def test_cosine_symmetric(data, dimension):
    u = data.draw(nonzero_vectors(dimension))
    v = data.draw(nonzero_vectors(dimension))

    assert cosine(u, v) == cosine(v, u)
    assert -1.0 <= cosine(u, v) <= 1.0


@given(data=st.data(), alpha=st.floats(min_value=1e-3, max_value=1e3))
def test_cosine_positive_scale_invariant(data, alpha):
    u = data.draw(nonzero_vectors(4))
    v = data.draw(nonzero_vectors(4))

    assert cosine(alpha * u, v) == pytest.approx(cosine(u, v), abs=1e-12)


def test_nearest_orthonormal_ties_by_ordinal():
    space = make_space(np.eye(3), words=['e1', 'e2', 'e3'])

    result = nearest(space, np.array([1.0, 1.0, 0.0]) / np.sqrt(2), k=2)

    assert [word for word, _ in result] == ['e1', 'e2']
    assert [sim for _, sim in result] == pytest.approx([1 / np.sqrt(2)] * 2, abs=1e-12)


def test_nearest_query_equal_to_stored_vector():
    space = make_space([[1, 2], [2, 1], [-1, 0]])

    word, similarity = nearest(space, np.array([2.0, 1.0]), k=1)[0]

    assert word == 'w1'
    assert similarity == pytest.approx(1.0)


def test_nearest_k_larger_than_vocabulary():
    space = make_space([[1, 0], [0, 1], [1, 1]])

    result = nearest(space, np.array([1.0, 0.0]), k=10, exclude={'w0'})

    assert [word for word, _ in result] == ['w2', 'w1']


def test_nearest_skips_zero_rows():
    space = make_space([[0, 0], [0, 1]])

    assert [word for word, _ in nearest(space, np.array([1.0, 0.0]), k=5)] == ['w1']


@pytest.mark.parametrize('query, k', [((0.0, 0.0), 1), ((1.0, 0.0), 0), ((1.0, 0.0, 0.0), 1)])
def test_nearest_invalid(query, k):
    with pytest.raises(DomainError):
        nearest(make_space([[1, 0]]), np.array(query), k=k)


def test_analogy():
    space = make_space(
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], np.array([1, -1, 1]) / np.sqrt(3)],
        words=['m', 'k', 'w', 'q'],
    )

    assert analogy(space, 'm', 'k', 'w') == 'q'


@given(rows=arrays(np.float64, (6, 3), elements=st.floats(min_value=0.1, max_value=10)))
def test_analogy_never_returns_query_words(rows):
    space = make_space(rows)

    assert analogy(space, 'w0', 'w0', 'w1') not in {'w0', 'w1'}


def test_analogy_out_of_vocabulary():
    space = make_space(np.eye(3))

    with pytest.raises(OutOfVocabularyError, match='rei'):
        analogy(space, 'w0', 'rei', 'w1')


def test_vocabulary_rejects_repeated_words():
    with pytest.raises(ValidationError):
        Vocabulary(['a', 'a'])


def test_space_rejects_non_finite():
    with pytest.raises(ValidationError):
        make_space([[1.0, np.nan]])


def test_space_copy_is_independent():
    space = make_space([[1.0, 2.0]])
    clone = space.copy()

    clone.input_vectors[0, 0] = 5.0

    assert space.input_vectors[0, 0] == 1.0
    assert clone.vocab == space.vocab
