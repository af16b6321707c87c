import numpy as np

from pyvalence.lexicon import PolarLexicon
from pyvalence.tests.trainer.fixtures import documents
from pyvalence.trainer import TrainConfig
from pyvalence.vecstore import EmbeddingSpace, Vocabulary

POSITIVE = [f'bom{i}' for i in range(8)]
NEGATIVE = [f'mau{i}' for i in range(8)]

LEX = PolarLexicon('valence', POSITIVE, NEGATIVE)

DIMENSION = 10

PLANTED_CONFIG = TrainConfig(dimension=DIMENSION, min_count=1, subsample=0.0, epochs=5, window=5, seed=11)

# Loading of each handle on the valence axis
LOADINGS = {
    '@amigo': 1.5,
    '@colega': 0.8,
    '@vizinho': 0.3,
    '@estranho': -0.3,
    '@rival': -0.8,
    '@inimigo': -1.5,
}


def planted_space(loadings=LOADINGS, dimension=DIMENSION, noise=0.3, seed=0):
    '''Positive words around +e1, negative words around -e1, each handle at its loading along e1.'''
    rng = np.random.default_rng(seed)
    axis = np.zeros(dimension)
    axis[0] = 2.0

    words = POSITIVE + NEGATIVE + list(loadings)
    centers = [axis] * len(POSITIVE) + [-axis] * len(NEGATIVE) + [axis * w / 2 for w in loadings.values()]
    rows = np.array(centers) + rng.normal(scale=noise, size=(len(words), dimension))

    return EmbeddingSpace(Vocabulary(words), rows)


def mention_corpus(entities, seed=0, n_sentences=40, length=6):
    '''Sentences mixing every handle with random attribute words, so every token reaches the vocabulary.'''
    rng = np.random.default_rng(seed)
    sentences = []
    for i in range(n_sentences):
        words = [str(word) for word in rng.choice(POSITIVE + NEGATIVE, size=length - 1)]
        sentences.append([entities[i % len(entities)]] + words)

    return documents(sentences)


def polar_corpus(seed=0, n_sentences=200, length=8):
    '''@amigo only ever appears among positive words, @rival only among negative ones.'''
    rng = np.random.default_rng(seed)
    sentences = []
    for i in range(n_sentences):
        entity, pole = ('@amigo', POSITIVE) if i % 2 else ('@rival', NEGATIVE)
        sentences.append([entity] + [str(word) for word in rng.choice(pole, size=length - 1)])

    return documents(sentences)
