from datetime import datetime, timedelta, timezone

import numpy as np

from pyvalence.corpus import Document, DocumentSet

ORIGIN = datetime(2021, 6, 1, tzinfo=timezone.utc)

TOPIC_A = [f'sol{i}' for i in range(20)]
TOPIC_B = [f'mar{i}' for i in range(20)]

CONFIG_ERRORS = [
    ({'algorithm': 'glove'}, 'Unknown algorithm'),
    ({'dimension': 0}, 'dimension'),
    ({'window': -1}, 'window'),
    ({'negatives': 0}, 'negatives'),
    ({'epochs': 1.5}, 'epochs'),
    ({'min_count': 0}, 'min_count'),
    ({'workers': 0}, 'workers'),
    ({'lr_start': 0.01, 'lr_end': 0.02}, 'lr_end'),
    ({'lr_end': 0.0}, 'lr_end'),
    ({'subsample': -1e-3}, 'subsample'),
    ({'lock_factor': 0.5}, 'lock_factor'),
    ({'seed': -1}, 'seed'),
    ({'seed': 2 ** 64}, 'seed'),
]


def documents(token_lists, start=ORIGIN, step=timedelta(minutes=1), prefix='d'):
    return DocumentSet(
        Document(id=f'{prefix}{i}', timestamp=start + i * step, tokens=tuple(tokens))
        for i, tokens in enumerate(token_lists)
    )


def topic_sentences(rng, topic, n_sentences, length=10):
    return [[str(word) for word in rng.choice(topic, size=length)] for _ in range(n_sentences)]


def two_topic_corpus(seed, n_sentences=1000, length=10):
    '''Sentences drawn from one of two disjoint 20-word topic vocabularies.'''
    rng = np.random.default_rng(seed)
    sentences = []
    for i in range(n_sentences):
        sentences.extend(topic_sentences(rng, TOPIC_A if i % 2 else TOPIC_B, 1, length))

    return documents(sentences)
