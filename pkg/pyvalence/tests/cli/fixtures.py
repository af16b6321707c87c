import json
from datetime import datetime, timedelta, timezone

import numpy as np

from pyvalence.lexicon import PolarLexicon, save_lexicon
from pyvalence.vecstore import EmbeddingSpace, Vocabulary

ORIGIN = datetime(2021, 6, 1, tzinfo=timezone.utc)

DIMENSION = 8

ENTITIES = ['@amigo', '@colega', '@vizinho', '@rival', '@inimigo']

GROUPS = {'@amigo': 'aliados', '@colega': 'aliados', '@vizinho': 'aliados', '@rival': 'outros', '@inimigo': 'outros'}

LEXICONS = [
    PolarLexicon('valence', ['alegre', 'bonito', 'gentil', 'lindo'], ['triste', 'feio', 'rude', 'horrível']),
    PolarLexicon('trust', ['leal', 'sincero', 'correto', 'firme'], ['falso', 'traidor', 'mentiroso', 'trapaceiro']),
    PolarLexicon('purity', ['limpo', 'puro', 'santo', 'nobre'], ['sujo', 'imundo', 'podre', 'nojento']),
]

FILLER = ['casa', 'rua', 'hoje', 'ontem', 'jogo', 'voto', 'povo', 'cidade', 'notícia', 'semana', 'praça', 'trem']

MINIMAL_CONFIG = '''\
corpus_path = "{corpus}"
pretrained_path = "{pretrained}"
entities_path = "{entities}"
groups_path = "{groups}"
events_path = "{events}"
lexicon_paths = [{lexicons}]
replications = 2
saturated = "{saturated}"

[train]
dimension = {dimension}
min_count = 1
epochs = 2
subsample = 0.0
'''


def corpus_lines(seed=0, n_documents=120, days=14, words=None):
    rng = np.random.default_rng(seed)
    if words is None:
        words = [word for lex in LEXICONS for word in lex.words()] + FILLER
    lines = []
    for i in range(n_documents):
        timestamp = ORIGIN + timedelta(days=days * i / n_documents)
        tokens = [ENTITIES[i % len(ENTITIES)]] + [str(word) for word in rng.choice(words, size=7)]
        record = {'id': str(i), 'created_at': timestamp.isoformat(), 'text': ' '.join(tokens)}
        lines.append(json.dumps(record, ensure_ascii=False))
    return lines


def write_project(directory, seed=0, saturated='derived', corpus_words=None):
    '''Writes a small corpus with every input file a run needs; returns the path of its TOML configuration.'''
    directory.mkdir(parents=True, exist_ok=True)

    corpus = directory / 'corpus.jsonl'
    corpus.write_text('\n'.join(corpus_lines(seed, words=corpus_words)) + '\n', encoding='utf-8')

    words = [word for lex in LEXICONS for word in lex.words()] + FILLER
    rng = np.random.default_rng(seed)
    pretrained = directory / 'pretrained.txt'
    EmbeddingSpace(Vocabulary(words), rng.normal(size=(len(words), DIMENSION))).save(pretrained)

    entities = directory / 'entities.txt'
    entities.write_text('\n'.join(entity.upper() for entity in ENTITIES) + '\n\n', encoding='utf-8')

    groups = directory / 'groups.csv'
    groups.write_text('entity,group\n' + ''.join(f'{e},{g}\n' for e, g in GROUPS.items()), encoding='utf-8')

    events = directory / 'events.csv'
    events.write_text('date,entity,description\n2021-06-08,@amigo,debate\n2020-01-01,@amigo,antes\n', encoding='utf-8')

    lexicon_paths = []
    for lex in LEXICONS:
        path = directory / f'{lex.trait_name}.json'
        save_lexicon(lex, path)
        lexicon_paths.append(f'"{path}"')

    config = directory / 'pyvalence.toml'
    config.write_text(
        MINIMAL_CONFIG.format(
            corpus=corpus,
            pretrained=pretrained,
            entities=entities,
            groups=groups,
            events=events,
            lexicons=', '.join(lexicon_paths),
            saturated=saturated,
            dimension=DIMENSION,
        ),
        encoding='utf-8',
    )
    return config
