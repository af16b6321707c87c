TOKENIZE_EXAMPLES = [
    ('@Fulano é #GloboLixo https://t.co/x', ['@fulano', 'é', '#globolixo']),
    ('ÓDIO!!!', ['ódio']),
    ('', []),
    ('   \t\n ', []),
    ('@ana é #globolixo', ['@ana', 'é', '#globolixo']),
    ('"Vergonha," disse @Ana.', ['vergonha', 'disse', '@ana']),
    ('veja http://exemplo.com/a?b=1 agora', ['veja', 'agora']),
    ('@ # !!! ...', []),
    ('#@ana', ['#ana']),
    ('coração... (ação)', ['coração', 'ação']),
    ('meio-termo', ['meio-termo']),
    ('HTTPS://T.CO/ABC fim', ['fim']),
    ('Cafe\u0301 E\u0301', ['caf\u00e9', '\u00e9']),
]

TIMESTAMP_EXAMPLES = [
    ('2021-06-02T00:00:00Z', '2021-06-02T00:00:00+00:00'),
    ('2021-06-02T03:00:00+03:00', '2021-06-02T00:00:00+00:00'),
    ('2021-06-01T21:30:15.999-03:00', '2021-06-02T00:30:15+00:00'),
]

BAD_LINES = [
    ('not json', 'invalid JSON'),
    ('[1, 2]', 'expected a JSON object'),
    ('{"id": "1", "text": "x"}', "'created_at'"),
    ('{"id": 1, "created_at": "2021-06-02T00:00:00Z", "text": "x"}', "'id'"),
    ('{"id": "1", "created_at": "2021-06-02T00:00:00Z", "text": null}', "'text'"),
    ('{"id": "1", "created_at": "ontem", "text": "x"}', 'invalid ISO-8601'),
    ('{"id": "1", "created_at": "2021-06-02T00:00:00", "text": "x"}', 'no UTC offset'),
]
