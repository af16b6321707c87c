'''Attribute word lists for Brazilian Portuguese polar lexicons.

Valence and trust lists come from the word embedding association test literature, purity from the Brazilian
Portuguese Moral Foundations Dictionary. The saturated lists are the words found closest to and farthest from the
targeted handles; the abusive list was compiled by domain experts from a corpus of harassing tweets.
'''

VALENCE_NEGATIVE = [
    'assalto',
    'assassinato',
    'acidente',
    'agonia',
    'cadeia',
    'cancro',
    'colisão',
    'desastre',
    'divórcio',
    'enfermidade',
    'falha',
    'fedor',
    'feio',
    'ferido',
    'horrível',
    'horroroso',
    'imundície',
    'malvado',
    'matar',
    'mau',
    'maus-tratos',
    'morte',
    'ódio',
    'pobreza',
    'podre',
    'poluir',
    'prisão',
    'terrível',
    'tragédia',
    'tristeza',
    'veneno',
    'vômito',
]

VALENCE_POSITIVE = [
    'alegria',
    'alegrar',
    'amanhecer',
    'amigo',
    'amor',
    'arco-íris',
    'carícia',
    'céu',
    'diamante',
    'diploma',
    'família',
    'feliz',
    'férias',
    'gentil',
    'glorioso',
    'honesto',
    'honra',
    'leal',
    'liberdade',
    'maravilhoso',
    'milagre',
    'paraíso',
    'paz',
    'prazer',
    'prenda',
    'riso',
    'saúde',
    'sortudo',
]

TRUST_NEGATIVE = [
    'desleal',
    'desonesto',
    'duvidoso',
    'egoísta',
    'frio',
    'insensível',
    'mesquinho',
    'traiçoeiro',
    'traidor',
]

TRUST_POSITIVE = [
    'acolhedor',
    'amigável',
    'amigo',
    'apoiador',
    'bom',
    'confiável',
    'gentil',
    'sincero',
]

PURITY_NEGATIVE = [
    'contagiosa',
    'contagioso',
    'corrompe',
    'corrompendo',
    'corromper',
    'corromperam',
    'corrompeu',
    'depravada',
    'depravados',
    'desgraçados',
    'desgraçadamente',
    'doenças',
    'doentes',
    'doentia',
    'doentio',
    'imundice',
    'imundície',
    'imundo',
    'imundos',
    'miseráveis',
    'nojentas',
    'nojentos',
    'pecado',
    'piranha',
    'pródigo',
    'promíscua',
    'puta',
]

PURITY_POSITIVE = [
    'abstinência',
    'decência',
    'decente',
    'decentes',
    'igreja',
    'igrejas',
    'incorruptível',
    'inocente',
    'inocentes',
    'integridade',
    'limpa',
    'limpando',
    'limpar',
    'limpas',
    'limpeza',
    'limpo',
    'limpos',
    'piedade',
    'pura',
    'puro',
    'sagrada',
    'sagrado',
    'santa',
    'santana',
    'santo',
    'santos',
    'virgem',
]

SATURATED_POSITIVE = [
    'acolhedor',
    'bom',
    'confiável',
    'decente',
    'feliz',
    'gentil',
    'honesto',
    'sortudo',
]

SATURATED_NEGATIVE = [
    'corromper',
    'desgraçados',
    'imundos',
    'matar',
    'miseráveis',
    'nojentas',
    'nojentos',
    'puta',
]

ABUSIVE_PHRASES = [
    'asco',
    'asquerosa',
    'asqueroso',
    'assaltante',
    'babaca',
    'bandida',
    'bandido',
    'baranga',
    'bruaca',
    'burra',
    'burro',
    'canalha',
    'chorar',
    'cínica',
    'cínico',
    'comunista',
    'corrupta',
    'corrupto',
    'covarde',
    'cuzão',
    'cuzona',
    'demônio',
    'descarada',
    'descarado',
    'desgraçada',
    'desgraçado',
    'divulgador de fake news',
    'doente',
    'doida',
    'doido',
    'escória',
    'escrota',
    'escroto',
    'espalhador de fake news',
    'esquerdista',
    'fanática',
    'fanático',
    'frescura',
    'gado',
    'guerrilheira',
    'guerrilheiro',
    'hipócrita',
    'idiota',
    'imbecil',
    'incapaz',
    'jumenta',
    'jumento',
    'ladra',
    'ladrão',
    'lamentar',
    'lixo',
    'maldita',
    'maldito',
    'maricas',
    'mediocre',
    'merda',
    'militante',
    'nojenta',
    'nojento',
    'ordinária',
    'ordinário',
    'otária',
    'otário',
    'palhaça',
    'palhaço',
    'pateta',
    'patética',
    'patético',
    'pilantra',
    'propagador de fake news',
    'rata',
    'rato',
    'retardada',
    'retardado',
    'safada',
    'safado',
    'terrorista',
    'velhaca',
    'velhaco',
    'verme',
]

# Multi-word entries cannot be vocabulary tokens
ABUSIVE_WORDS = [phrase for phrase in ABUSIVE_PHRASES if ' ' not in phrase]

LEXICONS = {
    'valence': (VALENCE_POSITIVE, VALENCE_NEGATIVE),
    'trust': (TRUST_POSITIVE, TRUST_NEGATIVE),
    'purity': (PURITY_POSITIVE, PURITY_NEGATIVE),
    'saturated': (SATURATED_POSITIVE, SATURATED_NEGATIVE),
}
