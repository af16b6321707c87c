class PyvalenceError(Exception):
    pass


class ParseError(PyvalenceError, ValueError):
    def __init__(self, message: str, path=None, lineno: int = None):
        if lineno is not None:
            message = f'line {lineno}: {message}'
        if path is not None:
            message = f'{path}: {message}'
        super().__init__(message)
        self.path = path
        self.lineno = lineno


class ValidationError(PyvalenceError, ValueError):
    pass


class DomainError(PyvalenceError, ValueError):
    pass


class DegenerateInputError(DomainError):
    pass


class OutOfVocabularyError(PyvalenceError, KeyError):
    def __init__(self, word: str):
        super().__init__(word)
        self.word = word

    def __str__(self):
        return f'{self.word!r} is not in the vocabulary'
