"""Exception types raised across the package."""


class ChapterAlignError(Exception):
    """Base class for all package errors."""


class InvalidArg(ChapterAlignError, ValueError):
    pass


class EmptyText(InvalidArg):
    pass


class IoError(ChapterAlignError, OSError):
    pass


class DegenerateChapter(ChapterAlignError):
    """Chapter (or document) has no usable word tokens."""


class MissingVector(ChapterAlignError, KeyError):
    pass


class ZeroVector(ChapterAlignError):
    pass


class InconsistentAlignment(ChapterAlignError):
    pass


class InconsistentInput(ChapterAlignError):
    pass


class WrongAlignmentKind(ChapterAlignError):
    pass


class EmptyRanking(ChapterAlignError):
    pass


class InsufficientData(ChapterAlignError):
    pass


class ParseError(ChapterAlignError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at character {offset})")
        self.message = message
        self.offset = offset


class MissingParse(ChapterAlignError):
    def __init__(self, sentence_id):
        super().__init__(f"no parse tree for sentence {sentence_id!r}")
        self.sentence_id = sentence_id
