"""Bundled English stop word list.

A flat list of high-frequency function words, close to the lists shipped with
common NLP toolkits.  Callers can substitute their own list; this one is the
default used when no stop word file is supplied.
"""

ENGLISH_STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are aren as at be
    because been before being below between both but by can cannot could
    couldn did didn do does doesn doing don down during each few for from
    further had hadn has hasn have haven having he her here hers herself him
    himself his how i if in into is isn it its itself just ll me might mightn
    more most must mustn my myself needn no nor not now o of off on once only
    or other our ours ourselves out over own re s same shan she should shouldn
    so some such t than that the their theirs them themselves then there these
    they this those through to too under until up ve very was wasn we were
    weren what when where which while who whom why will with won would wouldn
    you your yours yourself yourselves
    """.split()
)


def load_stopwords(path=None):
    """Return the stop word set, optionally read from ``path``.

    The file format is one word per line; blank lines and ``#`` comments are
    ignored.  Words are lowercased so the set matches lowercased tokens.
    """
    if path is None:
        return ENGLISH_STOPWORDS
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word.lower())
    return frozenset(words)
