"""Exception hierarchy shared across the package."""


class DevRecError(Exception):
    """Base class for every error raised by this package."""

    #: short machine-readable code used by the HTTP service
    code = "error"

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        # CamelCase -> snake_case, e.g. UnknownUser -> unknown_user
        name = cls.__name__
        cls.code = "".join(
            ("_" + ch.lower()) if ch.isupper() and i else ch.lower()
            for i, ch in enumerate(name)
        )


# ingestion
class UnsupportedFormat(DevRecError):
    """Requested source format is not one of the supported ones."""


class EmptyPayload(DevRecError):
    """A zero-byte payload was handed to the parser."""


class MissingIdentity(DevRecError):
    """No source_id could be derived for a record."""


# ontology / lexicon / container parsing
class ParseError(DevRecError):
    """A file does not conform to its documented format."""


class CycleDetected(DevRecError):
    """Ontology parent links contain a cycle."""


class DanglingReference(DevRecError):
    """An ontology entity refers to an id that does not exist."""


class DuplicateId(DevRecError):
    """Two ontology entities of the same kind share an id."""


class UnknownConcept(DevRecError):
    """A concept id is not part of the loaded ontology."""


class EmptySynset(DevRecError):
    """A lexicon line declares a synset with no terms."""


# profiles
class DuplicateUser(DevRecError):
    """A profile for this user id is already persisted."""


class InvalidField(DevRecError):
    """An explicit-form field carries an invalid value."""


class ClockSkew(DevRecError):
    """A decay timestamp lies before an interest's last update."""


class UnknownArtifact(DevRecError):
    """A feedback event names an artifact the corpus does not contain."""


class UnknownUser(DevRecError):
    """No persisted profile exists for this user id."""


class StoreUnavailable(DevRecError):
    """The profile store directory cannot be used."""


# query expansion
class EmptyQuery(DevRecError):
    """The query text tokenizes to nothing."""


# index
class DuplicateArtifactId(DevRecError):
    """Two artifacts in one corpus build share an id."""


class ZeroVector(DevRecError):
    """Cosine similarity is undefined for a zero-norm vector."""


class EmptyIndex(DevRecError):
    """Reserved for internal index corruption; an empty index is not an error."""


# recommendation
class NoTrainingData(DevRecError):
    """classify_artifact was called without labeled examples."""


class UnknownLabeledId(DevRecError):
    """A labeled training id is not present in the index."""


# evaluation
class EmptyRun(DevRecError):
    """An evaluation run contains no queries."""
