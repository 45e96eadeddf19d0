"""Exception hierarchy shared by all ioconf modules."""


class IoconfError(Exception):
    """Base class for every error raised by this package."""


class ModelError(IoconfError):
    """A transition-system description violates a structural invariant."""


class ModelFormatError(ModelError):
    """Raw model description is syntactically malformed (bad keys/types)."""


class DisjointnessViolation(ModelError):
    """Input and output alphabets overlap, or clash with the internal symbol."""


class ReservedLabelMisuse(ModelError):
    """A reserved name (tau, delta, fail, pass) is used where it may not be."""


class DanglingEndpoint(ModelError):
    """A transition references a state that is not declared."""


class TauSelfLoop(ModelError):
    """A transition loops on the internal action, which is disallowed."""


class UnreachableState(ModelError):
    """A declared state cannot be reached from the initial state."""


class UnknownState(ModelError):
    """An operation was asked about a state the model does not have."""


class UnknownLabel(ModelError):
    """An operation was asked about a label the alphabet does not declare."""


class DeltaAlreadyUsed(ModelError):
    """Quiescence extension requested but the model already uses delta."""


class AlphabetMismatch(ModelError):
    """Two models or automata were combined over incompatible alphabets."""


class AutomatonError(IoconfError):
    """A finite-automaton operation was applied outside its precondition."""


class NotDeterministic(AutomatonError):
    """Operation requires a deterministic, epsilon-free automaton."""


class NotComplete(AutomatonError):
    """Operation requires a complete automaton."""


class NonTrivialFinalSet(AutomatonError):
    """Conversion to a transition system needs every state to be final."""


class RegexError(AutomatonError):
    """Base class for regular-expression front-end failures."""


class RegexSyntaxError(RegexError):
    """The regular expression is not well formed under the grammar."""


class UnknownAtom(RegexError):
    """A stretch of the regex matches no declared alphabet label."""


class AmbiguousTokenization(RegexError):
    """Longest-match tokenization leaves residue although an alternative
    segmentation of the input into alphabet labels exists."""


class GenerationError(IoconfError):
    """Test-purpose or fault-model generation failed."""


class NondeterministicSpec(GenerationError):
    """The multigraph construction needs a deterministic specification."""


class BudgetExceeded(GenerationError):
    """Purpose enumeration would exceed the caller-imposed cap."""


class ReservedStateCollision(GenerationError):
    """A transform must introduce a verdict state whose name is taken."""


class UnsupportedPurpose(GenerationError):
    """A transform precondition (e.g. linear-path shape) does not hold."""


class CyclicPurpose(IoconfError):
    """A purpose that must be acyclic (apart from verdict loops) is not."""


class NonCanonicalSpec(IoconfError):
    """The fault model is not sound for the canonical one-state spec."""
