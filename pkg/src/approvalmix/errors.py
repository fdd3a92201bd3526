"""Exception types raised across the package.

All are ValueError subclasses so that generic callers may catch broadly,
while tests and library code can assert the specific failure kind.
"""


class ApprovalMixError(ValueError):
    """Base class for all package-specific errors."""


# --- ballot file parsing ------------------------------------------------

class PabulibError(ApprovalMixError):
    """Base class for ballot-file parsing failures."""


class MissingSection(PabulibError):
    """The file lacks a PROJECTS or VOTES section."""


class DuplicateProjectId(PabulibError):
    """The same project id is declared twice in PROJECTS."""


class UnknownProjectId(PabulibError):
    """A vote references a project id not declared in PROJECTS."""


class MalformedRecord(PabulibError):
    """A record does not match its section header (or a header is unusable)."""


# --- elections and slicing ----------------------------------------------

class EmptyElection(ApprovalMixError):
    """Operation requires at least one voter."""


class EmptySubset(ApprovalMixError):
    """Operation requires a nonempty candidate subset."""


class TooFewVoters(ApprovalMixError):
    """Election has too few voters for the requested split."""


# --- models and likelihood ----------------------------------------------

class DimensionMismatch(ApprovalMixError):
    """Ballot / election / model candidate counts disagree."""


class WrongArity(ApprovalMixError):
    """A two-group model was expected."""


class BadArity(ApprovalMixError):
    """Requested number of parameter groups is out of range."""


# --- learners -------------------------------------------------------------

class EmptyComponent(ApprovalMixError):
    """A mixture component received (almost) no responsibility mass."""

    def __init__(self, components, msg=None):
        self.components = tuple(components)
        super().__init__(msg or f"components with no mass: {self.components}")


class BadConfig(ApprovalMixError):
    """Inconsistent sampler or experiment configuration."""


class EmptyChain(ApprovalMixError):
    """Posterior chain holds no retained samples."""


class TooLarge(ApprovalMixError):
    """Problem size exceeds what the brute-force routine enumerates."""


# --- metrics and statistics ----------------------------------------------

class UnequalSizes(ApprovalMixError):
    """Elections must have the same number of voters."""


class DegenerateInput(ApprovalMixError):
    """Statistic undefined for this input (too short or zero variance)."""
