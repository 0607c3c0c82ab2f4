"""Exception hierarchy shared across the simulator."""


class MedsimError(Exception):
    """Base class for all errors raised by this package."""


# -- crypto ------------------------------------------------------------------

class CryptoError(MedsimError):
    pass


class InvalidSeedError(CryptoError):
    pass


class MalformedSignatureError(CryptoError):
    """Signature bytes are not a structurally valid encoding for the scheme."""


class InvalidSignatureError(CryptoError):
    """Well-formed signature that fails arithmetic validity checks."""


class ChallengeError(MedsimError):
    pass


class UnknownChallengeError(ChallengeError):
    pass


class ExpiredChallengeError(ChallengeError):
    pass


class ReplayedChallengeError(ChallengeError):
    pass


class AudienceMismatchError(ChallengeError):
    pass


# -- registry / storage ------------------------------------------------------

class VdrError(MedsimError):
    pass


class DidNotFoundError(VdrError):
    pass


class DuplicateDidError(VdrError):
    pass


class DidDeactivatedError(VdrError):
    pass


class InvalidProofError(VdrError):
    pass


class MalformedDocumentError(VdrError):
    pass


class DdsError(MedsimError):
    pass


class ContentNotFoundError(DdsError):
    pass


class EmptyContentError(DdsError):
    pass


# -- ledger ------------------------------------------------------------------

class ScpError(MedsimError):
    pass


class BadTransactionError(ScpError):
    """Transaction rejected before execution (signature or nonce)."""


class UnknownContractError(ScpError):
    pass


class UnknownMethodError(ScpError):
    pass


class DeployPolicyError(ScpError):
    pass


class Revert(ScpError):
    """Raised inside contract code; unwinds the transaction atomically."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# -- services ----------------------------------------------------------------

class IssuerError(MedsimError):
    pass


class ConnectorError(MedsimError):
    pass


class KeystoreError(MedsimError):
    pass


class ScenarioError(MedsimError):
    pass
