"""Exception hierarchy shared by the whole package.

The CLI maps these onto exit codes: ParseError -> 1, DomainError -> 2,
CertificateError -> 3.
"""

from __future__ import annotations


class OlnumError(Exception):
    pass


class ParseError(OlnumError):
    pass


class DomainError(OlnumError):
    pass


class FieldMismatchError(DomainError):
    pass


class CriterionInapplicableError(DomainError):
    pass


class CertificateError(OlnumError):
    pass
