from abc import ABC, abstractmethod
from typing import TextIO

from .models import Instance, Params, Report


class AbstractFunctionSource(ABC):
    """
    Abstract base class for function sources (generator specs, truth-table files, ...).
    Defines the interface for loading the function a command runs on.
    """

    @abstractmethod
    def parameters(self) -> set[str]:
        """
        Names of the sweep parameters this source consumes (for example ``n`` and ``p``).
        """
        pass

    @abstractmethod
    def load(self, overrides: Params | None = None) -> Instance:
        """
        Loads the function, applying any source parameters taken from a sweep point.
        """
        pass


class AbstractReportWriter(ABC):
    """
    Abstract base class for report writers (JSON, CSV).
    """

    @abstractmethod
    def write(self, report: Report, stream: TextIO) -> None:
        """
        Serializes a finished report to the stream.
        """
        pass
