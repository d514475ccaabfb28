import abc
from abc import ABC


class SubbandTransform(ABC):
    """A linear, perfectly reconstructing split of a grid into subbands."""
    transform_name = "SubbandTransform"

    @abc.abstractmethod
    def decompose(self, grid):
        raise NotImplementedError

    @abc.abstractmethod
    def reconstruct(self, subbands):
        raise NotImplementedError
