"""Stanley coefficients of unit interval orders via Escher tuples, condition
graphs over core vectors, and a cross-entropy search for such graphs."""

from .uio import Relation, UnitIntervalOrder, generate_all_uios, uio_from_area

__all__ = ["Relation", "UnitIntervalOrder", "generate_all_uios", "uio_from_area"]
__version__ = "0.1.0"
