"""Fine-tuning harness: train an image classifier on exported JTM trees and
emit late-fusion score CSVs."""

__version__ = "0.1.0"

from .harness import LayoutError, TrainSpec, emit_scores, finetune

__all__ = ["LayoutError", "TrainSpec", "emit_scores", "finetune", "__version__"]
