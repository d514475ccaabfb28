from typing import Dict, List, Optional, Tuple

import numpy as np

from model.watermark_task import AggregateRow, EvaluationRow


class evaluation_memory:
    def __init__(self):
        self.buffer: List[EvaluationRow] = []

    def add_row(self, row: EvaluationRow):
        """
        Adds one scored (image, key, attack) result to the memory buffer.
        :param row: EvaluationRow with fidelity and robustness metrics.
        """
        self.buffer.append(row)

    def add_rows(self, rows: List[EvaluationRow]):
        self.buffer.extend(rows)

    def get_all_rows(self) -> List[EvaluationRow]:
        """
        Returns all rows in insertion order.
        """
        return self.buffer

    def get_latest_row(self) -> Optional[EvaluationRow]:
        if self.buffer:
            return self.buffer[-1]
        return None

    def sorted_rows(self, attack_order: List[str]) -> List[EvaluationRow]:
        """Rows ordered by image, key, then attack in run order ('none' first)."""
        rank = {name: i for i, name in enumerate(["none"] + attack_order)}
        return sorted(self.buffer, key=lambda r: (r.image, r.key, rank.get(r.attack, len(rank)), not r.adaptive))

    def aggregates(self) -> List[AggregateRow]:
        """Arithmetic means per (attack, mode), in first-seen order."""
        groups: Dict[Tuple[str, bool], List[EvaluationRow]] = {}
        for row in self.buffer:
            groups.setdefault((row.attack, row.adaptive), []).append(row)
        result = []
        for (attack, adaptive), members in groups.items():
            result.append(AggregateRow(
                attack=attack,
                adaptive=adaptive,
                runs=len(members),
                psnr=float(np.mean([r.psnr for r in members])),
                ssim=float(np.mean([r.ssim for r in members])),
                nc=float(np.mean([r.nc for r in members])),
                ber=float(np.mean([r.ber for r in members])),
            ))
        return result
