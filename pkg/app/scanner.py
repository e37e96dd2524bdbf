"""
Eisenstein congruence scanner
Searches (k, p, ε, ℓ) passing the Eisenstein-congruence hypotheses over finite ranges,
optionally verifies each hit, and checkpoints progress per (k, p) cell.
"""

import json
import logging
import os
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from sympy import factorint, isprime

from .congruence import verify_T1
from .exactmath import t1_conditions

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 2


class ScanCheckpoint:
    """JSON checkpoint of finished (k, p) cells"""

    def __init__(self, path: Optional[Path]):
        self.path = Path(path) if path else None

    def load_state(self) -> Dict[str, Dict]:
        """
        Load finished cells from the checkpoint file

        Returns:
            Map "k,p" → {"verify": bool, "rows": [...]}; empty when there is no usable checkpoint
        """
        if not self.path or not self.path.exists():
            return {}
        try:
            with open(self.path, 'r', encoding='utf-8') as f:
                state = json.load(f)
            if state.get("version") != CHECKPOINT_VERSION:
                logger.warning(f"Ignoring checkpoint {self.path} with version {state.get('version')}")
                return {}
            cells = state.get("cells", {})
            logger.debug(f"Loaded checkpoint: {len(cells)} finished cells")
            return cells
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Failed to load checkpoint: {e}")
            return {}

    def save_state(self, cells: Dict[str, Dict]):
        """
        Save finished cells using an atomic write

        Writes to a temporary file first, then renames it over the checkpoint.
        """
        if not self.path:
            return
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp_file = self.path.with_suffix('.tmp')
            with open(tmp_file, 'w', encoding='utf-8') as f:
                json.dump({"version": CHECKPOINT_VERSION, "cells": cells}, f, indent=2, sort_keys=True)
                f.flush()
                os.fsync(f.fileno())
            tmp_file.replace(self.path)
        except OSError as e:
            logger.error(f"Failed to save checkpoint: {e}")


def candidate_moduli(k: int, p: int, eps: int) -> List[int]:
    """Primes dividing (p^{k/2}+ε)(p^{k/2-1}+ε)."""
    product = (p ** (k // 2) + eps) * (p ** (k // 2 - 1) + eps)
    return sorted(factorint(abs(product))) if product else []


def scan_cell(k: int, p: int, verify: bool = False) -> List[Dict]:
    """All (ε, ℓ) passing the hypotheses for one (k, p), ε = +1 before -1."""
    rows = []
    for eps in (1, -1):
        for ell in candidate_moduli(k, p, eps):
            conditions = t1_conditions(k, p, eps, ell)
            if not conditions.ok:
                continue
            row = {"k": k, "p": p, "eps": eps, "ell": ell, "case": conditions.case}
            if verify:
                row["verified"] = verify_T1(k, p, eps, ell).passed
            rows.append(row)
    return rows


def scan_T1(k_range: Iterable[int], p_range: Iterable[int], verify: bool = False,
            checkpoint: Optional[Path] = None, resume: bool = False) -> List[Dict]:
    """
    Scan for Eisenstein congruences

    Args:
        k_range: Weights (odd or < 4 skipped)
        p_range: Levels (non-primes skipped)
        verify: Run verify_T1 on every hit
        checkpoint: Optional JSON file written after every (k, p) cell
        resume: Reuse finished cells from the checkpoint that were scanned with the same verify flag

    Returns:
        Rows sorted by (k, p, -ε, ℓ)
    """
    store = ScanCheckpoint(checkpoint)
    cells = store.load_state() if resume else {}
    rows: List[Dict] = []
    for k in sorted(set(k_range)):
        if k < 4 or k % 2:
            continue
        for p in sorted(set(p_range)):
            if not isprime(p):
                continue
            key = f"{k},{p}"
            cell = cells.get(key)
            if isinstance(cell, dict) and cell.get("verify") == verify:
                logger.debug(f"Cell {key} restored from checkpoint")
            else:
                if cell is not None:
                    logger.info(f"Cell {key} checkpointed with a different verify flag, recomputing")
                cell = {"verify": verify, "rows": scan_cell(k, p, verify)}
                cells[key] = cell
                store.save_state(cells)
            rows.extend(cell["rows"])
    logger.info(f"scan_T1: {len(rows)} hits")
    return rows
