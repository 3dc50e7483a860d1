"""Copson-Lorentz embeddings ``CL^{m,p}(u,v) -> Lambda^q(w)``.

Submodules: :mod:`weights` (weight grammar), :mod:`fundamental` (fundamental
function), :mod:`discretization`, :mod:`conditions` (embedding constants),
:mod:`associated` (associated norm), :mod:`oracle` (brute-force checks) and
:mod:`cli`.
"""
from __future__ import annotations

__version__ = "0.1.0"
