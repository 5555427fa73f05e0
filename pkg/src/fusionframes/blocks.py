"""Block matrices of operators acting between l2 direct sums.

A :class:`BlockOpMatrix` is stored flattened: one dense
``sum(row_dims) x sum(col_dims)`` array, subspace-major in both directions.
Block ``(j, i)`` is the slice mapping local coordinates of column space
``i`` to local coordinates of row space ``j``. Flattening and unflattening
are therefore exact.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import linalg
from .errors import DimensionMismatch
from .frames import DirectSumVector
from .linalg import DEFAULT_TOL, adjoint


class BlockOpMatrix:
    __slots__ = ("row_dims", "col_dims", "dense", "_row_off", "_col_off")

    def __init__(self, row_dims: Sequence[int], col_dims: Sequence[int], dense):
        self.row_dims = tuple(int(k) for k in row_dims)
        self.col_dims = tuple(int(k) for k in col_dims)
        dense = np.array(dense, dtype=complex)
        if dense.shape != (sum(self.row_dims), sum(self.col_dims)):
            raise DimensionMismatch(
                f"dense shape {dense.shape} does not match dims "
                f"{sum(self.row_dims)} x {sum(self.col_dims)}"
            )
        dense.setflags(write=False)
        self.dense = dense
        self._row_off = np.concatenate([[0], np.cumsum(self.row_dims)]).astype(int)
        self._col_off = np.concatenate([[0], np.cumsum(self.col_dims)]).astype(int)

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[np.ndarray]]) -> "BlockOpMatrix":
        row_dims = [np.shape(row[0])[0] for row in blocks]
        col_dims = [np.shape(b)[1] for b in blocks[0]]
        for j, row in enumerate(blocks):
            if len(row) != len(col_dims):
                raise DimensionMismatch("ragged block grid")
            for i, b in enumerate(row):
                if np.shape(b) != (row_dims[j], col_dims[i]):
                    raise DimensionMismatch(f"block ({j},{i}) has shape {np.shape(b)}")
        return cls(row_dims, col_dims, np.block([[np.asarray(b, complex) for b in row] for row in blocks]))

    @classmethod
    def zeros(cls, row_dims, col_dims) -> "BlockOpMatrix":
        return cls(row_dims, col_dims, np.zeros((sum(row_dims), sum(col_dims)), complex))

    @classmethod
    def identity(cls, dims) -> "BlockOpMatrix":
        return cls(dims, dims, np.eye(sum(dims), dtype=complex))

    @classmethod
    def block_diag(cls, diag: Sequence[np.ndarray]) -> "BlockOpMatrix":
        row_dims = [np.shape(d)[0] for d in diag]
        col_dims = [np.shape(d)[1] for d in diag]
        out = cls.zeros(row_dims, col_dims)
        dense = np.array(out.dense)
        for j, d in enumerate(diag):
            dense[out._row_off[j]:out._row_off[j + 1], out._col_off[j]:out._col_off[j + 1]] = d
        return cls(row_dims, col_dims, dense)

    # -- access ---------------------------------------------------------------

    @property
    def grid_shape(self) -> tuple[int, int]:
        return len(self.row_dims), len(self.col_dims)

    def block(self, j: int, i: int) -> np.ndarray:
        return self.dense[self._row_off[j]:self._row_off[j + 1], self._col_off[i]:self._col_off[i + 1]]

    @property
    def blocks(self) -> list[list[np.ndarray]]:
        nr, nc = self.grid_shape
        return [[self.block(j, i) for i in range(nc)] for j in range(nr)]

    def flatten(self) -> np.ndarray:
        return np.array(self.dense)

    # -- algebra --------------------------------------------------------------

    def apply(self, c: DirectSumVector) -> DirectSumVector:
        """``(B c)_j = sum_i B_{j,i} c_i``."""
        if c.dims != self.col_dims:
            raise DimensionMismatch(f"vector dims {c.dims} vs column dims {self.col_dims}")
        return DirectSumVector.from_flat(self.row_dims, self.dense @ c.flat())

    def __matmul__(self, other):
        if isinstance(other, DirectSumVector):
            return self.apply(other)
        if not isinstance(other, BlockOpMatrix):
            return NotImplemented
        if self.col_dims != other.row_dims:
            raise DimensionMismatch(f"cannot compose {self.col_dims} with {other.row_dims}")
        return BlockOpMatrix(self.row_dims, other.col_dims, self.dense @ other.dense)

    def __add__(self, other: "BlockOpMatrix") -> "BlockOpMatrix":
        self._check_same(other)
        return BlockOpMatrix(self.row_dims, self.col_dims, self.dense + other.dense)

    def __sub__(self, other: "BlockOpMatrix") -> "BlockOpMatrix":
        self._check_same(other)
        return BlockOpMatrix(self.row_dims, self.col_dims, self.dense - other.dense)

    def __rmul__(self, scalar) -> "BlockOpMatrix":
        return BlockOpMatrix(self.row_dims, self.col_dims, scalar * self.dense)

    def _check_same(self, other):
        if (self.row_dims, self.col_dims) != (other.row_dims, other.col_dims):
            raise DimensionMismatch("block structures differ")

    def adjoint(self) -> "BlockOpMatrix":
        return BlockOpMatrix(self.col_dims, self.row_dims, adjoint(self.dense))

    def norm(self) -> float:
        return linalg.op_norm2(self.dense)

    def is_square(self) -> bool:
        return self.dense.shape[0] == self.dense.shape[1]

    def is_invertible(self, tol: float = DEFAULT_TOL) -> bool:
        """Square at the direct-sum level with full numerical rank."""
        if not self.is_square() or self.dense.size == 0:
            return False
        return linalg.numerical_rank(self.dense, tol) == self.dense.shape[0]

    def allclose(self, other: "BlockOpMatrix", atol: float = 1e-12) -> bool:
        return (self.row_dims, self.col_dims) == (other.row_dims, other.col_dims) and bool(
            np.max(np.abs(self.dense - other.dense), initial=0.0) <= atol
        )

    def __repr__(self):
        return f"BlockOpMatrix(grid={self.grid_shape}, shape={self.dense.shape})"


def adjoint_block(m: BlockOpMatrix) -> BlockOpMatrix:
    """Transpose the grid and take the adjoint of every block."""
    return m.adjoint()


class OplusOperator(BlockOpMatrix):
    """Block-diagonal operator ``(+) U_i`` acting componentwise on a direct sum."""

    __slots__ = ()

    def __init__(self, entries: Sequence[np.ndarray]):
        base = BlockOpMatrix.block_diag([np.asarray(e, complex) for e in entries])
        super().__init__(base.row_dims, base.col_dims, base.dense)

    @property
    def entries(self) -> list[np.ndarray]:
        return [self.block(i, i) for i in range(len(self.row_dims))]

    def bound(self) -> float:
        """``sup_i ||U_i||``, which equals the operator norm in finite dimension."""
        return max(linalg.op_norm2(e) for e in self.entries)
