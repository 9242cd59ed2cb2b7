# state.py
# Flat state vector with a name registry: (component, variable, index) <-> slot.

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StateBlock:
    component: str
    variable: str
    start: int
    shape: tuple
    labels: tuple  # labels of the first axis

    @property
    def key(self):
        return f"{self.component}.{self.variable}"

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def slice(self):
        return slice(self.start, self.start + self.size)


class StateRegistry:
    """Ordered blocks of states; slot order is the order of ``add`` calls."""

    def __init__(self):
        self.blocks = {}
        self.size = 0
        self._names = []

    def add(self, component, variable, shape, labels=None):
        shape = (shape,) if np.ndim(shape) == 0 else tuple(shape)
        block = StateBlock(component, variable, self.size, shape,
                           tuple(labels) if labels is not None else tuple(range(shape[0])))
        if block.key in self.blocks:
            raise ValueError(f"state block {block.key} registered twice")
        if len(block.labels) != shape[0]:
            raise ValueError(f"{block.key}: {len(block.labels)} labels for {shape[0]} rows")

        self.blocks[block.key] = block
        for idx in np.ndindex(*shape):
            parts = [str(block.labels[idx[0]])] + [str(i) for i in idx[1:]]
            self._names.append(f"{block.key}[{','.join(parts)}]")
        self.size += block.size
        return block

    @property
    def names(self):
        return list(self._names)

    def name(self, slot):
        return self._names[slot]

    def slot(self, component, variable, index):
        block = self.blocks[f"{component}.{variable}"]
        index = (index,) if np.ndim(index) == 0 else tuple(index)
        return block.start + int(np.ravel_multi_index(index, block.shape))

    def view(self, y, key):
        block = self.blocks[key]
        return y[block.slice].reshape(block.shape)

    def unpack(self, y):
        if len(y) != self.size:
            raise ValueError(f"state length {len(y)} does not match registry size {self.size}")
        return {key: self.view(y, key) for key in self.blocks}

    def pack(self, parts):
        y = np.empty(self.size)
        for key, block in self.blocks.items():
            y[block.slice] = np.broadcast_to(np.asarray(parts[key], dtype=float), block.shape).ravel()
        return y


@dataclass(frozen=True)
class StateVector:
    values: np.ndarray
    registry: StateRegistry

    def __post_init__(self):
        if len(self.values) != self.registry.size:
            raise ValueError("state vector length does not match its registry")

    def __getitem__(self, key):
        return self.registry.view(self.values, key)

    def __len__(self):
        return len(self.values)
