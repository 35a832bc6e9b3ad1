"""
Primitive condivise dagli ambienti a griglia: azioni, movimenti con clamp ai
bordi, enumerazione degli stati congiunti.
"""

import itertools
from typing import List, NamedTuple, Sequence, Tuple

Cell = Tuple[int, int]

ACTION_LABELS = ("up", "down", "left", "right", "stay")
ACTION_VECTORS: Tuple[Cell, ...] = ((0, 1), (0, -1), (-1, 0), (1, 0), (0, 0))
STAY = 4


class GridState(NamedTuple):
    positions: Tuple[Cell, ...]
    # True se nell'ultima mossa due agenti si sono scambiati di cella
    crossed: bool = False


def cells(width: int, height: int) -> List[Cell]:
    return [(x, y) for y in range(height) for x in range(width)]


def in_grid(cell: Sequence[int], width: int, height: int) -> bool:
    return 0 <= cell[0] < width and 0 <= cell[1] < height


def move(state: GridState, joint_action: Sequence[int], width: int, height: int) -> GridState:
    old = state.positions
    new = []
    for (x, y), a in zip(old, joint_action):
        dx, dy = ACTION_VECTORS[a]
        new.append((min(max(x + dx, 0), width - 1), min(max(y + dy, 0), height - 1)))
    crossed = any(
        old[i] != old[j] and new[i] == old[j] and new[j] == old[i]
        for i, j in itertools.combinations(range(len(old)), 2)
    )
    return GridState(tuple(new), crossed)


def joint_states(width: int, height: int, num_agents: int) -> Tuple[GridState, ...]:
    grid = cells(width, height)
    positions = list(itertools.product(grid, repeat=num_agents))
    if num_agents == 1:
        return tuple(GridState(p, False) for p in positions)
    return tuple(GridState(p, crossed) for crossed in (False, True) for p in positions)


def action_vectors() -> Tuple[Tuple[float, ...], ...]:
    return tuple((float(dx), float(dy)) for dx, dy in ACTION_VECTORS)
