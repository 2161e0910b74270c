"""Bundled problem configurations that reproduce the worked examples"""

from typing import Dict, List

from src.core.errors import ConfigError

PRESETS: Dict[str, str] = {
    # -f'' + 8cos^2(x) f on (0, pi), Neumann at both ends
    "example-sl-cos": """
[run]
kind = sl
name = example-sl-cos
E = 70

[sl]
lo = 0
hi = 1
unit = pi
V = 4 + 4cos(2x)
""",
    # -f'' + 1000x f on (0, 1), Dirichlet at both ends
    "example-sl-airy": """
[run]
kind = sl
name = example-sl-airy
E = 1000

[sl]
lo = 0
hi = 1
V = 1000x
left = dirichlet
right = dirichlet
""",
    # 7x7 grid with four edges removed one after another, eigenvalues times 49
    "example-graph-grid": """
[run]
kind = graph-chain
name = example-graph-grid
tol = 1e-5

[graph]
builder = grid
k = 7
remove = (1,2)-(2,2); (2,1)-(2,2); (1,2)-(1,3); (2,1)-(3,1)
count = 6
scale = 49
""",
    # two lattice triangles joined along h-1 bridges
    "example-graph-triangles": """
[run]
kind = graph-homotopy
name = example-graph-triangles
tol = 1e-5

[homotopy]
h = 8
schedule = 0, 0.2, 1
report = 0, 0.2, 1
count = 7
sweep = 0:0.1:1
sweep_index = 1
""",
    "example-system": """
[run]
kind = system-fixture
name = example-system
E = 50

[system]
alpha = -1
beta = 2
u = 100
v = 50
""",
    "poincare-staircase": """
[run]
kind = poincare
name = poincare-staircase

[poincare]
n = 8
profile = degenerate
samples = 200
n_max = 12
seed = 0
""",
}


def preset_names() -> List[str]:
    return sorted(PRESETS)


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}", field="preset", known=", ".join(preset_names()))
    return PRESETS[name]
