"""Built-in desk-scale instances (G, P) at p = 2."""

from __future__ import annotations

from dataclasses import dataclass, field

from .fusion import FusionSystem, fusion_from_group
from .groups import FiniteGroup, Permutation, generate_group


def _cyc(n: int, *cycles) -> Permutation:
    images = list(range(n))
    for cyc in cycles:
        for i, a in enumerate(cyc):
            images[a] = cyc[(i + 1) % len(cyc)]
    return Permutation(tuple(images))


def _group(degree: int, *gens: Permutation) -> FiniteGroup:
    return generate_group(list(gens), degree=degree)


@dataclass(frozen=True)
class Instance:
    name: str
    G: FiniteGroup
    P: FiniteGroup
    slow: bool = False
    description: str = ""
    _fusion: list = field(default_factory=list, repr=False)

    def fusion(self) -> FusionSystem:
        if not self._fusion:
            self._fusion.append(fusion_from_group(self.G, self.P))
        return self._fusion[0]


def _build_instances() -> dict[str, Instance]:
    out: dict[str, Instance] = {}

    c2 = _group(2, _cyc(2, (0, 1)))
    out["c2"] = Instance("c2", c2, c2, description="trivial fusion on C2")

    klein = _group(4, _cyc(4, (0, 1), (2, 3)), _cyc(4, (0, 2), (1, 3)))
    out["c2xc2"] = Instance("c2xc2", klein, klein, description="trivial fusion on C2xC2")

    c4 = _group(4, _cyc(4, (0, 1, 2, 3)))
    out["c4"] = Instance("c4", c4, c4, description="trivial fusion on C4")

    d8 = _group(4, _cyc(4, (0, 1, 2, 3)), _cyc(4, (0, 2)))
    out["d8"] = Instance("d8", d8, d8, description="trivial fusion on D8")

    s4 = _group(4, _cyc(4, (0, 1, 2, 3)), _cyc(4, (0, 1)))
    out["s4_d8"] = Instance("s4_d8", s4, d8, description="S4 with Sylow D8")

    a4 = _group(4, _cyc(4, (0, 1, 2)), _cyc(4, (0, 1), (2, 3)))
    v4 = a4.subgroup_from_set(
        {Permutation.identity(4), _cyc(4, (0, 1), (2, 3)), _cyc(4, (0, 2), (1, 3)), _cyc(4, (0, 3), (1, 2))}
    )
    out["a4_v4"] = Instance("a4_v4", a4, v4, description="A4 with Sylow C2xC2")

    a6 = _group(6, _cyc(6, (0, 1, 2)), _cyc(6, (1, 2, 3, 4, 5)))
    syl = _group(6, _cyc(6, (0, 1, 2, 3), (4, 5)), _cyc(6, (1, 3), (4, 5)))
    out["a6_d8"] = Instance(
        "a6_d8", a6, a6.subgroup_from_set(set(syl)), slow=True,
        description="A6 with Sylow D8 (slow)",
    )
    return out


_INSTANCES = _build_instances()


def instance(name: str) -> Instance:
    if name not in _INSTANCES:
        raise KeyError(f"unknown instance {name!r}; known: {', '.join(sorted(_INSTANCES))}")
    return _INSTANCES[name]


def instance_names(include_slow: bool = True) -> tuple[str, ...]:
    return tuple(
        sorted(n for n, inst in _INSTANCES.items() if include_slow or not inst.slow)
    )
