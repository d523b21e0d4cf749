"""
Fixed seeded corpus of fields for the verify suite.

Per domain: 28 band-limited random fields, 3 radial bumps and 3 sheared
bumps. The fast level covers three 2D domains; the full level adds a 3D
ball. Values are stored raw and wrapped into ScalarField on access, so a
corrupted entry fails inside the check that reads it.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from affine_vlab.numerics.fields import ScalarField, band_limited_field, bump
from affine_vlab.numerics.geometry import GridDomain, build_grid
from affine_vlab.schemas.domain import DomainSpec

logger = logging.getLogger(__name__)

RANDOM_FIELDS = 28
BUMP_SCALES = (1.0, 0.75, 0.5)
SHEARS = (0.5, 1.0, -0.75)


@dataclass(frozen=True)
class CorpusDomain:
    name: str
    spec: DomainSpec
    h: float
    center: tuple
    inner_radius: float


@dataclass(frozen=True, eq=False)
class CorpusField:
    name: str
    domain: str
    kind: str
    dom: GridDomain
    values: np.ndarray

    def field(self) -> ScalarField:
        return ScalarField(self.dom, self.values)


@dataclass
class Corpus:
    seed: int
    entries: List[CorpusField] = field(default_factory=list)

    def select(self, kind: Optional[str] = None, domain: Optional[str] = None, dim: Optional[int] = None) -> List[CorpusField]:
        return [
            e for e in self.entries
            if (kind is None or e.kind == kind)
            and (domain is None or e.domain == domain)
            and (dim is None or e.dom.dim == dim)
        ]

    def __len__(self) -> int:
        return len(self.entries)


def corpus_domains(level: str) -> List[CorpusDomain]:
    domains = [
        CorpusDomain("disk", DomainSpec.ball_domain(2, 1.0), 1.0 / 16, (0.0, 0.0), 1.0),
        CorpusDomain("square", DomainSpec.unit_square(), 1.0 / 48, (0.5, 0.5), 0.5),
        CorpusDomain("ellipse", DomainSpec(kind="ellipse", half_axes=[1.0, 0.6]), 1.0 / 24, (0.0, 0.0), 0.6),
    ]
    if level == "full":
        domains.append(CorpusDomain("ball3d", DomainSpec.ball_domain(3, 1.0), 0.125, (0.0, 0.0, 0.0), 1.0))
    return domains


def _shear(dim: int, s: float) -> np.ndarray:
    A = np.eye(dim)
    A[0, 1] = s
    return A


def build_corpus(seed: int = 0, level: str = "fast", corrupt: bool = False) -> Corpus:
    """
    Build the corpus for one suite run.

    Args:
        seed: Base seed; domain k draws its random fields from SeedSequence([seed, k])
        level: "fast" or "full"
        corrupt: Inject a NaN into the first random field
    """
    corpus = Corpus(seed=seed)
    for index, spec in enumerate(corpus_domains(level)):
        dom = build_grid(spec.spec, spec.h)
        children = np.random.SeedSequence([seed, index]).spawn(RANDOM_FIELDS)
        for k, child in enumerate(children):
            u = band_limited_field(dom, np.random.default_rng(child))
            corpus.entries.append(CorpusField(f"{spec.name}/random-{k}", spec.name, "random", dom, u.values))
        for k, scale in enumerate(BUMP_SCALES):
            u = bump(dom, center=spec.center, radius=scale * spec.inner_radius)
            corpus.entries.append(CorpusField(f"{spec.name}/radial-{k}", spec.name, "radial", dom, u.values))
        for k, s in enumerate(SHEARS):
            u = bump(dom, center=spec.center, radius=0.5 * spec.inner_radius, matrix=_shear(dom.dim, s))
            corpus.entries.append(CorpusField(f"{spec.name}/sheared-{k}", spec.name, "sheared", dom, u.values))

    if corrupt:
        first = corpus.entries[0]
        values = np.array(first.values)
        values[tuple(np.argwhere(first.dom.inside_mask)[0])] = np.nan
        corpus.entries[0] = CorpusField(first.name, first.domain, first.kind, first.dom, values)
        logger.warning(f"[Corpus] injected NaN into {first.name}")

    logger.info(f"[Corpus] {len(corpus)} fields over {len(corpus_domains(level))} domains (seed={seed})")
    return corpus
