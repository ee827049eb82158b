"""
HilbertLab - Words, conjugacy classes and representations
Words are tuples of signed 1-based generator indices: 1 is the first
generator, -1 its inverse. Letters are ordered a < a^-1 < b < b^-1 < ...
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from . import conf
from .conf import geo_setting
from .exceptions import (
    BudgetExceeded,
    EmptyWord,
    HilbertGeoError,
    NotHyperbolic,
    UnknownGenerator,
)
from .proj3 import ProjectiveMap, eigen_hyperbolic, quantized_keys

logger = logging.getLogger(__name__)

DEFAULT_NAMES = 'abcdefghijklmnopqrstuvwxyz'
INVERSE_MARK = '⁻¹'
PREFIX_CACHE_LIMIT = 200_000


# ==================== WORDS ====================

def letter_key(letter):
    return (abs(letter), letter < 0)


def word_key(word):
    return tuple(letter_key(l) for l in word)


def reduce(word):
    """Free reduction"""
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert(word):
    return tuple(-l for l in reversed(word))


def cyclic_reduce(word):
    w = reduce(word)
    start, end = 0, len(w)
    while end - start > 1 and w[start] == -w[end - 1]:
        start += 1
        end -= 1
    return w[start:end]


def commutator(u, v):
    return reduce(tuple(u) + tuple(v) + invert(u) + invert(v))


def _least_rotation(word):
    return min((word[i:] + word[:i] for i in range(len(word))), key=word_key)


def format_word(word, names=None):
    names = list(names or DEFAULT_NAMES)
    sep = '' if all(len(n) == 1 for n in names) else '·'
    parts = []
    for letter in word:
        name = names[abs(letter) - 1]
        parts.append(name + INVERSE_MARK if letter < 0 else name)
    return sep.join(parts)


def parse_word(text, names=None):
    names = list(names or DEFAULT_NAMES)
    text = text.replace('·', '').replace('^-1', INVERSE_MARK).replace(' ', '')
    by_length = sorted(names, key=len, reverse=True)
    word, pos = [], 0
    while pos < len(text):
        for name in by_length:
            if text.startswith(name, pos):
                pos += len(name)
                sign = 1
                if text.startswith(INVERSE_MARK, pos):
                    pos += len(INVERSE_MARK)
                    sign = -1
                word.append(sign * (names.index(name) + 1))
                break
        else:
            raise UnknownGenerator(f'Cannot parse {text[pos:]!r} as a generator')
    return tuple(word)


# ==================== CONJUGACY CLASSES ====================

@dataclass(frozen=True)
class ConjClass:
    rep: tuple

    def __len__(self):
        return len(self.rep)

    def label(self, names=None):
        return format_word(self.rep, names)


def canonical_class(word, unoriented=False):
    """Least rotation of the cyclic reduction; optionally also over the inverse"""
    w = cyclic_reduce(word)
    if not w:
        raise EmptyWord('The trivial word has no conjugacy class')
    best = _least_rotation(w)
    if unoriented:
        other = _least_rotation(invert(w))
        if word_key(other) < word_key(best):
            best = other
    return ConjClass(best)


def cyclically_reduced_count(n_gens, length):
    """Number of cyclically reduced words of the given length in a free group"""
    return (2 * n_gens - 1) ** length + 1 + (n_gens - 1) * (1 + (-1) ** length)


def _is_canonical(word, unoriented):
    if word[-1] == -word[0]:
        return False
    key = word_key(word)
    for i in range(1, len(word)):
        if word_key(word[i:] + word[:i]) < key:
            return False
    if unoriented:
        if word_key(_least_rotation(invert(word))) < key:
            return False
    return True


def _enumerate_prefix(task):
    """All canonical class representatives starting with one letter, in lexicographic order"""
    first, n_gens, max_len, unoriented, budget = task
    alphabet = sorted([g for i in range(1, n_gens + 1) for g in (i, -i)], key=letter_key)
    floor = letter_key(first)
    allowed = [l for l in alphabet if letter_key(l) >= floor]

    found = []
    stack = [(first,)]
    while stack:
        word = stack.pop()
        if _is_canonical(word, unoriented):
            found.append(word)
            if len(found) > budget:
                raise BudgetExceeded(f'More than {budget:,} classes', budget=budget)
        if len(word) < max_len:
            # reversed push so the smallest child is expanded first
            for letter in reversed(allowed):
                if letter != -word[-1]:
                    stack.append(word + (letter,))
    return found


def enumerate_classes(n_gens, max_len, unoriented=False, budget=None, workers=1):
    """One canonical representative per conjugacy class of length <= max_len, sorted"""
    if n_gens < 1 or max_len < 1:
        raise ValueError('n_gens and max_len must be positive')
    budget = int(geo_setting('CLASS_BUDGET') if budget is None else budget)

    lower = sum(cyclically_reduced_count(n_gens, L) / (L * (2 if unoriented else 1))
                for L in range(1, max_len + 1))
    if lower > budget:
        raise BudgetExceeded(
            f'At least {math.ceil(lower):,} classes expected, budget is {budget:,}',
            budget=budget,
        )

    firsts = sorted([g for i in range(1, n_gens + 1) for g in (i, -i)], key=letter_key)
    tasks = [(f, n_gens, max_len, unoriented, budget) for f in firsts]
    if workers > 1:
        with Pool(processes=min(workers, len(tasks)), initializer=conf.install,
                  initargs=(conf.snapshot(),)) as pool:
            chunks = pool.map(_enumerate_prefix, tasks)
    else:
        chunks = [_enumerate_prefix(t) for t in tasks]

    words = list(heapq.merge(*chunks, key=word_key))
    if len(words) > budget:
        raise BudgetExceeded(f'{len(words):,} classes exceed budget {budget:,}', budget=budget)
    logger.info('Enumerated %d classes (gens=%d, max_len=%d, unoriented=%s)',
                len(words), n_gens, max_len, unoriented)
    return [ConjClass(w) for w in words]


# ==================== REPRESENTATIONS ====================

@dataclass
class Splitting:
    """Amalgam or HNN decomposition along the curve gamma"""
    kind: str
    gamma: tuple
    left_gens: tuple = ()
    right_gens: tuple = ()
    stable_letter: int = None

    def to_json(self):
        data = {'kind': self.kind, 'gamma': list(self.gamma), 'left_gens': list(self.left_gens)}
        if self.kind == 'amalgam':
            data['right_gens'] = list(self.right_gens)
        else:
            data['stable_letter'] = self.stable_letter
        return data

    @classmethod
    def from_json(cls, data):
        return cls(
            kind=data['kind'],
            gamma=tuple(data['gamma']),
            left_gens=tuple(data.get('left_gens') or ()),
            right_gens=tuple(data.get('right_gens') or ()),
            stable_letter=data.get('stable_letter'),
        )


@dataclass
class Representation:
    """Generator images in SL(3,R), relators and an optional splitting"""
    gens: list
    images: list
    relators: list = field(default_factory=list)
    splitting: Splitting = None
    certificate: dict = None
    sl2: list = None  # 2x2 Fuchsian data when the images are symmetric squares
    # Products are formed on local_images (and their inverses) expressed in
    # frame, then mapped back with frame.from_frame. None means the identity frame.
    frame: object = None
    local_images: list = None
    local_inverses: list = None

    def __post_init__(self):
        if len(self.gens) != len(self.images):
            raise UnknownGenerator('Each generator needs exactly one image')
        self.images = [m if isinstance(m, ProjectiveMap) else ProjectiveMap(m) for m in self.images]
        self.relators = [tuple(r) for r in self.relators]
        if self.frame is None:
            self.local_images = [m.entries for m in self.images]
            self.local_inverses = [m.inverse().entries for m in self.images]
        elif self.local_images is None or self.local_inverses is None:
            raise HilbertGeoError('A framed representation needs local images and inverses')
        elif not len(self.local_images) == len(self.local_inverses) == len(self.images):
            raise UnknownGenerator('Each generator needs exactly one local image and inverse')
        self._inverses = [self.to_standard(x) for x in self.local_inverses]
        self._cache = {}

    def __getstate__(self):
        state = dict(self.__dict__)
        state['_cache'] = {}
        return state

    @property
    def rank(self):
        return len(self.gens)

    def image(self, letter):
        idx = abs(letter) - 1
        if letter == 0 or idx >= len(self.images):
            raise UnknownGenerator(f'Letter {letter} does not name a generator of {self.gens}')
        return self.images[idx] if letter > 0 else self._inverses[idx]

    def local(self, letter):
        """Image of a letter in the local frame, as an array"""
        idx = abs(letter) - 1
        if letter == 0 or idx >= len(self.images):
            raise UnknownGenerator(f'Letter {letter} does not name a generator of {self.gens}')
        return self.local_images[idx] if letter > 0 else self.local_inverses[idx]

    def to_standard(self, entries):
        if self.frame is None:
            return ProjectiveMap(entries)
        return self.frame.from_frame(entries)

    def label(self, word):
        return format_word(word, self.gens)

    def with_images(self, images, **changes):
        fields = {
            'gens': list(self.gens),
            'images': images,
            'relators': list(self.relators),
            'splitting': self.splitting,
            'certificate': None,
            'sl2': None,
            'frame': None,
            'local_images': None,
            'local_inverses': None,
        }
        fields.update(changes)
        return Representation(**fields)

    def relator_residual(self, relator):
        m = evaluate(self, relator).entries
        eye = np.eye(3)
        return float(min(np.max(np.abs(m - eye)), np.max(np.abs(m + eye))))

    def validate(self, relator_tol=1e-8):
        """Check generator hyperbolicity, relators and the splitting annotation"""
        for name, image in zip(self.gens, self.images):
            try:
                eigen_hyperbolic(image)
            except NotHyperbolic as exc:
                raise NotHyperbolic(f'Generator {name} is not hyperbolic: {exc}', generator=name) from exc
        for relator in self.relators:
            for letter in relator:
                self.image(letter)
            residual = self.relator_residual(relator)
            if residual > relator_tol:
                raise HilbertGeoError(
                    f'Relator {self.label(relator)} evaluates {residual:.3g} away from the identity')
        if self.splitting is not None:
            sp = self.splitting
            if sp.kind not in ('amalgam', 'hnn'):
                raise HilbertGeoError(f'Unknown splitting kind {sp.kind!r}')
            declared = set(range(1, self.rank + 1))
            referenced = set(abs(l) for l in sp.gamma) | set(sp.left_gens) | set(sp.right_gens)
            if sp.kind == 'hnn':
                referenced.add(sp.stable_letter)
            if not referenced <= declared:
                raise UnknownGenerator(f'Splitting references undeclared generators {sorted(referenced - declared)}')
            try:
                eigen_hyperbolic(evaluate(self, sp.gamma), inverse=evaluate(self, invert(sp.gamma)))
            except NotHyperbolic as exc:
                raise NotHyperbolic(f'Splitting curve {self.label(sp.gamma)} is not hyperbolic: {exc}') from exc
        return self

    def to_json(self):
        return {
            'gens': list(self.gens),
            'images': [m.to_json() for m in self.images],
            'relators': [list(r) for r in self.relators],
            'splitting': self.splitting.to_json() if self.splitting else None,
        }

    @classmethod
    def from_json(cls, data):
        splitting = data.get('splitting')
        return cls(
            gens=list(data['gens']),
            images=[ProjectiveMap.from_json(m) for m in data['images']],
            relators=[tuple(r) for r in data.get('relators') or []],
            splitting=Splitting.from_json(splitting) if splitting else None,
        )


def evaluate(rep, word):
    """Left-to-right product of generator images, memoized on prefixes"""
    word = tuple(word)
    if not word:
        return ProjectiveMap.identity()
    return rep.to_standard(_local_product(rep, word))


def _local_product(rep, word):
    cache = rep._cache
    start, acc = 0, None
    for cut in range(len(word), 0, -1):
        hit = cache.get(word[:cut])
        if hit is not None:
            start, acc = cut, hit
            break
    for i in range(start, len(word)):
        step = rep.local(word[i])
        acc = step if acc is None else acc @ step
        if len(cache) < PREFIX_CACHE_LIMIT:
            cache[word[:i + 1]] = acc
    return acc


# ==================== ORBIT BALLS ====================

def _canonical_entries(a):
    """Scale by the max-norm and fix the sign of the largest entry"""
    idx = int(np.argmax(np.abs(a)))
    return a / a.flat[idx]


def orbit_ball(rep, radius, budget=None, quantum=None, with_inverse=False):
    """
    Breadth-first enumeration of group elements of word length <= radius.
    Elements are deduplicated by a quantized hash of the normalized matrix;
    each appears once, with a shortest word. The identity comes first.
    """
    if radius < 1:
        raise ValueError('radius must be at least 1')
    budget = int(geo_setting('ORBIT_BUDGET') if budget is None else budget)
    quantum = geo_setting('HASH_QUANTUM') if quantum is None else quantum

    letters = sorted([g for i in range(1, rep.rank + 1) for g in (i, -i)], key=letter_key)
    identity = np.eye(3)
    seen = set(quantized_keys(_canonical_entries(identity), quantum)[:1])
    elements = [((), identity, identity)]
    frontier = [((), identity, identity)]
    collisions = 0

    for depth in range(1, radius + 1):
        nxt = []
        for word, mat, inv in frontier:
            for letter in letters:
                if word and letter == -word[-1]:
                    continue
                m = mat @ rep.local(letter)
                keys = quantized_keys(_canonical_entries(m), quantum)
                if any(k in seen for k in keys):
                    collisions += 1
                    continue
                seen.add(keys[0])
                entry = (word + (letter,), m, rep.local(-letter) @ inv)
                nxt.append(entry)
                elements.append(entry)
                if len(elements) > budget:
                    raise BudgetExceeded(
                        f'Orbit ball of radius {radius} exceeds {budget:,} elements', budget=budget)
        frontier = nxt
        logger.debug('orbit_ball depth %d: %d new elements', depth, len(nxt))

    logger.info('orbit_ball radius %d: %d elements, %d hash collisions', radius, len(elements), collisions)
    if with_inverse:
        return [(w, rep.to_standard(m), rep.to_standard(inv)) for w, m, inv in elements]
    return [(w, rep.to_standard(m)) for w, m, _ in elements]
