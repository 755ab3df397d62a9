import hashlib
import re
from dataclasses import dataclass
from fractions import Fraction

# --- Setup ---
MAX_ALTERNATIVES = 20

Rational = Fraction

_MENU_LINE = re.compile(r"^\{(.*)\}\s*->\s*\{(.*)\}$")
_HEADER = "alternatives:"
_RESERVED = set("{},#")


# --- Errors ---
class DatasetError(ValueError):
    """Malformed or invalid dataset text. Carries the offending line when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(ValueError):
    """An operation was called outside its scope (partial data, cyclic R, ...)."""

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(message)


class ConsistencyError(RuntimeError):
    pass


# --- Rationals ---
def parse_rational(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"Not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Not a rational number: {value!r}") from e


def fmt_rational(value):
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


# --- Menus ---
def members(menu):
    return tuple(i for i in range(menu.bit_length()) if menu >> i & 1)


def size(menu):
    return bin(menu).count("1")


def lowest(menu):
    return (menu & -menu).bit_length() - 1


def is_subset(small, big):
    return small & ~big == 0


def submenus(menu):
    """All nonempty subsets of `menu`, in increasing bitmask order."""
    subs = []
    sub = menu
    while sub:
        subs.append(sub)
        sub = (sub - 1) & menu
    subs.reverse()
    return subs


def proper_submenus(menu):
    return [sub for sub in submenus(menu) if sub != menu]


def all_menus(n):
    return range(1, 1 << n)


def format_menu(labels, menu):
    return "{" + ",".join(labels[i] for i in members(menu)) + "}"


def format_order(labels, order):
    return [labels[i] for i in order]


def _parse_members(body, index, line=None):
    body = body.strip()
    if not body:
        return 0
    menu = 0
    for token in body.split(","):
        label = token.strip()
        if not label:
            raise DatasetError("empty label inside braces", line)
        if label not in index:
            raise DatasetError(f"unknown alternative {label!r}", line)
        bit = 1 << index[label]
        if menu & bit:
            raise DatasetError(f"alternative {label!r} listed twice", line)
        menu |= bit
    return menu


def parse_menu(text, labels):
    """Parse a single `{a,b}` menu against `labels`."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise DatasetError(f"menu must be written in braces: {text!r}")
    menu = _parse_members(text[1:-1], {label: i for i, label in enumerate(labels)})
    if menu == 0:
        raise DatasetError("empty menu")
    return menu


# --- Dataset model ---
@dataclass(frozen=True)
class Alternative:
    id: int
    label: str


@dataclass(frozen=True)
class ChoiceDataset:
    """A choice correspondence over a ground set of at most MAX_ALTERNATIVES labels.

    `choices` is indexed by menu bitmask and has length 2^n; entry 0 and the
    entries of unobserved menus (partial datasets only) are 0. Singleton menus
    are always filled in.
    """

    labels: tuple
    choices: tuple
    partial: bool = False

    def __post_init__(self):
        labels = tuple(self.labels)
        n = len(labels)
        if n == 0:
            raise DatasetError("at least one alternative is required")
        if n > MAX_ALTERNATIVES:
            raise DatasetError(f"at most {MAX_ALTERNATIVES} alternatives are supported, got {n}")
        for label in labels:
            if not label or any(ch in _RESERVED or ch.isspace() for ch in label):
                raise DatasetError(f"invalid alternative label {label!r}")
        if len(set(labels)) != n:
            raise DatasetError("alternative labels must be unique")
        table = list(self.choices)
        if len(table) != 1 << n:
            raise ValueError(f"choice table must have {1 << n} entries, got {len(table)}")
        table[0] = 0
        for i in range(n):
            table[1 << i] = 1 << i
        for menu in range(1, 1 << n):
            chosen = table[menu]
            if chosen == 0:
                if not self.partial:
                    raise DatasetError(f"missing menu {format_menu(labels, menu)}")
                continue
            if not is_subset(chosen, menu):
                raise DatasetError(
                    f"chosen set {format_menu(labels, chosen)} is not a subset of {format_menu(labels, menu)}"
                )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "choices", tuple(table))

    @property
    def n(self):
        return len(self.labels)

    @property
    def grand(self):
        return (1 << self.n) - 1

    @property
    def ground(self):
        return tuple(Alternative(i, label) for i, label in enumerate(self.labels))

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise DatasetError(f"unknown alternative {label!r}") from None

    def menu(self, *labels):
        m = 0
        for label in labels:
            m |= 1 << self.index(label)
        return m

    def defined(self, menu):
        return self.choices[menu] != 0

    def chosen(self, menu):
        return self.choices[menu]

    def menus(self):
        return [m for m in range(1, 1 << self.n) if self.choices[m]]

    def require_total(self, operation):
        if self.partial:
            raise PreconditionError("partial_dataset", f"{operation} requires a total dataset")

    @classmethod
    def trusted(cls, labels, choices, partial=False):
        """Wrap a table without validation.

        For generated tables only: entry 0 is 0, singletons are filled in and
        every chosen set is a nonempty subset of its menu.
        """
        c = object.__new__(cls)
        object.__setattr__(c, "labels", tuple(labels))
        object.__setattr__(c, "choices", tuple(choices))
        object.__setattr__(c, "partial", partial)
        return c

    @classmethod
    def from_function(cls, labels, choose, partial=False, trusted=False):
        labels = tuple(labels)
        table = [0] * (1 << len(labels))
        for menu in range(1, 1 << len(labels)):
            table[menu] = choose(menu)
        build = cls.trusted if trusted else cls
        return build(labels, tuple(table), partial)


# --- Grammar ---
def parse_dataset(text):
    labels = None
    index = {}
    partial = False
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if labels is None:
            if not line.startswith(_HEADER):
                raise DatasetError(f"expected '{_HEADER}' header", lineno)
            labels = line[len(_HEADER):].split()
            if not labels:
                raise DatasetError("header lists no alternatives", lineno)
            if len(set(labels)) != len(labels):
                raise DatasetError("alternative labels must be unique", lineno)
            if len(labels) > MAX_ALTERNATIVES:
                raise DatasetError(f"at most {MAX_ALTERNATIVES} alternatives are supported", lineno)
            index = {label: i for i, label in enumerate(labels)}
            continue
        if line == "partial":
            if partial or entries:
                raise DatasetError("'partial' must directly follow the header", lineno)
            partial = True
            continue
        match = _MENU_LINE.match(line)
        if not match:
            raise DatasetError(f"cannot parse menu line {line!r}", lineno)
        menu = _parse_members(match.group(1), index, lineno)
        chosen = _parse_members(match.group(2), index, lineno)
        if menu == 0:
            raise DatasetError("empty menu", lineno)
        if menu in entries:
            raise DatasetError(f"duplicate menu {format_menu(labels, menu)}", lineno)
        if chosen == 0:
            raise DatasetError(f"empty choice set for {format_menu(labels, menu)}", lineno)
        if not is_subset(chosen, menu):
            raise DatasetError(
                f"chosen set {format_menu(labels, chosen)} is not a subset of {format_menu(labels, menu)}",
                lineno,
            )
        entries[menu] = chosen
    if labels is None:
        raise DatasetError(f"empty dataset: missing '{_HEADER}' header")
    table = [0] * (1 << len(labels))
    for menu, chosen in entries.items():
        table[menu] = chosen
    return ChoiceDataset(tuple(labels), tuple(table), partial)


def serialize_dataset(c):
    lines = [f"{_HEADER} " + " ".join(c.labels)]
    if c.partial:
        lines.append("partial")
    for menu in sorted(c.menus(), key=lambda m: (-size(m), members(m))):
        lines.append(f"{format_menu(c.labels, menu)} -> {format_menu(c.labels, c.chosen(menu))}")
    return "\n".join(lines) + "\n"


def dataset_digest(c):
    return hashlib.sha256(serialize_dataset(c).encode("utf-8")).hexdigest()


def load_dataset(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_dataset(f.read())
