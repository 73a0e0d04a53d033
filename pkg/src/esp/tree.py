"""ESP parse trees with rolling-hash node labels."""

import logging
from dataclasses import dataclass, field

from src.esp.parser import EspError, partition_level
from src.hashing.rolling_hash import HashConfig, HashValue, combine_all, rolling_hash

logger = logging.getLogger(__name__)

Text = bytes


@dataclass(frozen=True, slots=True)
class EspNode:
    """A node of an ESP tree.

    Attributes:
        level: 0 for leaves, parent level = child level + 1.
        start: Offset of the node's yield in the parsed text.
        yield_length: Length of the yield.
        tentative_label: Rolling hash of the yield.
        children: Two or three children; empty for leaves.
    """

    level: int
    start: int
    yield_length: int
    tentative_label: HashValue
    children: tuple["EspNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class EspTree:
    """A parsed text with its nodes grouped by level."""

    text: Text
    hash_config: HashConfig
    levels: tuple[tuple[EspNode, ...], ...] = field(repr=False)

    @property
    def root(self) -> EspNode:
        return self.levels[-1][0]

    @property
    def height(self) -> int:
        """Number of parsing rounds above the leaves."""
        return len(self.levels) - 1

    @property
    def node_count(self) -> int:
        return sum(len(level) for level in self.levels)

    def nodes(self) -> list[EspNode]:
        """All nodes, leaves first, level by level."""
        return [node for level in self.levels for node in level]

    def yield_of(self, node: EspNode) -> bytes:
        return self.text[node.start : node.start + node.yield_length]

    def dump(self) -> str:
        """Indented pre-order dump: `level yield_length tentative_label` per line."""
        lines: list[str] = []
        stack: list[tuple[EspNode, int]] = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            lines.append(
                f"{'  ' * depth}{node.level} {node.yield_length} "
                f"{node.tentative_label.value}"
            )
            stack.extend((child, depth + 1) for child in reversed(node.children))
        return "\n".join(lines)


def build_esp_tree(text: Text, hasher: HashConfig) -> EspTree:
    """Parse `text` bottom-up until a single node remains.

    Args:
        text: The symbols to parse (each < hasher.b).
        hasher: Shared rolling-hash parameters.

    Returns:
        The parse tree; a one-symbol text yields a lone leaf.

    Raises:
        EspError: If the text is empty.
        HashConfigError: If a symbol is outside the hash alphabet.
    """
    if len(text) == 0:
        raise EspError("build", "cannot parse an empty text")

    current = tuple(
        EspNode(
            level=0,
            start=i,
            yield_length=1,
            tentative_label=rolling_hash((symbol,), hasher),
        )
        for i, symbol in enumerate(text)
    )
    levels = [current]
    while len(current) > 1:
        blocks = partition_level([node.tentative_label.value for node in current])
        parents: list[EspNode] = []
        offset = 0
        for block in blocks:
            children = current[offset : offset + len(block)]
            offset += len(block)
            parents.append(
                EspNode(
                    level=children[0].level + 1,
                    start=children[0].start,
                    yield_length=sum(c.yield_length for c in children),
                    tentative_label=combine_all(
                        (c.tentative_label for c in children), hasher
                    ),
                    children=tuple(children),
                )
            )
        current = tuple(parents)
        levels.append(current)

    tree = EspTree(text=bytes(text), hash_config=hasher, levels=tuple(levels))
    logger.debug(
        "esp_tree_built",
        extra={"length": len(text), "height": tree.height, "nodes": tree.node_count},
    )
    return tree
