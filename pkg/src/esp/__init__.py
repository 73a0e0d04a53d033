"""Edit-sensitive parsing and characteristic vectors."""

from src.esp.parser import EspError, alphabet_reduction, partition_level, split_run
from src.esp.tree import EspNode, EspTree, Text, build_esp_tree
from src.esp.vectors import CharacteristicVector, characteristic_vector, l1_distance

__all__ = [
    "CharacteristicVector",
    "EspError",
    "EspNode",
    "EspTree",
    "Text",
    "alphabet_reduction",
    "build_esp_tree",
    "characteristic_vector",
    "l1_distance",
    "partition_level",
    "split_run",
]
