from soficlab.core.groups.group import (
    CyclicGroup,
    Element,
    FreeGroup,
    Group,
    GroupSpec,
    IntegerGroup,
    LatticeGroup,
    ProductGroup,
    group_from_spec,
)

__all__ = [
    "CyclicGroup",
    "Element",
    "FreeGroup",
    "Group",
    "GroupSpec",
    "IntegerGroup",
    "LatticeGroup",
    "ProductGroup",
    "group_from_spec",
]
