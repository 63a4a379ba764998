"""Built-in example groups."""
from .tree import GeneratingSet, parse_group

DIHEDRAL = """\
alphabet 2
gen a perm=1,0 sections=1,1
gen b perm=0,1 sections=a,b
"""

IMG_Z2_I = """\
alphabet 2
gen a perm=0,1 sections=b,c
gen b perm=1,0 sections=1,1
gen c perm=0,1 sections=a,1
"""


def dihedral() -> GeneratingSet:
    return parse_group(DIHEDRAL)


def img_z2_i() -> GeneratingSet:
    return parse_group(IMG_Z2_I)
