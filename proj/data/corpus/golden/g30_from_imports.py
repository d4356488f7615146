from collections import OrderedDict, defaultdict
from os import path as osp
from typing import *


def group(pairs):
    table = defaultdict(list)
    for key, value in pairs:
        table[key].append(value)
    return table
