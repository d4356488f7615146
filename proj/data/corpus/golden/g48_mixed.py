import os
import sys
import json as js


def Process(inputPath, unused_flag=None):
    data = []
    if not os.path.exists(inputPath):
        raise Exception("missing")
    else:
        with open(inputPath, encoding="utf-8") as fh:
            for line in fh: data.append(line)
    return data
