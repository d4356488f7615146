import sys; import os


def main():
    x = 1; y = 2
    if x: print(x)
    return y + len(sys.argv) + len(os.sep)
