def outer(values):
    def helper(v):
        return v * 2

    def used(v):
        return v + 1

    return [used(v) for v in values]
