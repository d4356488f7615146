def counter_factory(start):
    count = start

    def step():
        return count + 1

    return step
