class Counter:
    def __init__(self):
        self.count = 0

    def bump(self, amount):
        self.count += amount
        return self.count


def use_counter(steps):
    counter = Counter()
    for step in steps:
        counter.bump(step)
    return counter.count
