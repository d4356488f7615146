class Counter:
    def __init__(self, start):
        self.currentValue = start
        self.step_size = 1

    def bump(self):
        self.currentValue += self.step_size
        return self.currentValue
