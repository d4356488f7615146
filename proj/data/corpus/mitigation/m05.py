class Queue:
    def __init__(self):
        self.items = []

    def pop(self):
        if not self.items:
            raise Exception("queue is empty")
        return self.items.pop(0)
