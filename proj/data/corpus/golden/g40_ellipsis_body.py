class Protocol:
    def read(self, size): ...

    def close(self):
        pass
