class Config:
    debugMode = False
    LEVEL = 3

    def level(self):
        return self.LEVEL
