x = 1 