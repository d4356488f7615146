def countdown(start):
    steps = []
    current = start
    while current > 0:
        steps.append(current)
        current -= 1
    return steps
