def step_toward(position, target, step):
    if position < target:
        position += step
    elif position > target:
        position -= step
    return position
