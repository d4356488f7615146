def speed(distance, time):
    if time <= 0:
        raise ValueError("time must be positive")
    velocity = distance / time
    return velocity
