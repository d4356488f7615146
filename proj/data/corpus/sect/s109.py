def temperature_range(readings):
    low = readings[0]
    high = readings[0]
    for reading in readings:
        if reading < low:
            low = reading
        if reading > high:
            high = reading
    return high - low
