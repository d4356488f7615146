def kelvin(celsius):
    if celsius < -273.15:
        raise ValueError("below absolute zero")
    return celsius + 273.15
