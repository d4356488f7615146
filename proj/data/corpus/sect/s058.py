def label(temperature):
    if temperature < 0:
        return "freezing"
    if temperature < 15:
        return "cold"
    if temperature > 30:
        return "hot"
    return "mild"
