def bmi(weight, height):
    ratio = weight / (height * height)
    return round(ratio, 2)
