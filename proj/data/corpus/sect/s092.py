def area_circle(radius):
    area_value = 3.14159 * radius ** 2
    return area_value
