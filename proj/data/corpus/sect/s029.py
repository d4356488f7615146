def perimeter(length, width):
    perimeter_value = 2 * length + 2 * width
    return perimeter_value
