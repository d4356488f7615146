def area(width, height, depth):
    result = width * height + depth * 2
    return result
