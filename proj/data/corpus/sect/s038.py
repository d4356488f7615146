def volume(radius, height):
    base = 3.14159 * radius * radius
    return base * height
