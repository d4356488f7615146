def scale(points, factor):
    scaled = []
    for x, y in points:
        scaled.append((x * factor, y * factor))
    return scaled
