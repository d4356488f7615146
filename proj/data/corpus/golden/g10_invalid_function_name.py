def ComputeArea(width, height):
    return width * height


def getValue(mapping, Key):
    return mapping[Key]
