def rescale(value, old_max, new_max):
    scaled = value * new_max / old_max
    return scaled
