def check_positive(value):
    if value < 0:
        raise Exception("negative value")
    return value
