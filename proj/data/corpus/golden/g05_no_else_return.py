def sign(number):
    if number >= 0:
        return 1
    else:
        return -1
