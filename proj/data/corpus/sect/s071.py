def checksum(data):
    check = 0
    for byte in data:
        check += byte
        check %= 256
    return check
