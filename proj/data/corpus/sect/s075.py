def offset(base, index, stride):
    address = base + index * stride
    return address
