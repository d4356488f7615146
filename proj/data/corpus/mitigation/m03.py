def parse_port(value):
    port = int(value)
    if port < 1 or port > 65535:
        raise Exception("port out of range")
    return port
