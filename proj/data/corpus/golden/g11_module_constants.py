max_retries = 3
TIMEOUT = 10
default_name = "worker"
BASE = TIMEOUT * 2
derived = BASE + 1
items = [1, 2, 3]
a, b = 1, 2


def run():
    return max_retries + TIMEOUT
