def consume(queue):
    head = queue.pop(0)
    del head
    return len(queue)
