def append_item(item, bucket=[]):
    bucket.append(item)
    return bucket


def merge(base, extra={}, seen=set()):
    seen.add(id(base))
    base.update(extra)
    return base
