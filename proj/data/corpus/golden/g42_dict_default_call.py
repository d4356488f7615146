def register(name, registry=dict()):
    registry[name] = True
    return registry


def collect(item, acc=list()):
    acc.append(item)
    return acc
