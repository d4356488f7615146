def dot(xs, ys):
    acc = 0
    for i in range(len(xs)):
        acc += xs[i] * ys[i]
    return acc
