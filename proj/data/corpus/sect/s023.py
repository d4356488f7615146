def linear(slope, x, intercept):
    return intercept + slope * x
