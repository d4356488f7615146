def energy(mass, velocity):
    kinetic = 0.5 * mass * velocity ** 2
    return kinetic
