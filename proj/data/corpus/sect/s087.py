def cube_volume(side):
    cube = side * side * side
    return cube
