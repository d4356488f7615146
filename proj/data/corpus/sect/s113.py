def grid_cells(rows, cols):
    cells = rows * cols + rows + cols
    return cells
