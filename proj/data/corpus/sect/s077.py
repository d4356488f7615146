def nested_total(rows):
    grand = 0
    for row in rows:
        row_total = 0
        for cell in row:
            row_total += cell
        grand += row_total
    return grand
