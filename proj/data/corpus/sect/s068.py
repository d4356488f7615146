def rectangle_overlap(a_left, a_right, b_left, b_right):
    if a_right < b_left:
        return 0
    if b_right < a_left:
        return 0
    return min(a_right, b_right) - max(a_left, b_left)
