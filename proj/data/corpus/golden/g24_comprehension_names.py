def squares(values):
    return [Item * Item for Item in values if Item > 0]
