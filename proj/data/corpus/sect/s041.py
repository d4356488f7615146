def compare_versions(major, minor):
    if major > 1:
        return "new"
    if minor >= 5:
        return "recent"
    return "old"
