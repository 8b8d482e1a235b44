import pkg.a


def fd():
    # Entry point outside the cycle.
    return pkg.a.fa(6)
