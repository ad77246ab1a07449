"""Independent reference evaluations used to freeze expected values.

Exact rational arithmetic, written out term by term from the textbook
formulas without sharing any code with the package.
"""

from fractions import Fraction as F


def _pos(x):
    return x if x > 0 else F(0)


def lon_distance(v_r, v_f, rho, a_acc, rear_brake, front_brake):
    v_r, v_f, rho, a_acc = F(v_r), F(v_f), F(rho), F(a_acc)
    rear_brake, front_brake = F(rear_brake), F(front_brake)
    reaction = v_r * rho + rho * rho * a_acc / 2
    rear_stop = (v_r + rho * a_acc) ** 2 / (2 * rear_brake)
    front_stop = v_f ** 2 / (2 * front_brake)
    return _pos(reaction + rear_stop - front_stop)


def lat_distance(v_left, v_right, rho, a_lat, brake):
    v_left, v_right, rho, a_lat, brake = map(F, (v_left, v_right, rho, a_lat, brake))
    vl_rho = v_left + rho * a_lat
    vr_rho = v_right - rho * a_lat
    left_travel = (v_left + vl_rho) / 2 * rho + vl_rho ** 2 / (2 * brake)
    right_travel = (v_right + vr_rho) / 2 * rho - vr_rho ** 2 / (2 * brake)
    return _pos(left_travel - right_travel)


def ramp(d, d_min, d_brake):
    d, d_min, d_brake = F(d), F(d_min), F(d_brake)
    if d >= d_min:
        return F(0)
    if d < d_brake:
        return F(1)
    return 1 - (d - d_brake) / (d_min - d_brake)


def point_biserial_textbook(xs, ys):
    """(M1 - M0) / s_n * sqrt(n1 n0 / n^2) with the population std s_n."""
    n = len(xs)
    g1 = [x for x, y in zip(xs, ys) if y]
    g0 = [x for x, y in zip(xs, ys) if not y]
    mean = sum(xs) / n
    s_n = (sum((x - mean) ** 2 for x in xs) / n) ** 0.5
    m1, m0 = sum(g1) / len(g1), sum(g0) / len(g0)
    return (m1 - m0) / s_n * (len(g1) * len(g0) / n ** 2) ** 0.5


def auc_pairs(xs, ys):
    pos = [x for x, y in zip(xs, ys) if y]
    neg = [x for x, y in zip(xs, ys) if not y]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))
