"""Compiled slot loop. Mirrors ``engine.step`` exactly, with two shortcuts:

* an idle link jumps straight to the slot where the next flow becomes visible;
* while no flow completes and no arrival becomes visible, the allocation is
  unchanged, so it is re-applied without being recomputed.

Active flows are kept sorted by the policy's priority key. The order stays
valid between slots: only a served prefix changes its remaining volume, and
under fair sharing every surviving flow loses the same amount.
"""

import numpy as np
from numba import njit

FCFS, SRPT, FAIR, EDF_FCFS_DF, EDF_SRPT_DF, EDF_FCFS_DL, EDF_SRPT_DL = range(7)

ZERO_GUARD = 1e-12


@njit(cache=True)
def _key(f, code, arrival, rem, deadline):
    is_dl = deadline[f] < np.inf
    group = 0
    if code == EDF_FCFS_DF or code == EDF_SRPT_DF:
        group = 0 if is_dl else 1
    elif code == EDF_FCFS_DL or code == EDF_SRPT_DL:
        group = 1 if is_dl else 0
    if code == FCFS:
        primary = arrival[f]
    elif code == SRPT or code == FAIR:
        primary = rem[f]
    elif is_dl:
        primary = deadline[f]
    elif code == EDF_FCFS_DF or code == EDF_FCFS_DL:
        primary = arrival[f]
    else:
        primary = rem[f]
    return group, primary


@njit(cache=True)
def _before(a, b, code, arrival, rem, deadline):
    ga, pa = _key(a, code, arrival, rem, deadline)
    gb, pb = _key(b, code, arrival, rem, deadline)
    if ga != gb:
        return ga < gb
    if pa != pb:
        return pa < pb
    if arrival[a] != arrival[b]:
        return arrival[a] < arrival[b]
    return a < b


@njit(cache=True)
def simulate_slotted(arrival, volume, deadline, visible, code, capacity, delta):
    n = arrival.shape[0]
    completion = np.full(n, np.nan)
    rem = volume.copy()
    act = np.empty(n, np.int64)
    na = 0
    p = 0
    k = 0
    done = 0
    while done < n:
        if na == 0 and visible[p] > k:
            k = visible[p]
        while p < n and visible[p] <= k:
            j = na
            while j > 0 and _before(p, act[j - 1], code, arrival, rem, deadline):
                act[j] = act[j - 1]
                j -= 1
            act[j] = p
            na += 1
            p += 1

        start = k * delta
        nc = 0
        if code == FAIR:
            residual = capacity
            prev = 0.0
            i = 0
            share = capacity / na
            while i < na:
                f = act[i]
                r = rem[f]
                share = residual / (na - i)
                if r / delta <= share:
                    completion[f] = start + (prev + (na - i) * r) / capacity
                    prev += r
                    residual -= r / delta
                    rem[f] = 0.0
                    nc += 1
                    i += 1
                else:
                    break
            amount = share * delta
            for j in range(i, na):
                f = act[j]
                r = rem[f]
                left = r - amount
                if left <= ZERO_GUARD:
                    completion[f] = start + (prev + (na - j) * r) / capacity
                    prev += r
                    rem[f] = 0.0
                    nc += 1
                else:
                    rem[f] = left
        else:
            residual = capacity
            cum = 0.0
            for i in range(na):
                f = act[i]
                r = rem[f]
                if r / delta <= residual:
                    cum += r
                    completion[f] = start + cum / capacity
                    residual -= r / delta
                    rem[f] = 0.0
                    nc += 1
                else:
                    left = r - residual * delta
                    if left <= ZERO_GUARD:
                        cum += r
                        completion[f] = start + cum / capacity
                        rem[f] = 0.0
                        nc += 1
                    else:
                        rem[f] = left
                    break

        if nc > 0:
            for j in range(nc, na):
                act[j - nc] = act[j]
            na -= nc
            done += nc
        k += 1

        if nc == 0 and na > 0:
            limit = visible[p] if p < n else np.iinfo(np.int64).max
            head = act[0]
            if code == FAIR:
                share = capacity / na
                amount = share * delta
                while k < limit and rem[head] / delta > share and rem[head] - amount > ZERO_GUARD:
                    for j in range(na):
                        rem[act[j]] -= amount
                    k += 1
            else:
                amount = capacity * delta
                while k < limit and rem[head] / delta > capacity and rem[head] - amount > ZERO_GUARD:
                    rem[head] -= amount
                    k += 1
    return completion
