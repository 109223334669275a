"""Builders for small synthetic link-state snapshots used across tests."""
from leoroute.links import LinkState


def make_linkstate(n_sats, gsl, isl_edges, n_gws=None, epoch=0,
                   sat_gw_dist=None, gw_gw_dist=None):
    """Hand-built LinkState.

    gsl: per-gateway dict(sat=, ul_rate=, ul_dist=, dl_rate=, dl_dist=)
    isl_edges: (i, j, slot_i, slot_j, rate, dist) entries, mutual.
    """
    n_gws = len(gsl) if n_gws is None else n_gws
    neighbors = [[-1] * 4 for _ in range(n_sats)]
    nbr_rate = [[0.0] * 4 for _ in range(n_sats)]
    nbr_dist = [[0.0] * 4 for _ in range(n_sats)]
    for i, j, si, sj, rate, dist in isl_edges:
        neighbors[i][si] = j
        neighbors[j][sj] = i
        nbr_rate[i][si] = rate
        nbr_rate[j][sj] = rate
        nbr_dist[i][si] = dist
        nbr_dist[j][sj] = dist

    sat_of_gw = [g["sat"] for g in gsl]
    gateways_of_sat = {}
    for g, s in enumerate(sat_of_gw):
        gateways_of_sat.setdefault(s, []).append(g)
    primary = [-1] * n_sats
    for s, gws in gateways_of_sat.items():
        primary[s] = min(gws, key=lambda g: (gsl[g]["ul_dist"], g))

    mean_isl = []
    for i in range(n_sats):
        feas = [nbr_rate[i][s] for s in range(4) if neighbors[i][s] >= 0]
        mean_isl.append(sum(feas) / len(feas) if feas else 0.0)

    return LinkState(
        t=0.0,
        epoch=epoch,
        num_satellites=n_sats,
        num_gateways=n_gws,
        neighbors=neighbors,
        nbr_rate=nbr_rate,
        nbr_dist=nbr_dist,
        sat_of_gw=sat_of_gw,
        ul_rate=[g["ul_rate"] for g in gsl],
        ul_dist=[g["ul_dist"] for g in gsl],
        dl_rate=[g["dl_rate"] for g in gsl],
        dl_dist=[g["dl_dist"] for g in gsl],
        gateways_of_sat=gateways_of_sat,
        primary_gw_of_sat=primary,
        sat_gw_dist=sat_gw_dist or [[1000.0] * n_gws for _ in range(n_sats)],
        gw_gw_dist=gw_gw_dist or [[1.0 if a != b else 0.0 for b in range(n_gws)]
                                  for a in range(n_gws)],
        mean_isl_rate=mean_isl,
    )


def simple_gsl(sat, rate=1e9, dist=1000.0):
    return {"sat": sat, "ul_rate": rate, "ul_dist": dist,
            "dl_rate": rate, "dl_dist": dist}
