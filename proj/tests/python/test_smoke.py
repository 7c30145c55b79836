import itertools
import math

import pytest

import pdstsp


def path_length(inst, seq):
    pts = inst.coords
    return sum(math.dist(pts[a], pts[b]) for a, b in zip(seq, seq[1:]))


def brute_force(inst):
    # Every ordered subset of requests with every precedence-valid interleaving.
    n, best = inst.n, (0.0, 0.0)
    for size in range(1, n + 1):
        for chosen in itertools.combinations(range(1, n + 1), size):
            stops = list(chosen) + [h + n for h in chosen]
            for order in itertools.permutations(stops):
                pos = {v: i for i, v in enumerate(order)}
                if any(pos[h] > pos[h + n] for h in chosen):
                    continue
                load, ok = 0, True
                for v in order:
                    load += inst.demand[v - 1] if v <= n else -inst.demand[v - n - 1]
                    ok &= load <= inst.capacity
                seq = [0, *order, 2 * n + 1]
                if not ok or path_length(inst, seq) > inst.max_length + 1e-9:
                    continue
                rev = sum(inst.revenue[h - 1] for h in chosen)
                if rev > best[0] + 1e-9:
                    best = (rev, path_length(inst, seq))
    return best[0]


def test_generate_is_deterministic():
    a = pdstsp.generate(8, "uniform", seed=5, count=3)
    b = pdstsp.generate(8, "uniform", seed=5, count=3)
    assert [i.to_json() for i in a] == [i.to_json() for i in b]
    inst = a[0]
    assert inst.n == 8 and len(inst.coords) == 18
    assert all(2 <= q <= 5 for q in inst.demand)
    assert 8 <= inst.capacity <= 20
    assert inst.revenue_setting == "uniform"
    assert pdstsp.Instance.from_json(inst.to_json()).to_json() == inst.to_json()


def test_route_evaluation_matches_geometry():
    inst = pdstsp.generate(5, seed=2)[0]
    seq = [0, 1, 6, 11]
    info = pdstsp.validate_route(inst, seq)
    assert info["length"] == pytest.approx(path_length(inst, seq))
    assert info["revenue"] == pytest.approx(inst.revenue[0])
    bad = pdstsp.validate_route(inst, [0, 6, 1, 11])
    assert not bad["feasible"] and bad["violation"] == "precedence"
    with pytest.raises(pdstsp.InvalidVertex):
        pdstsp.validate_route(inst, [0, 42, 11])


@pytest.mark.parametrize("seed", range(4))
def test_exact_matches_brute_force(seed):
    inst = pdstsp.generate(4, "uniform", seed=100 + seed)[0]
    opt = pdstsp.exact_solve(inst)
    assert opt.feasible
    assert opt.revenue == pytest.approx(brute_force(inst))


def test_methods_return_feasible_routes():
    inst = pdstsp.generate(10, seed=9)[0]
    gs = pdstsp.greedy_search(inst)
    assert gs.feasible
    for method in ("gs+2opt", "gs+hc", "msgs+mslns", "sgbs"):
        r = pdstsp.solve(inst, method, seed=1, t_max=0.05, max_iters=50)
        assert r.feasible
        assert r.length <= inst.max_length + 1e-9
    assert pdstsp.hill_climb(inst, gs).revenue >= gs.revenue - 1e-12
    seeds = [r.seq for r in pdstsp.multi_start_greedy(inst, 3)]
    best = pdstsp.mslns(inst, seeds, t_max=0.05, seed=4)
    assert best.revenue >= max(pdstsp.Route(inst, s).revenue for s in seeds) - 1e-12


def test_errors_are_translated():
    inst = pdstsp.generate(7, seed=1)[0]
    with pytest.raises(pdstsp.SizeError):
        pdstsp.exact_solve(inst)
    with pytest.raises(pdstsp.ConfigError):
        pdstsp.solve(inst, "gs+teleport")
    assert issubclass(pdstsp.ConfigError, pdstsp.Error)


def test_bench_and_lp_text(tmp_path):
    insts = pdstsp.generate(6, seed=3, count=4)
    path = str(tmp_path / "i.jsonl")
    pdstsp.write_instances(path, insts)
    assert len(pdstsp.read_instances(path)) == 4
    kw = dict(t_max=0.0, max_iters=30, record_time=False)
    a = pdstsp.bench_csv(insts, ["gs", "gs+lns"], seed=1, jobs=1, **kw)
    b = pdstsp.bench_csv(insts, ["gs", "gs+lns"], seed=1, jobs=2, **kw)
    assert a == b and a.startswith("method,instance_id,time_s,")
    lp = pdstsp.milp_lp(insts[0])
    for section in ("Maximize", "Subject To", "Binary", "End"):
        assert section in lp
