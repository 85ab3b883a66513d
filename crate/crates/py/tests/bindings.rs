use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn run(code: &std::ffi::CStr) {
    Python::attach(|py| {
        let module = wrap_pymodule!(pysoftstream::pysoftstream)(py);
        let globals = PyDict::new(py);
        globals.set_item("ss", module).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn potentials_match_known_values() {
    run(c"
u = ss.memberships([0.0], [[1.0], [2.0]], 0.5)
assert abs(u[0] - 16 / 17) < 1e-15 and abs(u[1] - 1 / 17) < 1e-15, u
assert abs(ss.soft_cost([[0.0], [2.0]], [[0.5], [3.0]], 0.5) - 1.4629319047126994) < 1e-12
assert abs(ss.approx_factor(16, 0.1) - 1.360790000174377) < 1e-12
assert ss.hard_cost([[0.0], [4.0]], [[1.0]], weights=[2.0, 1.0]) == 11.0
ok, hard, soft, factor = ss.sandwich_check([[0.0], [1.0], [5.0]], [[0.5], [5.0]], 0.25)
assert ok and hard <= soft <= factor * hard
closed = ss.soft_cost_closed([[0.0], [1.0], [4.0], [5.0]], [[1.5], [3.5]], 0.25)
assert abs(closed - 5.0227671207917235) < 1e-9
");
}

#[test]
fn seeding_and_iteration() {
    run(c"
data = [[float(i % 3) * 10 + 0.1 * i, 0.0] for i in range(60)]
seeds = ss.kmeanspp(data, 3, seed=4)
assert len(seeds) == 3 and seeds == ss.kmeanspp(data, 3, seed=4)
assert len(ss.kmeans_sharp(data, 3, seed=4)) <= 3 * 5
centers, costs = ss.lloyd(data, seeds)
assert all(b <= a for a, b in zip(costs, costs[1:]))
centers, phis = ss.em(data, seeds, 0.25)
assert len(centers) == 3 and phis[-1] >= 0
centers, phi = ss.em_plus_plus(data, 3, 0.5, seed=1)
assert phi > 0
cost, labels, opt = ss.brute_force([[0.0], [1.0], [4.0], [5.0]], 2)
assert cost == 1.0 and labels == [0, 0, 1, 1]
");
}

#[test]
fn stream_and_window_classes() {
    run(c"
s = ss.StreamClusterer(k=2, memory=40, dim=1, seed=3)
s.ingest_many([[float(i % 2) * 50] for i in range(500)])
assert s.ingested == 500 and s.live_weight == 500.0
rows, weights = s.live_points()
assert len(rows) == s.live_len and sum(weights) == 500.0
assert sorted(c[0] for c in s.finalize(seed=1)) == [0.0, 50.0]

w = ss.WindowClusterer(k=2, window=200, dim=1)
for i in range(1000):
    w.insert([float(i)])
assert w.seen == 1000
centers = w.query(seed=2)
assert all(c[0] >= 790 for c in centers), centers
pts, wts = w.window_points()
assert abs(sum(wts) - 200) < 1e-9
");
}

#[test]
fn errors_become_value_errors() {
    run(c"
for bad in (lambda: ss.memberships([0.0], [[1.0]], 1.5),
            lambda: ss.kmeanspp([], 2),
            lambda: ss.hard_cost([[0.0, 1.0]], [[1.0]]),
            lambda: ss.StreamClusterer(k=4, memory=10, dim=2)):
    try:
        bad()
    except ValueError:
        pass
    else:
        raise AssertionError('expected ValueError')
");
}
