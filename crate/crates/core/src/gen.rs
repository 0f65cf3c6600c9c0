//! Seeded instance generators: small random instances for oracle tests and
//! the committed Solomon-format 25-customer benchmark set (random,
//! clustered, and mixed classes in the spirit of the classic R1/C1/RC1
//! series). Everything is deterministic given the seed.

use crate::instance::Instance;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Small instance with uniform coordinates and random feasible windows;
/// every customer admits a feasible singleton route by construction.
pub fn random_small(seed: u64, n: usize, time_scale: i64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 300i64;
    let service = 10i64;
    let mut coords = vec![(20.0, 20.0)];
    for _ in 0..n {
        coords.push((rng.gen_range(0..=40) as f64, rng.gen_range(0..=40) as f64));
    }
    let mut demands = vec![0i64];
    for _ in 0..n {
        demands.push(rng.gen_range(5..=15));
    }
    let capacity = 40i64;
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let mut ready = vec![0.0f64];
    let mut due = vec![horizon as f64];
    let mut svc = vec![0.0f64];
    for u in 0..n {
        let d_out = dist(coords[0], coords[u + 1]).ceil() as i64;
        let d_back = dist(coords[u + 1], coords[0]).ceil() as i64;
        let latest = horizon - service - d_back;
        let mut r = rng.gen_range(0..=(horizon * 6 / 10));
        let width = rng.gen_range(30..=140);
        let mut d = (r + width).clamp(d_out, latest.max(d_out));
        if d < r {
            r = d;
        }
        r = r.min(d);
        ready.push(r as f64);
        due.push(d as f64);
        svc.push(service as f64);
        let _ = &mut d;
    }
    Instance::from_raw(
        &format!("rand{seed}_{n}"),
        capacity,
        horizon as f64,
        &coords,
        &demands,
        &ready,
        &due,
        &svc,
        time_scale,
    )
    .expect("generated instance is valid")
    .normalize()
}

/// Random nonnegative dual vector for pricing tests.
pub fn random_duals(seed: u64, n: usize, max: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.0..max)).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StyleClass {
    Random,
    Clustered,
    Mixed,
}

/// One benchmark instance in Solomon text format.
pub struct GeneratedInstance {
    pub name: String,
    pub text: String,
}

/// Generate a 25-customer Solomon-format instance. Windows are cut around a
/// seed-route schedule (nearest-neighbor routes under the capacity), so the
/// instance is feasible and multi-customer routes pay off.
pub fn solomon_style(class: StyleClass, index: usize, seed: u64) -> GeneratedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 25usize;
    let capacity = 200i64;
    let (horizon, service, width_range) = match class {
        StyleClass::Random => (230i64, 10i64, (10i64, 60i64)),
        StyleClass::Clustered => (400, 10, (60, 160)),
        StyleClass::Mixed => (240, 10, (10, 120)),
    };
    let depot = (35i64, 35i64);
    let mut coords: Vec<(i64, i64)> = Vec::with_capacity(n);
    match class {
        StyleClass::Random => {
            for _ in 0..n {
                coords.push((rng.gen_range(0..=70), rng.gen_range(0..=70)));
            }
        }
        StyleClass::Clustered => {
            let centers: Vec<(i64, i64)> =
                (0..5).map(|_| (rng.gen_range(10..=60), rng.gen_range(10..=60))).collect();
            for i in 0..n {
                let c = centers[i % centers.len()];
                coords.push((
                    (c.0 + rng.gen_range(-6..=6)).clamp(0, 70),
                    (c.1 + rng.gen_range(-6..=6)).clamp(0, 70),
                ));
            }
        }
        StyleClass::Mixed => {
            let centers: Vec<(i64, i64)> =
                (0..3).map(|_| (rng.gen_range(10..=60), rng.gen_range(10..=60))).collect();
            for i in 0..n {
                if i % 2 == 0 {
                    coords.push((rng.gen_range(0..=70), rng.gen_range(0..=70)));
                } else {
                    let c = centers[(i / 2) % centers.len()];
                    coords.push((
                        (c.0 + rng.gen_range(-6..=6)).clamp(0, 70),
                        (c.1 + rng.gen_range(-6..=6)).clamp(0, 70),
                    ));
                }
            }
        }
    }
    let demands: Vec<i64> = (0..n)
        .map(|_| match class {
            StyleClass::Random => rng.gen_range(1..=35),
            StyleClass::Clustered => rng.gen_range(10..=40),
            StyleClass::Mixed => rng.gen_range(5..=35),
        })
        .collect();

    let dist = |a: (i64, i64), b: (i64, i64)| {
        let dx = (a.0 - b.0) as f64;
        let dy = (a.1 - b.1) as f64;
        (dx * dx + dy * dy).sqrt()
    };

    // Seed routes: nearest-neighbor chains under the capacity, at most six
    // stops, then schedule them without waiting to place window centers.
    let mut unrouted: Vec<usize> = (0..n).collect();
    let mut centers = vec![0i64; n];
    while !unrouted.is_empty() {
        let mut load = 0i64;
        let mut t = 0i64;
        let mut here = depot;
        let mut stops = 0;
        while stops < 6 && !unrouted.is_empty() {
            let (pick, _) = unrouted
                .iter()
                .enumerate()
                .map(|(i, &u)| (i, dist(here, coords[u])))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            let u = unrouted[pick];
            if load + demands[u] > capacity {
                break;
            }
            let arrive = t + dist(here, coords[u]).ceil() as i64;
            centers[u] = arrive;
            t = arrive + service;
            here = coords[u];
            load += demands[u];
            stops += 1;
            unrouted.swap_remove(pick);
        }
    }

    let mut rows = Vec::with_capacity(n + 1);
    rows.push((0usize, depot.0, depot.1, 0i64, 0i64, horizon, 0i64));
    for u in 0..n {
        let d_out = dist(depot, coords[u]).ceil() as i64;
        let d_back = dist(coords[u], depot).ceil() as i64;
        let latest = horizon - service - d_back;
        let w = rng.gen_range(width_range.0..=width_range.1);
        let center = centers[u].clamp(d_out, latest);
        let ready = (center - w / 2).max(0);
        let due = (center + w / 2).clamp(d_out, latest);
        let ready = ready.min(due);
        rows.push((u + 1, coords[u].0, coords[u].1, demands[u], ready, due, service));
    }

    let name = match class {
        StyleClass::Random => format!("r25_{index}"),
        StyleClass::Clustered => format!("c25_{index}"),
        StyleClass::Mixed => format!("rc25_{index}"),
    };
    let mut text = String::new();
    text.push_str(&name);
    text.push_str("\n\nVEHICLE\nNUMBER     CAPACITY\n  25         200\n\nCUSTOMER\n");
    text.push_str("CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME\n\n");
    for (id, x, y, d, r, due, s) in rows {
        text.push_str(&format!(
            "{id:>5}{x:>11}{y:>11}{d:>11}{r:>13}{due:>11}{s:>14}\n"
        ));
    }
    GeneratedInstance { name, text }
}

/// The nine committed benchmark instances: three per class, fixed seeds.
pub fn benchmark_set() -> Vec<GeneratedInstance> {
    let mut out = Vec::new();
    for (i, seed) in [(1usize, 9101u64), (2, 9102), (3, 9103)] {
        out.push(solomon_style(StyleClass::Random, i, seed));
    }
    for (i, seed) in [(1usize, 9201u64), (2, 9202), (3, 9203)] {
        out.push(solomon_style(StyleClass::Clustered, i, seed));
    }
    for (i, seed) in [(1usize, 9301u64), (2, 9302), (3, 9303)] {
        out.push(solomon_style(StyleClass::Mixed, i, seed));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_solomon, Loc};

    #[test]
    fn random_small_is_feasible_per_customer() {
        for seed in 0..20 {
            let inst = random_small(seed, 6, 10);
            for u in 0..inst.n() {
                assert!(
                    inst.route_time_feasible([Loc::Cust(u)].into_iter()),
                    "singleton {u} infeasible in seed {seed}"
                );
            }
        }
    }

    #[test]
    fn benchmark_set_parses_and_is_feasible() {
        for g in benchmark_set() {
            let inst = parse_solomon(&g.text, 10).unwrap().normalize();
            assert_eq!(inst.n(), 25, "{}", g.name);
            for u in 0..inst.n() {
                assert!(
                    inst.route_time_feasible([Loc::Cust(u)].into_iter()),
                    "singleton {u} infeasible in {}",
                    g.name
                );
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = solomon_style(StyleClass::Random, 1, 9101);
        let b = solomon_style(StyleClass::Random, 1, 9101);
        assert_eq!(a.text, b.text);
    }
}
