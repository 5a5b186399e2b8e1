//! Seeded random generators shared by the integration suites.
#![allow(dead_code)] // each test binary uses its own slice of the helpers

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ramicalc_core::galois::GaloisDecomposition;
use ramicalc_core::gl::{minimal_profile, EndoClassProfile, Level};
use ramicalc_core::herbrand::{HerbrandBundle, TwistSample};
use ramicalc_core::rat::Rat;
use ramicalc_core::ultrametric::UltrametricTable;
use ramicalc_core::PlFunction;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat_u(n: u64, d: u64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Strictly increasing function from a nonnegative start, domain `[0, +inf)`.
pub fn increasing_plf(rng: &mut ChaCha8Rng) -> PlFunction {
    let n = rng.gen_range(0..=4usize);
    let mut x = Rat::zero();
    let mut y = rat_u(rng.gen_range(0..=3), rng.gen_range(1..=3));
    let mut pts = vec![(x.clone(), y.clone())];
    for _ in 0..n {
        let dx = rat_u(rng.gen_range(1..=8), rng.gen_range(1..=6));
        let slope = rat_u(rng.gen_range(1..=9), rng.gen_range(1..=5));
        x = &x + &dx;
        y = &y + slope * &dx;
        pts.push((x.clone(), y.clone()));
    }
    let terminal = rat_u(rng.gen_range(1..=9), rng.gen_range(1..=5));
    PlFunction::new(pts, terminal).unwrap()
}

/// Decomposition data with no profile attached: random partition of `dim^2`
/// with a forced trivial piece.
pub fn random_decomposition(rng: &mut ChaCha8Rng) -> GaloisDecomposition {
    let dim = rng.gen_range(1..=5u64);
    let mut comps = vec![(1u64, 0u64)];
    let mut rest = dim * dim - 1;
    while rest > 0 {
        let d = rng.gen_range(1..=rest);
        let sw = rng.gen_range(0..=3 * d);
        comps.push((d, sw));
        rest -= d;
    }
    GaloisDecomposition::new(dim, comps).unwrap()
}

/// Random valid profile of mixed shape: trivial, minimal, or a tame lift of a
/// totally wild one.
pub fn random_profile(rng: &mut ChaCha8Rng) -> EndoClassProfile {
    match rng.gen_range(0..4u32) {
        0 => {
            let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
            EndoClassProfile::trivial(p).unwrap()
        }
        1 => loop {
            let p = [2u64, 3, 5, 7, 11][rng.gen_range(0..5)];
            let a = rng.gen_range(1..=9u64);
            let b = rng.gen_range(1..=6u64);
            if a.gcd(&b) == 1 {
                return minimal_profile(a, b, p).unwrap();
            }
        },
        2 => totally_wild_bundle(rng).profile().clone(),
        _ => {
            let base = totally_wild_bundle(rng).profile().clone();
            let e = rng.gen_range(1..=4u64);
            base.tame_lift(e).unwrap()
        }
    }
}

/// A coherent totally wild bundle: profile and matching decomposition with
/// `sigma(0) = phi(0)` and all component slopes at most the level `m`.
pub fn totally_wild_bundle(rng: &mut ChaCha8Rng) -> HerbrandBundle {
    loop {
        if let Some(b) = try_bundle(rng) {
            return b;
        }
    }
}

fn try_bundle(rng: &mut ChaCha8Rng) -> Option<HerbrandBundle> {
    let (p, r) = [(2u64, 1u32), (2, 2), (3, 1), (3, 2), (5, 1)][rng.gen_range(0..5)];
    let deg = p.pow(r);

    let two_level = deg > 2 && rng.gen_bool(0.7);
    let (m, jumps, levels) = if !two_level {
        let w = rng.gen_range(1..=5u64);
        let c0 = (deg - 1) * w;
        let m = rat_u(w, deg);
        (
            m.clone(),
            vec![m],
            vec![Level {
                d: deg,
                ex: deg,
                c: c0,
            }],
        )
    } else {
        let u = rng.gen_range(0..r);
        let d1 = p.pow(u);
        if d1 == 1 {
            // degenerate slope-1 tail before m
            let w = rng.gen_range(1..=4u64);
            let c0 = (deg - 1) * w;
            let y1 = rat_u(w, deg);
            let m = &y1 + rat_u(rng.gen_range(1..=4), deg);
            (
                m.clone(),
                vec![y1, m],
                vec![
                    Level {
                        d: deg,
                        ex: deg,
                        c: c0,
                    },
                    Level { d: 1, ex: 1, c: 0 },
                ],
            )
        } else {
            let w1 = rng.gen_range(1..=4u64);
            let c1 = (d1 - 1) * w1;
            let m = rat_u(w1, d1);
            let c0_min = c1 * (deg / d1) * (deg / d1) + 1;
            let mut found = None;
            for _ in 0..12 {
                let c0 = c0_min + rng.gen_range(0..3 * deg);
                let y1 =
                    (rat_u(c0, deg * deg) - rat_u(c1, d1 * d1)) / (rat_u(1, d1) - rat_u(1, deg));
                if y1 > Rat::zero() && y1 < m {
                    found = Some((c0, y1));
                    break;
                }
            }
            let (c0, y1) = found?;
            (
                m.clone(),
                vec![y1, m],
                vec![
                    Level {
                        d: deg,
                        ex: deg,
                        c: c0,
                    },
                    Level {
                        d: d1,
                        ex: d1,
                        c: c1,
                    },
                ],
            )
        }
    };
    let k0 = Some(-jumps[0].clone());
    let profile =
        EndoClassProfile::new(p, deg, deg, 1, m.clone(), k0, jumps, levels, false).ok()?;

    let swan_budget = profile.levels()[0].c;
    let dim_budget = deg * deg - 1;
    let comps = component_split(rng, dim_budget, swan_budget, &m);
    let decomposition = GaloisDecomposition::new(deg, comps).ok()?;
    HerbrandBundle::new(profile, decomposition).ok()
}

/// Splits the nontrivial dimension and swan budgets into components whose
/// slopes stay at or below `m`.
fn component_split(rng: &mut ChaCha8Rng, dims: u64, swans: u64, m: &Rat) -> Vec<(u64, u64)> {
    for _ in 0..20 {
        if dims < 2 || swans < 2 {
            break;
        }
        let d1 = rng.gen_range(1..dims);
        let s1 = rng.gen_range(1..swans);
        let (d2, s2) = (dims - d1, swans - s1);
        if rat_u(s1, d1) <= *m && rat_u(s2, d2) <= *m {
            return vec![(1, 0), (d1, s1), (d2, s2)];
        }
    }
    // equal-slope fallback, always feasible since swans/dims < m
    let g = dims.gcd(&swans);
    let mut comps = vec![(1, 0)];
    comps.extend(std::iter::repeat_n((dims / g, swans / g), g as usize));
    comps
}

/// Minimal-style bundle of degree `p^r` at level `a/p^r` with a single
/// equal-slope wild part; degree one (r = 0) has no wild part at all.
pub fn minimal_bundle(a: u64, p: u64, r: u32) -> HerbrandBundle {
    let b = p.pow(r);
    let profile = minimal_profile(a, b, p).unwrap();
    let mut comps = vec![(1, 0)];
    if b > 1 {
        let g = (a * (b - 1)).gcd(&(b * b - 1));
        comps.extend(std::iter::repeat_n(
            ((b * b - 1) / g, a * (b - 1) / g),
            g as usize,
        ));
    }
    let decomposition = GaloisDecomposition::new(b, comps).unwrap();
    HerbrandBundle::new(profile, decomposition).unwrap()
}

/// The linear pieces of `psi` on `[0, m]` as closed intervals.
pub fn psi_pieces(bundle: &HerbrandBundle) -> Vec<(Rat, Rat)> {
    let m = bundle.profile().m();
    let mut cuts = vec![Rat::zero()];
    for j in bundle.psi().derivative_jumps() {
        if j.x < *m {
            cuts.push(j.x);
        }
    }
    cuts.push(m.clone());
    cuts.windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

pub fn sample_at(psi: &PlFunction, x: &Rat) -> TwistSample {
    let k: u64 = x.numer().try_into().expect("sample numerator fits u64");
    let e: u64 = x.denom().try_into().expect("sample denominator fits u64");
    let value = psi.eval(x).unwrap() * rat_u(e, 1);
    TwistSample::new(e, k, value).unwrap()
}

/// `count` interior sample points per piece, avoiding the exclusion set.
pub fn piece_points(bundle: &HerbrandBundle, l: &Rat, r: &Rat, count: usize) -> Vec<Rat> {
    let mut pts = Vec::new();
    let mut den = count as u64 + 1;
    while pts.len() < count {
        for j in 1..den {
            let x = l + (r - l) * rat_u(j, den);
            if !bundle.exclusions().contains(&x) && !pts.contains(&x) {
                pts.push(x);
                if pts.len() == count {
                    break;
                }
            }
        }
        den += 1;
    }
    pts.sort();
    pts
}

/// A grid bracketing every breakpoint: `per_piece` samples strictly inside
/// each linear piece of `psi` on `[0, m]`.
pub fn bracketing_samples(bundle: &HerbrandBundle, per_piece: usize) -> Vec<TwistSample> {
    let mut out = Vec::new();
    for (l, r) in psi_pieces(bundle) {
        for x in piece_points(bundle, &l, &r, per_piece) {
            out.push(sample_at(bundle.psi(), &x));
        }
    }
    out
}

/// Random dendrogram ultrametric on `n` labels, strictly positive distances.
pub fn random_ultrametric(rng: &mut ChaCha8Rng, n: usize) -> UltrametricTable {
    let labels: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let mut dist = vec![vec![Rat::zero(); n]; n];
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut h = Rat::zero();
    while clusters.len() > 1 {
        h = &h + rat_u(rng.gen_range(1..=6), rng.gen_range(1..=4));
        let a = rng.gen_range(0..clusters.len());
        let mut b = rng.gen_range(0..clusters.len() - 1);
        if b >= a {
            b += 1;
        }
        for &x in &clusters[a] {
            for &y in &clusters[b] {
                dist[x][y] = h.clone();
                dist[y][x] = h.clone();
            }
        }
        let eaten = clusters.swap_remove(b.max(a));
        clusters[b.min(a)].extend(eaten);
    }
    UltrametricTable::new(labels, dist, true).unwrap()
}

/// Copy of `t` with one entry raised above its ultrametric bound.
pub fn plant_violation(rng: &mut ChaCha8Rng, t: &UltrametricTable) -> UltrametricTable {
    let n = t.len();
    assert!(n >= 3, "violation needs a triple");
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let k = (0..n).find(|&k| k != i && k != j).unwrap();
    let bound = t.dist(i, k).clone().max(t.dist(k, j).clone());
    let mut dist: Vec<Vec<Rat>> = t.rows().to_vec();
    dist[i][j] = &bound + rat_u(1, 1);
    dist[j][i] = dist[i][j].clone();
    UltrametricTable::new(t.labels().to_vec(), dist, t.separating()).unwrap()
}

/// A coherent transfer catalog: a dendrogram of Galois-side distances, one
/// function per label agreeing with its neighbours above their distance, and
/// the matching endo-class-side distances.
pub struct TransferCatalog {
    pub delta: UltrametricTable,
    pub a: UltrametricTable,
    pub psis: BTreeMap<String, PlFunction>,
}

pub fn transfer_catalog(rng: &mut ChaCha8Rng, n: usize) -> TransferCatalog {
    let root_h = rat_u(rng.gen_range(2..=4), 1);
    let m = &root_h + rat_u(1, 1);
    // base function: strictly increasing, 0 at 0, identity from m on
    let base = {
        let x = &m * rat_u(rng.gen_range(1..=3), 4);
        let y = &m * rat_u(rng.gen_range(1..=3), 5);
        PlFunction::new(
            vec![(Rat::zero(), Rat::zero()), (x, y), (m.clone(), m.clone())],
            Rat::new(1.into(), 1.into()),
        )
        .unwrap()
    };
    let ids: Vec<usize> = (0..n).collect();
    let mut psis_by_id: Vec<Option<PlFunction>> = vec![None; n];
    let mut dist = vec![vec![Rat::zero(); n]; n];
    descend(rng, &ids, &root_h, &base, &mut psis_by_id, &mut dist);

    let labels: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let delta = UltrametricTable::new(labels.clone(), dist, true).unwrap();
    let psis: BTreeMap<String, PlFunction> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), psis_by_id[i].clone().unwrap()))
        .collect();
    let mut a_rows = vec![vec![Rat::zero(); n]; n];
    for (i, row) in a_rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j {
                *v = psis[&labels[i]].eval(delta.dist(i, j)).unwrap();
            }
        }
    }
    let a = UltrametricTable::new(labels, a_rows, true).unwrap();
    TransferCatalog { delta, a, psis }
}

fn descend(
    rng: &mut ChaCha8Rng,
    ids: &[usize],
    height: &Rat,
    psi: &PlFunction,
    out: &mut Vec<Option<PlFunction>>,
    dist: &mut [Vec<Rat>],
) {
    if ids.len() == 1 {
        out[ids[0]] = Some(psi.clone());
        return;
    }
    let cut = rng.gen_range(1..ids.len());
    let (left, right) = ids.split_at(cut);
    for &x in left {
        for &y in right {
            dist[x][y] = height.clone();
            dist[y][x] = height.clone();
        }
    }
    for part in [left, right] {
        let child_psi = reroute_below(rng, psi, height);
        let child_h = height * rat_u(rng.gen_range(1..=3), 4);
        descend(rng, part, &child_h, &child_psi, out, dist);
    }
}

/// New function equal to `psi` on `[h, +inf)` and rerouted through a random
/// interior point below `h`; stays strictly increasing from `(0, 0)`.
fn reroute_below(rng: &mut ChaCha8Rng, psi: &PlFunction, h: &Rat) -> PlFunction {
    let v = psi.eval(h).unwrap();
    let x = h * rat_u(rng.gen_range(1..=6), 7);
    let y = &v * rat_u(rng.gen_range(1..=6), 7);
    let mut pts = vec![(Rat::zero(), Rat::zero()), (x, y), (h.clone(), v)];
    for (bx, by) in psi.breakpoints() {
        if bx > h {
            pts.push((bx.clone(), by.clone()));
        }
    }
    PlFunction::new(pts, psi.terminal_slope().clone()).unwrap()
}

/// Corrupts the endo-class-side table: every entry at the top level is raised
/// by 1, which keeps the ultrametric property but breaks the transfer.
pub fn corrupt_a_table(t: &UltrametricTable) -> UltrametricTable {
    let n = t.len();
    let max = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| t.dist(i, j).clone())
        .max()
        .unwrap();
    let mut rows: Vec<Vec<Rat>> = t.rows().to_vec();
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j && *v == max {
                *v = &*v + rat_u(1, 1);
            }
        }
    }
    UltrametricTable::new(t.labels().to_vec(), rows, t.separating()).unwrap()
}
