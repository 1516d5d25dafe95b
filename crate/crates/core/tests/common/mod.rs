//! Fixtures, random generators and brute-force oracles shared by the
//! integration tests. Nothing here calls the library's linear algebra.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mac_core::complexes::{Face, SimplicialComplex, Vertex};
use mac_core::text::parse_complex;
use mac_core::whitehead::WhiteheadExpr;
use mac_core::Int;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn f(v: &[Vertex]) -> Face {
    Face::of(v)
}

/// `∂Δ(∂Δ(1,2,3), 4, 5)`, whose `Z_K` is a wedge of spheres.
pub fn wedge_example() -> SimplicialComplex {
    parse_complex("subst(bd(simplex(1,2,3)); bd(simplex(1,2,3)), pt, pt)").unwrap()
}

/// `∂Δ(∂Δ(1,2,3), 4, 5, 6) ∪ Δ(1,2,3)`.
pub fn s10_complex() -> SimplicialComplex {
    parse_complex("subst(bd(simplex(1,2,3,4)); bd(simplex(1,2,3)), pt, pt, pt)")
        .unwrap()
        .with_faces_added(&[f(&[1, 2, 3])])
        .unwrap()
}

/// `∂Δ(∂Δ(1,2,3), ∂Δ(4,5,6), 7, 8)`.
pub fn eight_vertex() -> SimplicialComplex {
    parse_complex("subst(bd(simplex(1,2,3,4)); bd(simplex(1,2,3)), bd(simplex(1,2,3)), pt, pt)").unwrap()
}

/// Six-vertex triangulation of the real projective plane.
pub fn rp2_6() -> SimplicialComplex {
    let facets: Vec<Vec<Vertex>> = [
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 2, 6],
        [2, 3, 5],
        [2, 4, 5],
        [2, 4, 6],
        [3, 4, 6],
        [3, 5, 6],
    ]
    .iter()
    .map(|t| t.to_vec())
    .collect();
    SimplicialComplex::from_facets(6, &facets).unwrap()
}

/// Every simplicial complex with vertex set exactly `{1..m}`.
pub fn all_complexes(m: Vertex) -> Vec<SimplicialComplex> {
    let ground = Face::range(m);
    let big: Vec<Face> = ground.subsets().filter(|s| s.len() >= 2).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << big.len() {
        let chosen: BTreeSet<Face> = (0..big.len()).filter(|i| mask >> i & 1 == 1).map(|i| big[i]).collect();
        let closed = chosen
            .iter()
            .all(|s| s.iter().all(|v| s.len() == 2 || chosen.contains(&s.without(v))));
        if closed {
            let mut gens: Vec<Face> = chosen.into_iter().collect();
            gens.extend(ground.iter().map(Face::singleton));
            out.push(SimplicialComplex::new(ground, gens).unwrap());
        }
    }
    out
}

/// Random complex on `{1..m}`: random generating faces, downward closed, all
/// vertices present.
pub fn random_complex(rng: &mut ChaCha8Rng, m: Vertex) -> SimplicialComplex {
    let ground = Face::range(m);
    let count = rng.gen_range(1..=2 * m as usize);
    let mut gens: Vec<Face> = ground.iter().map(Face::singleton).collect();
    for _ in 0..count {
        let bits = rng.gen_range(1u64..1 << m);
        let face = Face::from_bits(bits);
        if face.len() < m as usize || rng.gen_bool(0.1) {
            gens.push(face);
        }
    }
    SimplicialComplex::new(ground, gens).unwrap()
}

/// Random complex shifted for the natural order: generating faces closed
/// under replacing a vertex by a later one.
pub fn random_shifted(rng: &mut ChaCha8Rng, m: Vertex) -> SimplicialComplex {
    let ground = Face::range(m);
    let mut faces: BTreeSet<Face> = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=3) {
        let size = rng.gen_range(1..m as usize);
        let mut vs: Vec<Vertex> = ground.to_vec();
        vs.shuffle(rng);
        faces.insert(Face::of(&vs[..size]));
    }
    let mut queue: Vec<Face> = faces.iter().copied().collect();
    while let Some(s) = queue.pop() {
        for i in s.iter() {
            for j in ground.iter().filter(|&j| j > i && !s.contains(j)) {
                let t = s.without(i).with(j);
                if faces.insert(t) {
                    queue.push(t);
                }
            }
        }
    }
    let used = faces.iter().fold(Face::EMPTY, |a, &b| a.union(b));
    SimplicialComplex::new(used, faces).unwrap()
}

/// Minimal non-faces by direct enumeration of all vertex subsets.
pub fn brute_missing_faces(k: &SimplicialComplex) -> Vec<Face> {
    let mut out: Vec<Face> = k
        .vertices()
        .subsets()
        .filter(|s| !k.contains(*s) && s.iter().all(|v| k.contains(s.without(v))))
        .collect();
    out.sort();
    out
}

/// Rank over the rationals by fraction-free elimination.
pub fn rational_rank(mut a: Vec<Vec<Int>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev = Int::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let v = (&a[rank][c] * &a[r][cc] - &a[r][c] * &a[rank][cc]) / &prev;
                a[r][cc] = v;
            }
            a[r][c] = Int::zero();
        }
        prev = a[rank][c].abs();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn dense<L: Ord + Clone>(rows: &[L], cols: &[L], entry: impl Fn(&L) -> Vec<(L, i64)>) -> Vec<Vec<Int>> {
    let index: BTreeMap<L, usize> = rows.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let mut m = vec![vec![Int::zero(); cols.len()]; rows.len()];
    for (j, c) in cols.iter().enumerate() {
        for (r, v) in entry(c) {
            m[index[&r]][j] += v;
        }
    }
    m
}

/// Rational Betti numbers of the cellular chain complex of `Z_K`, with cells
/// enumerated and differentiated from scratch: `D_i ↦ S_i`, Leibniz rule with
/// circles odd.
pub fn brute_zk_betti(k: &SimplicialComplex) -> BTreeMap<i64, usize> {
    let v = k.vertices();
    let mut by_deg: BTreeMap<i64, Vec<(Face, Face)>> = BTreeMap::new();
    for &d in k.faces() {
        for s in v.difference(d).subsets() {
            by_deg.entry(2 * d.len() as i64 + s.len() as i64).or_default().push((s, d));
        }
    }
    let boundary = |&(s, d): &(Face, Face)| -> Vec<((Face, Face), i64)> {
        d.iter()
            .map(|i| {
                let odd_before = s.iter().filter(|&j| j < i).count();
                ((s.with(i), d.without(i)), if odd_before % 2 == 0 { 1 } else { -1 })
            })
            .collect()
    };
    let rank_of = |deg: i64| -> usize {
        match (by_deg.get(&deg), by_deg.get(&(deg - 1))) {
            (Some(src), Some(dst)) => rational_rank(dense(dst, src, boundary)),
            _ => 0,
        }
    };
    let mut out = BTreeMap::new();
    for (&deg, cells) in &by_deg {
        let b = cells.len() - rank_of(deg) - rank_of(deg + 1);
        if b > 0 {
            out.insert(deg, b);
        }
    }
    out
}

/// Rational reduced Betti numbers of a complex given by its faces.
pub fn brute_reduced_betti(faces: &[Face]) -> BTreeMap<i64, usize> {
    let mut by_dim: BTreeMap<i64, Vec<Face>> = BTreeMap::new();
    for &s in faces {
        by_dim.entry(s.len() as i64 - 1).or_default().push(s);
    }
    let boundary = |s: &Face| -> Vec<(Face, i64)> {
        s.iter()
            .enumerate()
            .map(|(k, v)| (s.without(v), if k % 2 == 0 { 1 } else { -1 }))
            .collect()
    };
    let rank_of = |d: i64| match (by_dim.get(&d), by_dim.get(&(d - 1))) {
        (Some(src), Some(dst)) => rational_rank(dense(dst, src, boundary)),
        _ => 0,
    };
    let mut out = BTreeMap::new();
    for (&d, fs) in &by_dim {
        let b = fs.len() - rank_of(d) - rank_of(d + 1);
        if b > 0 {
            out.insert(d, b);
        }
    }
    out
}

/// Hochster's formula evaluated with the brute-force reduced Betti numbers.
pub fn brute_hochster_betti(k: &SimplicialComplex) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    out.insert(0, 1);
    for j in k.vertices().subsets().filter(|j| !j.is_empty()) {
        let faces: Vec<Face> = k.faces().iter().copied().filter(|s| s.is_subset(j)).collect();
        for (q, b) in brute_reduced_betti(&faces) {
            *out.entry(q + 1 + j.len() as i64).or_insert(0) += b;
        }
    }
    out
}

/// Random nested product on at most `max_leaves` leaves and at most `depth`
/// levels, with leaves `1..=n` shuffled.
pub fn random_nested(rng: &mut ChaCha8Rng, max_leaves: usize, depth: usize) -> WhiteheadExpr {
    loop {
        let levels = rng.gen_range(1..=depth);
        let mut sizes = vec![rng.gen_range(2..=4)];
        for _ in 1..levels {
            sizes.push(rng.gen_range(1..=3));
        }
        let total: usize = sizes.iter().sum();
        if total > max_leaves {
            continue;
        }
        let mut labels: Vec<Vertex> = (1..=total as Vertex).collect();
        labels.shuffle(rng);
        let mut at = 0;
        let mut take = |n: usize| {
            let out: Vec<WhiteheadExpr> = labels[at..at + n].iter().map(|&v| WhiteheadExpr::leaf(v).unwrap()).collect();
            at += n;
            out
        };
        let mut w = WhiteheadExpr::bracket(take(sizes[0])).unwrap();
        for &n in &sizes[1..] {
            let mut children = vec![w];
            children.extend(take(n));
            w = WhiteheadExpr::bracket(children).unwrap();
        }
        return w;
    }
}

/// Random `[w_1, ..., w_q, μ_i1, ..., μ_ip]` with single `w_j`.
pub fn random_smallest_shape(rng: &mut ChaCha8Rng, max_leaves: usize) -> WhiteheadExpr {
    loop {
        let q = rng.gen_range(1..=2);
        let p = rng.gen_range(0..=3);
        if q + p < 2 {
            continue;
        }
        let sizes: Vec<usize> = (0..q).map(|_| rng.gen_range(2..=3)).collect();
        let total = sizes.iter().sum::<usize>() + p;
        if total > max_leaves {
            continue;
        }
        let mut labels: Vec<Vertex> = (1..=total as Vertex).collect();
        labels.shuffle(rng);
        let mut children = Vec::new();
        let mut at = 0;
        for n in sizes {
            let leaves = labels[at..at + n].iter().map(|&v| WhiteheadExpr::leaf(v).unwrap()).collect();
            children.push(WhiteheadExpr::bracket(leaves).unwrap());
            at += n;
        }
        children.extend(labels[at..].iter().map(|&v| WhiteheadExpr::leaf(v).unwrap()));
        return WhiteheadExpr::bracket(children).unwrap();
    }
}
