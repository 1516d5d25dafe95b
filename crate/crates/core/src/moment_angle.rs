//! The cellular chain complex of the moment-angle complex `Z_K` and the
//! Hochster decomposition of its homology.
//!
//! A cell `κ(J, I)` is a product of circles `S_j` (`j ∈ J`) and discs `D_i`
//! (`i ∈ I`), with `I` a face of `K`. Its degree is `2|I| + |J|` and
//!
//! ```text
//! ∂κ(J, I) = Σ_{i ∈ I} (-1)^{#{j ∈ J : j < i}} κ(J ∪ i, I \ i).
//! ```
//!
//! The differential preserves the support `I ∪ J`, so the complex splits into
//! one block per vertex subset; homology is computed block by block.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::complexes::{reduced_homology_of_faces, Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::exactalg::{Chain, ChainComplex, HomologyClass, HomologyGroup};
use crate::text::{koszul_sort, parse_word_sum, Atom};
use crate::Int;

/// Vertex bound for building the whole cellular complex at once.
pub const MAX_FULL_COMPLEX_VERTICES: usize = 12;
/// Vertex bound for cellular homology.
pub const MAX_HOMOLOGY_VERTICES: usize = 16;
/// Vertex bound for the Hochster table.
pub const MAX_HOCHSTER_VERTICES: usize = 20;

/// The cell `κ(J, I)`: circles on `s`, discs on `d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    /// `J`, the circle coordinates.
    pub s: Face,
    /// `I`, the disc coordinates.
    pub d: Face,
}

impl Cell {
    pub const UNIT: Cell = Cell {
        s: Face::EMPTY,
        d: Face::EMPTY,
    };

    pub fn new(s: Face, d: Face) -> Result<Cell> {
        if !s.is_disjoint(d) {
            return Err(Error::OverlappingLabels(s.intersection(d)));
        }
        Ok(Cell { s, d })
    }

    pub fn degree(self) -> i64 {
        2 * self.d.len() as i64 + self.s.len() as i64
    }

    pub fn support(self) -> Face {
        self.s.union(self.d)
    }

    /// Boundary as `(cell, sign)` pairs.
    pub fn boundary(self) -> Vec<(Cell, i64)> {
        self.d
            .iter()
            .map(|i| {
                let sign = if self.s.count_below(i).is_multiple_of(2) { 1 } else { -1 };
                (
                    Cell {
                        s: self.s.with(i),
                        d: self.d.without(i),
                    },
                    sign,
                )
            })
            .collect()
    }

    /// Product of cells with vertex-sorted letters. Circles are odd, so the
    /// sign counts pairs `(a, b)` with `a` a circle of `self`, `b` a circle of
    /// `other` and `a > b`. `None` when the supports meet.
    pub fn product(self, other: Cell) -> Option<(Cell, i64)> {
        if !self.support().is_disjoint(other.support()) {
            return None;
        }
        let inversions: usize = other.s.iter().map(|b| self.s.len() - self.s.count_below(b)).sum();
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((
            Cell {
                s: self.s.union(other.s),
                d: self.d.union(other.d),
            },
            sign,
        ))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Cell) -> Ordering {
        self.support()
            .cmp(&other.support())
            .then_with(|| self.d.cmp(&other.d))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Cell) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    /// Letters sorted by vertex, e.g. `D1*S2*D4`; the unit cell is `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support().is_empty() {
            return write!(f, "1");
        }
        let letters: Vec<String> = self
            .support()
            .iter()
            .map(|v| if self.d.contains(v) { format!("D{v}") } else { format!("S{v}") })
            .collect();
        write!(f, "{}", letters.join("*"))
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Integer combination of cells of one degree.
pub type CellChain = Chain<Cell, Int>;

impl Chain<Cell, Int> {
    pub fn from_cells<I: IntoIterator<Item = (Cell, Int)>>(terms: I) -> Result<CellChain> {
        let terms: Vec<(Cell, Int)> = terms.into_iter().collect();
        let degree = terms.first().map_or(0, |(c, _)| c.degree());
        if terms.iter().any(|(c, _)| c.degree() != degree) {
            return Err(Error::invalid("cells of different degrees in one chain"));
        }
        Ok(Chain::from_terms(degree, terms))
    }

    /// The unit chain `1 = κ(∅, ∅)`.
    pub fn unit() -> CellChain {
        Chain::from_terms(0, [(Cell::UNIT, Int::from(1))])
    }

    /// Product of chains; terms whose supports meet are dropped.
    pub fn product(&self, other: &CellChain) -> CellChain {
        let mut out = Chain::zero(self.degree + other.degree);
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                if let Some((c, sign)) = a.product(*b) {
                    out.add_term(c, x * y * sign);
                }
            }
        }
        out
    }

    /// Cellular boundary, computed term by term.
    pub fn cellular_boundary(&self) -> CellChain {
        let mut out = Chain::zero(self.degree - 1);
        for (c, x) in &self.coeffs {
            for (b, sign) in c.boundary() {
                out.add_term(b, x * sign);
            }
        }
        out
    }

    /// True if every disc set is a face of `k`.
    pub fn lies_in(&self, k: &SimplicialComplex) -> bool {
        self.coeffs.keys().all(|c| k.contains(c.d) && c.support().is_subset(k.vertices()))
    }
}

impl fmt::Display for Chain<Cell, Int> {
    /// Signed sum such as `D1*S2 + S1*D2`; the zero chain is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_sum(f, self.coeffs.iter().map(|(c, x)| (c.to_string(), x)))
    }
}

impl Serialize for Chain<Cell, Int> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for Chain<Cell, Int> {
    type Err = Error;

    /// Accepts sums of words in `S_i`, `D_i` in any letter order, for example
    /// `(D1D4S5 + D1S4D5 + S1D4D5)S2`. Circles are odd when reordering.
    fn from_str(text: &str) -> Result<CellChain> {
        let mut terms = Vec::new();
        for (coeff, word) in parse_word_sum(text)? {
            let (sorted, sign) = koszul_sort(
                &word,
                |a| match a {
                    Atom::S(v) | Atom::D(v) => *v,
                    Atom::W(_) => 0,
                },
                |a| a.is_odd(),
            );
            let mut cell = Cell::UNIT;
            for a in sorted {
                match a {
                    Atom::S(v) if !cell.support().contains(v) => cell.s = cell.s.with(v),
                    Atom::D(v) if !cell.support().contains(v) => cell.d = cell.d.with(v),
                    Atom::W(_) => return Err(Error::invalid("w letters are not cells")),
                    Atom::S(v) | Atom::D(v) => return Err(Error::DuplicateLabel(v)),
                }
            }
            terms.push((cell, coeff * sign));
        }
        Chain::from_cells(terms)
    }
}

/// Writes `a - 2*b + c` style sums; `0` when empty.
pub(crate) fn write_signed_sum<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: IntoIterator<Item = (String, &'a Int)>,
{
    let mut first = true;
    for (word, x) in terms {
        let neg = x.sign() == num_bigint::Sign::Minus;
        let mag = if neg { -x } else { x.clone() };
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        if mag == Int::from(1) {
            write!(f, "{word}")?;
        } else {
            write!(f, "{mag}*{word}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

fn cell_boundary_int(c: &Cell) -> Vec<(Cell, Int)> {
    c.boundary().into_iter().map(|(b, s)| (b, Int::from(s))).collect()
}

fn build(cells: Vec<Cell>) -> Result<ChainComplex<Cell, Int>> {
    let mut bases: BTreeMap<i64, Vec<Cell>> = BTreeMap::new();
    for c in cells {
        bases.entry(c.degree()).or_default().push(c);
    }
    for b in bases.values_mut() {
        b.sort();
    }
    ChainComplex::from_fn(bases, |c, _| cell_boundary_int(c))
}

/// The whole cellular chain complex of `Z_K`.
pub fn zk_chain_complex(k: &SimplicialComplex) -> Result<ChainComplex<Cell, Int>> {
    if k.num_vertices() > MAX_FULL_COMPLEX_VERTICES {
        return Err(Error::size("vertex count for the full cellular complex", MAX_FULL_COMPLEX_VERTICES));
    }
    let mut cells = Vec::new();
    for &d in k.faces() {
        for s in k.vertices().difference(d).subsets() {
            cells.push(Cell { s, d });
        }
    }
    build(cells)
}

/// The block of the cellular complex spanned by cells with support `support`.
pub fn zk_block(k: &SimplicialComplex, support: Face) -> Result<ChainComplex<Cell, Int>> {
    if !support.is_subset(k.vertices()) {
        return Err(Error::FaceOutsideVertexSet {
            face: support,
            vertices: k.vertices(),
        });
    }
    let cells = k
        .faces()
        .iter()
        .filter(|d| d.is_subset(support))
        .map(|&d| Cell {
            s: support.difference(d),
            d,
        })
        .collect();
    build(cells)
}

fn sum_into(acc: &mut BTreeMap<i64, HomologyGroup<Int>>, d: i64, g: &HomologyGroup<Int>) {
    if g.is_zero() {
        return;
    }
    let e = acc.entry(d).or_insert_with(HomologyGroup::zero);
    *e = e.direct_sum(g);
}

/// Integral homology of `Z_K` by degree, from the cellular complex. Zero
/// groups are omitted; degree 0 carries the `Z` of a point.
pub fn zk_homology(k: &SimplicialComplex) -> Result<BTreeMap<i64, HomologyGroup<Int>>> {
    if k.num_vertices() > MAX_HOMOLOGY_VERTICES {
        return Err(Error::size("vertex count for cellular homology", MAX_HOMOLOGY_VERTICES));
    }
    let supports: Vec<Face> = k.vertices().subsets().collect();
    let blocks: Vec<BTreeMap<i64, HomologyGroup<Int>>> = supports
        .par_iter()
        .map(|&s| zk_block(k, s).map(|c| c.homology_all()))
        .collect::<Result<_>>()?;
    let mut acc = BTreeMap::new();
    for b in blocks {
        for (d, g) in b {
            sum_into(&mut acc, d, &g);
        }
    }
    Ok(acc)
}

/// Drops the degree-zero `Z`, leaving reduced homology.
pub fn reduced(table: &BTreeMap<i64, HomologyGroup<Int>>) -> BTreeMap<i64, HomologyGroup<Int>> {
    let mut out = table.clone();
    if let Some(g) = out.get_mut(&0) {
        if g.rank > 0 {
            g.rank -= 1;
        }
        if g.is_zero() {
            out.remove(&0);
        }
    }
    out
}

/// Ranks of a homology table, degree to rank, zero ranks omitted.
pub fn ranks(table: &BTreeMap<i64, HomologyGroup<Int>>) -> BTreeMap<i64, usize> {
    table.iter().filter(|(_, g)| g.rank > 0).map(|(&d, g)| (d, g.rank)).collect()
}

/// Splits a chain by support.
pub fn split_by_support(c: &CellChain) -> BTreeMap<Face, CellChain> {
    let mut out: BTreeMap<Face, CellChain> = BTreeMap::new();
    for (cell, x) in &c.coeffs {
        out.entry(cell.support())
            .or_insert_with(|| Chain::zero(c.degree))
            .add_term(*cell, x.clone());
    }
    out
}

/// Homology class of a cellular cycle, one entry per support block.
pub fn class_in_zk(k: &SimplicialComplex, z: &CellChain) -> Result<Vec<(Face, HomologyClass<Int>)>> {
    if !z.lies_in(k) {
        return Err(Error::invalid("chain has cells outside Z_K"));
    }
    split_by_support(z)
        .into_iter()
        .map(|(s, part)| {
            let block = zk_block(k, s)?;
            Ok((s, block.class_in_homology(&part)?))
        })
        .collect()
}

/// Whether a cellular cycle represents a nonzero class.
pub fn is_nonzero_class(k: &SimplicialComplex, z: &CellChain) -> Result<bool> {
    Ok(class_in_zk(k, z)?.iter().any(|(_, c)| !c.is_boundary()))
}

/// Sign attached to the face `l` of `K_J` in [`hochster_embed`]:
/// `(-1)^(#{(j, l) : j ∈ J \ L, l ∈ L, j > l} + C(|J \ L|, 2))`.
pub fn shuffle_sign(l: Face, j: Face) -> i64 {
    let rest = j.difference(l);
    let inversions: usize = l.iter().map(|x| rest.len() - rest.count_below(x)).sum();
    let r = rest.len();
    if (inversions + r * r.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sends a reduced simplicial chain of `K_J` to the cellular chain
/// `Σ c_L · sign(L, J) · κ(J \ L, L)`. This is a chain map raising degree by
/// `|J| + 1`.
pub fn hochster_embed(k: &SimplicialComplex, j: Face, c: &Chain<Face, Int>) -> Result<CellChain> {
    let mut out = Chain::zero(c.degree + 1 + j.len() as i64);
    for (l, x) in &c.coeffs {
        if !l.is_subset(j) || !k.contains(*l) {
            return Err(Error::invalid(format!("{l} is not a face of the full subcomplex on {j}")));
        }
        if l.len() as i64 - 1 != c.degree {
            return Err(Error::UnknownLabel(l.to_string(), c.degree));
        }
        out.add_term(
            Cell {
                s: j.difference(*l),
                d: *l,
            },
            x * shuffle_sign(*l, j),
        );
    }
    Ok(out)
}

/// Per-subset reduced homology of full subcomplexes, and its aggregate placed
/// in `Z_K` degrees (`H̃_q(K_J)` contributes to degree `q + 1 + |J|`).
#[derive(Clone, Debug, Serialize)]
pub struct HochsterTable {
    pub per_subset: BTreeMap<Face, BTreeMap<i64, HomologyGroup<Int>>>,
    pub aggregate: BTreeMap<i64, HomologyGroup<Int>>,
}

pub fn hochster_table(k: &SimplicialComplex) -> Result<HochsterTable> {
    if k.num_vertices() > MAX_HOCHSTER_VERTICES {
        return Err(Error::size("vertex count for the Hochster table", MAX_HOCHSTER_VERTICES));
    }
    let subsets: Vec<Face> = k.vertices().subsets().collect();
    let rows: Vec<(Face, BTreeMap<i64, HomologyGroup<Int>>)> = subsets
        .par_iter()
        .map(|&j| reduced_homology_of_faces(&k.full_subcomplex_faces(j)).map(|h| (j, h)))
        .collect::<Result<_>>()?;
    let mut per_subset = BTreeMap::new();
    let mut aggregate = BTreeMap::new();
    for (j, h) in rows {
        if h.is_empty() {
            continue;
        }
        for (q, g) in &h {
            sum_into(&mut aggregate, q + 1 + j.len() as i64, g);
        }
        per_subset.insert(j, h);
    }
    Ok(HochsterTable { per_subset, aggregate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::Vertex;

    fn f(v: &[Vertex]) -> Face {
        Face::of(v)
    }

    fn two_points() -> SimplicialComplex {
        SimplicialComplex::from_facets(2, &[]).unwrap()
    }

    #[test]
    fn sphere_from_two_points() {
        let k = two_points();
        let c = zk_chain_complex(&k).unwrap();
        let total: usize = c.degrees().map(|d| c.rank_in(d)).sum();
        assert_eq!(total, 8);
        let h = zk_homology(&k).unwrap();
        assert_eq!(ranks(&h), BTreeMap::from([(0, 1), (3, 1)]));
        let d1s2 = Cell { s: f(&[2]), d: f(&[1]) };
        assert_eq!(d1s2.boundary(), vec![(Cell { s: f(&[1, 2]), d: Face::EMPTY }, 1)]);
        assert_eq!(d1s2.to_string(), "D1*S2");
    }

    #[test]
    fn disc_product_is_contractible() {
        let k = SimplicialComplex::simplex(f(&[1, 2])).unwrap();
        assert!(reduced(&zk_homology(&k).unwrap()).is_empty());
    }

    #[test]
    fn simplex_boundaries_give_spheres() {
        for m in 2..=5 {
            let k = SimplicialComplex::simplex_boundary(Face::range(m)).unwrap();
            let h = reduced(&zk_homology(&k).unwrap());
            assert_eq!(ranks(&h), BTreeMap::from([(2 * m as i64 - 1, 1)]));
        }
    }

    #[test]
    fn embed_signs() {
        let k = two_points();
        let j = f(&[1, 2]);
        let c = Chain::from_terms(0, [(f(&[1]), Int::from(1)), (f(&[2]), Int::from(-1))]);
        let e = hochster_embed(&k, j, &c).unwrap();
        assert_eq!(e.to_string(), "-D1*S2 - S1*D2");
        assert!(e.cellular_boundary().is_zero());
        assert!(is_nonzero_class(&k, &e).unwrap());
        assert_eq!(shuffle_sign(j, j), 1);

        let tri = SimplicialComplex::simplex_boundary(f(&[1, 2, 3])).unwrap();
        let z = Chain::from_terms(
            1,
            [(f(&[2, 3]), Int::from(1)), (f(&[1, 3]), Int::from(-1)), (f(&[1, 2]), Int::from(1))],
        );
        let e = hochster_embed(&tri, f(&[1, 2, 3]), &z).unwrap();
        assert_eq!(e.to_string(), "D1*D2*S3 + D1*S2*D3 + S1*D2*D3");
    }

    #[test]
    fn products() {
        let a = Cell { s: f(&[2]), d: f(&[1]) };
        let b = Cell { s: f(&[1]), d: f(&[3]) };
        assert!(a.product(b).is_none());
        let s3 = Cell { s: f(&[3]), d: Face::EMPTY };
        let s1 = Cell { s: f(&[1]), d: Face::EMPTY };
        assert_eq!(s3.product(s1).unwrap().1, -1);
        assert_eq!(s1.product(s3).unwrap().1, 1);
    }

    #[test]
    fn hochster_matches_cellular_on_small_cases() {
        let fig1 = SimplicialComplex::from_facets(
            5,
            &[vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4], vec![1, 2, 5], vec![1, 3, 5], vec![2, 3, 5], vec![4, 5]],
        )
        .unwrap();
        let h = zk_homology(&fig1).unwrap();
        let t = hochster_table(&fig1).unwrap();
        assert_eq!(h, t.aggregate);
        assert_eq!(
            ranks(&reduced(&h)),
            BTreeMap::from([(5, 4), (6, 3), (7, 1), (8, 1)])
        );
    }
}
