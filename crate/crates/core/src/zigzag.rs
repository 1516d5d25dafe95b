//! The bicomplex joining the Koszul complex of the face coalgebra to its
//! Taylor complex, and the staircase carrying cellular cycles of `Z_K` to
//! Taylor cycles.
//!
//! A term `(I, J, W)` is the word `κ(J, I) · w_W`: discs on `I`, circles on
//! `J`, then the exterior word `W`. The vertical (Koszul) differential turns
//! a disc into a circle; the horizontal (Taylor) differential prepends a
//! missing face `F` and divides `x_I` by `x_{F ∖ ∪W}`. Both are written so
//! that they commute.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::complexes::{Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::exactalg::{solve_integer, SparseMatrix};
use crate::moment_angle::{write_signed_sum, Cell, CellChain};
use crate::taylor::{class_in_taylor, taylor_boundary, TaylorChain, TaylorMonomial, MAX_TAYLOR_GENERATORS};
use crate::text::{koszul_sort, parse_word_sum, Atom};
use crate::Int;

/// Basis element `κ(J, I) · w_W` of the bicomplex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BiTerm {
    /// `I`.
    pub d: Face,
    /// `J`.
    pub s: Face,
    pub w: TaylorMonomial,
}

impl BiTerm {
    pub fn cell(&self) -> Cell {
        Cell { s: self.s, d: self.d }
    }

    /// `I ∪ J ∪ (∪W)`.
    pub fn multidegree(&self) -> Face {
        self.d.union(self.s).union(self.w.union())
    }

    /// `(2|I| + |J|, |W|)`.
    pub fn bidegree(&self) -> (usize, usize) {
        (2 * self.d.len() + self.s.len(), self.w.len())
    }

    fn text(&self, coeff: &Int) -> (String, Int) {
        let mut parts = Vec::new();
        if self.cell() != Cell::UNIT {
            parts.push(self.cell().to_string());
        }
        let (word, sign) = self.w.written();
        if !self.w.is_empty() {
            parts.push(word);
        }
        let text = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
        (text, coeff * sign)
    }
}

/// Integer combination of bicomplex terms.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BicomplexElement {
    terms: BTreeMap<BiTerm, Int>,
}

impl BicomplexElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (BiTerm, Int)>>(terms: I) -> Result<Self> {
        let mut e = Self::zero();
        for (t, x) in terms {
            let cells = t.d.union(t.s);
            let overlap = t.d.intersection(t.s).union(cells.intersection(t.w.union()));
            if !overlap.is_empty() {
                return Err(Error::OverlappingLabels(overlap));
            }
            e.add_term(t, x);
        }
        Ok(e)
    }

    pub fn from_cell_chain(c: &CellChain) -> Self {
        let mut e = Self::zero();
        for (cell, x) in &c.coeffs {
            e.add_term(
                BiTerm {
                    d: cell.d,
                    s: cell.s,
                    w: TaylorMonomial::unit(),
                },
                x.clone(),
            );
        }
        e
    }

    pub fn from_taylor_chain(c: &TaylorChain) -> Self {
        let mut e = Self::zero();
        for (w, x) in &c.coeffs {
            e.add_term(
                BiTerm {
                    d: Face::EMPTY,
                    s: Face::EMPTY,
                    w: w.clone(),
                },
                x.clone(),
            );
        }
        e
    }

    /// The Taylor chain, when every term has `I = J = ∅`.
    pub fn to_taylor_chain(&self) -> Option<TaylorChain> {
        if !self.has_empty_cell_part() {
            return None;
        }
        TaylorChain::from_words(self.terms.iter().map(|(t, x)| (t.w.clone(), x.clone()))).ok()
    }

    pub fn has_empty_cell_part(&self) -> bool {
        self.terms.keys().all(|t| t.d.is_empty() && t.s.is_empty())
    }

    pub fn add_term(&mut self, t: BiTerm, x: Int) {
        if x.sign() == num_bigint::Sign::NoSign {
            return;
        }
        let zero = {
            let v = self.terms.entry(t.clone()).or_default();
            *v += x;
            v.sign() == num_bigint::Sign::NoSign
        };
        if zero {
            self.terms.remove(&t);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BiTerm, &Int)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, x) in &other.terms {
            out.add_term(t.clone(), -x);
        }
        out
    }

    /// True when all terms share the multidegree and the bidegree.
    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|t| (t.multidegree(), t.bidegree()));
        match it.next() {
            None => true,
            Some(first) => it.all(|x| x == first),
        }
    }

    /// Largest `|J|` among the terms.
    pub fn circle_degree(&self) -> usize {
        self.terms.keys().map(|t| t.s.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for BicomplexElement {
    /// Words such as `D5*D6*w1234`; the exterior part in decreasing order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, Int)> = self.terms.iter().map(|(t, x)| t.text(x)).collect();
        write_signed_sum(f, terms.iter().map(|(s, x)| (s.clone(), x)))
    }
}

impl fmt::Debug for BicomplexElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for BicomplexElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for BicomplexElement {
    type Err = Error;

    /// Sums of words in `S_i`, `D_i` and `w_J` in any order, for example
    /// `(D5S6 + S5D6)w1234`. Circles and `w` letters are odd.
    fn from_str(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (coeff, word) in parse_word_sum(text)? {
            let (sorted, sign) = koszul_sort(
                &word,
                |a| match a {
                    Atom::S(v) | Atom::D(v) => (0u8, *v, Face::EMPTY),
                    Atom::W(f) => (1u8, 0, *f),
                },
                |a| a.is_odd(),
            );
            let mut t = BiTerm {
                d: Face::EMPTY,
                s: Face::EMPTY,
                w: TaylorMonomial::unit(),
            };
            let mut faces = Vec::new();
            for a in sorted {
                match a {
                    Atom::S(v) | Atom::D(v) if t.d.union(t.s).contains(v) => return Err(Error::DuplicateLabel(v)),
                    Atom::S(v) => t.s = t.s.with(v),
                    Atom::D(v) => t.d = t.d.with(v),
                    Atom::W(f) => faces.push(f),
                }
            }
            let Some((w, wsign)) = TaylorMonomial::normalise(&faces) else { continue };
            t.w = w;
            terms.push((t, coeff * sign * wsign));
        }
        BicomplexElement::from_terms(terms)
    }
}

fn parity(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `∂_v (I, J, W) = Σ_{i ∈ I} (-1)^{#{j ∈ J : j < i}} (I ∖ i, J ∪ i, W)`.
pub fn vertical_diff(e: &BicomplexElement) -> BicomplexElement {
    let mut out = BicomplexElement::zero();
    for (t, x) in &e.terms {
        for i in t.d.iter() {
            out.add_term(
                BiTerm {
                    d: t.d.without(i),
                    s: t.s.with(i),
                    w: t.w.clone(),
                },
                x * parity(t.s.count_below(i)),
            );
        }
    }
    out
}

/// `∂_h (I, J, W) = Σ ± (I ∖ (F ∖ ∪W), J, F ∧ W)` over missing faces
/// `F ∉ W` with `F ∖ ∪W ⊆ I`; the sign is the one of sorting `F ∧ W`.
pub fn horizontal_diff(k: &SimplicialComplex, e: &BicomplexElement) -> BicomplexElement {
    horizontal_with(&k.missing_faces(), e)
}

fn horizontal_with(mf: &[Face], e: &BicomplexElement) -> BicomplexElement {
    let mut out = BicomplexElement::zero();
    for (t, x) in &e.terms {
        let u = t.w.union();
        for &f in mf {
            let new = f.difference(u);
            if !new.is_subset(t.d) {
                continue;
            }
            if let Some((w, sign)) = t.w.prepend(f) {
                out.add_term(
                    BiTerm {
                        d: t.d.difference(new),
                        s: t.s,
                        w,
                    },
                    x * sign,
                );
            }
        }
    }
    out
}

/// Kind of a staircase step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    /// `η` with `∂_v η` equal to the previous element.
    SolveVertical,
    /// `∂_h` of the previous element.
    ApplyHorizontal,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZigzagStep {
    pub kind: StepKind,
    pub element: BicomplexElement,
}

/// The elements met along the staircase, starting after the input cycle.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct ZigzagTrace {
    pub steps: Vec<ZigzagStep>,
}

impl ZigzagTrace {
    /// Re-checks every staircase equation, starting from `input`.
    pub fn check(&self, k: &SimplicialComplex, input: &BicomplexElement) -> bool {
        let mf = k.missing_faces();
        let mut prev = input;
        let mut solved: Option<&BicomplexElement> = None;
        for step in &self.steps {
            let ok = match step.kind {
                StepKind::SolveVertical => vertical_diff(&step.element) == *prev,
                StepKind::ApplyHorizontal => {
                    solved.is_some_and(|eta| horizontal_with(&mf, eta) == step.element)
                }
            };
            if !ok {
                return false;
            }
            if step.kind == StepKind::SolveVertical {
                solved = Some(&step.element);
            } else {
                prev = &step.element;
            }
        }
        true
    }
}

/// Koszul block on `support` from `|J| = q - 1` to `|J| = q`.
struct KoszulBlock {
    cols: Vec<Face>,
    rows: HashMap<Face, usize>,
    matrix: SparseMatrix<Int>,
}

fn koszul_block(support: Face, q: usize) -> Result<KoszulBlock> {
    let cols: Vec<Face> = support.subsets_of_size(q - 1).collect();
    let rows: HashMap<Face, usize> = support.subsets_of_size(q).enumerate().map(|(i, f)| (f, i)).collect();
    let mut triplets = Vec::new();
    for (c, &j) in cols.iter().enumerate() {
        for i in support.difference(j).iter() {
            triplets.push((rows[&j.with(i)], c, Int::from(parity(j.count_below(i)))));
        }
    }
    let matrix = SparseMatrix::from_triplets(rows.len(), cols.len(), triplets)?;
    Ok(KoszulBlock { cols, rows, matrix })
}

/// Carries a cycle of the cellular chain complex of `Z_K` to a Taylor cycle
/// of the same class, up to sign: solve `∂_v η = c` inside each component of
/// fixed `W` and multidegree, push `c = ∂_h η`, and repeat until no discs or
/// circles remain.
pub fn koszul_to_taylor(k: &SimplicialComplex, z: &CellChain) -> Result<(TaylorChain, ZigzagTrace)> {
    if !z.lies_in(k) || !z.cellular_boundary().is_zero() {
        return Err(Error::NotACycle);
    }
    let mf = k.missing_faces();
    if mf.len() > MAX_TAYLOR_GENERATORS {
        return Err(Error::size("number of missing faces in the Taylor complex", MAX_TAYLOR_GENERATORS));
    }
    let mut current = BicomplexElement::from_cell_chain(z);
    let mut steps = Vec::new();
    let mut cache: HashMap<(Face, usize), KoszulBlock> = HashMap::new();
    let mut round = 0;
    while !current.has_empty_cell_part() {
        round += 1;
        let eta = solve_vertical(&current, &mut cache, round)?;
        let next = horizontal_with(&mf, &eta);
        steps.push(ZigzagStep {
            kind: StepKind::SolveVertical,
            element: eta,
        });
        steps.push(ZigzagStep {
            kind: StepKind::ApplyHorizontal,
            element: next.clone(),
        });
        current = next;
    }
    let out = current
        .to_taylor_chain()
        .ok_or_else(|| Error::Inconsistent("zigzag output is not homogeneous".into()))?;
    if !taylor_boundary(&mf, &out).is_zero() {
        return Err(Error::Inconsistent("zigzag output is not a Taylor cycle".into()));
    }
    Ok((out, ZigzagTrace { steps }))
}

fn solve_vertical(
    c: &BicomplexElement,
    cache: &mut HashMap<(Face, usize), KoszulBlock>,
    step: usize,
) -> Result<BicomplexElement> {
    let mut groups: BTreeMap<(TaylorMonomial, Face, usize), Vec<(Face, &Int)>> = BTreeMap::new();
    for (t, x) in &c.terms {
        groups
            .entry((t.w.clone(), t.d.union(t.s), t.s.len()))
            .or_default()
            .push((t.s, x));
    }
    let mut out = BicomplexElement::zero();
    for ((w, support, q), entries) in groups {
        if q == 0 {
            return Err(Error::SolveFailed { step });
        }
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((support, q)) {
            e.insert(koszul_block(support, q)?);
        }
        let block = &cache[&(support, q)];
        let mut b = vec![Int::from(0); block.rows.len()];
        for (s, x) in entries {
            b[block.rows[&s]] = x.clone();
        }
        let x = solve_integer(&block.matrix, &b)?.ok_or(Error::SolveFailed { step })?;
        for (j, v) in block.cols.iter().zip(x) {
            out.add_term(
                BiTerm {
                    d: support.difference(*j),
                    s: *j,
                    w: w.clone(),
                },
                v,
            );
        }
    }
    Ok(out)
}

/// True when `t1 - t2` is a boundary of the Taylor complex of `k`. Both
/// chains must be cycles.
pub fn classes_equal(k: &SimplicialComplex, t1: &TaylorChain, t2: &TaylorChain) -> Result<bool> {
    let mf = k.missing_faces();
    for t in [t1, t2] {
        if !taylor_boundary(&mf, t).is_zero() {
            return Err(Error::NotACycle);
        }
    }
    if t1.is_zero() || t2.is_zero() {
        let nonzero = if t1.is_zero() { t2 } else { t1 };
        return is_boundary(&mf, nonzero);
    }
    if t1.degree != t2.degree {
        return Err(Error::DimensionMismatch(format!(
            "Taylor cycles of degrees {} and {}",
            t1.degree, t2.degree
        )));
    }
    is_boundary(&mf, &t1.sub(t2))
}

fn is_boundary(mf: &[Face], z: &TaylorChain) -> Result<bool> {
    Ok(class_in_taylor(mf, z)?.iter().all(|(_, c)| c.is_boundary()))
}

/// True when `t1` is homologous to `t2` or to `-t2`.
pub fn classes_equal_up_to_sign(k: &SimplicialComplex, t1: &TaylorChain, t2: &TaylorChain) -> Result<bool> {
    Ok(classes_equal(k, t1, t2)? || classes_equal(k, t1, &t2.negated())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_complex;
    use crate::whitehead::WhiteheadExpr;

    fn el(s: &str) -> BicomplexElement {
        s.parse().unwrap()
    }

    #[test]
    fn differentials() {
        assert_eq!(vertical_diff(&el("D1")), el("S1"));
        let k = parse_complex("subst(bd(simplex(1,2,3)); bd(simplex(1,2,3)), pt, pt)").unwrap();
        assert_eq!(horizontal_diff(&k, &el("D1D2D3")), el("w123"));
        let e = el("D1D2D3D4S5 - 3 D4S5w123");
        assert_eq!(
            vertical_diff(&horizontal_diff(&k, &e)),
            horizontal_diff(&k, &vertical_diff(&e))
        );
        assert!(vertical_diff(&vertical_diff(&e)).is_zero());
        assert!(horizontal_diff(&k, &horizontal_diff(&k, &e)).is_zero());
        assert_eq!(el("D5D6w1234").to_string(), "D5*D6*w1234");
        assert_eq!(el("S6 w123 w145").to_string(), "-S6*w145^w123");
    }

    #[test]
    fn two_point_sphere() {
        let k = SimplicialComplex::from_facets(2, &[]).unwrap();
        let z: CellChain = "D1S2 + S1D2".parse().unwrap();
        let (t, trace) = koszul_to_taylor(&k, &z).unwrap();
        assert_eq!(t.coeffs.len(), 1);
        assert!(trace.check(&k, &BicomplexElement::from_cell_chain(&z)));
        assert_eq!(trace.steps.len(), 2);
    }

    #[test]
    fn table_row() {
        let k = parse_complex("subst(bd(simplex(1,2,3)); bd(simplex(1,2,3)), pt, pt)").unwrap();
        let w: WhiteheadExpr = "[[1,4,5],2]".parse().unwrap();
        let (t, trace) = koszul_to_taylor(&k, &w.hurewicz_chain().unwrap()).unwrap();
        assert!(trace.check(&k, &BicomplexElement::from_cell_chain(&w.hurewicz_chain().unwrap())));
        let expected: TaylorChain = "w245^w145".parse().unwrap();
        assert!(classes_equal_up_to_sign(&k, &t, &expected).unwrap());
        assert!(!classes_equal_up_to_sign(&k, &t, &"w345^w145".parse().unwrap()).unwrap());
        assert!(classes_equal(&k, &expected, &expected).unwrap());
    }
}
