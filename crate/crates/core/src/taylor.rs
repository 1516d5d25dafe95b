//! Taylor resolutions of monomial ideals and the Taylor complex of the face
//! coalgebra.
//!
//! Missing faces are used in generator order, the order of [`Face`]:
//! cardinality first, then lexicographic. Exterior words are stored with
//! their factors increasing in that order. The Taylor complex is graded by
//! total degree `2|S| - s`, where `S` is the union of the `s` factors, so
//! its differential lowers the degree by one and its homology is `H_*(Z_K)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::complexes::{reduced_homology_of_faces, Face, SimplicialComplex, Vertex};
use crate::error::{Error, Result};
use crate::exactalg::{Chain, ChainComplex, HomologyClass, HomologyGroup};
use crate::moment_angle::write_signed_sum;
use crate::text::{koszul_sort, parse_word_sum, Atom};
use crate::whitehead::WhiteheadExpr;
use crate::Int;

/// Largest number of missing faces accepted by the Taylor complex.
pub const MAX_TAYLOR_GENERATORS: usize = 20;
/// Largest number of generators accepted by [`cone_reconstruction`].
pub const MAX_CONE_GENERATORS: usize = 8;
/// Largest number of multidegrees scanned by [`verify_taylor_is_resolution`].
pub const MAX_MULTIDEGREES: usize = 1 << 16;

// ---------------------------------------------------------------------------
// exterior words

/// Exterior word `w_{J_1} ∧ ... ∧ w_{J_s}` with `J_1 < ... < J_s`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TaylorMonomial(Vec<Face>);

impl TaylorMonomial {
    /// The empty word, the unit of the Taylor complex.
    pub fn unit() -> Self {
        TaylorMonomial(Vec::new())
    }

    /// Normalises a word written in any order. Returns the sorted word and
    /// the sign of the reordering, or `None` when a factor repeats.
    pub fn normalise(factors: &[Face]) -> Option<(TaylorMonomial, i64)> {
        let (sorted, sign) = koszul_sort(factors, |f| *f, |_| true);
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return None;
        }
        Some((TaylorMonomial(sorted), sign))
    }

    pub fn from_sorted(factors: Vec<Face>) -> Result<Self> {
        if factors.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::invalid("exterior word factors must be strictly increasing"));
        }
        if factors.iter().any(|f| f.is_empty()) {
            return Err(Error::invalid("empty factor in an exterior word"));
        }
        Ok(TaylorMonomial(factors))
    }

    pub fn factors(&self) -> &[Face] {
        &self.0
    }

    /// Homological index `s`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Union of the factors.
    pub fn union(&self) -> Face {
        self.0.iter().fold(Face::EMPTY, |a, &f| a.union(f))
    }

    /// `2|S| - s`.
    pub fn total_degree(&self) -> i64 {
        2 * self.union().len() as i64 - self.len() as i64
    }

    /// `F ∧ self`, sorted, with its sign; `None` when `F` is already a factor.
    pub fn prepend(&self, f: Face) -> Option<(TaylorMonomial, i64)> {
        match self.0.binary_search(&f) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, f);
                Some((TaylorMonomial(v), if pos % 2 == 0 { 1 } else { -1 }))
            }
        }
    }

    /// The word with factors in decreasing order, as printed in chains, and
    /// the sign relating it to the stored word.
    pub fn written(&self) -> (String, i64) {
        let parts: Vec<String> = self.0.iter().rev().map(|&g| generator_name(g)).collect();
        let text = if parts.is_empty() { "1".to_string() } else { parts.join("^") };
        (text, self.reversal_sign())
    }

    /// Sign turning the stored (increasing) order into decreasing order.
    fn reversal_sign(&self) -> i64 {
        let s = self.len();
        if (s * s.saturating_sub(1) / 2).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// `w123` when every label is a digit, `w{10,11}` otherwise.
fn generator_name(f: Face) -> String {
    if f.iter().all(|v| v <= 9) {
        let digits: String = f.iter().map(|v| char::from(b'0' + v as u8)).collect();
        format!("w{digits}")
    } else {
        let parts: Vec<String> = f.iter().map(|v| v.to_string()).collect();
        format!("w{{{}}}", parts.join(","))
    }
}

impl fmt::Display for TaylorMonomial {
    /// Factors in the stored increasing order, e.g. `w123^w145`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|&g| generator_name(g)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

impl fmt::Debug for TaylorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for TaylorMonomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Integer combination of exterior words of one total degree.
pub type TaylorChain = Chain<TaylorMonomial, Int>;

impl Chain<TaylorMonomial, Int> {
    /// Chain from normalised words; all words must share `s` and `|S|`.
    pub fn from_words<I: IntoIterator<Item = (TaylorMonomial, Int)>>(terms: I) -> Result<TaylorChain> {
        let terms: Vec<(TaylorMonomial, Int)> = terms.into_iter().collect();
        let shape = |w: &TaylorMonomial| (w.len(), w.union().len());
        if let Some((first, _)) = terms.first() {
            if terms.iter().any(|(w, _)| shape(w) != shape(first)) {
                return Err(Error::invalid("exterior words of different shapes in one chain"));
            }
        }
        let degree = terms.first().map_or(0, |(w, _)| w.total_degree());
        Ok(Chain::from_terms(degree, terms))
    }

    /// The single word `w_F`.
    pub fn generator(f: Face) -> TaylorChain {
        Chain::from_terms(2 * f.len() as i64 - 1, [(TaylorMonomial(vec![f]), Int::from(1))])
    }

    /// Exterior product `self ∧ other`; words with a repeated factor vanish.
    pub fn wedge(&self, other: &TaylorChain) -> Result<TaylorChain> {
        let mut terms: BTreeMap<TaylorMonomial, Int> = BTreeMap::new();
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                let word: Vec<Face> = a.0.iter().chain(b.0.iter()).copied().collect();
                if let Some((w, sign)) = TaylorMonomial::normalise(&word) {
                    *terms.entry(w).or_default() += x * y * sign;
                }
            }
        }
        Self::from_words(terms.into_iter().filter(|(_, v)| v.sign() != num_bigint::Sign::NoSign))
    }

    /// Homological index `s` of the terms (0 for the zero chain).
    pub fn index(&self) -> usize {
        self.coeffs.keys().next().map_or(0, TaylorMonomial::len)
    }

    /// Splits the chain by the union of the factors.
    pub fn split_by_union(&self) -> BTreeMap<Face, TaylorChain> {
        let mut out: BTreeMap<Face, TaylorChain> = BTreeMap::new();
        for (w, x) in &self.coeffs {
            out.entry(w.union())
                .or_insert_with(|| Chain::zero(self.degree))
                .add_term(w.clone(), x.clone());
        }
        out
    }

    /// `-self`.
    pub fn negated(&self) -> TaylorChain {
        self.scaled(&Int::from(-1))
    }
}

impl fmt::Display for Chain<TaylorMonomial, Int> {
    /// Fully expanded sum with factors written in decreasing generator order,
    /// so that the smallest generator is the rightmost factor:
    /// `w145^w123 + w245^w123`. The zero chain is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, Int)> = self
            .coeffs
            .iter()
            .map(|(w, x)| {
                let (word, sign) = w.written();
                (word, x * sign)
            })
            .collect();
        write_signed_sum(f, terms.iter().map(|(s, x)| (s.clone(), x)))
    }
}

impl std::str::FromStr for Chain<TaylorMonomial, Int> {
    type Err = Error;

    /// Accepts sums of words in `w_J` letters joined by `^`, `*` or nothing,
    /// with parentheses, e.g. `(w145+w245+w345)^w123`.
    fn from_str(text: &str) -> Result<TaylorChain> {
        let mut terms: BTreeMap<TaylorMonomial, Int> = BTreeMap::new();
        for (coeff, word) in parse_word_sum(text)? {
            let mut faces = Vec::with_capacity(word.len());
            for a in word {
                match a {
                    Atom::W(f) if !f.is_empty() => faces.push(f),
                    _ => return Err(Error::invalid("Taylor chains contain only w letters")),
                }
            }
            if let Some((w, sign)) = TaylorMonomial::normalise(&faces) {
                *terms.entry(w).or_default() += coeff * sign;
            }
        }
        Chain::from_words(terms.into_iter().filter(|(_, v)| v.sign() != num_bigint::Sign::NoSign))
    }
}

impl Serialize for Chain<TaylorMonomial, Int> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

// ---------------------------------------------------------------------------
// the Taylor complex of the face coalgebra

/// `∂W = Σ F ∧ W` over generators `F ∉ W` inside the union of `W`.
pub fn taylor_boundary_word(generators: &[Face], w: &TaylorMonomial) -> Vec<(TaylorMonomial, Int)> {
    let s = w.union();
    generators
        .iter()
        .filter(|f| f.is_subset(s))
        .filter_map(|&f| w.prepend(f))
        .map(|(u, sign)| (u, Int::from(sign)))
        .collect()
}

/// Applies the Taylor differential to a chain.
pub fn taylor_boundary(generators: &[Face], c: &TaylorChain) -> TaylorChain {
    let mut out = Chain::zero(c.degree - 1);
    for (w, x) in &c.coeffs {
        for (u, sign) in taylor_boundary_word(generators, w) {
            out.add_term(u, x * sign);
        }
    }
    out
}

/// The Taylor complex of `C(x_J : J ∈ generators)`, split into blocks by the
/// union `S` of the factors.
#[derive(Clone, Debug)]
pub struct TaylorFaceComplex {
    generators: Vec<Face>,
    blocks: BTreeMap<Face, ChainComplex<TaylorMonomial, Int>>,
}

impl TaylorFaceComplex {
    /// Builds the complex for square-free generators, given as vertex sets.
    pub fn from_generators(mut generators: Vec<Face>) -> Result<Self> {
        if generators.len() > MAX_TAYLOR_GENERATORS {
            return Err(Error::size("number of missing faces in the Taylor complex", MAX_TAYLOR_GENERATORS));
        }
        generators.sort();
        generators.dedup();
        if generators.iter().any(|g| g.is_empty()) {
            return Err(Error::invalid("empty generator"));
        }
        let n = generators.len();
        let mut unions = vec![Face::EMPTY; 1 << n];
        let mut groups: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
        for mask in 0usize..1 << n {
            if mask > 0 {
                let low = mask.trailing_zeros() as usize;
                unions[mask] = unions[mask & (mask - 1)].union(generators[low]);
            }
            groups.entry(unions[mask]).or_default().push(mask);
        }
        let blocks = groups
            .into_par_iter()
            .map(|(s, masks)| {
                let mut bases: BTreeMap<i64, Vec<TaylorMonomial>> = BTreeMap::new();
                for mask in masks {
                    let w = TaylorMonomial((0..n).filter(|i| mask >> i & 1 == 1).map(|i| generators[i]).collect());
                    bases.entry(w.total_degree()).or_default().push(w);
                }
                for b in bases.values_mut() {
                    b.sort();
                }
                ChainComplex::from_fn(bases, |w, _| taylor_boundary_word(&generators, w)).map(|c| (s, c))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(TaylorFaceComplex { generators, blocks })
    }

    /// Generators in generator order.
    pub fn generators(&self) -> &[Face] {
        &self.generators
    }

    /// Block with union `s`, if any word has that union.
    pub fn block(&self, s: Face) -> Option<&ChainComplex<TaylorMonomial, Int>> {
        self.blocks.get(&s)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (Face, &ChainComplex<TaylorMonomial, Int>)> {
        self.blocks.iter().map(|(s, c)| (*s, c))
    }

    /// Number of words with `s` factors.
    pub fn rank_in_index(&self, s: usize) -> usize {
        self.blocks
            .iter()
            .map(|(u, c)| c.rank_in(2 * u.len() as i64 - s as i64))
            .sum()
    }

    /// All words with `s` factors, in generator order.
    pub fn words_in_index(&self, s: usize) -> Vec<TaylorMonomial> {
        let mut out: Vec<TaylorMonomial> = self
            .blocks
            .iter()
            .flat_map(|(u, c)| c.basis(2 * u.len() as i64 - s as i64).to_vec())
            .collect();
        out.sort();
        out
    }

    /// All words of total degree `d`.
    pub fn words_in_degree(&self, d: i64) -> Vec<TaylorMonomial> {
        self.blocks.values().flat_map(|c| c.basis(d).to_vec()).collect()
    }

    pub fn boundary(&self, c: &TaylorChain) -> TaylorChain {
        taylor_boundary(&self.generators, c)
    }

    pub fn is_cycle(&self, c: &TaylorChain) -> bool {
        self.boundary(c).is_zero()
    }

    /// Homology per union `S` and index `s`, nonzero groups only.
    pub fn homology_by_block(&self) -> BTreeMap<(Face, usize), HomologyGroup<Int>> {
        self.blocks
            .par_iter()
            .flat_map_iter(|(u, c)| {
                let two_s = 2 * u.len() as i64;
                c.homology_all()
                    .into_iter()
                    .filter(|(_, g)| !g.is_zero())
                    .map(move |(d, g)| ((*u, (two_s - d) as usize), g))
            })
            .collect()
    }

    /// Homology by total degree, nonzero groups only (degree 0 included).
    pub fn homology(&self) -> BTreeMap<i64, HomologyGroup<Int>> {
        let mut out: BTreeMap<i64, HomologyGroup<Int>> = BTreeMap::new();
        for ((u, s), g) in self.homology_by_block() {
            let d = 2 * u.len() as i64 - s as i64;
            let cur = out.remove(&d).unwrap_or_else(HomologyGroup::zero);
            out.insert(d, cur.direct_sum(&g));
        }
        out
    }

    /// Class of a cycle, block by block.
    pub fn class_in_homology(&self, z: &TaylorChain) -> Result<Vec<(Face, HomologyClass<Int>)>> {
        z.split_by_union()
            .into_iter()
            .map(|(u, part)| {
                let block = self
                    .blocks
                    .get(&u)
                    .ok_or_else(|| Error::UnknownLabel(format!("words with union {u}"), z.degree))?;
                block.class_in_homology(&part).map(|c| (u, c))
            })
            .collect()
    }

    /// True when the cycle `z` is a boundary.
    pub fn is_boundary(&self, z: &TaylorChain) -> Result<bool> {
        Ok(self.class_in_homology(z)?.iter().all(|(_, c)| c.is_boundary()))
    }
}

/// The block of the Taylor complex spanned by words with union `s`.
pub fn taylor_block(generators: &[Face], s: Face) -> Result<ChainComplex<TaylorMonomial, Int>> {
    let mut inside: Vec<Face> = generators.iter().copied().filter(|g| g.is_subset(s)).collect();
    inside.sort();
    inside.dedup();
    if inside.len() > MAX_TAYLOR_GENERATORS {
        return Err(Error::size("number of missing faces in the Taylor complex", MAX_TAYLOR_GENERATORS));
    }
    let n = inside.len();
    let mut bases: BTreeMap<i64, Vec<TaylorMonomial>> = BTreeMap::new();
    for mask in 0usize..1 << n {
        let w = TaylorMonomial((0..n).filter(|i| mask >> i & 1 == 1).map(|i| inside[i]).collect());
        if w.union() == s {
            bases.entry(w.total_degree()).or_default().push(w);
        }
    }
    for b in bases.values_mut() {
        b.sort();
    }
    ChainComplex::from_fn(bases, |w, _| taylor_boundary_word(&inside, w))
}

/// Class of a Taylor cycle, computed only on the blocks it meets.
pub fn class_in_taylor(generators: &[Face], z: &TaylorChain) -> Result<Vec<(Face, HomologyClass<Int>)>> {
    if !taylor_boundary(generators, z).is_zero() {
        return Err(Error::NotACycle);
    }
    z.split_by_union()
        .into_iter()
        .map(|(u, part)| taylor_block(generators, u)?.class_in_homology(&part).map(|c| (u, c)))
        .collect()
}

/// The Taylor complex of the face coalgebra of `k`.
pub fn taylor_face_complex(k: &SimplicialComplex) -> Result<TaylorFaceComplex> {
    TaylorFaceComplex::from_generators(k.missing_faces())
}

/// Homology of the Taylor complex by total degree `2|S| - s`. It equals
/// `H_*(Z_K)`, with `Z` in degree 0.
pub fn taylor_homology(k: &SimplicialComplex) -> Result<BTreeMap<i64, HomologyGroup<Int>>> {
    Ok(taylor_face_complex(k)?.homology())
}

/// The closed-form Taylor cycle of a nested product
/// `[[...[I_1], I_2 ...], I_n]`: the wedge over `k = 1..n` of the sums of
/// `w_J` over missing faces `J` with `J ∖ (I_1 ∪ ... ∪ I_{n-k}) = I_{n-k+1}`.
/// The rightmost factor is `w_{I_1}`.
pub fn nested_taylor_cycle(w: &WhiteheadExpr, k: &SimplicialComplex) -> Result<TaylorChain> {
    let levels = w
        .nested_levels()
        .ok_or_else(|| Error::invalid(format!("{w} is not a nested product")))?;
    let mf = k.missing_faces();
    if mf.len() > MAX_TAYLOR_GENERATORS {
        return Err(Error::size("number of missing faces in the Taylor complex", MAX_TAYLOR_GENERATORS));
    }
    let n = levels.len();
    let mut out = Chain::from_words([(TaylorMonomial::unit(), Int::from(1))])?;
    // right to left, so that every partial product is homogeneous
    for kk in (1..=n).rev() {
        let below = levels[..n - kk].iter().fold(Face::EMPTY, |a, &f| a.union(f));
        let target = levels[n - kk];
        let factor: Vec<(TaylorMonomial, Int)> = mf
            .iter()
            .filter(|j| j.difference(below) == target)
            .map(|&j| (TaylorMonomial(vec![j]), Int::from(1)))
            .collect();
        if factor.is_empty() {
            return Err(Error::EmptyTaylorFactor { level: n - kk + 1 });
        }
        out = Chain::from_words(factor)?.wedge(&out)?;
    }
    if out.is_zero() || !taylor_boundary(&mf, &out).is_zero() {
        return Err(Error::Inconsistent(format!(
            "the closed-form Taylor chain of {w} is not a nonzero cycle"
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// monomial ideals and the module resolution

/// Monomial ideal in `nvars` variables, given by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialIdeal {
    nvars: usize,
    generators: Vec<Vec<u32>>,
}

impl MonomialIdeal {
    /// Checks lengths, distinctness and minimality (no generator divides
    /// another).
    pub fn new(nvars: usize, generators: Vec<Vec<u32>>) -> Result<Self> {
        if generators.len() > 63 {
            return Err(Error::size("number of ideal generators", 63));
        }
        for g in &generators {
            if g.len() != nvars {
                return Err(Error::DimensionMismatch(format!(
                    "exponent vector of length {} in {nvars} variables",
                    g.len()
                )));
            }
        }
        for (a, g) in generators.iter().enumerate() {
            for (b, h) in generators.iter().enumerate() {
                if a != b && divides(g, h) {
                    return Err(Error::invalid(format!(
                        "generator {} divides generator {}",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(MonomialIdeal { nvars, generators })
    }

    /// Square-free ideal with one generator per vertex set; vertex `v` is
    /// variable `v - 1`.
    pub fn square_free(nvars: usize, sets: &[Face]) -> Result<Self> {
        let mut gens = Vec::with_capacity(sets.len());
        for &s in sets {
            if s.max().is_some_and(|v| v as usize > nvars) {
                return Err(Error::LabelOutOfRange {
                    label: s.max().unwrap_or(0) as i64,
                    max: nvars as u32,
                });
            }
            gens.push((1..=nvars as Vertex).map(|v| u32::from(s.contains(v))).collect());
        }
        Self::new(nvars, gens)
    }

    /// The Stanley–Reisner ideal of `k`, generated by its missing faces in
    /// generator order, in `max_label` variables.
    pub fn stanley_reisner(k: &SimplicialComplex) -> Result<Self> {
        Self::square_free(k.max_label() as usize, &k.missing_faces())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.generators
    }

    pub fn is_square_free(&self) -> bool {
        self.generators.iter().all(|g| g.iter().all(|&e| e <= 1))
    }

    /// Supports of the generators, as vertex sets on labels `1..=nvars`.
    pub fn supports(&self) -> Vec<Face> {
        self.generators
            .iter()
            .map(|g| Face::from_bits(g.iter().enumerate().filter(|(_, &e)| e > 0).fold(0, |b, (i, _)| b | 1 << i)))
            .collect()
    }

    /// `lcm` of the generators indexed by `j` (labels `1..=t`).
    pub fn lcm_of(&self, j: Face) -> Vec<u32> {
        lcm_over(&self.generators, j, self.nvars)
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm_over(gens: &[Vec<u32>], j: Face, nvars: usize) -> Vec<u32> {
    let mut out = vec![0; nvars];
    for i in j.iter() {
        for (o, &e) in out.iter_mut().zip(&gens[i as usize - 1]) {
            *o = (*o).max(e);
        }
    }
    out
}

fn quotient(a: &[u32], b: &[u32]) -> Option<Vec<u32>> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

/// Polynomial with integer coefficients, keyed by exponent vector.
pub type Poly = BTreeMap<Vec<u32>, Int>;

/// Matrix of polynomials between free modules with bases indexed by subsets
/// of generator numbers `1..=t`; keys are `(target, source)`.
pub type PolyMatrix = BTreeMap<(Face, Face), Poly>;

fn monomial(exp: Vec<u32>, c: i64) -> Poly {
    BTreeMap::from([(exp, Int::from(c))])
}

fn poly_add_into(acc: &mut Poly, p: &Poly) {
    for (e, c) in p {
        let v = acc.entry(e.clone()).or_default();
        *v += c;
        if v.sign() == num_bigint::Sign::NoSign {
            acc.remove(e);
        }
    }
}

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::new();
    for (a, x) in p {
        for (b, y) in q {
            let e: Vec<u32> = a.iter().zip(b).map(|(u, v)| u + v).collect();
            poly_add_into(&mut out, &BTreeMap::from([(e, x * y)]));
        }
    }
    out
}

fn matrix_add_into(acc: &mut PolyMatrix, key: (Face, Face), p: &Poly) {
    let entry = acc.entry(key).or_default();
    poly_add_into(entry, p);
    if entry.is_empty() {
        acc.remove(&key);
    }
}

fn matrix_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let mut by_row: BTreeMap<Face, Vec<(Face, &Poly)>> = BTreeMap::new();
    for ((r, c), p) in b {
        by_row.entry(*r).or_default().push((*c, p));
    }
    let mut out = PolyMatrix::new();
    for ((r, mid), p) in a {
        for (c, q) in by_row.get(mid).into_iter().flatten() {
            matrix_add_into(&mut out, (*r, *c), &poly_mul(p, q));
        }
    }
    out
}

fn sign_at(j: Face, v: Vertex) -> i64 {
    if j.count_below(v).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The Taylor differential `d(e_J) = Σ sign(j, J) (m_J / m_{J∖j}) e_{J∖j}`
/// over all `J ⊆ {1..t}` as a polynomial matrix.
pub fn taylor_module_differential(gens: &[Vec<u32>], nvars: usize) -> PolyMatrix {
    let t = gens.len();
    let mut out = PolyMatrix::new();
    for j in Face::range(t as Vertex).subsets() {
        let mj = lcm_over(gens, j, nvars);
        for v in j.iter() {
            let rest = j.without(v);
            let q = quotient(&mj, &lcm_over(gens, rest, nvars)).expect("lcm of a subset divides");
            out.insert((rest, j), monomial(q, sign_at(j, v)));
        }
    }
    out
}

/// The strand of the Taylor resolution in multidegree `beta`: the basis in
/// index `s` is `x^{β - m_J} e_J` with `|J| = s` and `m_J | β`.
pub fn taylor_module_resolution(ideal: &MonomialIdeal, beta: &[u32]) -> Result<ChainComplex<Face, Int>> {
    if beta.len() != ideal.nvars {
        return Err(Error::DimensionMismatch(format!(
            "multidegree of length {} in {} variables",
            beta.len(),
            ideal.nvars
        )));
    }
    let diff = taylor_module_differential(&ideal.generators, ideal.nvars);
    strand(&ideal.generators, ideal.nvars, &diff, beta)
}

fn strand(gens: &[Vec<u32>], nvars: usize, diff: &PolyMatrix, beta: &[u32]) -> Result<ChainComplex<Face, Int>> {
    let t = gens.len() as Vertex;
    let mut bases: BTreeMap<i64, Vec<Face>> = BTreeMap::new();
    let mut shift: BTreeMap<Face, Vec<u32>> = BTreeMap::new();
    for j in Face::range(t).subsets() {
        if let Some(q) = quotient(beta, &lcm_over(gens, j, nvars)) {
            bases.entry(j.len() as i64).or_default().push(j);
            shift.insert(j, q);
        }
    }
    for b in bases.values_mut() {
        b.sort();
    }
    let mut cols: BTreeMap<Face, Vec<(Face, &Poly)>> = BTreeMap::new();
    for ((r, c), p) in diff {
        cols.entry(*c).or_default().push((*r, p));
    }
    ChainComplex::from_fn(bases, |j, _| {
        let mut out = Vec::new();
        for (r, p) in cols.get(j).into_iter().flatten() {
            let Some(target) = shift.get(r) else { continue };
            // x^{β-m_J} · p lands on x^{β-m_r} e_r exactly for the matching term
            for (e, c) in p.iter() {
                let e: Vec<u32> = e.iter().zip(&shift[j]).map(|(a, b)| a + b).collect();
                if &e == target {
                    out.push((*r, c.clone()));
                }
            }
        }
        out
    })
}

/// Outcome of [`verify_taylor_is_resolution`].
#[derive(Clone, Debug, Serialize)]
pub struct ResolutionReport {
    pub generators: usize,
    pub multidegrees_checked: usize,
    /// Multidegrees where the strand has homology in positive index, or the
    /// wrong cokernel in index 0.
    pub module_failures: Vec<Vec<u32>>,
    /// Subsets compared in the face version (square-free ideals only).
    pub subsets_checked: usize,
    /// `(S, s)` where the Taylor block disagrees with `H̃_{|S|-s-1}(K_S)`.
    pub face_failures: Vec<(Face, usize)>,
    pub exact: bool,
}

/// Checks that the Taylor complex is a resolution: every multidegree strand
/// up to `bound` is exact in positive index with cokernel `Z` exactly when
/// `β` is outside the ideal. Without a bound, square-free ideals are checked
/// in all square-free multidegrees and other ideals below the lcm of all
/// generators. For square-free ideals the comodule version is checked too:
/// the block `(S, s)` has the homology of `H̃_{|S|-s-1}(K_S)`, torsion
/// included, where `K` is the complex of sets containing no generator.
pub fn verify_taylor_is_resolution(ideal: &MonomialIdeal, bound: Option<&[u32]>) -> Result<ResolutionReport> {
    if ideal.generators.len() > MAX_TAYLOR_GENERATORS {
        return Err(Error::size("number of ideal generators", MAX_TAYLOR_GENERATORS));
    }
    let top: Vec<u32> = match bound {
        Some(b) if b.len() != ideal.nvars => {
            return Err(Error::DimensionMismatch("truncation bound has the wrong length".into()))
        }
        Some(b) => b.to_vec(),
        None if ideal.is_square_free() => vec![1; ideal.nvars],
        None => lcm_over(&ideal.generators, Face::range(ideal.generators.len() as Vertex), ideal.nvars),
    };
    let count = top.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e as usize + 1));
    if count.is_none_or(|c| c > MAX_MULTIDEGREES) {
        return Err(Error::size("number of multidegrees to scan", MAX_MULTIDEGREES));
    }
    let diff = taylor_module_differential(&ideal.generators, ideal.nvars);
    let betas = multidegrees_below(&top);
    let module_failures: Vec<Vec<u32>> = betas
        .par_iter()
        .filter_map(|beta| {
            let ok = strand(&ideal.generators, ideal.nvars, &diff, beta).map(|c| {
                let h = c.homology_all();
                let in_ideal = ideal.generators.iter().any(|g| divides(g, beta));
                let h0 = h.get(&0).cloned().unwrap_or_else(HomologyGroup::zero);
                let h0_ok = if in_ideal { h0.is_zero() } else { h0 == HomologyGroup::free(1) };
                h0_ok && h.iter().all(|(d, g)| *d == 0 || g.is_zero())
            });
            (!matches!(ok, Ok(true))).then(|| beta.clone())
        })
        .collect();

    let (subsets_checked, face_failures) = if ideal.is_square_free() {
        face_version(ideal)?
    } else {
        (0, Vec::new())
    };
    Ok(ResolutionReport {
        generators: ideal.generators.len(),
        multidegrees_checked: betas.len(),
        exact: module_failures.is_empty() && face_failures.is_empty(),
        module_failures,
        subsets_checked,
        face_failures,
    })
}

fn multidegrees_below(top: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &e in top {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=e).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Compares Taylor blocks with reduced homology of full subcomplexes of the
/// complex whose minimal non-faces are the generator supports. All subsets
/// are scanned when there are at most 12 variables, otherwise only unions of
/// generators.
fn face_version(ideal: &MonomialIdeal) -> Result<(usize, Vec<(Face, usize)>)> {
    let gens = ideal.supports();
    let taylor = TaylorFaceComplex::from_generators(gens.clone())?;
    let by_block = taylor.homology_by_block();
    let ground = Face::range(ideal.nvars as Vertex);
    let subsets: Vec<Face> = if ideal.nvars <= 12 {
        ground.subsets().collect()
    } else {
        taylor.blocks().map(|(s, _)| s).collect()
    };
    let failures: Vec<Vec<(Face, usize)>> = subsets
        .par_iter()
        .map(|&s| {
            let faces: Vec<Face> = s.subsets().filter(|f| !gens.iter().any(|g| g.is_subset(*f))).collect();
            let h = reduced_homology_of_faces(&faces)?;
            let mut bad = Vec::new();
            for idx in 0..=gens.len() {
                let q = s.len() as i64 - idx as i64 - 1;
                let expect = h.get(&q).cloned().unwrap_or_else(HomologyGroup::zero);
                let got = by_block.get(&(s, idx)).cloned().unwrap_or_else(HomologyGroup::zero);
                if expect != got {
                    bad.push((s, idx));
                }
            }
            Ok(bad)
        })
        .collect::<Result<_>>()?;
    Ok((subsets.len(), failures.into_iter().flatten().collect()))
}

// ---------------------------------------------------------------------------
// cone reconstruction

/// One step of [`cone_reconstruction`]: `T(m_1..m_t)` rebuilt as the cone of
/// `φ̃ : T(n_1..n_{t-1}) → T(m_1..m_{t-1})`.
#[derive(Clone, Debug, Serialize)]
pub struct ConeStep {
    pub generators: usize,
    /// `d φ̃ = φ̃ d̄`.
    pub chain_map: bool,
    /// The cone differential transported by `ψ` equals the Taylor differential.
    pub matches_direct: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    /// `ψ(e_J) = ẽ_J`, `ψ(ē_J) = (-1)^{|J|} ẽ_{J ∪ t}`.
    pub sign_pattern: String,
    /// Steps in the order they were checked, innermost first.
    pub steps: Vec<ConeStep>,
    pub matches: bool,
}

/// Rebuilds the Taylor resolution recursively as iterated cones with
/// `n_i = m_i / gcd(m_i, m_t)` and compares each cone, transported by `ψ`,
/// with the directly defined differential.
pub fn cone_reconstruction(ideal: &MonomialIdeal) -> Result<ConeReport> {
    if ideal.generators.len() > MAX_CONE_GENERATORS {
        return Err(Error::size("number of generators for the cone reconstruction", MAX_CONE_GENERATORS));
    }
    let mut steps = Vec::new();
    cone_rec(&ideal.generators, ideal.nvars, &mut steps);
    Ok(ConeReport {
        sign_pattern: "psi(e_J) = e~_J, psi(ebar_J) = (-1)^|J| e~_{J+t}".into(),
        matches: steps.iter().all(|s| s.chain_map && s.matches_direct),
        steps,
    })
}

fn cone_rec(gens: &[Vec<u32>], nvars: usize, steps: &mut Vec<ConeStep>) -> PolyMatrix {
    let t = gens.len();
    if t == 0 {
        return PolyMatrix::new();
    }
    let last = &gens[t - 1];
    let rest = &gens[..t - 1];
    let ns: Vec<Vec<u32>> = rest
        .iter()
        .map(|m| m.iter().zip(last).map(|(a, b)| a - a.min(b)).collect())
        .collect();
    let base = cone_rec(rest, nvars, steps);
    let bar = cone_rec(&ns, nvars, steps);
    let tv = t as Vertex;

    let mut phi = PolyMatrix::new();
    for j in Face::range(tv - 1).subsets() {
        let q = quotient(&lcm_over(gens, j.with(tv), nvars), &lcm_over(gens, j, nvars)).expect("divides");
        phi.insert((j, j), monomial(q, 1));
    }
    let chain_map = matrix_mul(&base, &phi) == matrix_mul(&phi, &bar);

    let mut cone = base.clone();
    for (&(r, c), p) in &phi {
        // ψ d_C ψ^{-1} on ẽ_{c ∪ t} = (-1)^{|c|} ψ(φ̃ ē_c - d̄ ē_c)
        let s = if c.len() % 2 == 0 { 1 } else { -1 };
        matrix_add_into(&mut cone, (r, c.with(tv)), &poly_mul(p, &monomial(vec![0; nvars], s)));
    }
    for (&(r, c), p) in &bar {
        let s = -(if c.len() % 2 == 0 { 1 } else { -1 }) * (if r.len() % 2 == 0 { 1 } else { -1 });
        matrix_add_into(&mut cone, (r.with(tv), c.with(tv)), &poly_mul(p, &monomial(vec![0; nvars], s)));
    }
    let direct = taylor_module_differential(gens, nvars);
    steps.push(ConeStep {
        generators: t,
        chain_map,
        matches_direct: cone == direct,
    });
    cone
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment_angle::{reduced, zk_homology};

    fn fig1() -> SimplicialComplex {
        crate::text::parse_complex("subst(bd(simplex(1,2,3)); bd(simplex(1,2,3)), pt, pt)").unwrap()
    }

    fn chain(s: &str) -> TaylorChain {
        s.parse().unwrap()
    }

    #[test]
    fn words_and_text() {
        let c = chain("(w145+w245+w345)^w123");
        assert_eq!(c.to_string(), "w145^w123 + w245^w123 + w345^w123");
        assert_eq!(c.degree, 8);
        assert_eq!(chain("w123^w145"), chain("-w145^w123"));
        assert!(chain("w12^w12").is_zero());
        assert_eq!(chain("w{10,11}").to_string(), "w{10,11}");
        let w = TaylorMonomial::from_sorted(vec![Face::of(&[1, 4, 5]), Face::of(&[2, 4, 5])]).unwrap();
        assert_eq!(w.total_degree(), 6);
        assert!("w12 + w123^w124".parse::<TaylorChain>().is_err());
    }

    #[test]
    fn wedge_example_complex() {
        let t = taylor_face_complex(&fig1()).unwrap();
        let ranks: Vec<usize> = (0..=4).map(|s| t.rank_in_index(s)).collect();
        assert_eq!(ranks, vec![1, 4, 6, 4, 1]);
        assert_eq!(
            t.boundary(&chain("w123^w145")),
            chain("w123^w145^w245 + w123^w145^w345")
        );
        assert!(t.boundary(&chain("w145^w245")).is_zero());
        assert_eq!(
            t.boundary(&chain("w123^w245^w345")),
            chain("-w123^w145^w245^w345")
        );
        let h = t.homology();
        let zk = zk_homology(&fig1()).unwrap();
        assert_eq!(h, zk);
        assert_eq!(reduced(&h).keys().copied().collect::<Vec<_>>(), vec![5, 6, 7, 8]);
    }

    #[test]
    fn closed_form_cycles() {
        let k = fig1();
        let w: WhiteheadExpr = "[[1,2,3],4,5]".parse().unwrap();
        assert_eq!(
            nested_taylor_cycle(&w, &k).unwrap().to_string(),
            "w145^w123 + w245^w123 + w345^w123"
        );
        let w: WhiteheadExpr = "[[[1,4,5],2],3]".parse().unwrap();
        assert_eq!(nested_taylor_cycle(&w, &k).unwrap(), chain("(w123+w345)^w245^w145"));
        let w: WhiteheadExpr = "[[1,2],3]".parse().unwrap();
        assert!(matches!(nested_taylor_cycle(&w, &k), Err(Error::EmptyTaylorFactor { .. })));
    }

    #[test]
    fn module_resolution() {
        let ideal = MonomialIdeal::stanley_reisner(&fig1()).unwrap();
        let full = taylor_module_resolution(&ideal, &[1, 1, 1, 1, 1]).unwrap();
        let ranks: Vec<usize> = (0..=4).map(|s| full.rank_in(s)).collect();
        assert_eq!(ranks, vec![1, 4, 6, 4, 1]);
        let report = verify_taylor_is_resolution(&ideal, None).unwrap();
        assert!(report.exact, "{report:?}");
        assert_eq!(report.subsets_checked, 32);
        let general = MonomialIdeal::new(2, vec![vec![2, 0], vec![1, 1], vec![0, 3]]).unwrap();
        assert!(verify_taylor_is_resolution(&general, None).unwrap().exact);
        assert!(MonomialIdeal::new(2, vec![vec![1, 0], vec![1, 1]]).is_err());
    }

    #[test]
    fn cones() {
        let ideal = MonomialIdeal::new(3, vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let r = cone_reconstruction(&ideal).unwrap();
        assert!(r.matches, "{r:?}");
        let ideal = MonomialIdeal::stanley_reisner(&fig1()).unwrap();
        assert!(cone_reconstruction(&ideal).unwrap().matches);
        let general = MonomialIdeal::new(3, vec![vec![2, 1, 0], vec![0, 2, 1], vec![1, 0, 3]]).unwrap();
        assert!(cone_reconstruction(&general).unwrap().matches);
    }
}
