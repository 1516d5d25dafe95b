use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::smith::{invariant_factors, smith_normal_form};
use super::{Scalar, SparseMatrix};
use crate::error::{Error, Result};
use crate::Int;

/// A finitely generated abelian group `Z^rank + sum Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomologyGroup<T: Scalar = Int> {
    pub rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<T>,
}

impl<T: Scalar> HomologyGroup<T> {
    pub fn zero() -> Self {
        HomologyGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        HomologyGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Direct sum, with the torsion part brought back to invariant-factor form.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let all: Vec<T> = self.torsion.iter().chain(other.torsion.iter()).cloned().collect();
        let n = all.len();
        let diag = SparseMatrix::from_triplets(n, n, all.into_iter().enumerate().map(|(i, t)| (i, i, t)))
            .expect("square diagonal");
        let torsion = invariant_factors(&diag).into_iter().filter(|t| !t.is_one()).collect();
        HomologyGroup {
            rank: self.rank + other.rank,
            torsion,
        }
    }
}

impl<T: Scalar> Serialize for HomologyGroup<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let torsion: Vec<String> = self.torsion.iter().map(|t| t.to_string()).collect();
        let mut st = s.serialize_struct("HomologyGroup", 2)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("torsion", &torsion)?;
        st.end()
    }
}

impl<T: Scalar> std::fmt::Display for HomologyGroup<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.rank)
            });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A homogeneous chain: sparse integer combination of basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain<L: Ord, T: Scalar = Int> {
    pub degree: i64,
    pub coeffs: BTreeMap<L, T>,
}

impl<L: Ord + Clone, T: Scalar> Chain<L, T> {
    pub fn zero(degree: i64) -> Self {
        Chain {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (L, T)>>(degree: i64, terms: I) -> Self {
        let mut c = Self::zero(degree);
        for (l, v) in terms {
            c.add_term(l, v);
        }
        c
    }

    pub fn add_term(&mut self, label: L, v: T) {
        if v.is_zero() {
            return;
        }
        let e = self.coeffs.entry(label.clone()).or_insert_with(T::zero);
        *e = e.clone() + v;
        if e.is_zero() {
            self.coeffs.remove(&label);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, k: &T) -> Self {
        Chain::from_terms(self.degree, self.coeffs.iter().map(|(l, v)| (l.clone(), v.clone() * k.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.clone();
        for (l, v) in &other.coeffs {
            c.add_term(l.clone(), v.clone());
        }
        c
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&-T::one()))
    }
}

/// Position of a cycle in the homology presentation computed from Smith forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass<T: Scalar = Int> {
    /// Coordinates along the free summands.
    pub free: Vec<T>,
    /// `(coordinate mod t, t)` for each torsion summand `Z/t`.
    pub torsion: Vec<(T, T)>,
}

impl<T: Scalar> HomologyClass<T> {
    pub fn is_boundary(&self) -> bool {
        self.free.iter().all(|x| x.is_zero()) && self.torsion.iter().all(|(x, _)| x.is_zero())
    }
}

/// Graded free module with differentials lowering degree by one.
#[derive(Clone, Debug)]
pub struct ChainComplex<L, T: Scalar = Int> {
    bases: BTreeMap<i64, Vec<L>>,
    index: BTreeMap<i64, HashMap<L, usize>>,
    /// `d_k : C_k -> C_{k-1}`, rows indexed by degree `k - 1`.
    diffs: BTreeMap<i64, SparseMatrix<T>>,
}

impl<L, T> ChainComplex<L, T>
where
    L: Clone + Ord + Hash + Debug + Send + Sync,
    T: Scalar,
{
    /// Builds a complex from bases and a boundary function returning the
    /// boundary of a basis element as `(label, coefficient)` pairs. Checks that
    /// every label exists one degree down and that `d^2 = 0`.
    pub fn from_fn<F>(bases: BTreeMap<i64, Vec<L>>, boundary: F) -> Result<Self>
    where
        F: Fn(&L, i64) -> Vec<(L, T)>,
    {
        let index: BTreeMap<i64, HashMap<L, usize>> = bases
            .iter()
            .map(|(&d, b)| (d, b.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect()))
            .collect();
        for (d, b) in &bases {
            if index[d].len() != b.len() {
                return Err(Error::invalid(format!("repeated basis label in degree {d}")));
            }
        }
        let mut diffs = BTreeMap::new();
        for (&d, basis) in &bases {
            let target = bases.get(&(d - 1));
            let rows = target.map_or(0, Vec::len);
            let mut triplets = Vec::new();
            for (j, l) in basis.iter().enumerate() {
                for (t, v) in boundary(l, d) {
                    let i = index
                        .get(&(d - 1))
                        .and_then(|m| m.get(&t))
                        .ok_or_else(|| Error::UnknownLabel(format!("{t:?}"), d - 1))?;
                    triplets.push((*i, j, v));
                }
            }
            diffs.insert(d, SparseMatrix::from_triplets(rows, basis.len(), triplets)?);
        }
        let c = ChainComplex { bases, index, diffs };
        c.check_square_zero()?;
        Ok(c)
    }

    /// Builds a complex from explicit matrices `d_k : C_k -> C_{k-1}`.
    pub fn from_matrices(
        bases: BTreeMap<i64, Vec<L>>,
        matrices: BTreeMap<i64, SparseMatrix<T>>,
    ) -> Result<Self> {
        let index = bases
            .iter()
            .map(|(&d, b)| (d, b.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect()))
            .collect();
        let mut diffs = BTreeMap::new();
        for (&d, basis) in &bases {
            let rows = bases.get(&(d - 1)).map_or(0, Vec::len);
            let m = matrices.get(&d).cloned().unwrap_or_else(|| SparseMatrix::zeros(rows, basis.len()));
            if m.rows() != rows || m.cols() != basis.len() {
                return Err(Error::DimensionMismatch(format!(
                    "differential from degree {d} is {}x{}, expected {rows}x{}",
                    m.rows(),
                    m.cols(),
                    basis.len()
                )));
            }
            diffs.insert(d, m);
        }
        let c = ChainComplex { bases, index, diffs };
        c.check_square_zero()?;
        Ok(c)
    }

    fn check_square_zero(&self) -> Result<()> {
        for (&d, m) in &self.diffs {
            if let Some(next) = self.diffs.get(&(d - 1)) {
                if next.rows() > 0 && !next.mul(m)?.is_zero() {
                    return Err(Error::SquareNonZero(d - 2));
                }
            }
        }
        Ok(())
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.bases.keys().copied()
    }

    pub fn basis(&self, d: i64) -> &[L] {
        self.bases.get(&d).map_or(&[], Vec::as_slice)
    }

    pub fn rank_in(&self, d: i64) -> usize {
        self.basis(d).len()
    }

    pub fn index_of(&self, d: i64, l: &L) -> Option<usize> {
        self.index.get(&d).and_then(|m| m.get(l)).copied()
    }

    /// `d_k`, a zero matrix when degree `k` is empty.
    pub fn differential(&self, d: i64) -> SparseMatrix<T> {
        self.diffs
            .get(&d)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.rank_in(d - 1), self.rank_in(d)))
    }

    pub fn chain_to_vec(&self, c: &Chain<L, T>) -> Result<Vec<T>> {
        let mut v = vec![T::zero(); self.rank_in(c.degree)];
        for (l, x) in &c.coeffs {
            let i = self
                .index_of(c.degree, l)
                .ok_or_else(|| Error::UnknownLabel(format!("{l:?}"), c.degree))?;
            v[i] = x.clone();
        }
        Ok(v)
    }

    pub fn vec_to_chain(&self, d: i64, v: &[T]) -> Chain<L, T> {
        Chain::from_terms(
            d,
            self.basis(d).iter().cloned().zip(v.iter().cloned()),
        )
    }

    pub fn boundary(&self, c: &Chain<L, T>) -> Result<Chain<L, T>> {
        let v = self.chain_to_vec(c)?;
        let w = self.differential(c.degree).mul_vec(&v)?;
        Ok(self.vec_to_chain(c.degree - 1, &w))
    }

    pub fn is_cycle(&self, c: &Chain<L, T>) -> Result<bool> {
        Ok(self.boundary(c)?.is_zero())
    }

    /// `H_d`; a degree outside the complex gives the zero group.
    pub fn homology(&self, d: i64) -> HomologyGroup<T> {
        let n = self.rank_in(d);
        if n == 0 {
            return HomologyGroup::zero();
        }
        let out_rank = invariant_factors(&self.differential(d)).len();
        let incoming = invariant_factors(&self.differential(d + 1));
        let rank = n - out_rank - incoming.len();
        let torsion = incoming.into_iter().filter(|t| !t.is_one()).collect();
        HomologyGroup { rank, torsion }
    }

    /// Homology in every degree of the complex, zero groups included.
    pub fn homology_all(&self) -> BTreeMap<i64, HomologyGroup<T>> {
        use rayon::prelude::*;
        let degs: Vec<i64> = self.degrees().collect();
        degs.into_par_iter().map(|d| (d, self.homology(d))).collect()
    }

    /// Coordinates of the class of the cycle `z` in the presentation of
    /// `H_d` given by Smith forms of `d_d` and of `d_{d+1}` on the kernel.
    pub fn class_in_homology(&self, z: &Chain<L, T>) -> Result<HomologyClass<T>> {
        let d = z.degree;
        let zv = self.chain_to_vec(z)?;
        let out = self.differential(d);
        if !out.mul_vec(&zv)?.iter().all(|x| x.is_zero()) {
            return Err(Error::NotACycle);
        }
        let n = self.rank_in(d);
        if n == 0 {
            return Ok(HomologyClass {
                free: Vec::new(),
                torsion: Vec::new(),
            });
        }
        let sa = smith_normal_form(&out);
        let ra = sa.rank();
        // coordinates in the basis given by the columns of V; kernel = columns ra..
        let kernel_rows: Vec<usize> = (ra..n).collect();
        let y = sa.v_inv.mul_vec(&zv)?;
        let k: Vec<T> = y[ra..].to_vec();
        let incoming = self.differential(d + 1);
        let all_cols: Vec<usize> = (0..incoming.cols()).collect();
        let b = sa.v_inv.mul(&incoming)?.select(&kernel_rows, &all_cols);
        let sb = smith_normal_form(&b);
        let rb = sb.rank();
        let c = sb.u.mul_vec(&k)?;
        let mut torsion = Vec::new();
        for i in 0..rb {
            let t = &sb.diagonal[i];
            if !t.is_one() {
                torsion.push((c[i].mod_floor(t), t.clone()));
            }
        }
        Ok(HomologyClass {
            free: c[rb..].to_vec(),
            torsion,
        })
    }
}
