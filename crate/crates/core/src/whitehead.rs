//! Iterated higher Whitehead products, their canonical complexes `∂Δ_w`,
//! canonical Hurewicz chains and realisability criteria.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::complexes::{is_subcomplex, Face, SimplicialComplex, Vertex};
use crate::error::{Error, Result};
use crate::exactalg::{invariant_factors, Chain, SparseMatrix};
use crate::moment_angle::{is_nonzero_class, reduced, zk_block, zk_homology, Cell, CellChain};
use crate::Int;

/// A bracket expression over distinct vertex leaves.
///
/// Brackets are kept normalised: sub-brackets first, ordered by smallest
/// leaf, then leaves in increasing order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum WhiteheadExpr {
    Leaf(Vertex),
    Bracket(Vec<WhiteheadExpr>),
}

impl WhiteheadExpr {
    pub fn leaf(v: Vertex) -> Result<Self> {
        Face::new([v])?;
        Ok(WhiteheadExpr::Leaf(v))
    }

    /// A bracket with at least two children and pairwise distinct leaves.
    pub fn bracket(children: Vec<WhiteheadExpr>) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::invalid(format!(
                "a bracket needs at least two entries, got {}",
                children.len()
            )));
        }
        let mut seen = Face::EMPTY;
        for c in &children {
            let l = c.leaves();
            let common = seen.intersection(l);
            if let Some(v) = common.min() {
                return Err(Error::DuplicateLabel(v));
            }
            seen = seen.union(l);
        }
        let mut children = children;
        children.sort_by_key(|c| (c.is_leaf(), c.leaves().min()));
        Ok(WhiteheadExpr::Bracket(children))
    }

    /// The single product `[μ_i : i ∈ face]`.
    pub fn single(face: Face) -> Result<Self> {
        Self::bracket(face.iter().map(WhiteheadExpr::Leaf).collect())
    }

    /// `[[...[[μ_I], μ_j1], ...], μ_jq]` with the `j` taken in increasing order.
    pub fn nested_over(inner: Face, outer: &[Vertex]) -> Result<Self> {
        let mut w = Self::single(inner)?;
        for &j in outer {
            w = Self::bracket(vec![w, Self::leaf(j)?])?;
        }
        Ok(w)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, WhiteheadExpr::Leaf(_))
    }

    pub fn children(&self) -> &[WhiteheadExpr] {
        match self {
            WhiteheadExpr::Leaf(_) => &[],
            WhiteheadExpr::Bracket(c) => c,
        }
    }

    /// All leaves of the tree.
    pub fn leaves(&self) -> Face {
        match self {
            WhiteheadExpr::Leaf(v) => Face::singleton(*v),
            WhiteheadExpr::Bracket(c) => c.iter().fold(Face::EMPTY, |a, w| a.union(w.leaves())),
        }
    }

    /// Sub-brackets among the children.
    pub fn sub_brackets(&self) -> Vec<&WhiteheadExpr> {
        self.children().iter().filter(|c| !c.is_leaf()).collect()
    }

    /// Leaves that are direct children.
    pub fn direct_leaves(&self) -> Face {
        self.children()
            .iter()
            .filter_map(|c| match c {
                WhiteheadExpr::Leaf(v) => Some(Face::singleton(*v)),
                _ => None,
            })
            .fold(Face::EMPTY, Face::union)
    }

    /// A bracket of leaves only.
    pub fn is_single(&self) -> bool {
        !self.is_leaf() && self.children().iter().all(WhiteheadExpr::is_leaf)
    }

    /// Every bracket has at most one sub-bracket.
    pub fn is_nested(&self) -> bool {
        match self {
            WhiteheadExpr::Leaf(_) => true,
            WhiteheadExpr::Bracket(_) => {
                let subs = self.sub_brackets();
                subs.len() <= 1 && subs.iter().all(|s| s.is_nested())
            }
        }
    }

    /// Leaf sets of a nested product, innermost first: `I_1, ..., I_n`.
    pub fn nested_levels(&self) -> Option<Vec<Face>> {
        if self.is_leaf() || !self.is_nested() {
            return None;
        }
        let mut levels = Vec::new();
        let mut cur = self;
        loop {
            levels.push(cur.direct_leaves());
            match cur.sub_brackets().first() {
                Some(s) => cur = s,
                None => break,
            }
        }
        levels.reverse();
        Some(levels)
    }

    /// Shape `[w_1, ..., w_q, μ_i1, ..., μ_ip]` with every `w_j` single.
    pub fn is_smallest_shape(&self) -> bool {
        !self.is_leaf() && self.sub_brackets().iter().all(|s| s.is_single())
    }

    /// Depth of bracket nesting; a single product has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            WhiteheadExpr::Leaf(_) => 0,
            WhiteheadExpr::Bracket(c) => 1 + c.iter().map(WhiteheadExpr::depth).max().unwrap_or(0),
        }
    }

    /// `d(w) = d(w_1) + ... + d(w_q) + 2p - 1`.
    pub fn dimension(&self) -> Result<i64> {
        match self {
            WhiteheadExpr::Leaf(v) => Err(Error::invalid(format!("the leaf {v} has no dimension"))),
            WhiteheadExpr::Bracket(_) => {
                let mut d = 2 * self.direct_leaves().len() as i64 - 1;
                for s in self.sub_brackets() {
                    d += s.dimension()?;
                }
                Ok(d)
            }
        }
    }

    /// The canonical complex `∂Δ_w`, on the leaves of `w`.
    pub fn delta_w(&self) -> Result<SimplicialComplex> {
        match self {
            WhiteheadExpr::Leaf(v) => SimplicialComplex::point(*v),
            WhiteheadExpr::Bracket(children) => {
                let parts = children.iter().map(WhiteheadExpr::delta_w).collect::<Result<Vec<_>>>()?;
                let outer = SimplicialComplex::simplex_boundary(Face::range(children.len() as Vertex))?;
                outer.substitute(&parts)
            }
        }
    }

    /// The top sphere `∂Δ^sph_w`: the join of the children's top spheres and
    /// `∂Δ(i_1, ..., i_p)`. Brackets without leaf entries have none.
    pub fn delta_w_sphere(&self) -> Result<SimplicialComplex> {
        if self.is_leaf() {
            return Err(Error::invalid("a leaf has no top sphere"));
        }
        let leaves = self.direct_leaves();
        if leaves.is_empty() {
            return Err(Error::invalid(format!(
                "{self} has no leaf entries, so its canonical complex has no top sphere"
            )));
        }
        let mut acc: Option<SimplicialComplex> = None;
        for s in self.sub_brackets() {
            let sphere = s.delta_w_sphere()?;
            acc = Some(match acc {
                None => sphere,
                Some(a) => a.join(&sphere)?,
            });
        }
        if leaves.len() >= 2 {
            let b = SimplicialComplex::simplex_boundary(leaves)?;
            acc = Some(match acc {
                None => b,
                Some(a) => a.join(&b)?,
            });
        }
        // a single leaf contributes the empty sphere, the unit of the join
        acc.ok_or_else(|| Error::invalid("a bracket needs at least two entries"))
    }

    /// The canonical cellular chain `h_c(w) = h_c(w_1)...h_c(w_q)·Σ_k D..S_k..D`.
    /// It is zero when the bracket has no leaf entries.
    pub fn hurewicz_chain(&self) -> Result<CellChain> {
        if self.is_leaf() {
            return Err(Error::invalid("a leaf has no Hurewicz chain"));
        }
        let mut acc = CellChain::unit();
        for s in self.sub_brackets() {
            acc = acc.product(&s.hurewicz_chain()?);
        }
        let leaves = self.direct_leaves();
        let one = Int::from(1);
        let sum = Chain::from_terms(
            2 * leaves.len() as i64 - 1,
            leaves.iter().map(|i| {
                (
                    Cell {
                        s: Face::singleton(i),
                        d: leaves.without(i),
                    },
                    one.clone(),
                )
            }),
        );
        let mut out = acc.product(&sum);
        out.degree = self.dimension()?;
        Ok(out)
    }
}

impl fmt::Display for WhiteheadExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhiteheadExpr::Leaf(v) => write!(f, "{v}"),
            WhiteheadExpr::Bracket(c) => {
                write!(f, "[")?;
                for (k, w) in c.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Debug for WhiteheadExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for WhiteheadExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::text::parse_whitehead(s)
    }
}

impl Serialize for WhiteheadExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Undefined,
    DefinedTrivial,
    DefinedNontrivial,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Undefined => "undefined",
            Status::DefinedTrivial => "defined-trivial",
            Status::DefinedNontrivial => "defined-nontrivial",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatusReport {
    pub status: Status,
    /// Whether `h_c(w)` is a nonzero class of `H_*(Z_K)`; `None` when the
    /// product is undefined or its Hurewicz image is zero for degree reasons.
    pub hurewicz_nonzero: Option<bool>,
}

impl StatusReport {
    /// The Hurewicz class agrees with the combinatorial status.
    pub fn is_consistent(&self) -> bool {
        match self.hurewicz_nonzero {
            None => true,
            Some(nz) => nz == (self.status == Status::DefinedNontrivial),
        }
    }
}

fn hurewicz_check(k: &SimplicialComplex, w: &WhiteheadExpr) -> Result<Option<bool>> {
    if w.direct_leaves().is_empty() {
        return Ok(None);
    }
    let h = w.hurewicz_chain()?;
    if !h.lies_in(k) || !h.cellular_boundary().is_zero() {
        return Ok(None);
    }
    Ok(Some(is_nonzero_class(k, &h)?))
}

/// Status of `[μ_i : i ∈ face]` in `K`: defined iff `∂Δ(I) ⊆ K`, trivial iff
/// `Δ(I) ∈ K`. Defined products also get their Hurewicz class checked.
pub fn single_product_status(k: &SimplicialComplex, face: Face) -> Result<StatusReport> {
    if face.len() < 2 {
        return Err(Error::invalid("a single product needs at least two vertices"));
    }
    if !face.is_subset(k.vertices()) {
        return Err(Error::FaceOutsideVertexSet {
            face,
            vertices: k.vertices(),
        });
    }
    let defined = face.iter().all(|v| k.contains(face.without(v)));
    if !defined {
        return Ok(StatusReport {
            status: Status::Undefined,
            hurewicz_nonzero: None,
        });
    }
    let status = if k.contains(face) {
        Status::DefinedTrivial
    } else {
        Status::DefinedNontrivial
    };
    let w = WhiteheadExpr::single(face)?;
    Ok(StatusReport {
        status,
        hurewicz_nonzero: hurewicz_check(k, &w)?,
    })
}

/// `∂Δ_{w_1} * ... * ∂Δ_{w_q} * Δ(i_1, ..., i_p)` for a product of the
/// smallest-realisation shape.
pub fn trivialising_join(w: &WhiteheadExpr) -> Result<SimplicialComplex> {
    if !w.is_smallest_shape() {
        return Err(Error::invalid(format!(
            "{w} is not of the form [w_1, ..., w_q, μ_i1, ..., μ_ip] with single w_j"
        )));
    }
    let mut acc: Option<SimplicialComplex> = None;
    for s in w.sub_brackets() {
        let b = s.delta_w()?;
        acc = Some(match acc {
            None => b,
            Some(a) => a.join(&b)?,
        });
    }
    let leaves = w.direct_leaves();
    if !leaves.is_empty() {
        let d = SimplicialComplex::simplex(leaves)?;
        acc = Some(match acc {
            None => d,
            Some(a) => a.join(&d)?,
        });
    }
    acc.ok_or_else(|| Error::invalid("empty bracket"))
}

/// Exact status for products `[w_1, ..., w_q, μ_i1, ..., μ_ip]` whose `w_j`
/// are single products: defined iff `∂Δ_w ⊆ K`, trivial iff the join
/// `∂Δ_{w_1} * ... * Δ(i_1, ..., i_p) ⊆ K`.
pub fn nested_shape_status(k: &SimplicialComplex, w: &WhiteheadExpr) -> Result<StatusReport> {
    let join = trivialising_join(w)?;
    if !w.leaves().is_subset(k.vertices()) {
        return Err(Error::FaceOutsideVertexSet {
            face: w.leaves(),
            vertices: k.vertices(),
        });
    }
    if !is_subcomplex(&w.delta_w()?, k, None) {
        return Ok(StatusReport {
            status: Status::Undefined,
            hurewicz_nonzero: None,
        });
    }
    let status = if is_subcomplex(&join, k, None) {
        Status::DefinedTrivial
    } else {
        Status::DefinedNontrivial
    };
    Ok(StatusReport {
        status,
        hurewicz_nonzero: hurewicz_check(k, w)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealisationReport {
    pub defined: Verdict,
    pub nontrivial: Verdict,
    /// `"exact"` when the product has the smallest-realisation shape, otherwise
    /// `"sufficient"`: only the positive answers are certified.
    pub criterion: &'static str,
    /// Whether `∂Δ_w` is a subcomplex of `K` with leaves fixed.
    pub embeds: bool,
    /// The canonical chain, when it is a cycle of `Z_K`.
    pub witness: Option<CellChain>,
    pub hurewicz_nonzero: Option<bool>,
    pub notes: Vec<String>,
}

/// Realisability of `w` by `K`. A nonzero Hurewicz class certifies
/// nontriviality; the combinatorial criteria are exact for products of the
/// smallest-realisation shape and sufficient otherwise.
pub fn realises_sufficient(k: &SimplicialComplex, w: &WhiteheadExpr) -> Result<RealisationReport> {
    if w.is_leaf() {
        return Err(Error::invalid("a leaf is not a Whitehead product"));
    }
    if !w.leaves().is_subset(k.vertices()) {
        return Err(Error::FaceOutsideVertexSet {
            face: w.leaves(),
            vertices: k.vertices(),
        });
    }
    let embeds = is_subcomplex(&w.delta_w()?, k, None);
    let h = w.hurewicz_chain()?;
    let is_cycle = h.lies_in(k) && h.cellular_boundary().is_zero();
    let hurewicz_nonzero = if is_cycle && !h.is_zero() {
        Some(is_nonzero_class(k, &h)?)
    } else {
        None
    };
    let witness = is_cycle.then(|| h.clone());
    let mut notes = Vec::new();
    if w.direct_leaves().is_empty() {
        notes.push("the Hurewicz image of a bracket without leaf entries is zero".to_string());
    }

    if w.is_smallest_shape() {
        let status = nested_shape_status(k, w)?;
        let defined = if status.status == Status::Undefined { Verdict::No } else { Verdict::Yes };
        let nontrivial = match (status.status, hurewicz_nonzero) {
            (Status::DefinedNontrivial, Some(true)) => Verdict::Yes,
            (Status::DefinedNontrivial, _) => {
                notes.push("the criterion gives a nontrivial product without a homology witness".into());
                Verdict::Unknown
            }
            (Status::DefinedTrivial, _) => Verdict::No,
            (Status::Undefined, _) => Verdict::Unknown,
        };
        return Ok(RealisationReport {
            defined,
            nontrivial,
            criterion: "exact",
            embeds,
            witness,
            hurewicz_nonzero,
            notes,
        });
    }

    let defined = if embeds { Verdict::Yes } else { Verdict::Unknown };
    let nontrivial = if hurewicz_nonzero == Some(true) {
        Verdict::Yes
    } else if k.is_simplex() {
        Verdict::No
    } else {
        Verdict::Unknown
    };
    Ok(RealisationReport {
        defined,
        nontrivial,
        criterion: "sufficient",
        embeds,
        witness,
        hurewicz_nonzero,
        notes,
    })
}

/// One wedge summand: subset `J`, missing face `I` of `K_J`, the nested
/// product over `I` and `J \ I`, and its canonical chain.
#[derive(Clone, Debug, Serialize)]
pub struct WedgeEntry {
    pub subset: Face,
    pub face: Face,
    pub product: WhiteheadExpr,
    pub chain: CellChain,
}

#[derive(Clone, Debug, Serialize)]
pub struct WedgeBasis {
    pub entries: Vec<WedgeEntry>,
    /// Total rank of reduced `H_*(Z_K)`.
    pub total_rank: usize,
    /// The classes of the chains form a basis of reduced `H_*(Z_K)`.
    pub is_basis: bool,
    /// Set when some filling was only checked for acyclicity.
    pub acyclicity_proxy: bool,
}

/// Missing faces of `K_J` through the last vertex of `J` in `order`.
pub fn mf_max(k: &SimplicialComplex, subset: Face, order: &[Vertex]) -> Vec<Face> {
    let Some(top) = order.iter().rev().copied().find(|&v| subset.contains(v)) else {
        return Vec::new();
    };
    k.missing_faces()
        .into_iter()
        .filter(|i| i.is_subset(subset) && i.contains(top))
        .collect()
}

/// The fillings `J ↦ MF_max(K_J)` of a shifted complex.
pub fn shifted_fillings(k: &SimplicialComplex, order: &[Vertex]) -> BTreeMap<Face, Vec<Face>> {
    k.vertices()
        .subsets()
        .filter(|j| !j.is_empty())
        .map(|j| (j, mf_max(k, j, order)))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

fn entry(subset: Face, face: Face) -> Result<WedgeEntry> {
    let outer = subset.difference(face).to_vec();
    let product = WhiteheadExpr::nested_over(face, &outer)?;
    let chain = product.hurewicz_chain()?;
    Ok(WedgeEntry {
        subset,
        face,
        product,
        chain,
    })
}

/// Checks whether the classes of `entries` form a basis of reduced `H_*(Z_K)`.
fn basis_verdict(k: &SimplicialComplex, entries: &[WedgeEntry]) -> Result<(usize, bool)> {
    let total_rank: usize = reduced(&zk_homology(k)?).values().map(|g| g.rank).sum();
    let has_torsion = zk_homology(k)?.values().any(|g| !g.torsion.is_empty());
    if has_torsion || entries.len() != total_rank {
        return Ok((total_rank, false));
    }
    let mut groups: BTreeMap<(Face, i64), Vec<&CellChain>> = BTreeMap::new();
    for e in entries {
        groups.entry((e.subset, e.chain.degree)).or_default().push(&e.chain);
    }
    let groups: Vec<((Face, i64), Vec<&CellChain>)> = groups.into_iter().collect();
    let ok = groups
        .par_iter()
        .map(|((subset, degree), chains)| -> Result<bool> {
            let block = zk_block(k, *subset)?;
            let g = block.homology(*degree);
            if g.rank != chains.len() {
                return Ok(false);
            }
            let mut triplets = Vec::new();
            for (col, c) in chains.iter().enumerate() {
                if !c.lies_in(k) {
                    return Ok(false);
                }
                let cls = block.class_in_homology(c)?;
                for (row, x) in cls.free.into_iter().enumerate() {
                    triplets.push((row, col, x));
                }
            }
            let m = SparseMatrix::from_triplets(g.rank, chains.len(), triplets)?;
            let f = invariant_factors(&m);
            Ok(f.len() == g.rank && f.iter().all(|x| *x == Int::from(1)))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok((total_rank, ok.into_iter().all(|b| b)))
}

/// The wedge decomposition of a shifted complex: one nested product per
/// subset `J` and missing face `I` of `K_J` through the last vertex of `J`.
/// Without an order, one is found by exhaustive search.
pub fn shifted_wedge_basis(k: &SimplicialComplex, order: Option<&[Vertex]>) -> Result<WedgeBasis> {
    let order: Vec<Vertex> = match order {
        Some(o) => {
            if !k.is_shifted_with_order(o)? {
                return Err(Error::NotShifted);
            }
            o.to_vec()
        }
        None => k.shifted_orders()?.into_iter().next().ok_or(Error::NotShifted)?,
    };
    let mut entries = Vec::new();
    for (j, faces) in shifted_fillings(k, &order) {
        for i in faces {
            entries.push(entry(j, i)?);
        }
    }
    let (total_rank, is_basis) = basis_verdict(k, &entries)?;
    Ok(WedgeBasis {
        entries,
        total_rank,
        is_basis,
        acyclicity_proxy: false,
    })
}

/// The wedge decomposition of a totally fillable complex from chosen
/// fillings. Each `K_J` with its filling faces added must be acyclic over the
/// integers; contractibility is not checked.
pub fn fillable_wedge_basis(
    k: &SimplicialComplex,
    fillings: &BTreeMap<Face, Vec<Face>>,
) -> Result<WedgeBasis> {
    let mf = k.missing_faces();
    for (j, faces) in fillings {
        for i in faces {
            if !i.is_subset(*j) || !mf.contains(i) {
                return Err(Error::invalid(format!("{i} is not a missing face of the full subcomplex on {j}")));
            }
        }
    }
    let subsets: Vec<Face> = k.vertices().subsets().filter(|j| !j.is_empty()).collect();
    let empty = Vec::new();
    let checks = subsets
        .par_iter()
        .map(|&j| -> Result<Option<Face>> {
            let fill = fillings.get(&j).unwrap_or(&empty);
            let filled = k.full_subcomplex(j)?.with_faces_added(fill)?;
            Ok((!filled.is_acyclic()?).then_some(j))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(j) = checks.into_iter().flatten().next() {
        return Err(Error::FillingNotAcyclic { subset: j });
    }
    let mut entries = Vec::new();
    for (&j, faces) in fillings {
        for &i in faces {
            entries.push(entry(j, i)?);
        }
    }
    let (total_rank, is_basis) = basis_verdict(k, &entries)?;
    Ok(WedgeBasis {
        entries,
        total_rank,
        is_basis,
        acyclicity_proxy: true,
    })
}
