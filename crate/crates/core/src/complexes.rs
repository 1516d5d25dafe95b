//! Simplicial complexes on labelled vertex sets.
//!
//! Faces are bitsets over the labels `1..=64`. A complex keeps its facets and
//! the full face set, computed once at construction.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{ChainComplex, HomologyGroup};
use crate::Int;

/// Vertex label, in `1..=MAX_LABEL`.
pub type Vertex = u32;

pub const MAX_LABEL: Vertex = 64;
/// Largest vertex count accepted by [`SimplicialComplex`] constructors.
pub const MAX_VERTICES: usize = 24;
/// Largest number of faces kept in the closure cache.
pub const MAX_FACES: usize = 1 << 21;

/// A finite set of vertex labels.
///
/// Ordering is by cardinality first, then lexicographic on the increasing
/// vertex lists. This is the generator order used everywhere.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Face(u64);

impl Face {
    pub const EMPTY: Face = Face(0);

    pub fn new<I: IntoIterator<Item = Vertex>>(vertices: I) -> Result<Face> {
        let mut bits = 0u64;
        for v in vertices {
            if v == 0 || v > MAX_LABEL {
                return Err(Error::LabelOutOfRange {
                    label: v as i64,
                    max: MAX_LABEL,
                });
            }
            let b = 1u64 << (v - 1);
            if bits & b != 0 {
                return Err(Error::DuplicateLabel(v));
            }
            bits |= b;
        }
        Ok(Face(bits))
    }

    /// Panics on labels outside `1..=64`; duplicates collapse.
    pub fn of(vertices: &[Vertex]) -> Face {
        let mut bits = 0u64;
        for &v in vertices {
            assert!((1..=MAX_LABEL).contains(&v), "vertex label {v} out of range");
            bits |= 1u64 << (v - 1);
        }
        Face(bits)
    }

    pub fn from_bits(bits: u64) -> Face {
        Face(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: Vertex) -> Face {
        Face::of(&[v])
    }

    /// The face `{1, ..., m}`.
    pub fn range(m: Vertex) -> Face {
        assert!(m <= MAX_LABEL);
        if m == 64 {
            Face(u64::MAX)
        } else {
            Face((1u64 << m) - 1)
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: Vertex) -> bool {
        (1..=MAX_LABEL).contains(&v) && self.0 & (1u64 << (v - 1)) != 0
    }

    pub fn is_subset(self, other: Face) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Face) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Face) -> Face {
        Face(self.0 | other.0)
    }

    pub fn intersection(self, other: Face) -> Face {
        Face(self.0 & other.0)
    }

    pub fn difference(self, other: Face) -> Face {
        Face(self.0 & !other.0)
    }

    pub fn with(self, v: Vertex) -> Face {
        self.union(Face::singleton(v))
    }

    pub fn without(self, v: Vertex) -> Face {
        self.difference(Face::singleton(v))
    }

    pub fn min(self) -> Option<Vertex> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    pub fn max(self) -> Option<Vertex> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros())
    }

    /// Number of elements of `self` strictly below `v`.
    pub fn count_below(self, v: Vertex) -> usize {
        if v <= 1 {
            return 0;
        }
        let mask = if v > 64 { u64::MAX } else { (1u64 << (v - 1)) - 1 };
        (self.0 & mask).count_ones() as usize
    }

    /// Vertices in increasing order.
    pub fn iter(self) -> FaceIter {
        FaceIter(self.0)
    }

    pub fn to_vec(self) -> Vec<Vertex> {
        self.iter().collect()
    }

    /// All subsets, in increasing bit order (the empty set first, `self` last).
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Subsets of the given cardinality.
    pub fn subsets_of_size(self, k: usize) -> impl Iterator<Item = Face> {
        self.subsets().filter(move |s| s.len() == k)
    }

    /// Position of `v` among the vertices of `self`, counting from 0.
    pub fn position(self, v: Vertex) -> Option<usize> {
        self.contains(v).then(|| self.count_below(v))
    }

    /// Faces with vertex labels transformed by `f`.
    pub fn map(self, f: impl Fn(Vertex) -> Vertex) -> Face {
        Face::of(&self.iter().map(f).collect::<Vec<_>>())
    }
}

pub struct FaceIter(u64);

impl Iterator for FaceIter {
    type Item = Vertex;
    fn next(&mut self) -> Option<Vertex> {
        if self.0 == 0 {
            return None;
        }
        let t = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(t + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for FaceIter {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Face;
    fn next(&mut self) -> Option<Face> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some((cur.wrapping_sub(self.mask)) & self.mask)
        };
        Some(Face(cur))
    }
}

impl Ord for Face {
    fn cmp(&self, other: &Face) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Face) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Face {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Face {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Face, D::Error> {
        let v = Vec::<Vertex>::deserialize(d)?;
        Face::new(v).map_err(serde::de::Error::custom)
    }
}

/// A simplicial complex on a finite vertex set.
///
/// Every vertex of the vertex set is a face, and so is the empty set.
#[derive(Clone)]
pub struct SimplicialComplex {
    vertices: Face,
    facets: Vec<Face>,
    faces: Vec<Face>,
    face_set: HashSet<Face>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.facets == other.facets
    }
}

impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("vertices", &self.vertices)
            .field("facets", &self.facets)
            .finish()
    }
}

impl SimplicialComplex {
    /// Downward closure of `generators` on the vertex set `vertices`.
    pub fn new<I: IntoIterator<Item = Face>>(vertices: Face, generators: I) -> Result<Self> {
        if vertices.len() > MAX_VERTICES {
            return Err(Error::size("vertex count", MAX_VERTICES));
        }
        let mut gens: Vec<Face> = vertices.iter().map(Face::singleton).collect();
        for g in generators {
            if !g.is_subset(vertices) {
                return Err(Error::FaceOutsideVertexSet { face: g, vertices });
            }
            gens.push(g);
        }
        // larger faces first, so that a face is maximal iff no kept facet contains it
        gens.sort_by(|a, b| b.cmp(a));
        gens.dedup();
        let mut facets: Vec<Face> = Vec::new();
        for g in gens {
            if !facets.iter().any(|f| g.is_subset(*f)) {
                facets.push(g);
            }
        }
        facets.sort();

        let mut face_set: HashSet<Face> = HashSet::new();
        face_set.insert(Face::EMPTY);
        for f in &facets {
            for s in f.subsets() {
                face_set.insert(s);
            }
            if face_set.len() > MAX_FACES {
                return Err(Error::size("face count", MAX_FACES));
            }
        }
        let mut faces: Vec<Face> = face_set.iter().copied().collect();
        faces.sort();
        Ok(SimplicialComplex {
            vertices,
            facets,
            faces,
            face_set,
        })
    }

    /// Complex on `{1..m}` generated by the given faces.
    pub fn from_facets(m: usize, facets: &[Vec<Vertex>]) -> Result<Self> {
        if m > MAX_LABEL as usize {
            return Err(Error::LabelOutOfRange {
                label: m as i64,
                max: MAX_LABEL,
            });
        }
        let vertices = Face::range(m as Vertex);
        let mut gens = Vec::with_capacity(facets.len());
        for f in facets {
            for &v in f {
                if v == 0 || v as usize > m {
                    return Err(Error::LabelOutOfRange {
                        label: v as i64,
                        max: m as Vertex,
                    });
                }
            }
            gens.push(Face::new(f.iter().copied())?);
        }
        Self::new(vertices, gens)
    }

    /// The full simplex on `vertices`.
    pub fn simplex(vertices: Face) -> Result<Self> {
        Self::new(vertices, [vertices])
    }

    /// The boundary of the simplex on `vertices`.
    pub fn simplex_boundary(vertices: Face) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("boundary of the empty simplex"));
        }
        Self::new(vertices, vertices.iter().map(|v| vertices.without(v)))
    }

    pub fn point(v: Vertex) -> Result<Self> {
        Self::simplex(Face::new([v])?)
    }

    pub fn vertices(&self) -> Face {
        self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Largest vertex label, 0 for the empty complex.
    pub fn max_label(&self) -> Vertex {
        self.vertices.max().unwrap_or(0)
    }

    /// Maximal faces in generator order.
    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    /// All faces including the empty one, in generator order.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, face: Face) -> bool {
        self.face_set.contains(&face)
    }

    pub fn dim(&self) -> i64 {
        self.facets.iter().map(|f| f.len() as i64 - 1).max().unwrap_or(-1)
    }

    /// True when the complex is the full simplex on its vertex set.
    pub fn is_simplex(&self) -> bool {
        self.contains(self.vertices)
    }

    /// Minimal non-faces in generator order.
    pub fn missing_faces(&self) -> Vec<Face> {
        let mut out = BTreeSet::new();
        for &sigma in &self.faces {
            let top = sigma.max().unwrap_or(0);
            for v in self.vertices.iter().filter(|&v| v > top) {
                let tau = sigma.with(v);
                if !self.contains(tau) && tau.iter().all(|u| self.contains(tau.without(u))) {
                    out.insert(tau);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Faces contained in `subset`, on the vertex set `subset`. Labels are kept.
    pub fn full_subcomplex(&self, subset: Face) -> Result<Self> {
        if !subset.is_subset(self.vertices) {
            return Err(Error::FaceOutsideVertexSet {
                face: subset,
                vertices: self.vertices,
            });
        }
        Self::new(
            subset,
            self.facets.iter().map(|f| f.intersection(subset)),
        )
    }

    /// Faces of the full subcomplex on `subset`, without building a complex.
    pub fn full_subcomplex_faces(&self, subset: Face) -> Vec<Face> {
        self.faces.iter().copied().filter(|f| f.is_subset(subset)).collect()
    }

    /// Join of two complexes on disjoint vertex sets.
    pub fn join(&self, other: &Self) -> Result<Self> {
        let overlap = self.vertices.intersection(other.vertices);
        if !overlap.is_empty() {
            return Err(Error::OverlappingLabels(overlap));
        }
        let mut gens = Vec::with_capacity(self.facets.len() * other.facets.len());
        for a in &self.facets {
            for b in &other.facets {
                gens.push(a.union(*b));
            }
        }
        Self::new(self.vertices.union(other.vertices), gens)
    }

    /// Substitution `K(K_1, ..., K_m)`. Part `k` replaces the `k`-th vertex of
    /// `self` in increasing label order. Parts must have pairwise disjoint labels.
    pub fn substitute(&self, parts: &[SimplicialComplex]) -> Result<Self> {
        let slots = self.vertices.to_vec();
        if parts.len() != slots.len() {
            return Err(Error::invalid(format!(
                "substitution needs {} parts, got {}",
                slots.len(),
                parts.len()
            )));
        }
        let mut all = Face::EMPTY;
        for p in parts {
            let overlap = all.intersection(p.vertices);
            if !overlap.is_empty() {
                return Err(Error::OverlappingLabels(overlap));
            }
            all = all.union(p.vertices);
        }
        let part_of: BTreeMap<Vertex, &SimplicialComplex> =
            slots.iter().copied().zip(parts.iter()).collect();
        let mut gens = Vec::new();
        for sigma in &self.facets {
            let mut acc = vec![Face::EMPTY];
            for v in sigma.iter() {
                let p = part_of[&v];
                let mut next = Vec::with_capacity(acc.len() * p.facets.len());
                for a in &acc {
                    for f in &p.facets {
                        next.push(a.union(*f));
                    }
                }
                acc = next;
                if acc.len() > MAX_FACES {
                    return Err(Error::size("substitution facet candidates", MAX_FACES));
                }
            }
            gens.extend(acc);
        }
        Self::new(all, gens)
    }

    /// Relabels the parts into consecutive blocks starting at 1, in order, then
    /// substitutes. Returns the complex and, for each part, the map from its
    /// original labels to the new ones.
    pub fn substitute_relabelled(
        &self,
        parts: &[SimplicialComplex],
    ) -> Result<(Self, Vec<BTreeMap<Vertex, Vertex>>)> {
        let (relabelled, maps) = relabel_blocks(parts)?;
        Ok((self.substitute(&relabelled)?, maps))
    }

    /// Applies an injective relabelling of the vertices.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<Self> {
        let mut image = Face::EMPTY;
        for v in self.vertices.iter() {
            let w = *map
                .get(&v)
                .ok_or_else(|| Error::invalid(format!("relabelling misses vertex {v}")))?;
            let wf = Face::new([w])?;
            if !image.is_disjoint(wf) {
                return Err(Error::DuplicateLabel(w));
            }
            image = image.union(wf);
        }
        Self::new(image, self.facets.iter().map(|f| f.map(|v| map[&v])))
    }

    /// The complex with one facet removed (its proper faces stay).
    pub fn without_facet(&self, facet: Face) -> Result<Self> {
        if !self.facets.contains(&facet) {
            return Err(Error::invalid(format!("{facet} is not a facet")));
        }
        let mut gens: Vec<Face> = self.facets.iter().copied().filter(|f| *f != facet).collect();
        gens.extend(facet.iter().map(|v| facet.without(v)));
        if facet.len() == 1 {
            // a vertex stays a vertex
            return Err(Error::invalid("cannot remove a vertex facet"));
        }
        Self::new(self.vertices, gens)
    }

    /// The complex generated by `self` together with extra faces on the same vertices.
    pub fn with_faces_added(&self, extra: &[Face]) -> Result<Self> {
        Self::new(
            self.vertices,
            self.facets.iter().copied().chain(extra.iter().copied()),
        )
    }

    /// Reduced simplicial chain complex, a face of `k` vertices in degree `k - 1`.
    pub fn reduced_chain_complex(&self) -> Result<ChainComplex<Face, Int>> {
        reduced_chain_complex_of_faces(&self.faces)
    }

    /// Reduced integral homology by degree; zero groups are omitted.
    pub fn reduced_homology(&self) -> Result<BTreeMap<i64, HomologyGroup<Int>>> {
        reduced_homology_of_faces(&self.faces)
    }

    /// True if every reduced homology group vanishes.
    pub fn is_acyclic(&self) -> Result<bool> {
        Ok(self.reduced_homology()?.is_empty())
    }

    /// Shiftedness with respect to a vertex order (earliest first): for every
    /// face `I`, `i` in `I` and `j` later than `i`, `(I - i) + j` is a face.
    pub fn is_shifted_with_order(&self, order: &[Vertex]) -> Result<bool> {
        let as_set = Face::new(order.iter().copied())?;
        if as_set != self.vertices || order.len() != self.vertices.len() {
            return Err(Error::invalid("order must list every vertex exactly once"));
        }
        let pos: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        for &face in &self.faces {
            for i in face.iter() {
                for j in self.vertices.difference(face).iter() {
                    if pos[&j] > pos[&i] && !self.contains(face.without(i).with(j)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Every vertex order witnessing shiftedness, found by exhaustive search.
    /// Empty when the complex is not shifted.
    pub fn shifted_orders(&self) -> Result<Vec<Vec<Vertex>>> {
        const BOUND: usize = 7;
        if self.vertices.len() > BOUND {
            return Err(Error::size("exhaustive shiftedness search vertex count", BOUND));
        }
        let mut found = Vec::new();
        let mut order = self.vertices.to_vec();
        permutations(&mut order, 0, &mut |o| {
            if self.is_shifted_with_order(o).unwrap_or(false) {
                found.push(o.to_vec());
            }
        });
        found.sort();
        Ok(found)
    }

    pub fn is_shifted(&self) -> Result<bool> {
        Ok(!self.shifted_orders()?.is_empty())
    }

    /// JSON form `{"m": .., "facets": [..]}`, with `"vertices"` when the
    /// vertex set is not `{1..m}`.
    pub fn to_json(&self) -> serde_json::Value {
        let m = self.max_label();
        let facets: Vec<Vec<Vertex>> = self.facets.iter().map(|f| f.to_vec()).collect();
        let mut v = serde_json::json!({ "m": m, "facets": facets });
        if self.vertices != Face::range(m) {
            v["vertices"] = serde_json::json!(self.vertices.to_vec());
        }
        v
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            m: usize,
            facets: Vec<Vec<i64>>,
            vertices: Option<Vec<i64>>,
        }
        let raw: Raw = serde_json::from_value(value.clone())
            .map_err(|e| Error::invalid(format!("complex JSON: {e}")))?;
        let label = |x: i64| -> Result<Vertex> {
            if x < 1 || x > raw.m as i64 || x > MAX_LABEL as i64 {
                Err(Error::LabelOutOfRange {
                    label: x,
                    max: raw.m.min(MAX_LABEL as usize) as Vertex,
                })
            } else {
                Ok(x as Vertex)
            }
        };
        let facets: Vec<Vec<Vertex>> = raw
            .facets
            .iter()
            .map(|f| f.iter().map(|&x| label(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        match raw.vertices {
            None => Self::from_facets(raw.m, &facets),
            Some(vs) => {
                let vs = vs.into_iter().map(label).collect::<Result<Vec<_>>>()?;
                let gens = facets
                    .iter()
                    .map(|f| Face::new(f.iter().copied()))
                    .collect::<Result<Vec<_>>>()?;
                Self::new(Face::new(vs)?, gens)
            }
        }
    }
}

impl Serialize for SimplicialComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn permutations(v: &mut Vec<Vertex>, k: usize, visit: &mut impl FnMut(&[Vertex])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, visit);
        v.swap(k, i);
    }
}

/// Relabels complexes into consecutive label blocks `1..`, in order.
pub fn relabel_blocks(
    parts: &[SimplicialComplex],
) -> Result<(Vec<SimplicialComplex>, Vec<BTreeMap<Vertex, Vertex>>)> {
    let mut next: Vertex = 1;
    let mut out = Vec::with_capacity(parts.len());
    let mut maps = Vec::with_capacity(parts.len());
    for p in parts {
        let mut map = BTreeMap::new();
        for v in p.vertices.iter() {
            if next > MAX_LABEL {
                return Err(Error::LabelOutOfRange {
                    label: next as i64,
                    max: MAX_LABEL,
                });
            }
            map.insert(v, next);
            next += 1;
        }
        out.push(p.relabel(&map)?);
        maps.push(map);
    }
    Ok((out, maps))
}

/// Missing faces of `K(K_1, ..., K_m)` by the substitution formula: the missing
/// faces of every part, plus every transversal of a missing face of `K`.
pub fn substitution_missing_faces(k: &SimplicialComplex, parts: &[SimplicialComplex]) -> Result<Vec<Face>> {
    let slots = k.vertices().to_vec();
    if parts.len() != slots.len() {
        return Err(Error::invalid(format!(
            "substitution needs {} parts, got {}",
            slots.len(),
            parts.len()
        )));
    }
    let part_of: BTreeMap<Vertex, &SimplicialComplex> = slots.iter().copied().zip(parts.iter()).collect();
    let mut out = BTreeSet::new();
    for p in parts {
        out.extend(p.missing_faces());
    }
    for tau in k.missing_faces() {
        let mut acc = vec![Face::EMPTY];
        for v in tau.iter() {
            acc = acc
                .iter()
                .flat_map(|a| part_of[&v].vertices().iter().map(move |u| a.with(u)))
                .collect();
        }
        out.extend(acc);
    }
    Ok(out.into_iter().collect())
}

/// Whether every face of `small`, relabelled by `labelling` (identity when
/// `None`), is a face of `big`. A non-injective labelling gives `false`.
pub fn is_subcomplex(
    small: &SimplicialComplex,
    big: &SimplicialComplex,
    labelling: Option<&BTreeMap<Vertex, Vertex>>,
) -> bool {
    let image = |f: Face| -> Option<Face> {
        match labelling {
            None => Some(f),
            Some(map) => {
                let vs: Option<Vec<Vertex>> = f.iter().map(|v| map.get(&v).copied()).collect();
                let vs = vs?;
                let g = Face::new(vs.iter().copied()).ok()?;
                (g.len() == f.len()).then_some(g)
            }
        }
    };
    if let Some(map) = labelling {
        let targets: BTreeSet<_> = small.vertices().iter().filter_map(|v| map.get(&v)).collect();
        if targets.len() != small.num_vertices() {
            return false;
        }
    }
    small
        .facets()
        .iter()
        .all(|&f| image(f).is_some_and(|g| big.contains(g)))
}

/// Reduced chain complex of a downward-closed family of faces (which must
/// contain the empty face).
pub fn reduced_chain_complex_of_faces(faces: &[Face]) -> Result<ChainComplex<Face, Int>> {
    let mut bases: BTreeMap<i64, Vec<Face>> = BTreeMap::new();
    for &f in faces {
        bases.entry(f.len() as i64 - 1).or_default().push(f);
    }
    for b in bases.values_mut() {
        b.sort();
        b.dedup();
    }
    ChainComplex::from_fn(bases, |f: &Face, _| {
        f.iter()
            .enumerate()
            .map(|(k, v)| {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                (f.without(v), Int::from(sign))
            })
            .collect()
    })
}

/// Reduced homology of a downward-closed family of faces. The family may miss
/// singletons, in which case those vertices are ghosts and play no role.
pub fn reduced_homology_of_faces(faces: &[Face]) -> Result<BTreeMap<i64, HomologyGroup<Int>>> {
    let c = reduced_chain_complex_of_faces(faces)?;
    Ok(c.homology_all().into_iter().filter(|(_, g)| !g.is_zero()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: &[Vertex]) -> Face {
        Face::of(v)
    }

    #[test]
    fn face_order_is_cardinality_then_lex() {
        let mut v = vec![f(&[3, 4, 5]), f(&[1, 2, 3]), f(&[2]), f(&[1, 4, 5]), f(&[1, 2, 3, 4]), Face::EMPTY];
        v.sort();
        assert_eq!(
            v,
            vec![Face::EMPTY, f(&[2]), f(&[1, 2, 3]), f(&[1, 4, 5]), f(&[3, 4, 5]), f(&[1, 2, 3, 4])]
        );
        assert!(f(&[1, 5]) < f(&[2, 3]));
        assert!(f(&[1, 2, 9]) < f(&[1, 3, 4]));
    }

    #[test]
    fn face_helpers() {
        let a = f(&[2, 5, 7]);
        assert_eq!(a.to_vec(), vec![2, 5, 7]);
        assert_eq!(a.count_below(6), 2);
        assert_eq!(a.position(7), Some(2));
        assert_eq!(a.subsets().count(), 8);
        assert_eq!(a.subsets_of_size(2).count(), 3);
        assert_eq!(a.max(), Some(7));
        assert_eq!(a.to_string(), "{2,5,7}");
        assert!(Face::new([1, 1]).is_err());
        assert!(Face::new([0]).is_err());
        assert!(Face::new([65]).is_err());
        assert_eq!(Face::range(64).len(), 64);
    }

    #[test]
    fn triangle_boundary() {
        let k = SimplicialComplex::from_facets(3, &[vec![1, 2], vec![1, 3], vec![2, 3]]).unwrap();
        assert_eq!(k.num_faces(), 7);
        assert_eq!(k.missing_faces(), vec![f(&[1, 2, 3])]);
        let h = k.reduced_homology().unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[&1].rank, 1);
    }

    #[test]
    fn two_points_and_labels() {
        let k = SimplicialComplex::from_facets(2, &[]).unwrap();
        assert_eq!(k.faces(), &[Face::EMPTY, f(&[1]), f(&[2])]);
        assert!(SimplicialComplex::from_facets(2, &[vec![3]]).is_err());
    }

    #[test]
    fn wedge_example_by_substitution() {
        let tri = SimplicialComplex::simplex_boundary(f(&[1, 2, 3])).unwrap();
        let k = SimplicialComplex::simplex_boundary(f(&[1, 2, 3])).unwrap();
        let parts = vec![tri, SimplicialComplex::point(4).unwrap(), SimplicialComplex::point(5).unwrap()];
        let s = k.substitute(&parts).unwrap();
        let expected = SimplicialComplex::from_facets(
            5,
            &[vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4], vec![1, 2, 5], vec![1, 3, 5], vec![2, 3, 5], vec![4, 5]],
        )
        .unwrap();
        assert_eq!(s, expected);
        assert_eq!(
            s.missing_faces(),
            vec![f(&[1, 2, 3]), f(&[1, 4, 5]), f(&[2, 4, 5]), f(&[3, 4, 5])]
        );
        assert_eq!(substitution_missing_faces(&k, &parts).unwrap(), s.missing_faces());
        assert_eq!(s.full_subcomplex(f(&[4, 5])).unwrap().facets(), &[f(&[4, 5])]);
        assert_eq!(
            s.full_subcomplex(f(&[1, 2, 3])).unwrap(),
            SimplicialComplex::simplex_boundary(f(&[1, 2, 3])).unwrap()
        );
        assert!(is_subcomplex(&SimplicialComplex::simplex_boundary(f(&[1, 2, 3])).unwrap(), &s, None));
        assert!(!is_subcomplex(&SimplicialComplex::simplex(f(&[1, 2, 3])).unwrap(), &s, None));
    }

    #[test]
    fn join_and_substitution_of_an_edge() {
        let a = SimplicialComplex::simplex_boundary(f(&[1, 2])).unwrap();
        let b = SimplicialComplex::simplex_boundary(f(&[3, 4])).unwrap();
        let j = a.join(&b).unwrap();
        let e = SimplicialComplex::simplex(f(&[1, 2])).unwrap();
        let (s, maps) = e.substitute_relabelled(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s, j);
        assert_eq!(maps[1][&3], 3);
        assert_eq!(j.facets().len(), 4);
        assert!(a.join(&a).is_err());
        let mut mf = a.missing_faces();
        mf.extend(b.missing_faces());
        mf.sort();
        assert_eq!(j.missing_faces(), mf);
    }

    #[test]
    fn shifted_examples() {
        let tri = SimplicialComplex::simplex_boundary(f(&[1, 2, 3])).unwrap();
        assert_eq!(tri.shifted_orders().unwrap().len(), 6);
        let s = SimplicialComplex::simplex(f(&[1, 2, 3, 4])).unwrap();
        assert!(s.is_shifted().unwrap());
        // a path 1-2-3-4 is not shifted
        let p = SimplicialComplex::from_facets(4, &[vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        assert!(!p.is_shifted().unwrap());
    }

    #[test]
    fn remove_facet_and_json() {
        let s = SimplicialComplex::simplex(f(&[1, 2, 3])).unwrap();
        let b = s.without_facet(f(&[1, 2, 3])).unwrap();
        assert_eq!(b, SimplicialComplex::simplex_boundary(f(&[1, 2, 3])).unwrap());
        let k = SimplicialComplex::new(f(&[2, 5]), [f(&[2, 5])]).unwrap();
        let back = SimplicialComplex::from_json(&k.to_json()).unwrap();
        assert_eq!(k, back);
        let back = SimplicialComplex::from_json(&b.to_json()).unwrap();
        assert_eq!(b, back);
    }
}
