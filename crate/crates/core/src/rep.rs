//! Matrix representations of labeled quivers over a field.
//!
//! An arrow `α : i → j` with label dimension `h` is stored as `h` matrices of
//! shape `d_j × d_i`, one per basis vector of the label. Vectors are columns.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Field, Fp, Matrix, Subspace, QQ};
use crate::quiver::{Expansion, LabeledQuiver, Path, Relation};

#[derive(Clone, PartialEq, Eq)]
pub struct Representation<F: Field> {
    field: F,
    quiver: Arc<LabeledQuiver>,
    dims: Vec<usize>,
    maps: Vec<Vec<Matrix<F>>>,
}

impl<F: Field> std::fmt::Debug for Representation<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Representation").field("dims", &self.dims).field("maps", &self.maps).finish()
    }
}

/// A finite-field representation, the object of exhaustive stability analysis.
pub type FiniteFieldRep = Representation<Fp>;

impl<F: Field> Representation<F> {
    /// Builds a representation, checking matrix shapes and every relation of
    /// the quiver.
    pub fn new(field: F, quiver: Arc<LabeledQuiver>, dims: Vec<usize>, maps: Vec<Vec<Matrix<F>>>) -> Result<Self> {
        let rep = Self::from_parts(field, quiver, dims, maps)?;
        if let Some(index) = rep.check_relations(rep.quiver.relations())? {
            return Err(Error::RelationViolated { index });
        }
        Ok(rep)
    }

    /// Shape-checked constructor that does not look at relations.
    pub fn from_parts(field: F, quiver: Arc<LabeledQuiver>, dims: Vec<usize>, maps: Vec<Vec<Matrix<F>>>) -> Result<Self> {
        if dims.len() != quiver.num_vertices() {
            return Err(Error::ShapeMismatch(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.num_vertices()
            )));
        }
        if maps.len() != quiver.num_arrows() {
            return Err(Error::ShapeMismatch(format!("{} maps for {} arrows", maps.len(), quiver.num_arrows())));
        }
        for (a, ms) in quiver.arrows().iter().zip(&maps) {
            if ms.len() != a.label_dim {
                return Err(Error::ShapeMismatch(format!(
                    "arrow {} needs {} matrices, got {}",
                    a.id,
                    a.label_dim,
                    ms.len()
                )));
            }
            for m in ms {
                if m.rows() != dims[a.dst] || m.cols() != dims[a.src] {
                    return Err(Error::ShapeMismatch(format!(
                        "arrow {} needs {}x{} matrices, got {}x{}",
                        a.id,
                        dims[a.dst],
                        dims[a.src],
                        m.rows(),
                        m.cols()
                    )));
                }
            }
        }
        Ok(Representation { field, quiver, dims, maps })
    }

    /// The representation with all-zero maps.
    pub fn zero_maps(field: F, quiver: Arc<LabeledQuiver>, dims: Vec<usize>) -> Result<Self> {
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| {
                let d = dims.get(a.src).zip(dims.get(a.dst));
                let (s, t) = d.map(|(s, t)| (*s, *t)).unwrap_or((0, 0));
                vec![Matrix::zeros(&field, t, s); a.label_dim]
            })
            .collect();
        Self::new(field, quiver, dims, maps)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn quiver(&self) -> &Arc<LabeledQuiver> {
        &self.quiver
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }
    /// Matrices of arrow `a`, one per label basis vector.
    pub fn map(&self, a: usize) -> &[Matrix<F>] {
        &self.maps[a]
    }
    pub fn maps(&self) -> &[Vec<Matrix<F>>] {
        &self.maps
    }

    /// The composite `M_{α_l}^{(h_l)} ⋯ M_{α_1}^{(h_1)}` of a path, where every
    /// labeled arrow uses basis index `k` and unlabeled arrows their only matrix.
    fn path_matrix(&self, p: &Path, k: usize) -> Matrix<F> {
        let mut m = Matrix::identity(&self.field, self.dims[p.source()]);
        for &a in p.arrows() {
            let h = if self.quiver.arrows()[a].label_dim == 1 { 0 } else { k };
            m = self.maps[a][h].mul(&m);
        }
        m
    }

    /// Index of the first relation whose matrix sum is nonzero, if any.
    pub fn check_relations(&self, relations: &[Relation]) -> Result<Option<usize>> {
        for (index, r) in relations.iter().enumerate() {
            for (_, p) in r.terms() {
                if let Some(&a) = p.arrows().iter().find(|&&a| a >= self.quiver.num_arrows()) {
                    return Err(Error::UnknownArrow(format!("#{a}")));
                }
            }
            for k in 0..r.label_dim() {
                let mut sum = Matrix::zeros(&self.field, self.dims[r.target()], self.dims[r.source()]);
                for (c, p) in r.terms() {
                    let c = self.field.from_rational(c)?;
                    sum = sum.add(&self.path_matrix(p, k).scale(&c));
                }
                if !sum.is_zero() {
                    return Ok(Some(index));
                }
            }
        }
        Ok(None)
    }

    /// True iff the tuple of subspaces is closed under every arrow.
    pub fn is_subrep(&self, spaces: &[Subspace<F>]) -> bool {
        spaces.len() == self.dims.len()
            && spaces.iter().zip(&self.dims).all(|(s, &d)| s.ambient() == d)
            && self.quiver.arrows().iter().enumerate().all(|(ai, a)| {
                self.maps[ai].iter().all(|m| spaces[a.src].image_under(m).is_subspace_of(&spaces[a.dst]))
            })
    }

    /// Checks closure and wraps the tuple as a subrepresentation.
    pub fn subrep(&self, spaces: Vec<Subspace<F>>) -> Result<SubRep<F>> {
        if !self.is_subrep(&spaces) {
            return Err(Error::Precondition("subspace tuple is not closed under the arrows".into()));
        }
        Ok(SubRep { spaces })
    }

    pub fn zero_subrep(&self) -> SubRep<F> {
        SubRep { spaces: self.dims.iter().map(|&d| Subspace::zero(&self.field, d)).collect() }
    }

    pub fn full_subrep(&self) -> SubRep<F> {
        SubRep { spaces: self.dims.iter().map(|&d| Subspace::full(&self.field, d)).collect() }
    }

    /// Smallest subrepresentation containing the given subspaces.
    pub fn generated_subrep(&self, seeds: Vec<Subspace<F>>) -> SubRep<F> {
        let mut spaces = seeds;
        loop {
            let mut grew = false;
            for (ai, a) in self.quiver.arrows().iter().enumerate() {
                for m in &self.maps[ai] {
                    let img = spaces[a.src].image_under(m);
                    if !img.is_subspace_of(&spaces[a.dst]) {
                        spaces[a.dst] = spaces[a.dst].sum(&img);
                        grew = true;
                    }
                }
            }
            if !grew {
                return SubRep { spaces };
            }
        }
    }

    /// The subrepresentation as a representation in its own echelon bases.
    pub fn restrict(&self, sub: &SubRep<F>) -> Representation<F> {
        let dims = sub.dims();
        let maps = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                self.maps[ai]
                    .iter()
                    .map(|m| {
                        let target = &sub.spaces[a.dst];
                        let cols: Vec<Vec<F::Elem>> = sub.spaces[a.src]
                            .basis()
                            .iter()
                            .map(|b| {
                                let img = m.apply(b);
                                target.pivots().iter().map(|&pc| img[pc].clone()).collect()
                            })
                            .collect();
                        Matrix::from_columns(&self.field, dims[a.dst], &cols)
                    })
                    .collect()
            })
            .collect();
        Representation { field: self.field.clone(), quiver: self.quiver.clone(), dims, maps }
    }

    /// The quotient `M / N` in the coordinates of the non-pivot positions.
    pub fn quotient(&self, sub: &SubRep<F>) -> Representation<F> {
        let dims: Vec<usize> = sub.spaces.iter().map(|s| s.codim()).collect();
        let maps = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                self.maps[ai]
                    .iter()
                    .map(|m| {
                        let (src, dst) = (&sub.spaces[a.src], &sub.spaces[a.dst]);
                        let cols: Vec<Vec<F::Elem>> = src
                            .complement_positions()
                            .into_iter()
                            .map(|c| {
                                let mut e = vec![self.field.zero(); self.dims[a.src]];
                                e[c] = self.field.one();
                                dst.quotient_coords(&m.apply(&e))
                            })
                            .collect();
                        Matrix::from_columns(&self.field, dims[a.dst], &cols)
                    })
                    .collect()
            })
            .collect();
        Representation { field: self.field.clone(), quiver: self.quiver.clone(), dims, maps }
    }

    /// Pulls a subrepresentation of `self.quotient(base)` back to `self`.
    pub fn lift_from_quotient(&self, base: &SubRep<F>, sub_of_quotient: &SubRep<F>) -> SubRep<F> {
        let spaces = base
            .spaces
            .iter()
            .zip(&sub_of_quotient.spaces)
            .map(|(b, q)| {
                let lifted: Vec<_> = q.basis().iter().map(|v| b.lift(v)).collect();
                b.sum(&Subspace::span(&self.field, b.ambient(), &lifted))
            })
            .collect();
        SubRep { spaces }
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Representation<F>) -> Result<Representation<F>> {
        if self.quiver != other.quiver {
            return Err(Error::ShapeMismatch("direct sum of representations of different quivers".into()));
        }
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(x, y)| x.iter().zip(y).map(|(m, n)| m.block_diag(n)).collect())
            .collect();
        Ok(Representation { field: self.field.clone(), quiver: self.quiver.clone(), dims, maps })
    }

    /// Basis of `Hom(self, other)`: tuples `(X_i)` with `X_j M_α = M′_α X_i`.
    pub fn hom_basis(&self, other: &Representation<F>) -> Result<Vec<Vec<Matrix<F>>>> {
        if self.quiver != other.quiver {
            return Err(Error::ShapeMismatch("homomorphisms between representations of different quivers".into()));
        }
        let f = &self.field;
        // unknown X_i occupies a block of d′_i × d_i entries, row-major
        let mut offset = Vec::with_capacity(self.dims.len());
        let mut n = 0;
        for (d, e) in self.dims.iter().zip(&other.dims) {
            offset.push(n);
            n += d * e;
        }
        let mut rows: Vec<Vec<F::Elem>> = Vec::new();
        for (ai, a) in self.quiver.arrows().iter().enumerate() {
            let (i, j) = (a.src, a.dst);
            let (di, dj, ei, ej) = (self.dims[i], self.dims[j], other.dims[i], other.dims[j]);
            for (m, mp) in self.maps[ai].iter().zip(&other.maps[ai]) {
                // entry (r, c) of X_j M − M′ X_i, with r < e_j, c < d_i
                for r in 0..ej {
                    for c in 0..di {
                        let mut row = vec![f.zero(); n];
                        for t in 0..dj {
                            let idx = offset[j] + r * dj + t;
                            row[idx] = f.add(&row[idx], m.get(t, c));
                        }
                        for t in 0..ei {
                            let idx = offset[i] + t * di + c;
                            row[idx] = f.sub(&row[idx], mp.get(r, t));
                        }
                        rows.push(row);
                    }
                }
            }
        }
        let kernel = if rows.is_empty() {
            Subspace::full(f, n)
        } else {
            Matrix::from_rows(f, rows.len(), n, rows)?.kernel()
        };
        Ok(kernel
            .basis()
            .iter()
            .map(|v| {
                self.dims
                    .iter()
                    .zip(&other.dims)
                    .zip(&offset)
                    .map(|((&d, &e), &o)| {
                        let entries = (0..e).map(|r| v[o + r * d..o + (r + 1) * d].to_vec()).collect();
                        Matrix::from_rows(f, e, d, entries).expect("block shape")
                    })
                    .collect()
            })
            .collect())
    }

    /// Transfers a representation of a labeled quiver to its expansion.
    pub fn to_expanded(&self, exp: &Expansion) -> Result<Representation<F>> {
        let maps = exp.origin.iter().map(|&(a, k)| vec![self.maps[a][k].clone()]).collect();
        Representation::new(self.field.clone(), Arc::new(exp.quiver.clone()), self.dims.clone(), maps)
    }

    /// Inverse of [`Representation::to_expanded`].
    pub fn from_expanded(rep: &Representation<F>, labeled: Arc<LabeledQuiver>, exp: &Expansion) -> Result<Representation<F>> {
        let maps = exp
            .copies
            .iter()
            .map(|cs| cs.iter().map(|&c| rep.maps[c][0].clone()).collect())
            .collect();
        Representation::new(rep.field.clone(), labeled, rep.dims.clone(), maps)
    }
}

impl Representation<QQ> {
    /// Reduces every entry modulo `p`; fails if a denominator is divisible by `p`.
    pub fn reduce_mod_p(&self, field: Fp) -> Result<Representation<Fp>> {
        let maps = self
            .maps
            .iter()
            .map(|ms| {
                ms.iter()
                    .map(|m| {
                        let rows = (0..m.rows())
                            .map(|r| m.row(r).iter().map(|q| field.from_rational(q)).collect::<Result<Vec<_>>>())
                            .collect::<Result<Vec<_>>>()?;
                        Matrix::from_rows(&field, m.rows(), m.cols(), rows)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Representation::from_parts(field, self.quiver.clone(), self.dims.clone(), maps)
    }
}

impl Representation<Fp> {
    /// Exact isomorphism test: searches `Hom(self, other)` for an element with
    /// every component invertible, giving up beyond `cap` candidates.
    pub fn is_isomorphic(&self, other: &Representation<Fp>, cap: u128) -> Result<bool> {
        if self.dims != other.dims {
            return Ok(false);
        }
        let basis = self.hom_basis(other)?;
        let p = self.field.p() as u128;
        let count = p.checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::InstanceTooLarge { count, cap });
        }
        let f = self.field;
        let mut coeffs = vec![0u8; basis.len()];
        loop {
            let invertible = (0..self.dims.len()).all(|i| {
                let mut x = Matrix::zeros(&f, self.dims[i], self.dims[i]);
                for (c, b) in coeffs.iter().zip(&basis) {
                    if *c != 0 {
                        x = x.add(&b[i].scale(c));
                    }
                }
                x.rank() == self.dims[i]
            });
            if invertible {
                return Ok(true);
            }
            let mut pos = coeffs.len();
            loop {
                if pos == 0 {
                    return Ok(false);
                }
                pos -= 1;
                coeffs[pos] += 1;
                if (coeffs[pos] as u128) < p {
                    break;
                }
                coeffs[pos] = 0;
            }
        }
    }
}

/// A subrepresentation, given by an echelon-basis subspace at every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubRep<F: Field> {
    spaces: Vec<Subspace<F>>,
}

impl<F: Field> SubRep<F> {
    pub fn spaces(&self) -> &[Subspace<F>] {
        &self.spaces
    }
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }
    pub fn total_dim(&self) -> usize {
        self.spaces.iter().map(|s| s.dim()).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }
    pub fn is_full(&self) -> bool {
        self.spaces.iter().all(|s| s.is_full())
    }
    pub fn is_contained_in(&self, other: &SubRep<F>) -> bool {
        self.spaces.len() == other.spaces.len() && self.spaces.iter().zip(&other.spaces).all(|(a, b)| a.is_subspace_of(b))
    }
    /// Echelon basis rows per vertex.
    pub fn bases(&self) -> Vec<Vec<Vec<F::Elem>>> {
        self.spaces.iter().map(|s| s.basis().to_vec()).collect()
    }
    pub(crate) fn from_spaces_unchecked(spaces: Vec<Subspace<F>>) -> Self {
        SubRep { spaces }
    }
}
