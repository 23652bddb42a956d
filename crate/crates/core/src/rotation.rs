//! Elementary orthogonal factors and their accumulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::sympl::SymplecticGenerator;
use crate::EPS;

/// Plane rotation acting on coordinates `i < j` with block `[[c, s], [-s, c]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GivensRotation {
    pub i: usize,
    pub j: usize,
    pub c: f64,
    pub s: f64,
}

impl GivensRotation {
    pub fn new(i: usize, j: usize, c: f64, s: f64) -> Result<Self> {
        if i >= j {
            return Err(Error::Precondition(format!("rotation indices need i < j, got ({i}, {j})")));
        }
        if ((c * c + s * s) - 1.0).abs() > 4.0 * EPS {
            return Err(Error::Precondition(format!("c^2 + s^2 = {} is not 1", c * c + s * s)));
        }
        Ok(Self { i, j, c, s })
    }

    pub fn identity(i: usize, j: usize) -> Self {
        Self { i, j, c: 1.0, s: 0.0 }
    }

    /// The rotation on `(p, q)` whose column `p` is `(vp e_p + vq e_q) / |(vp, vq)|`.
    /// `p` and `q` may come in either order.
    pub fn with_column(p: usize, q: usize, vp: f64, vq: f64) -> Self {
        let r = vp.hypot(vq);
        let (vp, vq) = (vp / r, vq / r);
        if p < q {
            Self { i: p, j: q, c: vp, s: -vq }
        } else {
            Self { i: q, j: p, c: vp, s: vq }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.s == 0.0 && self.c == 1.0
    }

    fn block(&self) -> [f64; 4] {
        [self.c, self.s, -self.s, self.c]
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            i: self.i + offset,
            j: self.j + offset,
            ..*self
        }
    }

    pub fn to_matrix(&self, n: usize) -> DenseMatrix {
        let mut g = DenseMatrix::identity(n);
        g[(self.i, self.i)] = self.c;
        g[(self.i, self.j)] = self.s;
        g[(self.j, self.i)] = -self.s;
        g[(self.j, self.j)] = self.c;
        g
    }
}

/// `G^T A G` for a plane rotation, touching only rows and columns `i`, `j`.
pub fn apply_givens_similarity(a: &DenseMatrix, g: &GivensRotation) -> Result<DenseMatrix> {
    let n = a.square_dim()?;
    if g.j >= n {
        return Err(Error::IndexOutOfBounds { i: g.i, j: g.j, n });
    }
    let mut out = a.clone();
    out.rotate_rows(&[g.i, g.j], &g.block());
    out.rotate_cols(&[g.i, g.j], &g.block());
    Ok(out)
}

/// An orthogonal `m x m` block embedded at an ordered index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedBlock {
    pub idx: Vec<usize>,
    /// Row-major `m x m`.
    pub g: Vec<f64>,
}

impl EmbeddedBlock {
    pub fn new(idx: Vec<usize>, g: Vec<f64>) -> Self {
        debug_assert_eq!(idx.len() * idx.len(), g.len());
        Self { idx, g }
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            idx: self.idx.iter().map(|i| i + offset).collect(),
            g: self.g.clone(),
        }
    }
}

/// One factor of an accumulated orthogonal transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Factor {
    Givens(GivensRotation),
    Block(EmbeddedBlock),
    Symplectic(SymplecticGenerator),
}

impl Factor {
    /// Visits the elementary embedded blocks this factor is made of, in order.
    pub fn for_each_block(&self, f: &mut dyn FnMut(&[usize], &[f64])) {
        match self {
            Factor::Givens(g) => f(&[g.i, g.j], &g.block()),
            Factor::Block(b) => f(&b.idx, &b.g),
            Factor::Symplectic(s) => s.for_each_block(f),
        }
    }

    pub fn apply_similarity(&self, a: &mut DenseMatrix) {
        self.for_each_block(&mut |idx, g| {
            a.rotate_rows(idx, g);
            a.rotate_cols(idx, g);
        });
    }

    pub fn apply_right(&self, q: &mut DenseMatrix) {
        self.for_each_block(&mut |idx, g| q.rotate_cols(idx, g));
    }

    pub fn to_matrix(&self, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::identity(n);
        self.apply_right(&mut m);
        m
    }
}

/// Running product `Q = F_1 F_2 ... F_k` of elementary factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalAccumulator {
    n: usize,
    q: DenseMatrix,
    factors: Vec<Factor>,
}

impl OrthogonalAccumulator {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            q: DenseMatrix::identity(n),
            factors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn into_q(self) -> DenseMatrix {
        self.q
    }

    /// Appends a factor, updating `Q` and each target `A <- F^T A F`.
    pub fn push(&mut self, factor: Factor, targets: &mut [&mut DenseMatrix]) {
        for t in targets.iter_mut() {
            factor.apply_similarity(t);
        }
        factor.apply_right(&mut self.q);
        self.factors.push(factor);
    }

    /// Recomputes the product from the stored factors.
    pub fn product_of_factors(&self) -> DenseMatrix {
        let mut m = DenseMatrix::identity(self.n);
        for f in &self.factors {
            f.apply_right(&mut m);
        }
        m
    }

    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.q).expect("accumulator is square")
    }
}

/// `||Q^T Q - I||_F`.
pub fn orthogonality_residual(q: &DenseMatrix) -> Result<f64> {
    let n = q.square_dim()?;
    let qtq = q.transpose().matmul(q)?;
    Ok(qtq.sub(&DenseMatrix::identity(n))?.frobenius_norm())
}
