//! Spectral decompositions: the real generalized problem `K φ = ω² M φ` and the
//! complex eigendecomposition of the first-order state matrix used when the
//! damping is not diagonalized by the undamped modes.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::linalg::Schur;
use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{relative_asymmetry, symmetrize};

const SYMMETRY_TOL: f64 = 1e-10;
const NEGATIVE_EIGEN_TOL: f64 = 1e-8;
/// `σ_min / σ_max` of the eigenvector matrix below which it is treated as defective.
pub const DEFECTIVE_TOL: f64 = 1e-10;
const INVERSE_CHECK_TOL: f64 = 1e-8;

type C64 = Complex<f64>;

/// Undamped modes: ascending `ω²` and mass-normalized shapes (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ModalBasis {
    pub omega_sq: DVector<f64>,
    pub shapes: DMatrix<f64>,
}

impl ModalBasis {
    pub fn n_modes(&self) -> usize {
        self.omega_sq.len()
    }

    pub fn omega(&self, mode: usize) -> f64 {
        self.omega_sq[mode].sqrt()
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        self.omega_sq
            .iter()
            .map(|w2| w2.sqrt() / (2.0 * PI))
            .collect()
    }

    /// `Φᵀ f`
    pub fn modal_force(&self, force: &DVector<f64>) -> DVector<f64> {
        self.shapes.tr_mul(force)
    }
}

/// Solves `K φ = ω² M φ` through the Cholesky factor of `M`.
pub fn modal_decompose(mass: &DMatrix<f64>, stiffness: &DMatrix<f64>) -> Result<ModalBasis> {
    if !mass.is_square() || mass.shape() != stiffness.shape() {
        return Err(Error::InvalidParameter {
            field: "mass/stiffness",
            reason: format!("shapes {:?} and {:?}", mass.shape(), stiffness.shape()),
        });
    }
    for (what, m) in [("mass", mass), ("stiffness", stiffness)] {
        let asymmetry = relative_asymmetry(m);
        if asymmetry > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { what, asymmetry });
        }
    }
    let n = mass.nrows();
    let chol = mass
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Factorization {
            what: "mass",
            detail: format!(
                "matrix is not positive definite (smallest diagonal {:.3e}, largest {:.3e})",
                mass.diagonal().min(),
                mass.diagonal().max()
            ),
        })?;
    let l = chol.l();
    let l_inv_k = l
        .solve_lower_triangular(stiffness)
        .expect("Cholesky factor has a positive diagonal");
    let mut reduced = l
        .solve_lower_triangular(&l_inv_k.transpose())
        .expect("Cholesky factor has a positive diagonal");
    symmetrize(&mut reduced);

    let eig = reduced.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let largest = eig.eigenvalues.amax();
    let mut omega_sq = DVector::zeros(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut w2 = eig.eigenvalues[src];
        if w2 < 0.0 {
            if w2 < -NEGATIVE_EIGEN_TOL * largest {
                return Err(Error::Factorization {
                    what: "stiffness",
                    detail: format!("negative eigenvalue {w2:.3e} (largest {largest:.3e})"),
                });
            }
            w2 = 0.0;
        }
        omega_sq[col] = w2;
        vectors.set_column(col, &eig.eigenvectors.column(src));
    }
    let mut shapes = l
        .transpose()
        .solve_upper_triangular(&vectors)
        .expect("Cholesky factor has a positive diagonal");
    for mut column in shapes.column_iter_mut() {
        let pivot = column.iamax();
        if column[pivot] < 0.0 {
            column.neg_mut();
        }
    }
    Ok(ModalBasis { omega_sq, shapes })
}

/// First-order form `Ẏ = D Y + A⁻¹ [Φᵀ f; 0]` with `Y = [Z; Ż]`,
/// `A = [[ΦᵀCΦ, I], [I, 0]]`, `B = [[diag ω², 0], [0, -I]]`.
///
/// `D = -A⁻¹ B`. The minus sign is what makes the first-order system equivalent
/// to `Z̈ + ΦᵀCΦ Ż + diag(ω²) Z = Φᵀ f`; `D = A⁻¹ B` would grow instead of decay.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    pub d: DMatrix<f64>,
    /// Maps a physical load vector to `A⁻¹ [Φᵀ f; 0]` (2n × n_dof).
    pub forcing_template: DMatrix<f64>,
    pub modal_damping: DMatrix<f64>,
    pub shapes: DMatrix<f64>,
}

impl StateMatrix {
    pub fn n_modes(&self) -> usize {
        self.shapes.ncols()
    }
}

pub fn build_state_matrix(modal: &ModalBasis, damping: &DMatrix<f64>) -> Result<StateMatrix> {
    let phi = &modal.shapes;
    let n_dof = phi.nrows();
    if damping.shape() != (n_dof, n_dof) {
        return Err(Error::InvalidParameter {
            field: "damping",
            reason: format!("expected {n_dof}x{n_dof}, got {:?}", damping.shape()),
        });
    }
    let n = modal.n_modes();
    let modal_damping = phi.tr_mul(&(damping * phi));

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, 0), (n, n)).copy_from(&modal_damping);
    a.view_mut((0, n), (n, n)).fill_with_identity();
    a.view_mut((n, 0), (n, n)).fill_with_identity();
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    b.view_mut((0, 0), (n, n)).set_diagonal(&modal.omega_sq);
    b.view_mut((n, n), (n, n)).fill_diagonal(-1.0);

    let a_inv = a.try_inverse().ok_or_else(|| Error::Factorization {
        what: "state matrix A",
        detail: "singular".into(),
    })?;
    let d = -(&a_inv * b);

    let mut modal_load = DMatrix::zeros(2 * n, n_dof);
    modal_load
        .view_mut((0, 0), (n, n_dof))
        .copy_from(&phi.transpose());
    let forcing_template = &a_inv * modal_load;

    Ok(StateMatrix {
        d,
        forcing_template,
        modal_damping,
        shapes: phi.clone(),
    })
}

/// Complex modes of the state matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StateBasis {
    /// Eigenvalues, ascending `|λ|`; conjugate pairs with positive imaginary part first.
    pub lambda: DVector<C64>,
    pub psi: DMatrix<C64>,
    pub psi_inv: DMatrix<C64>,
    /// `ψ⁻¹ A⁻¹ [Φᵀ; 0]`: row `i` applied to a load pattern gives `b_i`.
    pub force_map: DMatrix<C64>,
    /// `Φ ψ_Z`: physical displacements from modal state coordinates.
    pub displacement_map: DMatrix<C64>,
    /// `Φ ψ_Ż`: physical velocities from modal state coordinates.
    pub velocity_map: DMatrix<C64>,
}

impl StateBasis {
    pub fn n_states(&self) -> usize {
        self.lambda.len()
    }

    /// `b_i` for a physical load pattern.
    pub fn forcing(&self, pattern: &DVector<f64>) -> DVector<C64> {
        let p = pattern.map(C64::from);
        &self.force_map * p
    }
}

/// Eigenvectors of an upper-triangular matrix by back-substitution, columns
/// ordered as the diagonal.
fn triangular_eigenvectors(t: &DMatrix<C64>) -> DMatrix<C64> {
    let m = t.nrows();
    let scale = t.iter().fold(0.0f64, |acc, z| acc.max(z.modulus()));
    let mut x = DMatrix::zeros(m, m);
    for k in 0..m {
        let lambda = t[(k, k)];
        let smin = (f64::EPSILON * lambda.modulus().max(scale)).max(f64::MIN_POSITIVE);
        x[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.modulus() < smin {
                denom = C64::new(smin, 0.0);
            }
            x[(i, k)] = -s / denom;
        }
    }
    x
}

fn sorted_order(values: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].modulus().total_cmp(&values[b].modulus()));
    // Clusters of equal modulus (conjugate pairs, repeated roots): positive imag first.
    let mut start = 0;
    while start < order.len() {
        let base = values[order[start]].modulus();
        let mut end = start + 1;
        while end < order.len()
            && values[order[end]].modulus() - base <= 1e-9 * base.max(f64::MIN_POSITIVE)
        {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| values[b].im.total_cmp(&values[a].im));
        start = end;
    }
    order
}

pub fn state_decompose(state: &StateMatrix) -> Result<StateBasis> {
    let size = state.d.nrows();
    let n = state.n_modes();
    // D carries ω² next to 1; balancing brings its entries to the scale of ω
    let mut balanced = state.d.clone();
    let scaling = balance_parlett_reinsch(&mut balanced);
    let schur = Schur::try_new(balanced.map(C64::from), f64::EPSILON, 1000 * size.max(1))
        .ok_or_else(|| Error::Factorization {
            what: "state matrix D",
            detail: "Schur iteration did not converge".into(),
        })?;
    let (q, t) = schur.unpack();
    let mut eigvecs = q * triangular_eigenvectors(&t);
    for (i, mut row) in eigvecs.row_iter_mut().enumerate() {
        row *= C64::from(scaling[i]);
    }
    let diag: Vec<C64> = (0..size).map(|i| t[(i, i)]).collect();
    let order = sorted_order(&diag);

    let mut lambda = DVector::zeros(size);
    let mut psi = DMatrix::zeros(size, size);
    for (col, &src) in order.iter().enumerate() {
        lambda[col] = diag[src];
        let mut v = eigvecs.column(src).clone_owned();
        let norm = v.norm();
        let pivot = (0..size)
            .max_by(|&a, &b| v[a].modulus().total_cmp(&v[b].modulus()))
            .unwrap_or(0);
        // unit 2-norm, largest component real positive
        let phase = v[pivot] / C64::new(v[pivot].modulus(), 0.0);
        v /= phase * C64::new(norm, 0.0);
        psi.set_column(col, &v);
    }

    let sv = psi.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if smin.is_nan() || smin <= DEFECTIVE_TOL * smax {
        return Err(Error::DefectiveStateMatrix {
            min_singular_value: smin,
            max_singular_value: smax,
        });
    }
    let psi_inv = psi
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Factorization {
            what: "eigenvector matrix",
            detail: "singular".into(),
        })?;
    let residual = (&psi * &psi_inv - DMatrix::<C64>::identity(size, size))
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.modulus()));
    if residual > INVERSE_CHECK_TOL {
        return Err(Error::Factorization {
            what: "eigenvector matrix",
            detail: format!("ψ·ψ⁻¹ deviates from I by {residual:.3e}"),
        });
    }

    let template = state.forcing_template.map(C64::from);
    let force_map = &psi_inv * template;
    let phi = state.shapes.map(C64::from);
    let displacement_map = &phi * psi.rows(0, n);
    let velocity_map = &phi * psi.rows(n, n);

    Ok(StateBasis {
        lambda,
        psi,
        psi_inv,
        force_map,
        displacement_map,
        velocity_map,
    })
}
