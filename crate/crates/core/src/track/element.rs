use nalgebra::DMatrix;

use crate::eigen::modal_decompose;
use crate::error::{Error, Result};
use crate::track::TrackProperties;

/// Rail DOFs kept after deleting the two railpad-supported translations
/// (`u₁`, `u₃`): `[θ₁, u₂, θ₂, θ₃]` as positions in `[u₁, θ₁, u₂, θ₂, u₃, θ₃]`.
pub const REDUCED_DOFS: [usize; 4] = [1, 2, 3, 5];

/// One symbolic matrix entry `coeff · L^l_power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub l_power: u32,
}

impl Term {
    pub const ZERO: Term = Term {
        coeff: 0,
        l_power: 0,
    };

    const fn new(coeff: i64, l_power: u32) -> Self {
        Term { coeff, l_power }
    }

    pub fn eval(self, length: f64) -> f64 {
        self.coeff as f64 * libm::pow(length, self.l_power as f64)
    }

    fn add(self, other: Term) -> Term {
        match (self.coeff, other.coeff) {
            (0, _) => other,
            (_, 0) => self,
            _ => {
                assert_eq!(self.l_power, other.l_power, "inconsistent L powers");
                let coeff = self.coeff + other.coeff;
                if coeff == 0 {
                    Term::ZERO
                } else {
                    Term::new(coeff, self.l_power)
                }
            }
        }
    }
}

// Cubic Hermite beam element, DOFs [u_a, θ_a, u_b, θ_b].
const T: fn(i64, u32) -> Term = Term::new;

fn beam_mass_pattern() -> [[Term; 4]; 4] {
    [
        [T(156, 0), T(22, 1), T(54, 0), T(-13, 1)],
        [T(22, 1), T(4, 2), T(13, 1), T(-3, 2)],
        [T(54, 0), T(13, 1), T(156, 0), T(-22, 1)],
        [T(-13, 1), T(-3, 2), T(-22, 1), T(4, 2)],
    ]
}

fn beam_stiffness_pattern() -> [[Term; 4]; 4] {
    [
        [T(12, 0), T(6, 1), T(-12, 0), T(6, 1)],
        [T(6, 1), T(4, 2), T(-6, 1), T(2, 2)],
        [T(-12, 0), T(-6, 1), T(12, 0), T(-6, 1)],
        [T(6, 1), T(2, 2), T(-6, 1), T(4, 2)],
    ]
}

fn two_element_pattern(element: [[Term; 4]; 4]) -> [[Term; 6]; 6] {
    let mut out = [[Term::ZERO; 6]; 6];
    for offset in [0, 2] {
        for i in 0..4 {
            for j in 0..4 {
                out[offset + i][offset + j] = out[offset + i][offset + j].add(element[i][j]);
            }
        }
    }
    out
}

fn reduce_pattern(full: [[Term; 6]; 6]) -> [[Term; 4]; 4] {
    let mut out = [[Term::ZERO; 4]; 4];
    for (i, &fi) in REDUCED_DOFS.iter().enumerate() {
        for (j, &fj) in REDUCED_DOFS.iter().enumerate() {
            out[i][j] = full[fi][fj];
        }
    }
    out
}

/// Integer/L pattern of the two-element rail mass matrix (factor `ρA L / 420`).
pub fn rail_mass_pattern() -> [[Term; 6]; 6] {
    two_element_pattern(beam_mass_pattern())
}

/// Integer/L pattern of the two-element rail stiffness matrix (factor `EI / L³`).
pub fn rail_stiffness_pattern() -> [[Term; 6]; 6] {
    two_element_pattern(beam_stiffness_pattern())
}

pub fn reduced_rail_mass_pattern() -> [[Term; 4]; 4] {
    reduce_pattern(rail_mass_pattern())
}

pub fn reduced_rail_stiffness_pattern() -> [[Term; 4]; 4] {
    reduce_pattern(rail_stiffness_pattern())
}

fn realize<const N: usize>(pattern: &[[Term; N]; N], factor: f64, length: f64) -> DMatrix<f64> {
    DMatrix::from_fn(N, N, |i, j| factor * pattern[i][j].eval(length))
}

/// Consistent mass of the two rail elements, DOFs `[u₁, θ₁, u₂, θ₂, u₃, θ₃]`.
pub fn rail_mass_matrix(props: &TrackProperties) -> DMatrix<f64> {
    let l = props.element_length;
    let factor = props.rail_density * props.rail_area * l / 420.0;
    realize(&rail_mass_pattern(), factor, l)
}

/// Bending stiffness of the two rail elements, DOFs `[u₁, θ₁, u₂, θ₂, u₃, θ₃]`.
pub fn rail_stiffness_matrix(props: &TrackProperties) -> DMatrix<f64> {
    let l = props.element_length;
    let factor = props.rail_young_modulus * props.rail_inertia / (l * l * l);
    realize(&rail_stiffness_pattern(), factor, l)
}

/// Deletes rows/columns of `u₁` and `u₃`, leaving `[θ₁, u₂, θ₂, θ₃]`.
pub fn reduced_rail_matrices(
    mass: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let pick =
        |m: &DMatrix<f64>| DMatrix::from_fn(4, 4, |i, j| m[(REDUCED_DOFS[i], REDUCED_DOFS[j])]);
    (pick(mass), pick(stiffness))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighDamping {
    /// Mass-proportional coefficient (1/s).
    pub a0: f64,
    /// Stiffness-proportional coefficient (s).
    pub a1: f64,
    /// Target circular frequencies (rad/s).
    pub omega1: f64,
    pub omega2: f64,
}

impl RayleighDamping {
    /// Damping ratio produced at circular frequency `omega`.
    pub fn ratio_at(&self, omega: f64) -> f64 {
        self.a0 / (2.0 * omega) + self.a1 * omega / 2.0
    }
}

/// Coefficients of `C = a0·M + a1·K` giving ratio `zeta1` at `omega1` and
/// `zeta2` at `omega2`.
pub fn rayleigh_coefficients(
    omega1: f64,
    omega2: f64,
    zeta1: f64,
    zeta2: f64,
) -> Result<RayleighDamping> {
    if !(omega1 > 0.0 && omega2 > 0.0 && omega1.is_finite() && omega2.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "omega",
            reason: alloc::format!("target frequencies must be > 0, got {omega1}, {omega2}"),
        });
    }
    let det = omega2 * omega2 - omega1 * omega1;
    if det == 0.0 || (det.abs() / (omega2 * omega2)) < 1e-14 {
        return Err(Error::SingularRayleigh { omega: omega1 });
    }
    let scale = 2.0 * omega1 * omega2 / det;
    let a0 = scale * (omega2 * zeta1 - omega1 * zeta2);
    let a1 = scale * (-zeta1 / omega2 + zeta2 / omega1);
    Ok(RayleighDamping {
        a0,
        a1,
        omega1,
        omega2,
    })
}

/// `C* = a0·M* + a1·K*` on `[θ₁, u₂, θ₂, θ₃]`, embedded in the 6×6 rail basis
/// with zero rows and columns for `u₁` and `u₃`.
pub fn rail_damping_matrix(
    reduced_mass: &DMatrix<f64>,
    reduced_stiffness: &DMatrix<f64>,
    a0: f64,
    a1: f64,
) -> DMatrix<f64> {
    let reduced = reduced_mass * a0 + reduced_stiffness * a1;
    let mut out = DMatrix::zeros(6, 6);
    for (i, &fi) in REDUCED_DOFS.iter().enumerate() {
        for (j, &fj) in REDUCED_DOFS.iter().enumerate() {
            out[(fi, fj)] = reduced[(i, j)];
        }
    }
    out
}

/// Rail matrices of one elementary section.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub rayleigh: RayleighDamping,
}

/// Builds rail mass, stiffness and Rayleigh damping. The Rayleigh targets are
/// the two lowest modes of the reduced rail `(M*, K*)`.
pub fn rail_element_matrices(props: &TrackProperties) -> Result<ElementMatrices> {
    props.validate()?;
    let mass = rail_mass_matrix(props);
    let stiffness = rail_stiffness_matrix(props);
    let (reduced_mass, reduced_stiffness) = reduced_rail_matrices(&mass, &stiffness);
    let modes = modal_decompose(&reduced_mass, &reduced_stiffness)?;
    let omega1 = libm::sqrt(modes.omega_sq[0]);
    let omega2 = libm::sqrt(modes.omega_sq[1]);
    let rayleigh = rayleigh_coefficients(omega1, omega2, props.zeta1, props.zeta2)?;
    let damping = rail_damping_matrix(&reduced_mass, &reduced_stiffness, rayleigh.a0, rayleigh.a1);
    Ok(ElementMatrices {
        mass,
        stiffness,
        damping,
        rayleigh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn props() -> TrackProperties {
        TrackProperties::reference()
    }

    #[test]
    fn mass_entries() {
        let p = props();
        let l = p.element_length;
        let c = p.rail_density * p.rail_area * l / 420.0;
        let m = rail_mass_matrix(&p);
        assert_relative_eq!(m[(0, 0)], 156.0 * c, max_relative = 1e-14);
        assert_relative_eq!(m[(2, 2)], 312.0 * c, max_relative = 1e-14);
        assert_relative_eq!(m[(3, 3)], 8.0 * l * l * c, max_relative = 1e-14);
        assert_eq!(m[(0, 4)], 0.0);
        assert_eq!(m[(4, 0)], 0.0);
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn stiffness_rigid_body_modes() {
        let p = props();
        let l = p.element_length;
        let k = rail_stiffness_matrix(&p);
        let s = p.rail_young_modulus * p.rail_inertia / (l * l * l);
        assert_relative_eq!(k[(0, 0)], 12.0 * s, max_relative = 1e-14);
        assert_relative_eq!(k[(2, 2)], 24.0 * s, max_relative = 1e-14);
        assert_relative_eq!(k[(1, 1)], 4.0 * l * l * s, max_relative = 1e-14);
        let translation = DVector::from_vec(alloc::vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let rotation = DVector::from_vec(alloc::vec![0.0, 1.0, l, 1.0, 2.0 * l, 1.0]);
        assert!((&k * translation).amax() < 1e-9 * k.amax());
        assert!((&k * rotation).amax() < 1e-9 * k.amax());
    }

    #[test]
    fn reduced_entries() {
        let p = props();
        let l = p.element_length;
        let (ms, ks) = reduced_rail_matrices(&rail_mass_matrix(&p), &rail_stiffness_matrix(&p));
        let c = p.rail_density * p.rail_area * l / 420.0;
        let s = p.rail_young_modulus * p.rail_inertia / (l * l * l);
        assert_relative_eq!(ms[(1, 1)], 312.0 * c, max_relative = 1e-14);
        assert_relative_eq!(ks[(0, 0)], 4.0 * l * l * s, max_relative = 1e-14);
    }

    #[test]
    fn reduce_embed_reduce_is_identity() {
        let p = props();
        let (ms, ks) = reduced_rail_matrices(&rail_mass_matrix(&p), &rail_stiffness_matrix(&p));
        let embedded = rail_damping_matrix(&ms, &ks, 1.0, 0.0);
        let (again, _) = reduced_rail_matrices(&embedded, &embedded);
        assert_eq!(again, ms);
    }

    #[test]
    fn rayleigh_zero_and_equal_ratios() {
        let r = rayleigh_coefficients(10.0, 30.0, 0.0, 0.0).unwrap();
        assert_eq!((r.a0, r.a1), (0.0, 0.0));

        let (w1, w2, z) = (120.0, 910.0, 0.05);
        let r = rayleigh_coefficients(w1, w2, z, z).unwrap();
        assert_relative_eq!(r.a0, 2.0 * z * w1 * w2 / (w1 + w2), max_relative = 1e-12);
        assert_relative_eq!(r.a1, 2.0 * z / (w1 + w2), max_relative = 1e-12);
        assert!((r.ratio_at(w1) - z).abs() < 1e-12);
        assert!((r.ratio_at(w2) - z).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_equal_frequencies_rejected() {
        assert!(matches!(
            rayleigh_coefficients(50.0, 50.0, 0.05, 0.05),
            Err(Error::SingularRayleigh { .. })
        ));
    }

    #[test]
    fn damping_embedding() {
        let p = props();
        let e = rail_element_matrices(&p).unwrap();
        for k in 0..6 {
            assert_eq!(e.damping[(0, k)], 0.0);
            assert_eq!(e.damping[(k, 0)], 0.0);
            assert_eq!(e.damping[(4, k)], 0.0);
            assert_eq!(e.damping[(k, 4)], 0.0);
        }
        let (ms, ks) = reduced_rail_matrices(&e.mass, &e.stiffness);
        let expected = e.rayleigh.a0 * ms[(0, 0)] + e.rayleigh.a1 * ks[(0, 0)];
        assert_relative_eq!(e.damping[(1, 1)], expected, max_relative = 1e-14);
        assert!(rail_damping_matrix(&ms, &ks, 0.0, 0.0)
            .iter()
            .all(|&x| x == 0.0));
    }
}
