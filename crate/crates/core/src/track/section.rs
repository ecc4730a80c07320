use nalgebra::DMatrix;

use super::element::{rail_element_matrices, RayleighDamping};
use super::local::{SLEEPER1, SLEEPER2, U1, U3};
use super::TrackProperties;
use crate::error::Result;

/// Mass, damping and stiffness of one elementary section, DOFs
/// `[u₁, θ₁, u₂, θ₂, u₃, θ₃, u_T1, u_T2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionMatrices {
    pub mass: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub rayleigh: RayleighDamping,
}

/// Adds a two-node spring (or dashpot) of rate `k` between DOFs `a` and `b`.
fn couple(m: &mut DMatrix<f64>, a: usize, b: usize, k: f64) {
    m[(a, a)] += k;
    m[(b, b)] += k;
    m[(a, b)] -= k;
    m[(b, a)] -= k;
}

pub fn section_matrices(props: &TrackProperties) -> Result<SectionMatrices> {
    let rail = rail_element_matrices(props)?;
    let mut mass = DMatrix::zeros(8, 8);
    let mut damping = DMatrix::zeros(8, 8);
    let mut stiffness = DMatrix::zeros(8, 8);
    mass.view_mut((0, 0), (6, 6)).copy_from(&rail.mass);
    damping.view_mut((0, 0), (6, 6)).copy_from(&rail.damping);
    stiffness
        .view_mut((0, 0), (6, 6))
        .copy_from(&rail.stiffness);

    for (rail_dof, sleeper) in [(U1, SLEEPER1), (U3, SLEEPER2)] {
        mass[(sleeper, sleeper)] += props.sleeper_mass;
        couple(&mut stiffness, rail_dof, sleeper, props.railpad_stiffness);
        couple(&mut damping, rail_dof, sleeper, props.railpad_damping);
        // ballast: sleeper to ground
        stiffness[(sleeper, sleeper)] += props.ballast_stiffness;
        damping[(sleeper, sleeper)] += props.ballast_damping;
    }

    Ok(SectionMatrices {
        mass,
        damping,
        stiffness,
        rayleigh: rail.rayleigh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_symmetric;
    use crate::track::element::{rail_mass_matrix, rail_stiffness_matrix};

    #[test]
    fn sleeper_rows() {
        let p = TrackProperties::reference();
        let s = section_matrices(&p).unwrap();
        assert_eq!(
            s.stiffness[(6, 6)],
            p.railpad_stiffness + p.ballast_stiffness
        );
        assert_eq!(s.stiffness[(0, 6)], -p.railpad_stiffness);
        assert_eq!(s.damping[(4, 7)], -p.railpad_damping);
        assert_eq!(s.damping[(7, 7)], p.railpad_damping + p.ballast_damping);
        assert_eq!(s.mass[(6, 6)], p.sleeper_mass);
        assert_eq!(s.mass[(6, 7)], 0.0);
    }

    #[test]
    fn rail_block_is_bare_rail_plus_pads() {
        let p = TrackProperties::reference();
        let s = section_matrices(&p).unwrap();
        let mut k = s.stiffness.view((0, 0), (6, 6)).clone_owned();
        k[(0, 0)] -= p.railpad_stiffness;
        k[(4, 4)] -= p.railpad_stiffness;
        assert_eq!(k, rail_stiffness_matrix(&p));
        assert_eq!(
            s.mass.view((0, 0), (6, 6)).clone_owned(),
            rail_mass_matrix(&p)
        );
    }

    #[test]
    fn symmetric_and_dissipative() {
        let s = section_matrices(&TrackProperties::reference()).unwrap();
        assert!(is_symmetric(&s.mass, 1e-14));
        assert!(is_symmetric(&s.stiffness, 1e-14));
        assert!(is_symmetric(&s.damping, 1e-14));
        assert!(s.mass.clone().cholesky().is_some());
        let eig = s.damping.clone().symmetric_eigenvalues();
        assert!(eig.min() >= -1e-9 * eig.amax());
    }
}
