use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use super::element::RayleighDamping;
use super::local::{SLEEPER1, SLEEPER2, THETA1, THETA3, U1, U3};
use super::section::section_matrices;
use super::TrackProperties;
use crate::error::{Error, Result};

/// Second-order system `M ü + C u̇ + K u = f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    pub mass: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
}

impl Structure {
    pub fn new(mass: DMatrix<f64>, damping: DMatrix<f64>, stiffness: DMatrix<f64>) -> Self {
        assert_eq!(mass.shape(), stiffness.shape());
        assert_eq!(mass.shape(), damping.shape());
        Structure {
            mass,
            damping,
            stiffness,
        }
    }

    pub fn n_dof(&self) -> usize {
        self.mass.nrows()
    }

    pub fn is_undamped(&self) -> bool {
        self.damping.iter().all(|&c| c == 0.0)
    }

    /// Copy with the damping matrix zeroed.
    pub fn without_damping(&self) -> Self {
        Structure {
            mass: self.mass.clone(),
            damping: DMatrix::zeros(self.n_dof(), self.n_dof()),
            stiffness: self.stiffness.clone(),
        }
    }

    /// `½ u̇ᵀ M u̇ + ½ uᵀ K u`
    pub fn mechanical_energy(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        0.5 * v.dot(&(&self.mass * v)) + 0.5 * u.dot(&(&self.stiffness * u))
    }
}

/// What a global DOF represents. Node and sleeper indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    RailVertical { node: usize },
    RailRotation { node: usize },
    Sleeper { index: usize },
}

impl DofKind {
    /// Short label, 1-based: `rail_u3`, `rail_theta3`, `sleeper2`.
    pub fn label(&self) -> String {
        match self {
            DofKind::RailVertical { node } => format!("rail_u{}", node + 1),
            DofKind::RailRotation { node } => format!("rail_theta{}", node + 1),
            DofKind::Sleeper { index } => format!("sleeper{}", index + 1),
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, DofKind::RailRotation { .. })
    }
}

impl fmt::Display for DofKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Local-to-global DOF numbering of the assembled track.
///
/// Section 1 takes globals 1..8 in local order. Every later section shares its
/// `(u₁, θ₁, u_T1)` with the previous section's `(u₃, θ₃, u_T2)` and numbers its
/// remaining locals `(u₂, θ₂, u₃, θ₃, u_T2)` consecutively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    sections: Vec<[usize; 8]>,
    kinds: Vec<DofKind>,
}

impl DofMap {
    pub fn new(n_sections: usize) -> Self {
        assert!(n_sections >= 1);
        let mut sections: Vec<[usize; 8]> = Vec::with_capacity(n_sections);
        for j in 0..n_sections {
            let map = match sections.last() {
                None => [0, 1, 2, 3, 4, 5, 6, 7],
                Some(prev) => {
                    let base = 8 + 5 * (j - 1);
                    [
                        prev[U3],
                        prev[THETA3],
                        base,
                        base + 1,
                        base + 2,
                        base + 3,
                        prev[SLEEPER2],
                        base + 4,
                    ]
                }
            };
            sections.push(map);
        }
        let n_dof = 5 * n_sections + 3;
        let mut kinds = alloc::vec![DofKind::Sleeper { index: 0 }; n_dof];
        for (j, map) in sections.iter().enumerate() {
            for node in 0..3 {
                kinds[map[2 * node]] = DofKind::RailVertical { node: 2 * j + node };
                kinds[map[2 * node + 1]] = DofKind::RailRotation { node: 2 * j + node };
            }
            kinds[map[SLEEPER1]] = DofKind::Sleeper { index: j };
            kinds[map[SLEEPER2]] = DofKind::Sleeper { index: j + 1 };
        }
        DofMap { sections, kinds }
    }

    pub fn n_sections(&self) -> usize {
        self.sections.len()
    }

    pub fn n_dof(&self) -> usize {
        self.kinds.len()
    }

    pub fn n_sleepers(&self) -> usize {
        self.sections.len() + 1
    }

    pub fn n_rail_nodes(&self) -> usize {
        2 * self.sections.len() + 1
    }

    /// Global (0-based) index of local DOF `local` of section `section` (0-based).
    pub fn global(&self, section: usize, local: usize) -> usize {
        self.sections[section][local]
    }

    pub fn section(&self, section: usize) -> &[usize; 8] {
        &self.sections[section]
    }

    pub fn kind(&self, dof: usize) -> DofKind {
        self.kinds[dof]
    }

    pub fn kinds(&self) -> &[DofKind] {
        &self.kinds
    }

    pub fn sleeper_dof(&self, sleeper: usize) -> usize {
        if sleeper == 0 {
            self.sections[0][SLEEPER1]
        } else {
            self.sections[sleeper - 1][SLEEPER2]
        }
    }

    pub fn sleeper_dofs(&self) -> Vec<usize> {
        (0..self.n_sleepers())
            .map(|s| self.sleeper_dof(s))
            .collect()
    }

    pub fn rail_vertical_dof(&self, node: usize) -> usize {
        let (section, local) = if node == 0 {
            (0, U1)
        } else {
            ((node - 1) / 2, 2 * ((node - 1) % 2) + 2)
        };
        self.sections[section][local]
    }

    pub fn rail_rotation_dof(&self, node: usize) -> usize {
        let (section, local) = if node == 0 {
            (0, THETA1)
        } else {
            ((node - 1) / 2, 2 * ((node - 1) % 2) + 3)
        };
        self.sections[section][local]
    }

    pub fn rail_vertical_dofs(&self) -> Vec<usize> {
        (0..self.n_rail_nodes())
            .map(|n| self.rail_vertical_dof(n))
            .collect()
    }

    /// Number of sections whose ballast spring acts on `sleeper` (1 at the
    /// track ends, 2 for interior sleepers shared by two sections).
    pub fn support_count(&self, sleeper: usize) -> usize {
        let n = self.n_sections();
        if n == 1 || sleeper == 0 || sleeper == n {
            1
        } else {
            2
        }
    }
}

/// Global matrices of an `N`-section track.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub n_sections: usize,
    pub structure: Structure,
    pub dof_map: DofMap,
    pub props: TrackProperties,
    pub rayleigh: RayleighDamping,
}

impl AssembledSystem {
    pub fn n_dof(&self) -> usize {
        self.dof_map.n_dof()
    }
}

/// Sums the 8×8 section matrices into the global `5N + 3` system.
///
/// Every section brings its own two sleepers, railpads and ballast springs, so
/// an interior sleeper shared by sections `j` and `j+1` receives both
/// contributions (twice `m_T`, `k_s`, `k_b`, ...).
pub fn assemble_track(props: &TrackProperties, n_sections: usize) -> Result<AssembledSystem> {
    if n_sections == 0 {
        return Err(Error::InvalidParameter {
            field: "n_sections",
            reason: "at least one section is required".into(),
        });
    }
    let section = section_matrices(props)?;
    let dof_map = DofMap::new(n_sections);
    let n = dof_map.n_dof();
    let mut mass = DMatrix::zeros(n, n);
    let mut damping = DMatrix::zeros(n, n);
    let mut stiffness = DMatrix::zeros(n, n);
    for j in 0..n_sections {
        let map = dof_map.section(j);
        for a in 0..8 {
            for b in 0..8 {
                let (ga, gb) = (map[a], map[b]);
                mass[(ga, gb)] += section.mass[(a, b)];
                damping[(ga, gb)] += section.damping[(a, b)];
                stiffness[(ga, gb)] += section.stiffness[(a, b)];
            }
        }
    }
    Ok(AssembledSystem {
        n_sections,
        structure: Structure {
            mass,
            damping,
            stiffness,
        },
        dof_map,
        props: *props,
        rayleigh: section.rayleigh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_symmetric, relative_asymmetry};

    #[test]
    fn dof_counts() {
        for (n, dofs) in [(1, 8), (2, 13), (4, 23), (30, 153)] {
            let m = DofMap::new(n);
            assert_eq!(m.n_dof(), dofs);
            assert_eq!(m.n_dof(), 8 * n - 3 * (n - 1));
            assert_eq!(m.sleeper_dofs().len(), n + 1);
        }
    }

    #[test]
    fn sharing_rule() {
        let m = DofMap::new(3);
        assert_eq!(m.section(1), &[4, 5, 8, 9, 10, 11, 7, 12]);
        assert_eq!(m.section(2), &[10, 11, 13, 14, 15, 16, 12, 17]);
        for j in 1..3 {
            assert_eq!(m.global(j, U1), m.global(j - 1, U3));
            assert_eq!(m.global(j, THETA1), m.global(j - 1, THETA3));
            assert_eq!(m.global(j, SLEEPER1), m.global(j - 1, SLEEPER2));
        }
    }

    #[test]
    fn every_dof_labelled_once() {
        let m = DofMap::new(5);
        let mut verts = m.rail_vertical_dofs();
        let mut sleepers = m.sleeper_dofs();
        let mut rots: Vec<usize> = (0..m.n_rail_nodes())
            .map(|n| m.rail_rotation_dof(n))
            .collect();
        let mut all = Vec::new();
        all.append(&mut verts);
        all.append(&mut sleepers);
        all.append(&mut rots);
        all.sort_unstable();
        assert_eq!(all, (0..m.n_dof()).collect::<Vec<_>>());
        for node in 0..m.n_rail_nodes() {
            assert_eq!(
                m.kind(m.rail_vertical_dof(node)),
                DofKind::RailVertical { node }
            );
            assert_eq!(
                m.kind(m.rail_rotation_dof(node)),
                DofKind::RailRotation { node }
            );
        }
    }

    #[test]
    fn assembled_matrices_symmetric_and_mass_pd() {
        let p = TrackProperties::reference();
        for n in 1..=10 {
            let sys = assemble_track(&p, n).unwrap();
            let s = &sys.structure;
            assert!(relative_asymmetry(&s.mass) < 1e-10);
            assert!(is_symmetric(&s.stiffness, 1e-10));
            assert!(is_symmetric(&s.damping, 1e-10));
            assert!(s.mass.clone().cholesky().is_some(), "N = {n}");
        }
    }

    #[test]
    fn interior_sleeper_gets_both_sections() {
        let p = TrackProperties::reference();
        let sys = assemble_track(&p, 3).unwrap();
        let d = sys.dof_map.sleeper_dof(1);
        assert_eq!(sys.structure.mass[(d, d)], 2.0 * p.sleeper_mass);
        let end = sys.dof_map.sleeper_dof(0);
        assert_eq!(sys.structure.mass[(end, end)], p.sleeper_mass);
        assert_eq!(sys.dof_map.support_count(1), 2);
        assert_eq!(sys.dof_map.support_count(3), 1);
    }

    #[test]
    fn zero_damping_gives_zero_c() {
        let p = TrackProperties::reference().undamped();
        let sys = assemble_track(&p, 6).unwrap();
        assert!(sys.structure.is_undamped());
    }

    #[test]
    fn zero_sections_rejected() {
        assert!(assemble_track(&TrackProperties::reference(), 0).is_err());
    }
}
