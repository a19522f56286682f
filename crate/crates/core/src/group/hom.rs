
use crate::error::{Error, Result};
use crate::group::{rotation, GroupElement, GroupKind, GroupSpec};
use crate::linalg::Vector;

/// A registered Lie group homomorphism `Ψ` together with its differential.
#[derive(Clone, Debug)]
pub enum Homomorphism {
    Identity(GroupSpec),
    /// `su2 → so3`, `q ↦ (v ↦ q v q⁻¹)`; `dΨ` is the identity in our bases.
    Su2ToSo3,
    /// `abelian(d) → torus(d)`, the quotient by `2πℤᵈ`.
    AbelianToTorus(usize),
    /// `heisenberg3 → abelian(2)`, `(a, b, c) ↦ (a, b)`.
    HeisenbergToAbelian,
}

impl Homomorphism {
    pub fn by_name(name: &str, group: &GroupSpec) -> Result<Self> {
        match name {
            "identity" => Ok(Homomorphism::Identity(group.clone())),
            "double_cover" | "su2_to_so3" => Ok(Homomorphism::Su2ToSo3),
            "projection" => match group.kind() {
                GroupKind::Abelian(d) => Ok(Homomorphism::AbelianToTorus(d)),
                GroupKind::Heisenberg3 => Ok(Homomorphism::HeisenbergToAbelian),
                GroupKind::Su2 => Ok(Homomorphism::Su2ToSo3),
                _ => Err(Error::InvalidArgument(alloc::format!("no projection from {}", group.name()))),
            },
            other => Err(Error::InvalidArgument(alloc::format!("unknown homomorphism `{other}`"))),
        }
    }

    pub fn source(&self) -> GroupSpec {
        match self {
            Homomorphism::Identity(g) => g.clone(),
            Homomorphism::Su2ToSo3 => GroupSpec::su2(),
            Homomorphism::AbelianToTorus(d) => GroupSpec::new(GroupKind::Abelian(*d)).expect("valid size"),
            Homomorphism::HeisenbergToAbelian => GroupSpec::heisenberg3(),
        }
    }

    pub fn target(&self) -> GroupSpec {
        match self {
            Homomorphism::Identity(g) => g.clone(),
            Homomorphism::Su2ToSo3 => GroupSpec::so3(),
            Homomorphism::AbelianToTorus(d) => GroupSpec::new(GroupKind::Torus(*d)).expect("valid size"),
            Homomorphism::HeisenbergToAbelian => GroupSpec::new(GroupKind::Abelian(2)).expect("valid size"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Homomorphism::Identity(_) => "identity",
            Homomorphism::Su2ToSo3 => "su2_to_so3",
            Homomorphism::AbelianToTorus(_) => "abelian_to_torus",
            Homomorphism::HeisenbergToAbelian => "heisenberg_to_abelian",
        }
    }

    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        let target = self.target();
        let coords: Vector = match self {
            Homomorphism::Identity(_) => g.coords.clone(),
            Homomorphism::Su2ToSo3 => rotation::quat_rotation(&g.coords).into_vec(),
            Homomorphism::AbelianToTorus(_) => return target.exp(&g.coords),
            Homomorphism::HeisenbergToAbelian => g.coords[..2].to_vec(),
        };
        GroupElement {
            kind: target.kind(),
            coords,
        }
    }

    /// `dΨ(e)` applied to an algebra element.
    pub fn differential(&self, x: &[f64]) -> Vector {
        match self {
            Homomorphism::HeisenbergToAbelian => x[..2].to_vec(),
            _ => x.to_vec(),
        }
    }
}
