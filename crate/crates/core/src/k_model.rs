//! K-theory dictionary: the generators of Π as basis classes, Euler and
//! Mukai forms, slope charge, spherical twists and the map `Br → W`.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::charge_domains::ExactCharge;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::rational::Rational;
use crate::root_lattice::{BasisLabel, LatticeVector, RootClass, RootSystemData};
use crate::weyl_action::{self, GeneratorSymbol, LatticeIsometry, WeylWord};

pub fn euler_form(sys: &RootSystemData, x: &LatticeVector, y: &LatticeVector) -> Result<i64> {
    sys.pairing(x, y)
}

/// `(v, w) = -χ(v, w)`.
pub fn mukai(sys: &RootSystemData, x: &LatticeVector, y: &LatticeVector) -> Result<i64> {
    Ok(-sys.pairing(x, y)?)
}

pub fn is_spherical(sys: &RootSystemData, x: &LatticeVector) -> Result<bool> {
    Ok(mukai(sys, x, x)? == -2)
}

pub fn is_radical(sys: &RootSystemData, x: &LatticeVector) -> Result<bool> {
    sys.check_dim(x)?;
    Ok(sys.is_radical(x))
}

/// Degree and rank on the basis classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafFunctionals {
    pub deg: Vec<Rational>,
    pub rk: Vec<i64>,
}

impl SheafFunctionals {
    pub fn new(sys: &RootSystemData) -> Self {
        let deg = sys
            .labels()
            .iter()
            .map(|l| match l {
                BasisLabel::VMinus1 => Rational::from_integer(1),
                BasisLabel::V0 => Rational::zero(),
                BasisLabel::Arm { arm, .. } => {
                    Rational::new(1, sys.signature().weights()[arm - 1] as i128)
                }
            })
            .collect();
        let rk = sys
            .labels()
            .iter()
            .map(|l| match l {
                BasisLabel::VMinus1 | BasisLabel::V0 => 1,
                BasisLabel::Arm { .. } => 0,
            })
            .collect();
        SheafFunctionals { deg, rk }
    }

    pub fn deg_of(&self, x: &LatticeVector) -> Rational {
        x.coords()
            .iter()
            .zip(&self.deg)
            .map(|(&c, d)| Rational::from_integer(c as i128) * d)
            .fold(Rational::zero(), |s, t| s + t)
    }

    pub fn rk_of(&self, x: &LatticeVector) -> i64 {
        x.coords().iter().zip(&self.rk).map(|(c, r)| c * r).sum()
    }
}

/// `Z₀ = -deg + i·rk`.
pub fn z0_charge(sys: &RootSystemData) -> ExactCharge {
    let f = SheafFunctionals::new(sys);
    ExactCharge::new(
        f.deg
            .iter()
            .zip(&f.rk)
            .map(|(d, &r)| Complex::new(-d, Rational::from_integer(r as i128)))
            .collect(),
    )
}

/// `Z₀(α) ∈ H ∪ ℝ_{<0}` for a real or imaginary root `α`.
pub fn is_positive_root(sys: &RootSystemData, alpha: &LatticeVector) -> Result<bool> {
    if sys.classify_vector(alpha)? == RootClass::NotRoot {
        return Err(Error::NotRoot);
    }
    let z = z0_charge(sys).eval(alpha);
    let zero = Rational::zero();
    Ok(z.im > zero || (z.im == zero && z.re < zero))
}

/// The class `[p_*O_E]` has degree zero; it equals `b + k·a` with `k = deg(b)`.
pub fn sheaf_b_offset(sys: &RootSystemData) -> Rational {
    SheafFunctionals::new(sys).deg_of(sys.b())
}

pub fn sheaf_b(sys: &RootSystemData) -> Option<LatticeVector> {
    let k = sheaf_b_offset(sys);
    k.is_integer()
        .then(|| sys.b() + &(k.to_integer() as i64 * sys.a()))
}

/// One of the classes `t_i^j`, `O`, `O(1)` of Π, identified with a basis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiGenerator {
    pub label: BasisLabel,
}

impl PiGenerator {
    pub fn structure_sheaf() -> Self {
        PiGenerator {
            label: BasisLabel::V0,
        }
    }

    pub fn twisted_structure_sheaf() -> Self {
        PiGenerator {
            label: BasisLabel::VMinus1,
        }
    }

    pub fn torsion(arm: usize, j: usize) -> Self {
        PiGenerator {
            label: BasisLabel::arm(arm, j),
        }
    }

    pub fn all(sys: &RootSystemData) -> Vec<PiGenerator> {
        sys.labels().iter().map(|&label| PiGenerator { label }).collect()
    }

    pub fn class(&self, sys: &RootSystemData) -> Result<LatticeVector> {
        sys.basis_vector(self.label)
    }
}

impl fmt::Display for PiGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            BasisLabel::VMinus1 => write!(f, "O(1)"),
            BasisLabel::V0 => write!(f, "O"),
            BasisLabel::Arm { arm, depth } => write!(f, "t_{arm}^{depth}"),
        }
    }
}

/// `[G] ↦ [G] - χ(S, G)[S]`.
pub fn twist_action(sys: &RootSystemData, s: PiGenerator, x: &LatticeVector) -> Result<LatticeVector> {
    weyl_action::reflect(sys, &s.class(sys)?, x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum TwistSymbol {
    /// The spherical twist `Φ_S` for the Π class at `vertex`.
    #[serde(rename = "phi")]
    Twist { vertex: BasisLabel },
    #[serde(rename = "phiInv")]
    TwistInverse { vertex: BasisLabel },
    /// `ρ_v`, `v` in `Γ_a`.
    #[serde(rename = "rho")]
    Rho { vertex: BasisLabel },
    #[serde(rename = "rhoInv")]
    RhoInverse { vertex: BasisLabel },
}

impl TwistSymbol {
    pub fn inverse(&self) -> Self {
        match *self {
            TwistSymbol::Twist { vertex } => TwistSymbol::TwistInverse { vertex },
            TwistSymbol::TwistInverse { vertex } => TwistSymbol::Twist { vertex },
            TwistSymbol::Rho { vertex } => TwistSymbol::RhoInverse { vertex },
            TwistSymbol::RhoInverse { vertex } => TwistSymbol::Rho { vertex },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwistWord(pub Vec<TwistSymbol>);

impl TwistWord {
    pub fn inverse(&self) -> Self {
        TwistWord(self.0.iter().rev().map(TwistSymbol::inverse).collect())
    }

    pub fn concat(&self, other: &TwistWord) -> Self {
        TwistWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

/// `ρ_0 = Φ_O Φ_{O(1)}`, `ρ_{i,j} = Φ_{t_i^j} ρ_prev Φ_{t_i^j} ρ_prev⁻¹`.
pub fn rho_expansion(sys: &RootSystemData, v: BasisLabel) -> Result<TwistWord> {
    let twist = |vertex| TwistSymbol::Twist { vertex };
    match v {
        BasisLabel::VMinus1 => Err(Error::InvalidVertex(v)),
        _ if sys.index_of(v).is_none() => Err(Error::InvalidVertex(v)),
        BasisLabel::V0 => Ok(TwistWord(vec![twist(BasisLabel::V0), twist(BasisLabel::VMinus1)])),
        BasisLabel::Arm { arm, depth } => {
            let prev = if depth == 1 {
                BasisLabel::V0
            } else {
                BasisLabel::arm(arm, depth - 1)
            };
            let p = rho_expansion(sys, prev)?;
            let t = TwistWord(vec![twist(v)]);
            Ok(t.concat(&p).concat(&t).concat(&p.inverse()))
        }
    }
}

/// Word in the twists `Φ_S^{±1}` only.
pub fn expand_twists(sys: &RootSystemData, w: &TwistWord) -> Result<TwistWord> {
    let mut out = Vec::new();
    for s in &w.0 {
        match *s {
            TwistSymbol::Twist { vertex } | TwistSymbol::TwistInverse { vertex } => {
                sys.index_of(vertex).ok_or(Error::InvalidVertex(vertex))?;
                out.push(*s);
            }
            TwistSymbol::Rho { vertex } => out.extend(rho_expansion(sys, vertex)?.0),
            TwistSymbol::RhoInverse { vertex } => {
                out.extend(rho_expansion(sys, vertex)?.inverse().0)
            }
        }
    }
    Ok(TwistWord(out))
}

/// Image under `Φ_S ↦ w_S`.
pub fn br_to_weyl(sys: &RootSystemData, w: &TwistWord) -> Result<LatticeIsometry> {
    let mut m = IntMatrix::identity(sys.rank());
    for s in expand_twists(sys, w)?.0 {
        let v = match s {
            TwistSymbol::Twist { vertex } | TwistSymbol::TwistInverse { vertex } => vertex,
            _ => unreachable!("expanded words contain twists only"),
        };
        m = m.mul_mat(&weyl_action::simple_reflection(sys, v)?);
    }
    Ok(LatticeIsometry::new(sys, m).expect("products of reflections are isometries"))
}

/// The Weyl word obtained symbol by symbol: `Φ_S ↦ w_S`, `ρ_v ↦ r_v`.
pub fn weyl_image(w: &TwistWord) -> WeylWord {
    WeylWord(
        w.0.iter()
            .map(|s| match *s {
                TwistSymbol::Twist { vertex } | TwistSymbol::TwistInverse { vertex } => {
                    GeneratorSymbol::w(vertex)
                }
                TwistSymbol::Rho { vertex } => GeneratorSymbol::r(vertex),
                TwistSymbol::RhoInverse { vertex } => GeneratorSymbol::r_inv(vertex),
            })
            .collect(),
    )
}

/// `2 - χ(α, α)`: 0 for real roots, 2 for imaginary roots.
pub fn expected_ext1(sys: &RootSystemData, alpha: &LatticeVector) -> Result<i64> {
    if sys.classify_vector(alpha)? == RootClass::NotRoot {
        return Err(Error::NotRoot);
    }
    Ok(2 - euler_form(sys, alpha, alpha)?)
}
