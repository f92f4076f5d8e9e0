//! The hyperbolic extension `F̃ = F ⊕ ℤλ̃`, lifted reflections and the
//! central element `ς`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{self, RatMatrix};
use crate::rational::{format_rational, Rational};
use crate::root_lattice::{LatticeVector, RootSystemData};
use crate::weyl_action::{self, GeneratorSymbol, WeylWord};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedSystem {
    base: RootSystemData,
    ext_gram: RatMatrix,
    lambda_row: Vec<Rational>,
}

/// Rational coordinates on the base basis plus a `λ̃` coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedVector {
    pub f_part: Vec<Rational>,
    pub lambda_coeff: Rational,
}

impl ExtendedVector {
    pub fn from_lattice(x: &LatticeVector) -> Self {
        ExtendedVector {
            f_part: x.to_rational(),
            lambda_coeff: Rational::zero(),
        }
    }

    pub fn lambda(rank: usize) -> Self {
        ExtendedVector {
            f_part: vec![Rational::zero(); rank],
            lambda_coeff: Rational::one(),
        }
    }

    fn flat(&self) -> Vec<Rational> {
        let mut v = self.f_part.clone();
        v.push(self.lambda_coeff);
        v
    }

    fn from_flat(mut v: Vec<Rational>) -> Self {
        let lambda_coeff = v.pop().expect("nonempty");
        ExtendedVector {
            f_part: v,
            lambda_coeff,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_flat(self.flat().iter().zip(o.flat()).map(|(x, y)| x + y).collect())
    }

    pub fn scale(&self, k: Rational) -> Self {
        Self::from_flat(self.flat().iter().map(|x| x * k).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-Rational::one()))
    }
}

/// Extends `I` by `Ĩ(λ̃, α_{-1}) = Ĩ(λ̃, α_0) = 1/m0`, zero on the arms, and
/// `Ĩ(λ̃, λ̃) = 0`.
pub fn extend(sys: &RootSystemData) -> ExtendedSystem {
    let n = sys.rank();
    let inv_m0 = Rational::new(1, sys.m0() as i128);
    let mut lambda_row = vec![Rational::zero(); n + 1];
    lambda_row[0] = inv_m0;
    lambda_row[1] = inv_m0;
    let ext_gram = RatMatrix::from_fn(n + 1, n + 1, |i, j| match (i == n, j == n) {
        (false, false) => Rational::from_integer(*sys.gram().get(i, j) as i128),
        (true, _) => lambda_row[j],
        (false, true) => lambda_row[i],
    });
    ExtendedSystem {
        base: sys.clone(),
        ext_gram,
        lambda_row,
    }
}

impl ExtendedSystem {
    pub fn base(&self) -> &RootSystemData {
        &self.base
    }

    pub fn ext_gram(&self) -> &RatMatrix {
        &self.ext_gram
    }

    /// `Ĩ(λ̃, ·)` on the extended basis, `λ̃` last.
    pub fn lambda_row(&self) -> &[Rational] {
        &self.lambda_row
    }

    pub fn dim(&self) -> usize {
        self.base.rank() + 1
    }

    pub fn pairing(&self, x: &ExtendedVector, y: &ExtendedVector) -> Rational {
        self.ext_gram.bilinear(&x.flat(), &y.flat())
    }

    pub fn lambda(&self) -> ExtendedVector {
        ExtendedVector::lambda(self.base.rank())
    }

    pub fn embed(&self, x: &LatticeVector) -> ExtendedVector {
        ExtendedVector::from_lattice(x)
    }

    /// Dimension of the rational kernel of `Ĩ`.
    pub fn radical_dim(&self) -> usize {
        linalg::kernel(&self.ext_gram).len()
    }

    /// `γ - Ĩ(γ, α)·α`.
    pub fn tilde_reflect(&self, alpha: &LatticeVector, gamma: &ExtendedVector) -> Result<ExtendedVector> {
        let m = self.tilde_reflection_matrix(alpha)?;
        Ok(ExtendedVector::from_flat(m.mul_vec(&gamma.flat())))
    }

    pub fn tilde_reflection_matrix(&self, alpha: &LatticeVector) -> Result<RatMatrix> {
        // validates that α is a real root
        weyl_action::reflection_matrix(&self.base, alpha)?;
        let al = self.embed(alpha).flat();
        Ok(self.rank_one(&al, &self.ext_gram.mul_vec(&al), -Rational::one()))
    }

    fn rank_one(&self, x: &[Rational], y: &[Rational], s: Rational) -> RatMatrix {
        let n = self.dim();
        RatMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { Rational::one() } else { Rational::zero() };
            d + s * x[i] * y[j]
        })
    }

    /// `ς(γ) = γ - Ĩ(γ, b)·a`.
    pub fn sigma_map(&self, gamma: &ExtendedVector) -> ExtendedVector {
        ExtendedVector::from_flat(self.sigma_matrix().mul_vec(&gamma.flat()))
    }

    pub fn sigma_matrix(&self) -> RatMatrix {
        self.sigma_power_matrix(1)
    }

    /// Matrix of `ς^k`: `γ ↦ γ - k·Ĩ(γ, b)·a`.
    pub fn sigma_power_matrix(&self, k: i64) -> RatMatrix {
        let a = self.embed(self.base.a()).flat();
        let b = self.embed(self.base.b()).flat();
        self.rank_one(&a, &self.ext_gram.mul_vec(&b), Rational::from_integer(-(k as i128)))
    }

    /// Lifts a word symbol by symbol; a translation `r_v` lifts through its
    /// recursive reflection expansion.
    pub fn lift_word(&self, w: &WeylWord) -> Result<RatMatrix> {
        let mut m = RatMatrix::identity(self.dim());
        for s in w.symbols() {
            m = m.mul_mat(&self.lift_symbol(s)?);
        }
        Ok(m)
    }

    pub fn lift_symbol(&self, s: &GeneratorSymbol) -> Result<RatMatrix> {
        match *s {
            GeneratorSymbol::Reflection { vertex } => {
                self.tilde_reflection_matrix(&self.base.basis_vector(vertex)?)
            }
            GeneratorSymbol::Translation { vertex } => {
                Ok(self.lift_word(&translation_expansion(&self.base, vertex)?)?)
            }
            GeneratorSymbol::TranslationInverse { vertex } => Ok(self
                .lift_word(&translation_expansion(&self.base, vertex)?.inverse())?),
        }
    }

    /// Restriction of an extended matrix to the `F`-block.
    pub fn project_to_f(&self, m: &RatMatrix) -> RatMatrix {
        let n = self.base.rank();
        RatMatrix::from_fn(n, n, |i, j| *m.get(i, j))
    }

    pub fn preserves_form(&self, m: &RatMatrix) -> bool {
        m.congruence(&self.ext_gram) == self.ext_gram
    }

    /// If `m` equals `ς^k` for an integer `k`, returns `k`.
    pub fn sigma_exponent(&self, m: &RatMatrix) -> Option<i64> {
        let n = self.base.rank();
        // ς^k sends λ̃ to λ̃ - k·a; read k off the v_0 coordinate of the image
        let k = -*m.get(1, n);
        if !k.is_integer() {
            return None;
        }
        let k = k.to_integer() as i64;
        (self.sigma_power_matrix(k) == *m).then_some(k)
    }

    pub fn ext_gram_strings(&self) -> Vec<Vec<String>> {
        self.ext_gram
            .to_rows()
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect()
    }

    pub fn to_json(&self) -> ExtendedSystemJson {
        ExtendedSystemJson {
            ext_gram: self.ext_gram_strings(),
            lambda_row: self.lambda_row.iter().map(format_rational).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtendedSystemJson {
    pub ext_gram: Vec<Vec<String>>,
    pub lambda_row: Vec<String>,
}

/// Reflection word whose product is `r_v` in `W`.
pub fn translation_expansion(
    sys: &RootSystemData,
    v: crate::root_lattice::BasisLabel,
) -> Result<WeylWord> {
    use crate::root_lattice::BasisLabel;
    weyl_action::r_element(sys, v)?;
    let mut word = WeylWord(vec![
        GeneratorSymbol::w(BasisLabel::V0),
        GeneratorSymbol::w(BasisLabel::VMinus1),
    ]);
    if let BasisLabel::Arm { arm, depth } = v {
        for j in 1..=depth {
            let w = WeylWord(vec![GeneratorSymbol::w(BasisLabel::arm(arm, j))]);
            word = w.concat(&word).concat(&w).concat(&word.inverse());
        }
    }
    Ok(word)
}
